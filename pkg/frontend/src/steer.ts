// Keyboard steering: integrates the virtual pedestrian's pose from held
// keys. Headings are compass degrees in (-180, 180], 0 along +y,
// positive clockwise, matching the engine's frame.

import type { PoseMsg } from "./protocol";

export interface Keys {
  forward: boolean;
  left: boolean;
  right: boolean;
}

export interface SteerConfig {
  speedMps: number;
  turnRateDps: number;
}

export const DEFAULT_STEER: SteerConfig = { speedMps: 1.2, turnRateDps: 120 };

export function normalizeAngle(a: number): number {
  let r = a % 360;
  if (r <= -180) r += 360;
  if (r > 180) r -= 360;
  return r;
}

export class PoseIntegrator {
  x: number;
  y: number;
  floor: string;
  heading: number;
  t = 0;

  constructor(start: { x: number; y: number; floor: string; heading: number }) {
    this.x = start.x;
    this.y = start.y;
    this.floor = start.floor;
    this.heading = normalizeAngle(start.heading);
  }

  /** Advance by dt seconds under the held keys and return the pose frame. */
  tick(keys: Keys, dt: number, cfg: SteerConfig = DEFAULT_STEER): PoseMsg {
    let turn = 0;
    if (keys.left) turn -= cfg.turnRateDps * dt;
    if (keys.right) turn += cfg.turnRateDps * dt;
    this.heading = normalizeAngle(this.heading + turn);
    if (keys.forward) {
      const rad = (this.heading * Math.PI) / 180;
      this.x += cfg.speedMps * dt * Math.sin(rad);
      this.y += cfg.speedMps * dt * Math.cos(rad);
    }
    this.t += dt;
    return this.pose();
  }

  pose(): PoseMsg {
    return {
      type: "pose",
      t: this.t,
      x: this.x,
      y: this.y,
      floor: this.floor,
      heading: this.heading,
    };
  }

  teleport(x: number, y: number, floor: string, heading: number): void {
    this.x = x;
    this.y = y;
    this.floor = floor;
    this.heading = normalizeAngle(heading);
  }
}
