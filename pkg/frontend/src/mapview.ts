// Canvas rendering: floor plan with walls and route, the pedestrian
// marker, and the high-contrast arrow view that replaces the map and
// points where to go next.

import { palette } from "./palette";
import type { MapFloor, WaypointMsg } from "./protocol";
import { normalizeAngle } from "./steer";

export interface ViewState {
  floor: MapFloor | null;
  route: WaypointMsg[] | null;
  pose: { x: number; y: number; floor: string; heading: number };
  currentWaypoint: number | null;
  arrowView: boolean;
}

export function bearingTo(
  pose: { x: number; y: number },
  target: { x: number; y: number },
): number {
  return (Math.atan2(target.x - pose.x, target.y - pose.y) * 180) / Math.PI;
}

/** Direction to go, relative to the pedestrian's heading, degrees. */
export function arrowAngle(view: ViewState): number | null {
  if (!view.route || view.currentWaypoint === null) return null;
  const target = view.route[Math.min(view.currentWaypoint, view.route.length - 1)];
  if (!target || target.floor !== view.pose.floor) return null;
  const dx = target.x - view.pose.x;
  const dy = target.y - view.pose.y;
  if (Math.hypot(dx, dy) < 1e-6) return 0;
  return normalizeAngle(bearingTo(view.pose, target) - view.pose.heading);
}

export class MapView {
  constructor(private readonly canvas: HTMLCanvasElement) {}

  render(view: ViewState): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.fillStyle = palette.background;
    ctx.fillRect(0, 0, width, height);
    if (view.arrowView) {
      this.renderArrow(ctx, view);
    } else {
      this.renderMap(ctx, view);
    }
  }

  private renderMap(ctx: CanvasRenderingContext2D, view: ViewState): void {
    const floor = view.floor;
    if (!floor) return;
    const pad = 20;
    const sx = (this.canvas.width - 2 * pad) / floor.width_m;
    const sy = (this.canvas.height - 2 * pad) / floor.height_m;
    const s = Math.min(sx, sy);
    // y grows north; canvas y grows down
    const tx = (x: number) => pad + (x + floor.width_m * 0.1) * s * 0.85;
    const ty = (y: number) => this.canvas.height - pad - y * s * 0.85;

    ctx.strokeStyle = palette.panel;
    ctx.lineWidth = 1;
    ctx.strokeRect(tx(0), ty(floor.height_m), floor.width_m * s * 0.85, floor.height_m * s * 0.85);

    ctx.strokeStyle = palette.text;
    ctx.lineWidth = 2;
    for (const [x1, y1, x2, y2] of floor.walls) {
      ctx.beginPath();
      ctx.moveTo(tx(x1), ty(y1));
      ctx.lineTo(tx(x2), ty(y2));
      ctx.stroke();
    }

    if (view.route) {
      ctx.strokeStyle = palette.route;
      ctx.lineWidth = 3;
      ctx.beginPath();
      let started = false;
      for (const w of view.route) {
        if (w.floor !== floor.id) continue;
        if (!started) {
          ctx.moveTo(tx(w.x), ty(w.y));
          started = true;
        } else {
          ctx.lineTo(tx(w.x), ty(w.y));
        }
      }
      ctx.stroke();
      for (const w of view.route) {
        if (w.floor !== floor.id) continue;
        ctx.fillStyle = w.kind === "destination" ? palette.accent : palette.route;
        ctx.beginPath();
        ctx.arc(tx(w.x), ty(w.y), w.kind === "plain" ? 2 : 4, 0, Math.PI * 2);
        ctx.fill();
      }
    }

    if (view.pose.floor === floor.id) {
      const px = tx(view.pose.x);
      const py = ty(view.pose.y);
      const rad = (view.pose.heading * Math.PI) / 180;
      ctx.fillStyle = palette.walker;
      ctx.beginPath();
      ctx.arc(px, py, 6, 0, Math.PI * 2);
      ctx.fill();
      ctx.strokeStyle = palette.walker;
      ctx.lineWidth = 3;
      ctx.beginPath();
      ctx.moveTo(px, py);
      ctx.lineTo(px + 14 * Math.sin(rad), py - 14 * Math.cos(rad));
      ctx.stroke();
    }
  }

  private renderArrow(ctx: CanvasRenderingContext2D, view: ViewState): void {
    const angle = arrowAngle(view);
    const cx = this.canvas.width / 2;
    const cy = this.canvas.height / 2;
    if (angle === null) {
      ctx.fillStyle = palette.text;
      ctx.font = "24px sans-serif";
      ctx.textAlign = "center";
      ctx.fillText("no target", cx, cy);
      return;
    }
    const size = Math.min(cx, cy) * 0.7;
    ctx.save();
    ctx.translate(cx, cy);
    ctx.rotate((angle * Math.PI) / 180);
    ctx.fillStyle = palette.accent;
    ctx.beginPath();
    ctx.moveTo(0, -size);
    ctx.lineTo(size * 0.6, size * 0.5);
    ctx.lineTo(0, size * 0.15);
    ctx.lineTo(-size * 0.6, size * 0.5);
    ctx.closePath();
    ctx.fill();
    ctx.restore();
  }
}
