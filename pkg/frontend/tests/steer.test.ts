import { describe, expect, it } from "vitest";

import { PoseIntegrator, normalizeAngle } from "../src/steer";

const START = { x: 0, y: 0, floor: "0", heading: 0 };
const NO_KEYS = { forward: false, left: false, right: false };

describe("pose integrator", () => {
  it("stays put with no keys pressed", () => {
    const pose = new PoseIntegrator(START);
    for (let i = 0; i < 50; i++) pose.tick(NO_KEYS, 0.1);
    expect(pose.x).toBe(0);
    expect(pose.y).toBe(0);
    expect(pose.t).toBeCloseTo(5.0, 9);
  });

  it("advances 12 m in 10 s at 1.2 m/s", () => {
    const pose = new PoseIntegrator(START);
    for (let i = 0; i < 100; i++) {
      pose.tick({ ...NO_KEYS, forward: true }, 0.1, { speedMps: 1.2, turnRateDps: 120 });
    }
    expect(pose.y).toBeCloseTo(12.0, 6);
    expect(pose.x).toBeCloseTo(0.0, 6);
  });

  it("rotates at the configured turn rate", () => {
    const pose = new PoseIntegrator(START);
    for (let i = 0; i < 5; i++) {
      pose.tick({ ...NO_KEYS, right: true }, 0.15, { speedMps: 1.2, turnRateDps: 120 });
    }
    expect(pose.heading).toBeCloseTo(90.0, 6);
    for (let i = 0; i < 10; i++) {
      pose.tick({ ...NO_KEYS, left: true }, 0.15, { speedMps: 1.2, turnRateDps: 120 });
    }
    expect(pose.heading).toBeCloseTo(-90.0, 6);
  });

  it("moves along the heading direction", () => {
    const pose = new PoseIntegrator({ ...START, heading: 90 });
    pose.tick({ ...NO_KEYS, forward: true }, 1.0, { speedMps: 2.0, turnRateDps: 120 });
    expect(pose.x).toBeCloseTo(2.0, 6);
    expect(pose.y).toBeCloseTo(0.0, 6);
  });

  it("emits well-formed pose frames", () => {
    const pose = new PoseIntegrator(START);
    const frame = pose.tick(NO_KEYS, 0.1);
    expect(frame).toEqual({
      type: "pose",
      t: 0.1,
      x: 0,
      y: 0,
      floor: "0",
      heading: 0,
    });
  });
});

describe("normalizeAngle", () => {
  it("wraps into (-180, 180]", () => {
    expect(normalizeAngle(350)).toBe(-10);
    expect(normalizeAngle(-180)).toBe(180);
    expect(normalizeAngle(540)).toBe(180);
    expect(normalizeAngle(0)).toBe(0);
  });
});
