// End-to-end protocol conformance: spawn the session service, run a
// start -> pose stream -> arrived session through the client stack
// (SessionController + PoseIntegrator) over a real WebSocket, with an
// autopilot standing in for the human at the keyboard.

import { type ChildProcess, spawn } from "node:child_process";
import { fileURLToPath } from "node:url";
import path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import type { ClientMsg, PulseMsg, WaypointMsg } from "../src/protocol";
import type { FeedbackSink } from "../src/session";
import { SessionController } from "../src/session";
import { normalizeAngle, PoseIntegrator } from "../src/steer";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const MAP_PATH = path.resolve(HERE, "../../src/pulsenav/data/reference_map.json");
const PORT = 18000 + Math.floor(Math.random() * 10000);

let server: ChildProcess | null = null;
let serverUp = false;

async function waitForServer(): Promise<boolean> {
  for (let i = 0; i < 100; i++) {
    try {
      const res = await fetch(`http://127.0.0.1:${PORT}/map`);
      if (res.ok) return true;
    } catch {
      // not listening yet
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  return false;
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "pulsenav", "serve", "--map", MAP_PATH, "--port", String(PORT)],
    { stdio: "ignore" },
  );
  server.on("error", () => {
    serverUp = false;
  });
  serverUp = await waitForServer();
});

afterAll(() => {
  server?.kill();
});

class CountingSink implements FeedbackSink {
  pulses = 0;
  voices: string[] = [];
  errors: string[] = [];
  route(_w: WaypointMsg[]): void {}
  pulse(_p: PulseMsg): void {
    this.pulses += 1;
  }
  voice(t: string): void {
    this.voices.push(t);
  }
  state(_phase: string, _waypoint: number | null): void {}
  error(m: string): void {
    this.errors.push(m);
  }
}

function wsTransport(ws: WebSocket) {
  return {
    send(msg: ClientMsg) {
      ws.send(JSON.stringify(msg));
    },
    close() {
      ws.close();
    },
  };
}

const settle = () => new Promise((r) => setTimeout(r, 5));

describe("live session against the service", () => {
  it("completes start -> pose stream -> arrived with fast rendering", async (ctx) => {
    if (!serverUp) ctx.skip();
    const ws = new WebSocket(`ws://127.0.0.1:${PORT}/ws`);
    await new Promise<void>((resolve, reject) => {
      ws.once("open", () => resolve());
      ws.once("error", reject);
    });
    const sink = new CountingSink();
    const controller = new SessionController(wsTransport(ws), sink);
    ws.on("message", (data) => controller.onRaw(data.toString()));

    controller.start("entrance", "meeting_room", "event-a", true);
    for (let i = 0; i < 200 && !controller.route; i++) await settle();
    expect(controller.route, "route message").not.toBeNull();
    const waypoints = controller.route!;
    expect(waypoints).toHaveLength(7);

    // autopilot: steer with the keyboard model toward each waypoint
    const pose = new PoseIntegrator({
      x: waypoints[0].x,
      y: waypoints[0].y,
      floor: waypoints[0].floor,
      heading: 0,
    });
    let target = 1;
    const dt = 0.1;
    for (let step = 0; step < 2500 && !controller.arrived; step++) {
      const wp = waypoints[Math.min(target, waypoints.length - 1)];
      const bearing =
        (Math.atan2(wp.x - pose.x, wp.y - pose.y) * 180) / Math.PI;
      const dev = normalizeAngle(bearing - pose.heading);
      const keys = {
        forward: Math.abs(dev) < 60,
        left: dev < -3,
        right: dev > 3,
      };
      controller.sendPose(pose.tick(keys, dt));
      if (
        Math.hypot(wp.x - pose.x, wp.y - pose.y) < 0.9 &&
        target < waypoints.length - 1
      ) {
        target += 1;
      }
      if (step % 5 === 0) await settle();
    }
    for (let i = 0; i < 100 && !controller.arrived; i++) await settle();
    ws.close();

    expect(controller.arrived, "session reaches arrived").toBe(true);
    // poses pipelined while the arrived state was in flight bounce back
    // with a benign error; anything else is a real failure
    const realErrors = sink.errors.filter((e) => !e.includes("already arrived"));
    expect(realErrors).toEqual([]);
    expect(sink.voices[0]).toBe("navigation started");
    expect(sink.voices.at(-1)).toBe("destination reached");
    const meanings = new Set(controller.pulsesReceived.map((p) => p.meaning));
    expect(meanings.has("completion")).toBe(true);
    expect(meanings.has("success")).toBe(true);
    expect(meanings.has("direction")).toBe(true);
    expect(meanings.has("distance")).toBe(true);

    // every received pulse rendered within the 50 ms budget
    expect(controller.renderLatenciesMs.length).toBe(sink.pulses);
    expect(Math.max(...controller.renderLatenciesMs)).toBeLessThanOrEqual(50);
  });

  it("reports unknown destinations as error messages", async (ctx) => {
    if (!serverUp) ctx.skip();
    const ws = new WebSocket(`ws://127.0.0.1:${PORT}/ws`);
    await new Promise<void>((resolve, reject) => {
      ws.once("open", () => resolve());
      ws.once("error", reject);
    });
    const sink = new CountingSink();
    const controller = new SessionController(wsTransport(ws), sink);
    ws.on("message", (data) => controller.onRaw(data.toString()));
    controller.start("entrance", "narnia", "event-a", false);
    for (let i = 0; i < 200 && sink.errors.length === 0; i++) await settle();
    ws.close();
    expect(sink.errors).toHaveLength(1);
    expect(sink.errors[0]).toContain("narnia");
  });
});
