import { describe, expect, it } from "vitest";

import type { ClientMsg, PulseMsg, WaypointMsg } from "../src/protocol";
import { parseServerMsg } from "../src/protocol";
import type { FeedbackSink, Transport } from "../src/session";
import { SessionController } from "../src/session";
import { PoseIntegrator } from "../src/steer";

class StubTransport implements Transport {
  sent: ClientMsg[] = [];
  send(msg: ClientMsg): void {
    this.sent.push(msg);
  }
  close(): void {}
}

class RecordingSink implements FeedbackSink {
  routes: WaypointMsg[][] = [];
  pulses: PulseMsg[] = [];
  voices: string[] = [];
  states: [string, number | null][] = [];
  errors: string[] = [];
  route(w: WaypointMsg[]) {
    this.routes.push(w);
  }
  pulse(p: PulseMsg) {
    this.pulses.push(p);
  }
  voice(t: string) {
    this.voices.push(t);
  }
  state(phase: string, waypoint: number | null) {
    this.states.push([phase, waypoint]);
  }
  error(m: string) {
    this.errors.push(m);
  }
}

function makeController() {
  const transport = new StubTransport();
  const sink = new RecordingSink();
  const controller = new SessionController(transport, sink);
  return { transport, sink, controller };
}

const PULSE: PulseMsg = {
  type: "pulse",
  t: 1.5,
  channel: "haptic",
  length_ms: 450,
  meaning: "direction",
  source: "direction",
};

describe("session controller", () => {
  it("produces no pulses locally when the server is stubbed silent", () => {
    const { sink, controller } = makeController();
    controller.start("entrance", "meeting_room", "event-a", true);
    const pose = new PoseIntegrator({ x: 0, y: 0, floor: "0", heading: 0 });
    for (let i = 0; i < 300; i++) {
      controller.sendPose(pose.tick({ forward: true, left: false, right: false }, 0.1));
    }
    expect(sink.pulses).toHaveLength(0);
    expect(controller.pulsesReceived).toHaveLength(0);
  });

  it("renders a received pulse exactly once and within 50 ms", () => {
    const { sink, controller } = makeController();
    controller.onMessage(PULSE);
    expect(sink.pulses).toEqual([PULSE]);
    expect(controller.renderLatenciesMs).toHaveLength(1);
    expect(controller.renderLatenciesMs[0]).toBeLessThanOrEqual(50);
  });

  it("tracks phase from state messages", () => {
    const { controller } = makeController();
    controller.onMessage({ type: "state", t: 0, phase: "following", waypoint: 0 });
    expect(controller.phase).toBe("following");
    expect(controller.arrived).toBe(false);
    controller.onMessage({ type: "state", t: 9, phase: "arrived", waypoint: 6 });
    expect(controller.arrived).toBe(true);
    expect(controller.currentWaypoint).toBe(6);
  });

  it("stores the route and forwards it to the sink", () => {
    const { sink, controller } = makeController();
    const waypoints: WaypointMsg[] = [
      { x: 0, y: 0, floor: "0", kind: "plain", label: null },
      { x: 0, y: 5, floor: "0", kind: "destination", label: null },
    ];
    controller.onMessage({ type: "route", waypoints });
    expect(controller.route).toEqual(waypoints);
    expect(sink.routes).toHaveLength(1);
  });

  it("surfaces server errors as a banner call", () => {
    const { sink, controller } = makeController();
    controller.onMessage({ type: "error", message: "no route from 'a' to 'b'" });
    expect(sink.errors).toEqual(["no route from 'a' to 'b'"]);
    expect(controller.lastError).toContain("no route");
  });

  it("ignores malformed frames", () => {
    const { sink, controller } = makeController();
    controller.onRaw("not json {{");
    controller.onRaw('{"type":"mystery"}');
    controller.onRaw("42");
    expect(sink.pulses).toHaveLength(0);
    expect(sink.errors).toHaveLength(0);
  });

  it("sends the protocol start frame", () => {
    const { transport, controller } = makeController();
    controller.start("entrance", "toilet", "compass-audio", false);
    expect(transport.sent[0]).toEqual({
      type: "start",
      from: "entrance",
      to: "toilet",
      mode: "compass-audio",
      voice: false,
    });
    controller.stop();
    expect(transport.sent.at(-1)).toEqual({ type: "stop" });
  });
});

describe("parseServerMsg", () => {
  it("round-trips valid frames", () => {
    expect(parseServerMsg(JSON.stringify(PULSE))).toEqual(PULSE);
  });

  it("rejects unknown or broken frames", () => {
    expect(parseServerMsg("")).toBeNull();
    expect(parseServerMsg("null")).toBeNull();
    expect(parseServerMsg('{"type":"smoke"}')).toBeNull();
  });
});
