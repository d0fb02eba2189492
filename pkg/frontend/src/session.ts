// Client session state. All guidance comes from the server: the only
// place a pulse is ever rendered is the handler for a server "pulse"
// message, and the latency from receipt to render is instrumented so
// tests can hold the <= 50 ms budget.

import type {
  ClientMsg,
  ModeName,
  PoseMsg,
  PulseMsg,
  ServerMsg,
  WaypointMsg,
} from "./protocol";
import { parseServerMsg } from "./protocol";

export interface Transport {
  send(msg: ClientMsg): void;
  close(): void;
}

export interface FeedbackSink {
  route(waypoints: WaypointMsg[]): void;
  pulse(msg: PulseMsg): void;
  voice(text: string): void;
  state(phase: string, waypoint: number | null): void;
  error(message: string): void;
}

export class SessionController {
  phase = "idle";
  currentWaypoint: number | null = null;
  route: WaypointMsg[] | null = null;
  readonly pulsesReceived: PulseMsg[] = [];
  readonly voicesReceived: string[] = [];
  /** receipt-to-render time of every pulse, milliseconds */
  readonly renderLatenciesMs: number[] = [];
  lastError: string | null = null;

  constructor(
    private readonly transport: Transport,
    private readonly sink: FeedbackSink,
    private readonly now: () => number = () =>
      typeof performance !== "undefined" ? performance.now() : Date.now(),
  ) {}

  start(from: string, to: string, mode: ModeName, voice: boolean): void {
    this.phase = "idle";
    this.currentWaypoint = null;
    this.route = null;
    this.lastError = null;
    this.transport.send({ type: "start", from, to, mode, voice });
  }

  sendPose(pose: PoseMsg): void {
    this.transport.send(pose);
  }

  stop(): void {
    this.transport.send({ type: "stop" });
  }

  get arrived(): boolean {
    return this.phase === "arrived";
  }

  onRaw(data: string): void {
    const msg = parseServerMsg(data);
    if (msg) this.onMessage(msg);
  }

  onMessage(msg: ServerMsg): void {
    const receivedAt = this.now();
    switch (msg.type) {
      case "route":
        this.route = msg.waypoints;
        this.sink.route(msg.waypoints);
        break;
      case "pulse":
        this.pulsesReceived.push(msg);
        this.sink.pulse(msg);
        this.renderLatenciesMs.push(this.now() - receivedAt);
        break;
      case "voice":
        this.voicesReceived.push(msg.text);
        this.sink.voice(msg.text);
        break;
      case "state":
        this.phase = msg.phase;
        this.currentWaypoint = msg.waypoint;
        this.sink.state(msg.phase, msg.waypoint);
        break;
      case "error":
        this.lastError = msg.message;
        this.sink.error(msg.message);
        break;
    }
  }
}
