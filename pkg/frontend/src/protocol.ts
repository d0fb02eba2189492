// Wire protocol of the guidance session service. JSON text messages,
// one guidance session per WebSocket connection; the server is
// authoritative and the client only renders what it is sent.

export type ModeName = "compass-haptic" | "compass-audio" | "event-a" | "event-b";

export const MODE_NAMES: ModeName[] = [
  "compass-haptic",
  "compass-audio",
  "event-a",
  "event-b",
];

export interface PoseMsg {
  type: "pose";
  t: number;
  x: number;
  y: number;
  floor: string;
  heading: number;
}

export type ClientMsg =
  | { type: "start"; from: string; to: string; mode: ModeName; voice: boolean }
  | PoseMsg
  | { type: "stop" };

export interface WaypointMsg {
  x: number;
  y: number;
  floor: string;
  kind: string;
  label: string | null;
}

export interface PulseMsg {
  type: "pulse";
  t: number;
  channel: "haptic" | "audio";
  length_ms: number;
  meaning: string;
  source: string;
}

export type ServerMsg =
  | { type: "route"; waypoints: WaypointMsg[] }
  | PulseMsg
  | { type: "voice"; t: number; text: string }
  | { type: "state"; t: number | null; phase: string; waypoint: number | null }
  | { type: "error"; message: string };

const SERVER_TYPES = new Set(["route", "pulse", "voice", "state", "error"]);

/** Parse one server frame; null for anything that is not a known message. */
export function parseServerMsg(data: string): ServerMsg | null {
  let obj: unknown;
  try {
    obj = JSON.parse(data);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null) return null;
  const type = (obj as { type?: unknown }).type;
  if (typeof type !== "string" || !SERVER_TYPES.has(type)) return null;
  return obj as ServerMsg;
}

// Map document served by GET /map.
export interface MapPoi {
  id: string;
  name: string;
  x: number;
  y: number;
  floor: string;
}

export interface MapFloor {
  id: string;
  width_m: number;
  height_m: number;
  walls: [number, number, number, number][];
}

export interface MapDoc {
  name: string;
  floors: MapFloor[];
  pois: MapPoi[];
  routes: { id: string; from: string; to: string }[];
}
