// Browser WebSocket transport with capped-backoff reconnect. On
// connection loss the session is paused and the status callback lets
// the page offer a reconnect.

import type { ClientMsg } from "./protocol";
import type { Transport } from "./session";

export type NetStatus = "connecting" | "open" | "closed";

export function connectSession(
  url: string,
  onRaw: (data: string) => void,
  onStatus: (status: NetStatus) => void,
): Transport {
  let ws: WebSocket | null = null;
  let closed = false;
  let retryMs = 500;

  const open = () => {
    onStatus("connecting");
    ws = new WebSocket(url);
    ws.onopen = () => {
      retryMs = 500;
      onStatus("open");
    };
    ws.onmessage = (ev) => {
      if (typeof ev.data === "string") onRaw(ev.data);
    };
    ws.onclose = () => {
      onStatus("closed");
      if (!closed) {
        setTimeout(open, retryMs);
        retryMs = Math.min(retryMs * 2, 8000);
      }
    };
  };
  open();

  return {
    send(msg: ClientMsg) {
      if (ws && ws.readyState === WebSocket.OPEN) ws.send(JSON.stringify(msg));
    },
    close() {
      closed = true;
      ws?.close();
    },
  };
}
