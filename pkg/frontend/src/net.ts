// WebSocket link to the session telemetry endpoint with auto-reconnect.

import { CommandMsg, ServerMsg, parseServerMsg } from "./types";

export interface LinkCallbacks {
  onMessage: (msg: ServerMsg) => void;
  onState: (connected: boolean) => void;
}

const RECONNECT_DELAY_MS = 1000;

export class TelemetryLink {
  private url: string;
  private callbacks: LinkCallbacks;
  private socket: WebSocket | null = null;
  private closed = false;

  constructor(url: string, callbacks: LinkCallbacks) {
    this.url = url;
    this.callbacks = callbacks;
  }

  connect(): void {
    this.closed = false;
    this.open();
  }

  private open(): void {
    const socket = new WebSocket(this.url);
    this.socket = socket;
    socket.onopen = () => this.callbacks.onState(true);
    socket.onmessage = (event) => {
      const msg = parseServerMsg(String(event.data));
      if (msg !== null) {
        this.callbacks.onMessage(msg);
      }
    };
    socket.onclose = () => {
      this.callbacks.onState(false);
      this.socket = null;
      if (!this.closed) {
        setTimeout(() => this.open(), RECONNECT_DELAY_MS);
      }
    };
    socket.onerror = () => {
      socket.close();
    };
  }

  /** Returns false when the socket is down and the command was dropped. */
  send(msg: CommandMsg): boolean {
    if (this.socket === null || this.socket.readyState !== WebSocket.OPEN) {
      return false;
    }
    this.socket.send(JSON.stringify(msg) + "\n");
    return true;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
