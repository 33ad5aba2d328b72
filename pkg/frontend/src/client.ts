// WebSocket session wrapper: reconnects with a visible banner, feeds the
// SessionView, and records every outbound message for headless replay.

import { parseServerMessage, type ClientMessage } from "./protocol.js";
import { SessionView } from "./session.js";

// Minimal socket surface so tests (and the `ws` package) can stand in
// for the browser WebSocket.
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ConsoleClientOptions {
  url: string;
  connect: SocketFactory;
  reconnectDelayMs?: number;
  setTimer?: (callback: () => void, ms: number) => void;
  // When disconnected, sends are either queued for the next connection or
  // rejected — visible behavior, never a silent drop.
  queueWhileDisconnected?: boolean;
}

export class ConsoleClient {
  readonly view = new SessionView();

  private socket: SocketLike | null = null;
  private readonly queue: ClientMessage[] = [];
  private closed = false;

  constructor(private readonly options: ConsoleClientOptions) {}

  start(): void {
    this.open();
  }

  stop(): void {
    this.closed = true;
    this.socket?.close();
  }

  send(message: ClientMessage): boolean {
    if (this.view.status !== "open" || !this.socket) {
      if (this.options.queueWhileDisconnected) {
        this.queue.push(message);
        return true;
      }
      return false;
    }
    this.view.record(message);
    this.socket.send(JSON.stringify(message));
    return true;
  }

  private open(): void {
    const socket = this.options.connect(this.options.url);
    this.socket = socket;
    socket.onopen = () => {
      this.view.status = "open";
      const backlog = this.queue.splice(0);
      for (const message of backlog) this.send(message);
    };
    socket.onmessage = (event) => {
      this.view.ingest(parseServerMessage(String(event.data)));
    };
    socket.onclose = () => {
      this.socket = null;
      if (this.closed) return;
      this.view.status = "reconnecting";
      const delay = this.options.reconnectDelayMs ?? 1000;
      const setTimer = this.options.setTimer
        ?? ((cb: () => void, ms: number) => setTimeout(cb, ms));
      setTimer(() => {
        if (!this.closed) this.open();
      }, delay);
    };
  }
}
