// Client-side view of a server session. The console holds no simulation
// authority: everything rendered comes from acknowledged server messages.

import type {
  ClientMessage,
  EventMessage,
  ServerMessage,
  StateMessage,
} from "./protocol.js";

export const EVENT_LOG_CAPACITY = 200;

export type ConnectionStatus = "connecting" | "open" | "reconnecting";
export type Tool = "sound" | "pose" | "terrain";

export interface LoggedEvent {
  seq: number;
  tick: number;
  event: EventMessage;
}

export interface RecordedMessage {
  tick: number;
  message: ClientMessage;
}

export interface SoundMarker {
  x: number;
  y: number;
  azimuth: number | null;
  confirmed: boolean;
}

export class SessionView {
  latest: StateMessage | null = null;
  status: ConnectionStatus = "connecting";
  tool: Tool = "sound";
  markers: SoundMarker[] = [];
  readonly outbound: RecordedMessage[] = [];

  private log: LoggedEvent[] = [];
  private nextSeq = 0;

  get eventLog(): readonly LoggedEvent[] {
    return this.log;
  }

  ingest(message: ServerMessage): void {
    if (message.type === "state") {
      this.latest = message;
      return;
    }
    this.log.push({ seq: this.nextSeq++, tick: this.currentTick(), event: message });
    if (this.log.length > EVENT_LOG_CAPACITY) {
      this.log = this.log.slice(this.log.length - EVENT_LOG_CAPACITY);
    }
    if (message.kind === "localized") {
      const pending = this.markers.find((m) => !m.confirmed);
      if (pending) {
        pending.confirmed = true;
        pending.azimuth = message.azimuth;
      }
    }
  }

  // Records an outbound message against the last acknowledged tick so the
  // session can be replayed headlessly against the same seed.
  record(message: ClientMessage): void {
    this.outbound.push({ tick: this.currentTick(), message });
    if (message.type === "place_sound") {
      this.markers.push({ x: message.x, y: message.y, azimuth: null, confirmed: false });
    }
  }

  currentTick(): number {
    return this.latest ? this.latest.tick : 0;
  }

  recordedLogNdjson(): string {
    return this.outbound.map((entry) => JSON.stringify(entry)).join("\n");
  }
}
