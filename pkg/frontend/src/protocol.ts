// Wire types for the control-server WebSocket protocol (JSON text frames).

export const EMOTIONS = [
  "anger", "disgust", "fear", "sadness", "surprise", "happiness", "neutral",
] as const;
export type Emotion = (typeof EMOTIONS)[number];

export const WAVEFORM_PRESETS = ["click", "chirp", "tone"] as const;
export type WaveformPreset = (typeof WAVEFORM_PRESETS)[number];

export interface StateMessage {
  type: "state";
  tick: number;
  time: number;
  base: { pos: [number, number, number]; rpy: [number, number, number] };
  joints: number[];
  behavior: string;
  emotion: string | null;
  heading_target: number | null;
}

export interface LocalizedEvent {
  type: "event";
  kind: "localized";
  azimuth: number;
  position: [number, number];
  emotion: string;
}

export interface ArbitratedEvent {
  type: "event";
  kind: "arbitrated";
  emotion: string;
  behavior: string;
  feedback: { clip: string; face: string };
}

export interface ErrorEvent {
  type: "event";
  kind: "error";
  message: string;
}

export type EventMessage = LocalizedEvent | ArbitratedEvent | ErrorEvent;
export type ServerMessage = StateMessage | EventMessage;

export interface PlaceSoundMessage {
  type: "place_sound";
  x: number;
  y: number;
  emotion: string | null;
  waveform: string | null;
}

export interface VideoFeaturesMessage {
  type: "video_features";
  features: number[];
}

export interface SetTerrainMessage {
  type: "set_terrain";
  kind: string;
  seed: number;
}

export interface PoseMessage {
  type: "pose";
  pos: [number, number, number];
  rpy: [number, number, number];
}

export interface PauseMessage { type: "pause" }
export interface ResumeMessage { type: "resume" }

export type ClientMessage =
  | PlaceSoundMessage
  | VideoFeaturesMessage
  | SetTerrainMessage
  | PoseMessage
  | PauseMessage
  | ResumeMessage;

export function parseServerMessage(text: string): ServerMessage {
  const doc = JSON.parse(text) as Record<string, unknown>;
  if (doc.type === "state" || doc.type === "event") {
    return doc as unknown as ServerMessage;
  }
  throw new Error(`unknown server message type: ${String(doc.type)}`);
}

export function placeSound(
  x: number,
  y: number,
  emotion: string | null,
  waveform: string | null = null,
): PlaceSoundMessage {
  return { type: "place_sound", x, y, emotion, waveform };
}
