// Stimulus form validation and playground pose slider throttling.

import {
  EMOTIONS,
  WAVEFORM_PRESETS,
  type PlaceSoundMessage,
  type PoseMessage,
} from "./protocol.js";

export interface StimulusForm {
  emotion: string | null;
  waveform: string | null;
  click: { x: number; y: number } | null;
}

export type FormResult =
  | { ok: true; message: PlaceSoundMessage }
  | { ok: false; error: string };

export function validateStimulus(form: StimulusForm): FormResult {
  if (form.click === null) {
    return { ok: false, error: "click a world position first" };
  }
  if (form.emotion === null && form.waveform === null) {
    return { ok: false, error: "select an emotion label or a waveform preset" };
  }
  if (form.emotion !== null && !(EMOTIONS as readonly string[]).includes(form.emotion)) {
    return { ok: false, error: `unknown emotion: ${form.emotion}` };
  }
  if (form.waveform !== null
      && !(WAVEFORM_PRESETS as readonly string[]).includes(form.waveform)) {
    return { ok: false, error: `unknown waveform preset: ${form.waveform}` };
  }
  return {
    ok: true,
    message: {
      type: "place_sound",
      x: form.click.x,
      y: form.click.y,
      emotion: form.emotion,
      waveform: form.waveform,
    },
  };
}

export const POSE_MIN_INTERVAL_MS = 100; // at most 10 pose messages per second

export interface PoseValues {
  pos: [number, number, number];
  rpy: [number, number, number];
}

// Six sliders feed `update`; outbound pose messages are throttled to the
// trailing edge so the final slider value is always sent.
export class PoseSliders {
  private lastSentAt: number | null = null;
  private pendingTimer = false;
  private values: PoseValues | null = null;

  constructor(
    private readonly send: (message: PoseMessage) => void,
    private readonly now: () => number,
    private readonly setTimer: (callback: () => void, ms: number) => void,
  ) {}

  update(values: PoseValues): void {
    this.values = values;
    const t = this.now();
    if (this.lastSentAt === null || t - this.lastSentAt >= POSE_MIN_INTERVAL_MS) {
      this.flush();
      return;
    }
    if (!this.pendingTimer) {
      this.pendingTimer = true;
      this.setTimer(() => {
        this.pendingTimer = false;
        if (this.values) this.flush();
      }, POSE_MIN_INTERVAL_MS - (t - this.lastSentAt));
    }
  }

  private flush(): void {
    if (!this.values) return;
    this.send({ type: "pose", pos: this.values.pos, rpy: this.values.rpy });
    this.lastSentAt = this.now();
    this.values = null;
  }
}
