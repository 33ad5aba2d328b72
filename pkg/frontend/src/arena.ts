// Top-down arena renderer. World frame: +x right, +y up; the canvas y
// axis is flipped so a yaw of 0 draws the robot arrow along the +x
// screen axis and an azimuth of pi/2 draws a ray along +y.

import type { StateMessage } from "./protocol.js";
import type { SoundMarker } from "./session.js";

// Subset of CanvasRenderingContext2D the renderer needs; injectable so
// tests can record draw calls without a DOM.
export interface Context2DLike {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  strokeStyle: string | unknown;
  fillStyle: string | unknown;
  lineWidth: number;
}

export interface ArenaOptions {
  width: number;
  height: number;
  metersPerPixel: number;
  center: { x: number; y: number };
}

export const DEFAULT_ARENA: ArenaOptions = {
  width: 600,
  height: 600,
  metersPerPixel: 0.02,
  center: { x: 0, y: 0 },
};

export function worldToScreen(
  wx: number,
  wy: number,
  opts: ArenaOptions,
): { x: number; y: number } {
  return {
    x: opts.width / 2 + (wx - opts.center.x) / opts.metersPerPixel,
    y: opts.height / 2 - (wy - opts.center.y) / opts.metersPerPixel,
  };
}

export function screenToWorld(
  sx: number,
  sy: number,
  opts: ArenaOptions,
): { x: number; y: number } {
  return {
    x: opts.center.x + (sx - opts.width / 2) * opts.metersPerPixel,
    y: opts.center.y - (sy - opts.height / 2) * opts.metersPerPixel,
  };
}

const ROBOT_ARROW_M = 0.4;
const HEADING_RAY_M = 1.5;
const MIC_ARM_M = 0.1;

function ray(
  ctx: Context2DLike,
  fromWx: number,
  fromWy: number,
  angle: number,
  lengthM: number,
  opts: ArenaOptions,
): void {
  const from = worldToScreen(fromWx, fromWy, opts);
  const to = worldToScreen(
    fromWx + lengthM * Math.cos(angle),
    fromWy + lengthM * Math.sin(angle),
    opts,
  );
  ctx.beginPath();
  ctx.moveTo(from.x, from.y);
  ctx.lineTo(to.x, to.y);
  ctx.stroke();
}

export function renderArena(
  ctx: Context2DLike,
  state: StateMessage,
  markers: readonly SoundMarker[],
  opts: ArenaOptions = DEFAULT_ARENA,
): void {
  ctx.clearRect(0, 0, opts.width, opts.height);
  const [wx, wy] = state.base.pos;
  const yaw = state.base.rpy[2];

  // microphone cross rides the trunk
  ctx.strokeStyle = "#888";
  ctx.lineWidth = 1;
  for (const angle of [0, Math.PI / 2, Math.PI, (3 * Math.PI) / 2]) {
    ray(ctx, wx, wy, yaw + angle, MIC_ARM_M, opts);
  }

  // robot pose arrow
  ctx.strokeStyle = "#0a0";
  ctx.lineWidth = 2;
  ray(ctx, wx, wy, yaw, ROBOT_ARROW_M, opts);

  // heading target ray (world azimuth)
  if (state.heading_target !== null) {
    ctx.strokeStyle = "#f80";
    ctx.lineWidth = 2;
    ray(ctx, wx, wy, state.heading_target, HEADING_RAY_M, opts);
  }

  // sound markers: hollow while pending, filled once localized
  for (const marker of markers) {
    const p = worldToScreen(marker.x, marker.y, opts);
    ctx.beginPath();
    ctx.arc(p.x, p.y, 5, 0, 2 * Math.PI);
    if (marker.confirmed) {
      ctx.fillStyle = "#d22";
      ctx.fill();
    } else {
      ctx.strokeStyle = "#d22";
      ctx.lineWidth = 1;
      ctx.stroke();
    }
  }
}

export type FrameScheduler = (callback: () => void) => void;

// Decouples rendering from message ingestion: `submit` overwrites a
// latest-state buffer and at most one draw is scheduled at a time, so a
// flood of frames drops intermediates but always ends on the newest one.
export class RenderLoop {
  lastDrawnTick: number | null = null;

  private pending: StateMessage | null = null;
  private scheduled = false;

  constructor(
    private readonly draw: (state: StateMessage) => void,
    private readonly schedule: FrameScheduler,
  ) {}

  submit(state: StateMessage): void {
    this.pending = state;
    if (this.scheduled) return;
    this.scheduled = true;
    this.schedule(() => {
      this.scheduled = false;
      if (this.pending) {
        const state = this.pending;
        this.pending = null;
        this.draw(state);
        this.lastDrawnTick = state.tick;
      }
    });
  }
}
