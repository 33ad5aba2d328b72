import { describe, expect, it } from "vitest";

import type { EventMessage, StateMessage } from "../src/protocol.js";
import { EVENT_LOG_CAPACITY, SessionView } from "../src/session.js";

function state(tick: number): StateMessage {
  return {
    type: "state", tick, time: tick * 0.025,
    base: { pos: [0, 0, 0.28], rpy: [0, 0, 0] },
    joints: [0, 0, 0, 0, 0, 0, 0, 0],
    behavior: "walk", emotion: null, heading_target: null,
  };
}

function errorEvent(message: string): EventMessage {
  return { type: "event", kind: "error", message };
}

describe("SessionView", () => {
  it("keeps only the latest state", () => {
    const view = new SessionView();
    view.ingest(state(1));
    view.ingest(state(2));
    expect(view.latest?.tick).toBe(2);
  });

  it("logs every event exactly once, in arrival order", () => {
    const view = new SessionView();
    for (let i = 0; i < 50; i++) view.ingest(errorEvent(`e${i}`));
    const messages = view.eventLog.map((entry) =>
      entry.event.kind === "error" ? entry.event.message : "");
    expect(messages).toEqual(Array.from({ length: 50 }, (_, i) => `e${i}`));
    const seqs = view.eventLog.map((entry) => entry.seq);
    expect(new Set(seqs).size).toBe(50);
  });

  it("caps the event log at the ring-buffer size, keeping the newest", () => {
    const view = new SessionView();
    for (let i = 0; i < EVENT_LOG_CAPACITY + 37; i++) view.ingest(errorEvent(`e${i}`));
    expect(view.eventLog.length).toBe(EVENT_LOG_CAPACITY);
    const first = view.eventLog[0]!.event;
    expect(first.kind === "error" && first.message).toBe("e37");
    const last = view.eventLog[EVENT_LOG_CAPACITY - 1]!.event;
    expect(last.kind === "error" && last.message)
      .toBe(`e${EVENT_LOG_CAPACITY + 36}`);
  });

  it("confirms the pending sound marker on a localized event", () => {
    const view = new SessionView();
    view.ingest(state(1));
    view.record({ type: "place_sound", x: 2, y: 0, emotion: "anger", waveform: null });
    expect(view.markers[0]).toMatchObject({ confirmed: false, azimuth: null });
    view.ingest({
      type: "event", kind: "localized",
      azimuth: 0.01, position: [2, 0], emotion: "anger",
    });
    expect(view.markers[0]).toMatchObject({ confirmed: true, azimuth: 0.01 });
  });

  it("records outbound messages against the last acknowledged tick", () => {
    const view = new SessionView();
    view.ingest(state(7));
    view.record({ type: "pause" });
    expect(view.outbound).toEqual([{ tick: 7, message: { type: "pause" } }]);
    expect(view.recordedLogNdjson()).toBe('{"tick":7,"message":{"type":"pause"}}');
  });
});
