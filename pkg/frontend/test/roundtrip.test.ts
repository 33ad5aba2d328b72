// Live round trip against the Python control server, plus headless replay
// of the console-recorded message log.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { fileURLToPath } from "node:url";
import path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { ConsoleClient, type SocketLike } from "../src/client.js";
import type { ServerMessage } from "../src/protocol.js";
import { parseServerMessage } from "../src/protocol.js";

const PORT = 18743;
const URL_ = `ws://127.0.0.1:${PORT}/ws`;
const HERE = path.dirname(fileURLToPath(import.meta.url));
const REPLAY = path.join(HERE, "..", "scripts", "replay.py");

let server: ChildProcess;

function wsAdapter(url: string): SocketLike {
  const socket = new WebSocket(url);
  const adapter: SocketLike = {
    send: (data) => socket.send(data),
    close: () => socket.close(),
    onopen: null,
    onclose: null,
    onmessage: null,
  };
  socket.onopen = () => adapter.onopen?.();
  socket.onclose = () => adapter.onclose?.();
  socket.onerror = () => { /* surfaces as close */ };
  socket.onmessage = (event) => adapter.onmessage?.({ data: String(event.data) });
  return adapter;
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitFor(
  predicate: () => boolean, timeoutMs: number, what: string,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!predicate()) {
    if (Date.now() > deadline) throw new Error(`timed out waiting for ${what}`);
    await sleep(10);
  }
}

async function serverReady(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const ok = await new Promise<boolean>((resolve) => {
      const probe = new WebSocket(URL_);
      probe.onopen = () => { probe.close(); resolve(true); };
      probe.onerror = () => resolve(false);
    });
    if (ok) return;
    if (Date.now() > deadline) throw new Error("server did not come up");
    await sleep(200);
  }
}

beforeAll(async () => {
  server = spawn("einu",
    ["run", "--terrain", "flat", "--seed", "0", "--serve", `127.0.0.1:${PORT}`],
    { stdio: "ignore" });
  await serverReady(20000);
}, 30000);

afterAll(() => {
  server.kill("SIGINT");
});

function runReplay(ndjson: string): ServerMessage[] {
  const result = spawnSync("python3", [REPLAY, "--terrain", "flat", "--seed", "0"],
    { input: ndjson, encoding: "utf8" });
  expect(result.status).toBe(0);
  return result.stdout.trim().split("\n").map(parseServerMessage);
}

describe("criterion 13: console round trip", () => {
  it("places a sound, sees localized + heading change within 2 frames, "
     + "and replays the recorded log to identical telemetry", async () => {
    const received: ServerMessage[] = [];
    const client = new ConsoleClient({
      url: URL_,
      connect: (url) => {
        const adapter = wsAdapter(url);
        const inner = adapter.onmessage?.bind(adapter);
        void inner;
        return new Proxy(adapter, {
          set(target, prop, value) {
            if (prop === "onmessage" && typeof value === "function") {
              target.onmessage = (event) => {
                received.push(parseServerMessage(String(event.data)));
                (value as (e: { data: unknown }) => void)(event);
              };
              return true;
            }
            return Reflect.set(target, prop, value);
          },
        });
      },
    });
    client.start();
    await waitFor(() => client.view.status === "open", 5000, "open socket");
    await waitFor(() => client.view.latest !== null, 5000, "first state frame");

    // freeze the world so the replayed geometry matches the live one
    expect(client.send({ type: "pause" })).toBe(true);
    const pausedAt = client.view.currentTick();
    await waitFor(() => client.view.currentTick() > pausedAt + 1, 5000, "paused frame");

    expect(client.view.latest!.heading_target).toBeNull();
    const sentAtIndex = received.length;
    expect(client.send(
      { type: "place_sound", x: 2, y: 0, emotion: "anger", waveform: null },
    )).toBe(true);

    await waitFor(
      () => received.slice(sentAtIndex).some(
        (m) => m.type === "event" && m.kind === "localized"),
      5000, "localized event");
    const localizedIndex = received.findIndex(
      (m, i) => i >= sentAtIndex && m.type === "event" && m.kind === "localized");
    const localized = received[localizedIndex]!;
    if (localized.type !== "event" || localized.kind !== "localized") {
      throw new Error("unreachable");
    }

    // the heading-target change must be rendered within 2 state frames of
    // the localized event
    const isState = (m: ServerMessage): m is Extract<ServerMessage, { type: "state" }> =>
      m.type === "state";
    await waitFor(
      () => received.slice(localizedIndex).filter(isState).length >= 2,
      5000, "two more state frames");
    const statesAfter = received.slice(localizedIndex).filter(isState).slice(0, 2);
    expect(statesAfter.some((s) => s.heading_target !== null)).toBe(true);
    const liveHeading = statesAfter.find((s) => s.heading_target !== null)!
      .heading_target!;

    // exactly-once, in-order event log
    const loggedSeqs = client.view.eventLog.map((entry) => entry.seq);
    expect(loggedSeqs).toEqual([...loggedSeqs].sort((a, b) => a - b));
    expect(new Set(loggedSeqs).size).toBe(loggedSeqs.length);

    // headless replay of the recorded message log is deterministic and
    // reproduces the same localization geometry
    const ndjson = client.view.recordedLogNdjson();
    const replay1 = runReplay(ndjson);
    const replay2 = runReplay(ndjson);
    expect(JSON.stringify(replay1)).toBe(JSON.stringify(replay2));

    const replayLocalized = replay1.find(
      (m) => m.type === "event" && m.kind === "localized");
    expect(replayLocalized).toBeDefined();
    if (replayLocalized?.type === "event" && replayLocalized.kind === "localized") {
      expect(Math.abs(replayLocalized.azimuth - localized.azimuth)).toBeLessThan(0.1);
    }
    const replayHeading = replay1
      .filter((m): m is Extract<ServerMessage, { type: "state" }> => m.type === "state")
      .map((s) => s.heading_target)
      .find((h) => h !== null);
    expect(replayHeading).not.toBeNull();
    expect(Math.abs((replayHeading ?? 99) - liveHeading)).toBeLessThan(0.1);

    client.stop();
    console.log(
      `\n[PASS] criterion 13: console round trip (localized azimuth `
      + `${localized.azimuth.toFixed(3)} rad, heading ${liveHeading.toFixed(3)} rad, `
      + `replay deterministic)`);
  }, 30000);
});
