// Browser entry point: wires the WebSocket client, arena canvas, stimulus
// form, and playground pose sliders together. All logic lives in the
// imported modules so it stays testable without a DOM.

import { DEFAULT_ARENA, RenderLoop, renderArena, screenToWorld } from "./arena.js";
import { ConsoleClient } from "./client.js";
import { PoseSliders, validateStimulus, type StimulusForm } from "./forms.js";
import { EMOTIONS, WAVEFORM_PRESETS } from "./protocol.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function boot(): void {
  const canvas = el<HTMLCanvasElement>("arena");
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");

  const url = `ws://${location.host}/ws`;
  const client = new ConsoleClient({
    url,
    connect: (u) => new WebSocket(u) as never,
    queueWhileDisconnected: false,
  });
  client.start();

  const loop = new RenderLoop(
    (state) => renderArena(ctx, state, client.view.markers),
    (cb) => requestAnimationFrame(cb),
  );
  const banner = el<HTMLDivElement>("banner");
  const emotionPanel = el<HTMLDivElement>("emotion-panel");
  const log = el<HTMLUListElement>("event-log");

  setInterval(() => {
    banner.hidden = client.view.status === "open";
    const state = client.view.latest;
    if (state) {
      loop.submit(state);
      emotionPanel.textContent =
        `behavior: ${state.behavior}  emotion: ${state.emotion ?? "-"}`;
    }
    while (log.childElementCount < client.view.eventLog.length) {
      const entry = client.view.eventLog[log.childElementCount]!;
      const item = document.createElement("li");
      item.textContent = `[${entry.tick}] ${JSON.stringify(entry.event)}`;
      log.appendChild(item);
    }
  }, 25);

  const form: StimulusForm = { emotion: "anger", waveform: null, click: null };
  const emotionSelect = el<HTMLSelectElement>("emotion");
  for (const name of ["", ...EMOTIONS]) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name || "(none)";
    emotionSelect.appendChild(option);
  }
  emotionSelect.value = "anger";
  const waveformSelect = el<HTMLSelectElement>("waveform");
  for (const name of ["", ...WAVEFORM_PRESETS]) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name || "(none)";
    waveformSelect.appendChild(option);
  }

  canvas.addEventListener("click", (event) => {
    const rect = canvas.getBoundingClientRect();
    form.click = screenToWorld(
      event.clientX - rect.left, event.clientY - rect.top, DEFAULT_ARENA);
    form.emotion = emotionSelect.value || null;
    form.waveform = waveformSelect.value || null;
    const result = validateStimulus(form);
    const status = el<HTMLDivElement>("form-status");
    if (!result.ok) {
      status.textContent = result.error;
      return;
    }
    status.textContent = client.send(result.message)
      ? "" : "disconnected: message rejected";
  });

  const sliders = new PoseSliders(
    (message) => { client.send(message); },
    () => performance.now(),
    (cb, ms) => { setTimeout(cb, ms); },
  );
  const ids = ["px", "py", "pz", "roll", "pitch", "yaw"] as const;
  const readPose = () => {
    const v = ids.map((id) => Number(el<HTMLInputElement>(id).value));
    return {
      pos: [v[0]!, v[1]!, v[2]!] as [number, number, number],
      rpy: [v[3]!, v[4]!, v[5]!] as [number, number, number],
    };
  };
  for (const id of ids) {
    el<HTMLInputElement>(id).addEventListener("input", () => {
      sliders.update(readPose());
    });
  }
}

boot();
