"""WebSocket telemetry service around an Orchestrator.

One asyncio task runs the simulation loop at the control rate and fans
telemetry out to every connected client through bounded per-client queues;
a slow client drops frames, never the loop.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import logging

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.websockets import WebSocketState

from ..errors import EinuError
from ..sim.terrain import generate_terrain
from .orchestrator import Orchestrator, SoundEvent, VideoFeatureEvent

log = logging.getLogger("einu.server")

CLIENT_QUEUE_SIZE = 64


def parse_client_message(doc: dict, orchestrator: Orchestrator) -> None:
    """Apply one client message to the orchestrator (called on the loop
    thread; raises EinuError for malformed or disallowed messages)."""
    kind = doc.get("type")
    if kind == "place_sound":
        orchestrator.post(SoundEvent(
            position=(float(doc["x"]), float(doc["y"])),
            emotion=doc.get("emotion"),
            waveform=doc.get("waveform"),
            timestamp=orchestrator.world.time))
    elif kind == "video_features":
        orchestrator.post(VideoFeatureEvent(
            features=np.asarray(doc["features"], dtype=float),
            timestamp=orchestrator.world.time))
    elif kind == "set_terrain":
        orchestrator.set_terrain(
            generate_terrain(str(doc["kind"]), seed=int(doc.get("seed", 0))))
    elif kind == "pose":
        orchestrator.set_pose(doc["pos"], doc["rpy"])
    elif kind == "pause":
        orchestrator.paused = True
    elif kind == "resume":
        orchestrator.paused = False
    else:
        raise EinuError(f"unknown message type {kind!r}")


class TelemetryHub:
    """Fan-out of loop messages to per-client bounded queues."""

    def __init__(self):
        self.clients: dict[WebSocket, asyncio.Queue] = {}

    def attach(self, ws: WebSocket) -> asyncio.Queue:
        q: asyncio.Queue = asyncio.Queue(maxsize=CLIENT_QUEUE_SIZE)
        self.clients[ws] = q
        return q

    def detach(self, ws: WebSocket) -> None:
        self.clients.pop(ws, None)

    def broadcast(self, text: str) -> None:
        for q in self.clients.values():
            try:
                q.put_nowait(text)
            except asyncio.QueueFull:
                # drop the frame for this client; the loop never blocks
                pass


def create_app(orchestrator: Orchestrator,
               realtime: bool = True) -> FastAPI:
    """FastAPI app exposing /ws; the simulation loop starts with the app.

    With realtime=False the loop runs as fast as possible (tests)."""
    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.loop_task = asyncio.create_task(run_loop())
        try:
            yield
        finally:
            app.state.loop_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await app.state.loop_task

    app = FastAPI(lifespan=lifespan)
    hub = TelemetryHub()
    app.state.orchestrator = orchestrator
    app.state.hub = hub

    async def run_loop():
        control_dt = orchestrator.config.physics.control_dt
        loop = asyncio.get_running_loop()
        next_t = loop.time()
        while True:
            try:
                messages = orchestrator.tick()
            except EinuError as exc:
                messages = [{"type": "event", "kind": "error",
                             "message": str(exc)}]
            for m in messages:
                hub.broadcast(json.dumps(m))
            if realtime:
                next_t += control_dt
                await asyncio.sleep(max(0.0, next_t - loop.time()))
            else:
                await asyncio.sleep(0)

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        queue = hub.attach(ws)

        async def sender():
            while True:
                text = await queue.get()
                await ws.send_text(text)

        send_task = asyncio.create_task(sender())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    parse_client_message(json.loads(raw), orchestrator)
                except (EinuError, KeyError, TypeError, ValueError) as exc:
                    await ws.send_text(json.dumps(
                        {"type": "event", "kind": "error",
                         "message": str(exc)}))
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            hub.detach(ws)
            if ws.client_state != WebSocketState.DISCONNECTED:
                with contextlib.suppress(RuntimeError):
                    await ws.close()

    return app
