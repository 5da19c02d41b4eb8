"""Live WebSocket service: one producer task steps the pipeline at the
PRF and broadcasts frames to every connected console.

Pacing uses absolute deadlines (t0 + n*PRI against the loop clock), so
jitter in one tick never accumulates into drift. Everything runs on a
single event loop: the producer and the per-connection command readers
interleave cooperatively, so command queues and pipeline state need no
locking, and commands land exactly at PRI boundaries.

Backpressure policy per client: JSON frames (bin samples, spectra, acks)
are never dropped; binary profile frames are skipped for a client whose
outbound queue is already backed up.
"""

from __future__ import annotations

import asyncio
import contextlib
import time

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .config import SystemConfig
from .pipeline import CommandError, Pipeline
from .scene import Scene
from .wire import (
    WireError,
    ack_message,
    encode_json,
    encode_profile,
    error_message,
    frame_message,
    hello_message,
    parse_control,
)

# outbound items queued per client before profile frames get dropped
_BACKPRESSURE_THRESHOLD = 8


class _Client:
    def __init__(self):
        self.queue: asyncio.Queue = asyncio.Queue()

    def send_json(self, text: str) -> None:
        self.queue.put_nowait(("t", text))

    def send_binary(self, payload: bytes) -> None:
        if self.queue.qsize() < _BACKPRESSURE_THRESHOLD:
            self.queue.put_nowait(("b", payload))


class Station:
    """Owns the pipeline and the broadcast fan-out."""

    def __init__(self, config: SystemConfig, scene: Scene):
        self.config = config
        self.pipeline = Pipeline(config, scene)
        self.clients: set = set()
        self._stop = asyncio.Event()
        self.frames_produced = 0

    def register(self) -> _Client:
        c = _Client()
        self.clients.add(c)
        return c

    def unregister(self, client: _Client) -> None:
        self.clients.discard(client)

    def submit(self, cmd: dict) -> dict:
        """Queue a control command; returns the ack or error reply."""
        try:
            self.pipeline.apply_command(cmd)
        except CommandError as e:
            return error_message(str(e), cmd.get("id"))
        return ack_message(cmd.get("id"), cmd["op"], self.pipeline.state.pulse_index)

    async def produce(self) -> None:
        pri = 1.0 / self.config.prf_hz
        loop = asyncio.get_running_loop()
        t0 = loop.time()
        n = 0
        while not self._stop.is_set():
            if self.config.realtime:
                delay = (t0 + n * pri) - loop.time()
                if delay > 0:
                    await asyncio.sleep(delay)
            else:
                await asyncio.sleep(0)
            n += 1
            result = self.pipeline.step()
            if result is None:
                continue
            self.frames_produced += 1
            msg = frame_message(result, self.config.prf_hz, self.pipeline.axis_mode)
            msg["wall_ms"] = time.time() * 1e3
            text = encode_json(msg)
            profile = encode_profile(
                result.pulse_index, result.profile.magnitude, self.config.profile_stride
            )
            for client in list(self.clients):
                client.send_json(text)
                client.send_binary(profile)

    def stop(self) -> None:
        self._stop.set()


async def _drain(ws: WebSocket, client: _Client) -> None:
    while True:
        kind, payload = await client.queue.get()
        if kind == "t":
            await ws.send_text(payload)
        else:
            await ws.send_bytes(payload)


def build_app(config: SystemConfig, scene: Scene) -> FastAPI:
    station = Station(config, scene)

    @contextlib.asynccontextmanager
    async def lifespan(_app):
        task = asyncio.create_task(station.produce())
        yield
        station.stop()
        task.cancel()
        with contextlib.suppress(asyncio.CancelledError):
            await task

    app = FastAPI(lifespan=lifespan)
    app.state.station = station

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        client = station.register()
        await ws.send_text(
            encode_json(hello_message(config, station.pipeline.renderer.scene,
                                      station.pipeline.state.monitor_bin))
        )
        sender = asyncio.create_task(_drain(ws, client))
        try:
            while True:
                text = await ws.receive_text()
                try:
                    cmd = parse_control(text)
                except WireError as e:
                    reply = error_message(str(e))
                else:
                    reply = station.submit(cmd)
                await ws.send_text(encode_json(reply))
        except WebSocketDisconnect:
            pass
        finally:
            station.unregister(client)
            sender.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await sender

    return app


def run_serve(config: SystemConfig, scene: Scene) -> None:
    import uvicorn

    app = build_app(config, scene)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
