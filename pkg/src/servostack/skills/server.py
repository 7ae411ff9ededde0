"""WebSocket gateway in front of the skill runtime.

The server owns transport concerns only: token auth, per-client bounded
queues, telemetry decimation, and the background task that steps the
robot.  Every frame a client sends goes straight to
``SkillRuntime.handle_message``; everything the runtime wants said comes
back out through one writer task per client, so frames never interleave.
"""

from __future__ import annotations

import asyncio
import contextlib
from dataclasses import dataclass
from json import JSONDecodeError

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .runtime import PROTOCOL_VERSION, SkillRuntime

DEFAULT_PORT = 8787
DEFAULT_TELEMETRY_EVERY = 5
AUTH_FAILED_CLOSE_CODE = 4403


@dataclass
class ServerConfig:
    token: str
    port: int = DEFAULT_PORT
    tick_period_s: float = 0.02
    max_queue: int = 256


class _Client:
    def __init__(self, websocket: WebSocket, max_queue: int):
        self.websocket = websocket
        self.queue: asyncio.Queue = asyncio.Queue(maxsize=max_queue)
        self.telemetry_every: int | None = None

    def offer(self, message: dict) -> None:
        """Enqueue, shedding the oldest frame when the consumer lags."""
        while True:
            try:
                self.queue.put_nowait(message)
                return
            except asyncio.QueueFull:
                with contextlib.suppress(asyncio.QueueEmpty):
                    self.queue.get_nowait()


def create_app(runtime: SkillRuntime, stepper, config: ServerConfig) -> FastAPI:
    """``stepper.step_once()`` must advance sim, control loop, and runtime."""
    clients: set[_Client] = set()
    state = {"tick": 0}

    async def pump():
        while True:
            stepper.step_once()
            state["tick"] += 1
            pushes = runtime.take_pushes()
            for client in list(clients):
                for push in pushes:
                    client.offer(push)
                every = client.telemetry_every
                if every and state["tick"] % every == 0:
                    snapshot = runtime.telemetry_snapshot()
                    if snapshot is not None:
                        client.offer(snapshot)
            await asyncio.sleep(config.tick_period_s)

    @contextlib.asynccontextmanager
    async def lifespan(app):
        task = asyncio.create_task(pump())
        try:
            yield
        finally:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    app = FastAPI(lifespan=lifespan)

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok", "protocol_version": PROTOCOL_VERSION}

    @app.get("/skills")
    async def skills(token: str = ""):
        if token != config.token:
            return {"error": "bad_token"}
        return {"skills": runtime.registry.describe()}

    async def send_loop(client: _Client):
        with contextlib.suppress(Exception):
            while True:
                await client.websocket.send_json(await client.queue.get())

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        if websocket.query_params.get("token") != config.token:
            await websocket.close(code=AUTH_FAILED_CLOSE_CODE)
            return
        await websocket.accept()
        client = _Client(websocket, config.max_queue)
        clients.add(client)
        client.offer(
            {
                "type": "hello",
                "protocol_version": PROTOCOL_VERSION,
                "skills": runtime.registry.describe(),
                "face": runtime.face.state,
            }
        )
        sender = asyncio.create_task(send_loop(client))
        try:
            while True:
                try:
                    message = await websocket.receive_json()
                except JSONDecodeError:
                    client.offer(
                        {
                            "type": "error",
                            "error": "bad_json",
                            "detail": "frames must be JSON objects",
                        }
                    )
                    continue
                replies = runtime.handle_message(message)
                for reply in replies:
                    if reply.get("type") == "subscribed":
                        client.telemetry_every = reply["every_n_ticks"]
                    client.offer(reply)
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await sender
            clients.discard(client)

    return app
