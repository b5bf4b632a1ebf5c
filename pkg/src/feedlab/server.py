"""Websocket transport: one socket per client, JSON messages both ways.

All mechanism lives in the Hub; this module only shuttles text frames and
runs the periodic broadcast ticker.  Requires the ``server`` extra
(fastapi + uvicorn).
"""

from __future__ import annotations

import asyncio
from contextlib import asynccontextmanager

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import protocol
from .service import TICK_THROTTLE_MS, Connection, Hub


async def _tick_loop(hub: Hub) -> None:
    while True:
        await asyncio.sleep(TICK_THROTTLE_MS / 1000.0)
        for code in list(hub.rooms):
            hub.maybe_tick(code)


def build_app(hub: Hub) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        ticker = asyncio.create_task(_tick_loop(hub))
        try:
            yield
        finally:
            ticker.cancel()
            hub.close()

    app = FastAPI(title="feedlab", lifespan=lifespan)

    @app.get("/health")
    async def health():
        return {"ok": True, "rooms": sorted(hub.rooms)}

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        outgoing: asyncio.Queue = asyncio.Queue()
        conn = Connection(on_send=outgoing.put_nowait)

        async def drain():
            while True:
                message = await outgoing.get()
                await websocket.send_text(protocol.serialize(message))

        sender = asyncio.create_task(drain())
        try:
            while True:
                text = await websocket.receive_text()
                hub.handle(conn, text)
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            if conn.room_code is not None and conn.session_id is not None:
                room = hub.rooms.get(conn.room_code)
                if room is not None:
                    with room.lock:
                        room.connections.pop(conn.session_id, None)

    return app


def serve(hub: Hub, host: str = "0.0.0.0", port: int = 8000) -> None:
    import uvicorn

    uvicorn.run(build_app(hub), host=host, port=port)
