"""WebSocket gateway bridging the engine to browser clients.

The engine runs on its own thread; snapshots flow out through a bounded
drop-oldest buffer (a stalled viewer never blocks the stepping loop) and
inbound messages become SteerEvents on the engine's live queue.  Steering
is accepted only from the first client that says hello; later clients are
read-only viewers.
"""

from __future__ import annotations

import asyncio
import collections
import logging
import queue
import threading

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import engine
from .control import Gains
from .scenarios import Scenario, SteerEvent
from .wire import WireMessage, WireError, decode, error_message, state_message

logger = logging.getLogger(__name__)

SNAPSHOT_BUFFER = 64


class EngineBridge:
    """Shared state between the engine thread and websocket sessions."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.live_events: queue.Queue = queue.Queue()
        self.snapshots = collections.deque(maxlen=SNAPSHOT_BUFFER)
        self.latest = None
        self.seq = 0
        self.lock = threading.Lock()
        self.stop = threading.Event()
        self.writer_id: int | None = None
        self.result = None
        self.thread = threading.Thread(target=self._run, daemon=True)

    def _sink(self, snap) -> None:
        with self.lock:
            self.snapshots.append(snap)
            self.latest = snap
            self.seq += 1

    def _run(self) -> None:
        try:
            self.result = engine.run(
                self.scenario,
                sink=self._sink,
                live_events=self.live_events,
                realtime=True,
                should_stop=self.stop.is_set,
            )
        except Exception:
            logger.exception("engine thread aborted")
            self.stop.set()

    def start(self) -> None:
        self.thread.start()

    def shutdown(self) -> None:
        self.stop.set()
        # Unblock a paused engine waiting on the queue.
        self.live_events.put(SteerEvent(0.0, "resume"))
        self.thread.join(timeout=5.0)

    def submit(self, msg: WireMessage) -> None:
        kind_map = {
            "steer": ("heading_delta", lambda p: float(p["radians"])),
            "speed": ("set_speed", lambda p: float(p["mps"])),
            "gains": ("set_gains", lambda p: Gains(p["lambda1"], p["lambda2"], p["lambda3"])),
            "pause": ("pause", lambda p: None),
            "resume": ("resume", lambda p: None),
            "reset": ("reset", lambda p: None),
        }
        kind, getval = kind_map[msg.type]
        self.live_events.put(SteerEvent(0.0, kind, getval(msg.payload)))


def build_app(bridge: EngineBridge) -> FastAPI:
    app = FastAPI()
    app.state.bridge = bridge
    client_counter = {"n": 0}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        client_counter["n"] += 1
        client_id = client_counter["n"]
        sender_task = None
        try:
            # Handshake: wait for hello, then reply with scenario digest and
            # the most recent snapshot.
            while True:
                raw = await ws.receive_text()
                try:
                    msg = decode(raw)
                except WireError as exc:
                    await ws.send_text(error_message(str(exc)).encode())
                    continue
                if msg.type == "hello":
                    break
                await ws.send_text(error_message("say hello first").encode())

            if bridge.writer_id is None:
                bridge.writer_id = client_id
            is_writer = bridge.writer_id == client_id
            await ws.send_text(WireMessage("hello", {
                "digest": bridge.scenario.digest(),
                "dt": bridge.scenario.dt,
                "n_agents": bridge.scenario.formation.n_agents,
                "writer": is_writer,
            }).encode())
            with bridge.lock:
                latest, seen = bridge.latest, bridge.seq
            if latest is not None:
                await ws.send_text(state_message(latest.to_dict()).encode())

            async def pump_snapshots():
                nonlocal seen
                while True:
                    with bridge.lock:
                        if bridge.seq > seen and bridge.latest is not None:
                            seen = bridge.seq
                            snap = bridge.latest
                        else:
                            snap = None
                    if snap is not None:
                        await ws.send_text(state_message(snap.to_dict()).encode())
                    else:
                        await asyncio.sleep(0.005)

            sender_task = asyncio.create_task(pump_snapshots())
            while True:
                raw = await ws.receive_text()
                try:
                    msg = decode(raw)
                except WireError as exc:
                    await ws.send_text(error_message(str(exc)).encode())
                    continue
                if msg.type in ("hello", "state", "error"):
                    continue
                if not is_writer:
                    await ws.send_text(error_message("read-only viewer").encode())
                    continue
                bridge.submit(msg)
        except WebSocketDisconnect:
            pass
        finally:
            if sender_task is not None:
                sender_task.cancel()

    return app


def serve(scenario: Scenario, bind: str = "127.0.0.1:8700") -> None:
    """Run the gateway until interrupted.  The engine starts paused.

    Live streaming defaults to one snapshot per 10 steps; headless traces
    keep the scenario's own cadence.
    """
    import uvicorn

    from dataclasses import replace
    bridge = EngineBridge(replace(scenario, start_paused=True,
                                  emit_every=max(10, scenario.emit_every)))
    app = build_app(bridge)
    host, _, port = bind.rpartition(":")
    bridge.start()
    try:
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")
    finally:
        bridge.shutdown()
