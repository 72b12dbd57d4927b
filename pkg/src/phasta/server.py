"""Live session service: steps one network in real time, streams snapshots
to any number of observers over WebSocket, and lets a single controller
steer modulation and cues.

Wire protocol (JSON text frames, documented in docs/protocol.md): every
message carries "version" and a per-connection monotonically increasing
"seq".  The snapshot payload is exactly the trace record schema, so a saved
trace and the live stream are interchangeable.
"""

import asyncio
import json
import logging

from websockets.asyncio.server import serve
from websockets.exceptions import ConnectionClosed

from .scenario import CuePolicy
from .trace import record_from_tick

log = logging.getLogger("phasta.server")

PROTOCOL_VERSION = 1

CONTROL_TYPES = {"set_greediness", "set_bias", "set_speed", "set_bias_offset",
                 "set_epsilon", "cue", "pause", "resume", "reset"}


class _Client:
    def __init__(self, websocket):
        self.websocket = websocket
        self.seq_out = 0
        self.last_seq_in = None

    async def send(self, kind, **payload):
        self.seq_out += 1
        msg = {"version": PROTOCOL_VERSION, "seq": self.seq_out, "type": kind}
        msg.update(payload)
        await self.websocket.send(json.dumps(msg, separators=(",", ":")))


class SessionServer:
    """One simulated session, many sockets, one controller token."""

    def __init__(self, runcfg, host="127.0.0.1", port=8765, realtime=True):
        self.runcfg = runcfg
        self.host = host
        self.port = port
        self.realtime = realtime
        policy = None
        if runcfg.scenario.get("type") == "handover":
            policy = CuePolicy.default(runcfg.state_names)
        self.session = runcfg.make_session(policy=policy)
        self.clients = set()
        self.controller = None
        self.bound_port = None
        self._last_tick = None
        self._stop = None

    # -- lifecycle ------------------------------------------------------

    async def run(self, ready=None):
        self._stop = asyncio.Event()
        async with serve(self._handle, self.host, self.port) as server:
            self.bound_port = server.sockets[0].getsockname()[1]
            log.info("serving on %s:%d", self.host, self.bound_port)
            if ready is not None:
                ready.set_result(self.bound_port)
            stepper = asyncio.create_task(self._step_loop())
            await self._stop.wait()
            stepper.cancel()

    def stop(self):
        if self._stop is not None:
            self._stop.set()

    # -- stepping and broadcast ------------------------------------------

    async def _step_loop(self):
        interval = self.runcfg.decimation * self.runcfg.dt
        batch = self.runcfg.decimation
        loop = asyncio.get_running_loop()
        deadline = loop.time() + interval
        while True:
            if not self.session.paused:
                for _ in range(batch):
                    self._last_tick = self.session.step_once()
            if self._last_tick is not None:
                await self._broadcast(record_from_tick(self._last_tick))
            if self.realtime:
                delay = deadline - loop.time()
                if delay < 0.0:
                    log.warning("tick overrun by %.1f ms, dropping late time", -delay * 1e3)
                    deadline = loop.time() + interval
                else:
                    await asyncio.sleep(delay)
                    deadline += interval
            else:
                await asyncio.sleep(0)

    async def _broadcast(self, record):
        dead = []
        for client in list(self.clients):
            try:
                await client.send("snapshot", data=record)
            except ConnectionClosed:
                dead.append(client)
        for client in dead:
            self._drop(client)

    def _drop(self, client):
        self.clients.discard(client)
        if self.controller is client:
            self.controller = None
            log.info("controller disconnected, token released")

    # -- per-connection handling ------------------------------------------

    async def _handle(self, websocket):
        client = _Client(websocket)
        self.clients.add(client)
        try:
            await client.send("graph", **self._graph_payload(client))
            async for raw in websocket:
                await self._dispatch(client, raw)
        except ConnectionClosed:
            pass
        finally:
            self._drop(client)

    def _graph_payload(self, client):
        names = self.runcfg.state_names
        edges = [[names[i], names[j]]
                 for j in range(self.runcfg.n) for i in range(self.runcfg.n)
                 if self.runcfg.T[j, i]]
        return {
            "states": names,
            "edges": edges,
            "dt": self.runcfg.dt,
            "publish_interval": self.runcfg.decimation * self.runcfg.dt,
            "role": "controller" if self.controller is client else "observer",
        }

    async def _dispatch(self, client, raw):
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError as exc:
            await client.send("error", code="bad_json", detail=str(exc))
            return
        seq = msg.get("seq")
        if not isinstance(seq, int) or (client.last_seq_in is not None
                                        and seq <= client.last_seq_in):
            await client.send("error", code="bad_seq",
                              detail="seq must be a monotonically increasing integer")
            return
        client.last_seq_in = seq
        kind = msg.get("type")
        if kind == "claim_control":
            if self.controller is None or self.controller is client:
                self.controller = client
                await client.send("ack", of=seq, role="controller")
            else:
                await client.send("error", code="controller_taken",
                                  detail="another controller is active; staying observer")
        elif kind == "release_control":
            if self.controller is client:
                self.controller = None
            await client.send("ack", of=seq, role="observer")
        elif kind in CONTROL_TYPES:
            if self.controller is not client:
                await client.send("error", code="not_controller",
                                  detail="claim_control first; observers cannot steer")
                return
            err = self.session.apply(msg)
            if err:
                await client.send("error", code="rejected", detail=err)
            else:
                await client.send("ack", of=seq, applied=kind)
        else:
            await client.send("error", code="unknown_type",
                              detail=f"unknown message type {kind!r}")


def serve_forever(runcfg, host="127.0.0.1", port=8765):
    """Blocking entry point used by the CLI."""
    server = SessionServer(runcfg, host, port)
    try:
        asyncio.run(server.run())
    except KeyboardInterrupt:
        pass
