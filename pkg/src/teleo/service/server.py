"""Streaming control service for live simulations.

One simulation thread owns the runner; connection readers feed a single
ordered inbox, so every control message is answered (ack or error) in
arrival order.  Snapshots fan out through bounded per-subscriber buffers
that drop oldest-first, so a slow subscriber can never stall the
simulation loop.

Client messages (JSON over websocket text frames), each carrying ``id``:

    {"id": 1, "type": "load", "scenario": {...}}
    {"id": 2, "type": "subscribe", "decimation": 1, "full_world_every": 1}
    {"id": 3, "type": "start"} | "pause" | {"type": "step", "n": 5}
    {"id": 4, "type": "set_rate", "rate": 20}
    {"id": 5, "type": "inject", "event": {...}, "at_tick": 120}

Server messages:

    {"type": "ack", "id": 1, "info": {...}}        exactly one per message
    {"type": "error", "id": 1, "reason": "..."}    ... or this
    {"type": "snapshot", "record": {...}, "world": {...}?}
    {"type": "finished", "reason": "completed"}
"""

from __future__ import annotations

import collections
import json
import logging
import queue
import socket
import threading
import time
from typing import Optional

from ..botworld import event_from_json
from .runner import RunError, ScenarioRunner
from .scenario import ScenarioError, scenario_from_dict
from .ws import WSConn, WSError, accept_handshake

log = logging.getLogger("teleo.serve")

SNAP_BUFFER = 256


class _Conn:
    _ids = 0

    def __init__(self, ws: WSConn):
        _Conn._ids += 1
        self.id = _Conn._ids
        self.ws = ws
        self.ctrl: queue.Queue = queue.Queue()
        self.snaps: collections.deque = collections.deque(maxlen=SNAP_BUFFER)
        self.wakeup = threading.Event()
        self.closed = False
        self.decimation: Optional[int] = None
        self.full_world_every = 1
        self.snap_count = 0

    def push_ctrl(self, doc: dict) -> None:
        self.ctrl.put(doc)
        self.wakeup.set()

    def push_snapshot(self, doc: dict) -> None:
        self.snaps.append(doc)  # deque drops oldest on overflow
        self.wakeup.set()


class ControlServer:
    def __init__(self, host: str = "127.0.0.1", port: int = 0, scenario_doc: Optional[dict] = None,
                 base_dir=None):
        self.host = host
        self._requested_port = port
        self._scenario_doc = scenario_doc
        self._base_dir = base_dir
        self._sock: Optional[socket.socket] = None
        self._inbox: queue.Queue = queue.Queue()
        self._conns: dict[int, _Conn] = {}
        self._conns_lock = threading.Lock()
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        # Simulation state, owned by the sim thread.
        self.runner: Optional[ScenarioRunner] = None
        self._running = False
        self._rate = 50.0
        self._pending_steps = 0
        self._next_due: Optional[float] = None
        self._done = False

    # -- lifecycle --------------------------------------------------------

    @property
    def port(self) -> int:
        return self._sock.getsockname()[1]

    def start(self) -> "ControlServer":
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((self.host, self._requested_port))
        self._sock.listen(16)
        if self._scenario_doc is not None:
            self._load(self._scenario_doc)
        for target in (self._accept_loop, self._sim_loop):
            t = threading.Thread(target=target, daemon=True)
            t.start()
            self._threads.append(t)
        log.info("serving on %s:%d", self.host, self.port)
        return self

    def stop(self) -> None:
        self._stop.set()
        try:
            if self._sock is not None:
                self._sock.close()
        except OSError:
            pass
        with self._conns_lock:
            conns = list(self._conns.values())
        for conn in conns:
            conn.ws.close()
        for t in self._threads:
            t.join(timeout=2)

    def serve_forever(self) -> None:
        if self._sock is None:
            self.start()
        try:
            while not self._stop.is_set():
                time.sleep(0.2)
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()

    # -- connection plumbing ------------------------------------------------

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                sock, _addr = self._sock.accept()
            except OSError:
                return
            threading.Thread(target=self._serve_conn, args=(sock,), daemon=True).start()

    def _serve_conn(self, sock: socket.socket) -> None:
        try:
            accept_handshake(sock)
        except (WSError, ConnectionError, OSError):
            sock.close()
            return
        conn = _Conn(WSConn(sock, client=False))
        with self._conns_lock:
            self._conns[conn.id] = conn
        writer = threading.Thread(target=self._writer_loop, args=(conn,), daemon=True)
        writer.start()
        try:
            while not self._stop.is_set():
                text = conn.ws.recv_text()
                if text is None:
                    break
                try:
                    doc = json.loads(text)
                    if not isinstance(doc, dict):
                        raise ValueError("message must be an object")
                except ValueError as exc:
                    conn.push_ctrl({"type": "error", "id": None, "reason": f"bad message: {exc}"})
                    continue
                self._inbox.put((conn, doc))
        finally:
            conn.closed = True
            conn.wakeup.set()
            with self._conns_lock:
                self._conns.pop(conn.id, None)

    def _writer_loop(self, conn: _Conn) -> None:
        while not conn.closed and not self._stop.is_set():
            conn.wakeup.wait(timeout=0.5)
            conn.wakeup.clear()
            try:
                while True:
                    try:
                        doc = conn.ctrl.get_nowait()
                    except queue.Empty:
                        break
                    conn.ws.send_text(json.dumps(doc))
                while conn.snaps:
                    conn.ws.send_text(json.dumps(conn.snaps.popleft()))
            except (ConnectionError, OSError):
                conn.closed = True
                return

    def _broadcast(self, doc: dict) -> None:
        with self._conns_lock:
            conns = list(self._conns.values())
        for conn in conns:
            conn.push_ctrl(doc)

    # -- simulation loop ---------------------------------------------------------

    def _load(self, doc: dict) -> None:
        scenario = scenario_from_dict(doc, base_dir=self._base_dir)
        self.runner = ScenarioRunner(scenario)
        self._running = False
        self._pending_steps = 0
        self._done = False

    def _sim_loop(self) -> None:
        while not self._stop.is_set():
            timeout = 0.2
            now = time.monotonic()
            if self._pending_steps > 0:
                timeout = 0.0
            elif self._running and self._next_due is not None:
                timeout = max(0.0, min(timeout, self._next_due - now))
            try:
                conn, doc = self._inbox.get(timeout=timeout)
            except queue.Empty:
                conn = doc = None
            if doc is not None:
                self._handle(conn, doc)
            self._advance()

    def _advance(self) -> None:
        if self.runner is None or self._done:
            return
        budget = 200  # ticks per loop pass; keeps the inbox responsive
        while budget > 0:
            if self._pending_steps > 0:
                self._pending_steps -= 1
            elif self._running:
                now = time.monotonic()
                if self._next_due is None:
                    self._next_due = now
                if now < self._next_due:
                    break
                self._next_due += 1.0 / self._rate
                if self._next_due < now - 1.0:  # fell far behind; resync
                    self._next_due = now
            else:
                break
            budget -= 1
            if self.runner.finished:
                self._finish("completed")
                break
            try:
                record = self.runner.step()
            except RunError as exc:
                self._finish(f"runtime error: {exc}")
                break
            self._fan_out(record)
            if self.runner.finished:
                self._finish("completed")
                break

    def _finish(self, reason: str) -> None:
        self._done = True
        self._running = False
        self._pending_steps = 0
        self._broadcast({"type": "finished", "reason": reason})

    def _fan_out(self, record: dict) -> None:
        with self._conns_lock:
            conns = [c for c in self._conns.values() if c.decimation is not None]
        for conn in conns:
            if record["tick"] % conn.decimation != 0:
                continue
            doc = {"type": "snapshot", "record": record}
            if conn.snap_count % conn.full_world_every == 0:
                doc["world"] = self.runner.world.to_json()
            conn.snap_count += 1
            conn.push_snapshot(doc)

    # -- message handling -------------------------------------------------------

    def _handle(self, conn: _Conn, doc: dict) -> None:
        msg_id = doc.get("id")

        def ack(info=None):
            reply = {"type": "ack", "id": msg_id}
            if info is not None:
                reply["info"] = info
            conn.push_ctrl(reply)

        def error(reason: str):
            conn.push_ctrl({"type": "error", "id": msg_id, "reason": reason})

        kind = doc.get("type")
        try:
            if kind == "load":
                self._load(doc["scenario"])
                ack(self.runner.program_listing())
            elif kind == "subscribe":
                decimation = int(doc.get("decimation", 1))
                if decimation < 1:
                    raise ValueError("decimation must be >= 1")
                conn.decimation = decimation
                conn.full_world_every = max(1, int(doc.get("full_world_every", 1)))
                conn.snap_count = 0
                ack()
            elif kind == "start":
                if self.runner is None:
                    raise ValueError("no scenario loaded")
                if self._done:
                    raise ValueError("scenario finished; load again")
                self._running = True
                self._next_due = time.monotonic()
                ack()
            elif kind == "pause":
                self._running = False
                ack()
            elif kind == "step":
                if self.runner is None:
                    raise ValueError("no scenario loaded")
                if self._done:
                    raise ValueError("scenario finished; load again")
                n = int(doc.get("n", 1))
                if n < 1:
                    raise ValueError("step count must be >= 1")
                self._pending_steps += n
                ack()
            elif kind == "set_rate":
                rate = float(doc["rate"])
                if rate <= 0:
                    raise ValueError("rate must be positive")
                self._rate = rate
                self._next_due = None
                ack()
            elif kind == "inject":
                if self.runner is None:
                    raise ValueError("no scenario loaded")
                event = event_from_json(doc["event"])
                at_tick = doc.get("at_tick", doc["event"].get("at_tick"))
                due = self.runner.inject(event, None if at_tick is None else int(at_tick))
                ack({"at_tick": due})
            else:
                error(f"unknown message type {kind!r}")
                return
        except (KeyError, ValueError, TypeError, ScenarioError) as exc:
            error(str(exc))
