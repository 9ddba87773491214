"""Scripted protocol client: drives a control server over the wire.

Used by the integration tests and handy for quick console sessions.
Requests block until their ack/error arrives; snapshots and finished
notices buffer in between.
"""

from __future__ import annotations

import json
import socket
import time
from typing import Optional

from .ws import WSConn, client_handshake


class ProtocolError(Exception):
    """The server answered a request with an error reply."""


class ControlClient:
    def __init__(self, host: str, port: int, timeout: float = 10.0):
        sock = socket.create_connection((host, port), timeout=timeout)
        sock.settimeout(timeout)
        client_handshake(sock, host, port)
        self.ws = WSConn(sock, client=True)
        self._next_id = 0
        self._snapshots: list[dict] = []
        self._finished: Optional[dict] = None

    # -- plumbing ------------------------------------------------------------

    def _recv(self) -> Optional[dict]:
        text = self.ws.recv_text()
        if text is None:
            return None
        return json.loads(text)

    def request(self, kind: str, **fields) -> Optional[dict]:
        """Send one message; wait for its ack (returning info) or error."""
        self._next_id += 1
        msg_id = self._next_id
        self.ws.send_text(json.dumps({"id": msg_id, "type": kind, **fields}))
        while True:
            doc = self._recv()
            if doc is None:
                raise ConnectionError("server closed the connection")
            if doc.get("type") == "ack" and doc.get("id") == msg_id:
                return doc.get("info")
            if doc.get("type") == "error" and doc.get("id") == msg_id:
                raise ProtocolError(doc.get("reason", "unknown error"))
            self._stash(doc)

    def _stash(self, doc: dict) -> None:
        if doc.get("type") == "snapshot":
            self._snapshots.append(doc)
        elif doc.get("type") == "finished":
            self._finished = doc

    # -- conveniences ------------------------------------------------------------

    def load(self, scenario: dict) -> dict:
        return self.request("load", scenario=scenario)

    def subscribe(self, decimation: int = 1, full_world_every: int = 1):
        self.request("subscribe", decimation=decimation, full_world_every=full_world_every)

    def start(self):
        self.request("start")

    def pause(self):
        self.request("pause")

    def step(self, n: int = 1):
        self.request("step", n=n)

    def set_rate(self, rate: float):
        self.request("set_rate", rate=rate)

    def inject(self, event: dict, at_tick: Optional[int] = None) -> Optional[dict]:
        fields = {"event": event}
        if at_tick is not None:
            fields["at_tick"] = at_tick
        return self.request("inject", **fields)

    def next_snapshot(self, timeout: float = 10.0) -> Optional[dict]:
        deadline = time.monotonic() + timeout
        while True:
            if self._snapshots:
                return self._snapshots.pop(0)
            if time.monotonic() > deadline:
                return None
            doc = self._recv()
            if doc is None:
                return None
            self._stash(doc)

    def drain_snapshots(self, min_count: int, timeout: float = 20.0) -> list[dict]:
        out = []
        deadline = time.monotonic() + timeout
        while len(out) < min_count and time.monotonic() < deadline:
            snap = self.next_snapshot(timeout=max(0.1, deadline - time.monotonic()))
            if snap is None:
                break
            out.append(snap)
        return out

    @property
    def finished_notice(self) -> Optional[dict]:
        return self._finished

    def wait_finished(self, timeout: float = 30.0) -> Optional[dict]:
        deadline = time.monotonic() + timeout
        while self._finished is None and time.monotonic() < deadline:
            doc = self._recv()
            if doc is None:
                break
            self._stash(doc)
        return self._finished

    def close(self):
        self.ws.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
