"""Minimal RFC 6455 WebSocket framing over blocking sockets.

Text messages only (the control protocol is JSON text); handles the
upgrade handshake for both roles, fragmentation, ping/pong and close.
Enough for browsers and for the scripted test clients; no extensions,
no TLS.
"""

from __future__ import annotations

import base64
import hashlib
import os
import socket
import struct
import threading
from typing import Optional

GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_CONT, OP_TEXT, OP_CLOSE, OP_PING, OP_PONG = 0x0, 0x1, 0x8, 0x9, 0xA


class WSError(Exception):
    pass


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionError("socket closed mid-frame")
        buf.extend(chunk)
    return bytes(buf)


def _read_http_head(sock: socket.socket) -> bytes:
    data = bytearray()
    while b"\r\n\r\n" not in data:
        chunk = sock.recv(4096)
        if not chunk:
            raise ConnectionError("socket closed during handshake")
        data.extend(chunk)
        if len(data) > 65536:
            raise WSError("oversized handshake")
    return bytes(data)


def accept_handshake(sock: socket.socket) -> None:
    """Server side: read the upgrade request, send 101."""
    head = _read_http_head(sock).decode("latin-1")
    key = None
    for line in head.split("\r\n")[1:]:
        if ":" in line:
            name, value = line.split(":", 1)
            if name.strip().lower() == "sec-websocket-key":
                key = value.strip()
    if key is None:
        sock.sendall(b"HTTP/1.1 400 Bad Request\r\n\r\n")
        raise WSError("not a websocket upgrade request")
    accept = base64.b64encode(hashlib.sha1((key + GUID).encode()).digest()).decode()
    sock.sendall(
        (
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {accept}\r\n\r\n"
        ).encode()
    )


def client_handshake(sock: socket.socket, host: str, port: int, path: str = "/") -> None:
    key = base64.b64encode(os.urandom(16)).decode()
    sock.sendall(
        (
            f"GET {path} HTTP/1.1\r\n"
            f"Host: {host}:{port}\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Key: {key}\r\n"
            "Sec-WebSocket-Version: 13\r\n\r\n"
        ).encode()
    )
    head = _read_http_head(sock).decode("latin-1")
    if "101" not in head.split("\r\n", 1)[0]:
        raise WSError(f"handshake refused: {head.splitlines()[0]!r}")
    want = base64.b64encode(hashlib.sha1((key + GUID).encode()).digest()).decode()
    if want not in head:
        raise WSError("bad Sec-WebSocket-Accept")


class WSConn:
    """One established connection; ``client`` selects frame masking."""

    def __init__(self, sock: socket.socket, client: bool):
        self.sock = sock
        self.client = client
        self._send_lock = threading.Lock()
        self._closed = False

    def _send_frame(self, opcode: int, payload: bytes) -> None:
        head = bytearray([0x80 | opcode])
        mask_bit = 0x80 if self.client else 0
        n = len(payload)
        if n < 126:
            head.append(mask_bit | n)
        elif n < 1 << 16:
            head.append(mask_bit | 126)
            head.extend(struct.pack(">H", n))
        else:
            head.append(mask_bit | 127)
            head.extend(struct.pack(">Q", n))
        if self.client:
            mask = os.urandom(4)
            head.extend(mask)
            payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        with self._send_lock:
            if self._closed:
                raise ConnectionError("connection closed")
            self.sock.sendall(bytes(head) + payload)

    def send_text(self, text: str) -> None:
        self._send_frame(OP_TEXT, text.encode("utf-8"))

    def recv_text(self) -> Optional[str]:
        """Next text message, or None once the peer closes."""
        parts: list[bytes] = []
        while True:
            try:
                b0, b1 = _recv_exact(self.sock, 2)
            except (ConnectionError, OSError):
                return None
            fin = b0 & 0x80
            opcode = b0 & 0x0F
            masked = b1 & 0x80
            length = b1 & 0x7F
            if length == 126:
                (length,) = struct.unpack(">H", _recv_exact(self.sock, 2))
            elif length == 127:
                (length,) = struct.unpack(">Q", _recv_exact(self.sock, 8))
            mask = _recv_exact(self.sock, 4) if masked else None
            payload = _recv_exact(self.sock, length) if length else b""
            if mask:
                payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
            if opcode == OP_PING:
                try:
                    self._send_frame(OP_PONG, payload)
                except (ConnectionError, OSError):
                    return None
                continue
            if opcode == OP_PONG:
                continue
            if opcode == OP_CLOSE:
                try:
                    self._send_frame(OP_CLOSE, b"")
                except (ConnectionError, OSError):
                    pass
                self._closed = True
                return None
            if opcode in (OP_TEXT, OP_CONT):
                parts.append(payload)
                if fin:
                    return b"".join(parts).decode("utf-8")
                continue
            raise WSError(f"unsupported opcode {opcode}")

    def close(self) -> None:
        try:
            self._send_frame(OP_CLOSE, b"")
        except (ConnectionError, OSError):
            pass
        self._closed = True
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.sock.close()
