"""Wire formats: TCP message frames and UDP discovery beacons.

Message frame::

    16 bytes  type digest, big-endian
     4 bytes  payload length, u32 little-endian
     N bytes  payload

Beacon datagram (at most 512 bytes)::

     4 bytes  magic "ZLNK"
     1 byte   version, currently 1
     2 bytes  session length, u16 little-endian, then that many UTF-8 bytes
     2 bytes  URI length, u16 little-endian, then that many UTF-8 bytes
"""

from __future__ import annotations

import struct

DIGEST_SIZE = 16
FRAME_HEADER = DIGEST_SIZE + 4

#: decoder guard against absurd advertised lengths (a corrupt or hostile
#: peer must not make us allocate gigabytes)
MAX_PAYLOAD = 64 * 1024 * 1024

BEACON_MAGIC = b"ZLNK"
BEACON_VERSION = 1
MAX_BEACON = 512

_LEN = struct.Struct("<I")
_U16 = struct.Struct("<H")


def encode_frame(digest_bytes: bytes, payload: bytes) -> bytes:
    if len(digest_bytes) != DIGEST_SIZE:
        raise ValueError("digest must be 16 bytes")
    return digest_bytes + _LEN.pack(len(payload)) + payload


class FrameDecoder:
    """Incremental frame parser for one TCP stream."""

    def __init__(self):
        self._buf = bytearray()

    def feed(self, data: bytes) -> list[tuple[bytes, bytes]]:
        """Returns complete (digest_bytes, payload) frames, in order.

        Raises ValueError on a frame longer than MAX_PAYLOAD; the caller
        should drop the connection.
        """
        self._buf += data
        frames = []
        while len(self._buf) >= FRAME_HEADER:
            (length,) = _LEN.unpack_from(self._buf, DIGEST_SIZE)
            if length > MAX_PAYLOAD:
                raise ValueError(f"frame payload {length} exceeds limit")
            end = FRAME_HEADER + length
            if len(self._buf) < end:
                break
            digest = bytes(self._buf[:DIGEST_SIZE])
            payload = bytes(self._buf[FRAME_HEADER:end])
            del self._buf[:end]
            frames.append((digest, payload))
        return frames


def encode_beacon(session: str, uri_text: str) -> bytes:
    s = session.encode("utf-8")
    u = uri_text.encode("utf-8")
    datagram = BEACON_MAGIC + bytes([BEACON_VERSION]) + _U16.pack(len(s)) + s + _U16.pack(len(u)) + u
    if len(datagram) > MAX_BEACON:
        raise ValueError(f"beacon would be {len(datagram)} bytes (limit {MAX_BEACON})")
    return datagram


def decode_beacon(datagram: bytes) -> tuple[str, str] | None:
    """Parse a beacon; returns (session, uri) or None for foreign noise."""
    if len(datagram) > MAX_BEACON or len(datagram) < 9:
        return None
    if datagram[:4] != BEACON_MAGIC or datagram[4] != BEACON_VERSION:
        return None
    pos = 5
    out = []
    for _ in range(2):
        if pos + 2 > len(datagram):
            return None
        (length,) = _U16.unpack_from(datagram, pos)
        pos += 2
        if pos + length > len(datagram):
            return None
        try:
            out.append(datagram[pos : pos + length].decode("utf-8"))
        except UnicodeDecodeError:
            return None
        pos += length
    if pos != len(datagram):
        return None
    return out[0], out[1]
