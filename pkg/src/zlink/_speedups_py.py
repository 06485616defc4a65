"""Pure-Python buffer kernels; reference twin of the compiled module.

Both implementations expose the same two functions over the same flattened
layout spec, and must stay byte-for-byte interchangeable (enforced by a
differential test).  A layout spec is::

    spec  = (static_size, entries)
    entry = (slot_offset, kind, elem_size, sub_spec_or_None)

with kind one of KIND_STRING / KIND_VECTOR / KIND_NESTED.  Kernels never
raise for data-dependent conditions; they return status codes so the
typed exceptions live in one place (buffer.py).
"""

from __future__ import annotations

import struct

KIND_STRING = 0
KIND_VECTOR = 1
KIND_NESTED = 2

OK = 0
ERR_TOO_SHORT = 1
ERR_SLOT_BOUNDS = 2
ERR_MISALIGNED = 3

_SLOT = struct.Struct("<II")


def validate(data, spec) -> tuple[int, int]:
    """Check a buffer against a layout spec.

    Returns (status, detail): detail is the buffer length for
    ERR_TOO_SHORT and the offending slot offset otherwise.
    """
    view = memoryview(data)
    return _validate(view, spec)


def _validate(view, spec) -> tuple[int, int]:
    static_size, entries = spec
    n = len(view)
    if n < static_size:
        return ERR_TOO_SHORT, n
    for slot_offset, kind, elem_size, sub in entries:
        off, length = _SLOT.unpack_from(view, slot_offset)
        if off == 0 and length == 0:
            continue
        if off < static_size or off + length > n:
            return ERR_SLOT_BOUNDS, slot_offset
        if kind == KIND_VECTOR and elem_size > 1 and length % elem_size:
            return ERR_MISALIGNED, slot_offset
        if kind == KIND_NESTED:
            status, detail = _validate(view[off : off + length], sub)
            if status != OK:
                return status, slot_offset
    return OK, 0


def assemble(static: bytes, slot_offsets, payloads, static_size: int) -> bytes:
    """Build a canonical buffer: static section, slots rewritten, payloads
    appended in order.  Empty payloads get the (0, 0) slot."""
    out = bytearray(static)
    pos = static_size
    for slot_offset, payload in zip(slot_offsets, payloads):
        if payload:
            _SLOT.pack_into(out, slot_offset, pos, len(payload))
            pos += len(payload)
        else:
            _SLOT.pack_into(out, slot_offset, 0, 0)
    for payload in payloads:
        out += payload
    return bytes(out)
