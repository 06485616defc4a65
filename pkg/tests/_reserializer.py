"""Brute-force re-serializer: rebuilds canonical bytes from field values.

Deliberately written from the layout rules alone (packed little-endian
static section, u32+u32 slots, heap payloads in declaration order,
self-contained dynamic sub-objects, default sub-objects collapse to the
empty slot) without touching ObjectBuffer.to_binary, so it can stand as
an independent oracle for it.
"""

import struct

from zlink.schema import Array, Nested, Scalar, Vector

_WIDTH = {
    "bool": "B",
    "int8": "b",
    "uint8": "B",
    "int16": "h",
    "uint16": "H",
    "int32": "i",
    "uint32": "I",
    "int64": "q",
    "uint64": "Q",
    "float": "f",
    "double": "d",
}
_SIZES = {
    "bool": 1,
    "int8": 1,
    "uint8": 1,
    "int16": 2,
    "uint16": 2,
    "int32": 4,
    "uint32": 4,
    "int64": 8,
    "uint64": 8,
    "int128": 16,
    "uint128": 16,
    "float": 4,
    "double": 8,
}


def _static_size(kind) -> int:
    if isinstance(kind, Scalar):
        return 8 if kind.name == "string" else _SIZES[kind.name]
    if isinstance(kind, Array):
        return kind.length * _static_size(kind.element)
    if isinstance(kind, Vector):
        return 8
    if kind.target.is_static:
        return sum(_static_size(f.kind) for f in kind.target.fields)
    return 8


def _is_dynamic(kind) -> bool:
    if isinstance(kind, Scalar):
        return kind.name == "string"
    if isinstance(kind, Vector):
        return True
    return isinstance(kind, Nested) and not kind.target.is_static


def _enc_scalar(name: str, value) -> bytes:
    if name == "bool":
        return b"\x01" if value else b"\x00"
    if name in ("int128", "uint128"):
        return value.to_bytes(16, "little", signed=name == "int128")
    return struct.pack("<" + _WIDTH[name], value)


def _enc_static(kind, value) -> bytes:
    if isinstance(kind, Scalar):
        return _enc_scalar(kind.name, value)
    if isinstance(kind, Array):
        return b"".join(_enc_static(kind.element, v) for v in value)
    # nested static: value is an ObjectBuffer; re-encode it field by field
    return b"".join(
        _enc_static(f.kind, value.get((f.name,))) for f in kind.target.fields
    )


def _enc_payload(kind, value) -> bytes:
    if isinstance(kind, Scalar):  # string
        return value.encode("utf-8")
    if isinstance(kind, Vector):
        if kind.element == Scalar("uint8"):
            return bytes(value)
        return b"".join(_enc_static(kind.element, v) for v in value)
    # dynamic nested: self-contained canonical buffer
    sub = reserialize(value)
    if sub == bytes(len(sub)):
        return b""
    return sub


def reserialize(obj) -> bytes:
    """Canonical bytes of obj, rebuilt from get() values and layout rules."""
    tdef = obj.typedef
    static_size = sum(_static_size(f.kind) for f in tdef.fields)
    static = bytearray()
    payloads = []
    slot_positions = []
    for fdef in tdef.fields:
        if _is_dynamic(fdef.kind):
            slot_positions.append(len(static))
            static += bytes(8)
            payloads.append(_enc_payload(fdef.kind, obj.get((fdef.name,))))
        else:
            static += _enc_static(fdef.kind, obj.get((fdef.name,)))
    assert len(static) == static_size
    heap = bytearray()
    for pos, payload in zip(slot_positions, payloads):
        if payload:
            struct.pack_into("<II", static, pos, static_size + len(heap), len(payload))
            heap += payload
    return bytes(static) + bytes(heap)
