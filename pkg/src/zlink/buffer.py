"""Contiguous-buffer object model with reflective accessors.

Every object lives in one growable byte buffer:

* a *static section* of ``typedef.static_size`` bytes: scalars, fixed
  arrays and nested static types packed in declaration order,
  little-endian, no padding;
* an 8-byte *slot* (u32 offset from buffer start + u32 byte length) in
  the static section for every dynamic field (string, vector, dynamic
  nested type); (0, 0) means empty;
* a *heap* after the static section holding the dynamic payloads.

Setting a dynamic field appends its new payload at the end of the buffer
and re-points the slot; stale heap regions are reclaimed by compact()
and never appear in to_binary() output.  to_binary() emits the canonical
form: static section, then every nonempty payload in field declaration
order (depth-first through nested dynamic objects, which are stored as
self-contained sub-buffers with offsets relative to their own start).
The canonical bytes are a pure function of the field values, which makes
them the equality and wire format of the toolkit.

Accessor semantics: getting a nested *static* field returns a live view
into the parent buffer (writes through the view are visible in the
parent); getting a nested *dynamic* field, or composite vector elements,
returns detached copies that must be written back with set().
"""

from __future__ import annotations

import base64
import binascii
import json
import math
import re
import struct
import weakref
from dataclasses import dataclass

from . import _kernels as kernels
from .errors import (
    IntegerRange,
    JsonSyntax,
    KindMismatch,
    LengthMismatch,
    Misaligned,
    NoSuchField,
    SlotOutOfBounds,
    TooShort,
    UnknownKey,
    Utf8Error,
)
from .schema import (
    Array,
    FieldKind,
    Nested,
    Scalar,
    TypeDef,
    Vector,
    kind_static_size,
)

_SLOT = struct.Struct("<II")

_SCALAR_FMT = {
    "bool": struct.Struct("<B"),
    "int8": struct.Struct("<b"),
    "uint8": struct.Struct("<B"),
    "int16": struct.Struct("<h"),
    "uint16": struct.Struct("<H"),
    "int32": struct.Struct("<i"),
    "uint32": struct.Struct("<I"),
    "int64": struct.Struct("<q"),
    "uint64": struct.Struct("<Q"),
    "float": struct.Struct("<f"),
    "double": struct.Struct("<d"),
}

_BIG_INT_RE = re.compile(r"-?[0-9]+")


def _is_dynamic(kind: FieldKind) -> bool:
    if isinstance(kind, Scalar):
        return kind.name == "string"
    if isinstance(kind, Vector):
        return True
    if isinstance(kind, Nested):
        return not kind.target.is_static
    return False


@dataclass(frozen=True)
class _Field:
    name: str
    offset: int
    kind: FieldKind
    size: int


class Layout:
    """Per-type offset table plus the flattened spec fed to the kernels."""

    __slots__ = ("typedef", "static_size", "fields", "ordered", "dyn", "slot_offsets", "kernel_spec")

    def __init__(self, typedef: TypeDef):
        self.typedef = typedef
        offset = 0
        ordered = []
        for fdef in typedef.fields:
            size = kind_static_size(fdef.kind)
            ordered.append(_Field(fdef.name, offset, fdef.kind, size))
            offset += size
        self.static_size = offset
        self.ordered = ordered
        self.fields = {f.name: f for f in ordered}
        self.dyn = [f for f in ordered if _is_dynamic(f.kind)]
        self.slot_offsets = tuple(f.offset for f in self.dyn)
        entries = []
        for f in self.dyn:
            if isinstance(f.kind, Vector):
                entries.append(
                    (f.offset, kernels.KIND_VECTOR, kind_static_size(f.kind.element), None)
                )
            elif isinstance(f.kind, Nested):
                entries.append(
                    (f.offset, kernels.KIND_NESTED, 0, layout_of(f.kind.target).kernel_spec)
                )
            else:
                entries.append((f.offset, kernels.KIND_STRING, 1, None))
        self.kernel_spec = (self.static_size, tuple(entries))


_LAYOUTS: "weakref.WeakKeyDictionary[TypeDef, Layout]" = weakref.WeakKeyDictionary()


def layout_of(typedef: TypeDef) -> Layout:
    layout = _LAYOUTS.get(typedef)
    if layout is None:
        layout = Layout(typedef)
        _LAYOUTS[typedef] = layout
    return layout


def allocate(typedef: TypeDef) -> "ObjectBuffer":
    """Fresh object: static_size zero bytes, all scalars zero, slots empty."""
    return ObjectBuffer(typedef)


def from_binary(typedef: TypeDef, data) -> "ObjectBuffer":
    """Decode a buffer.  Canonical form is not required; any buffer whose
    slots are in bounds is accepted and carried as-is.

    Raises TooShort, SlotOutOfBounds or Misaligned.
    """
    _validate(typedef, data)
    obj = ObjectBuffer(typedef)
    obj._storage[:] = data
    return obj


def _validate(typedef: TypeDef, data) -> None:
    layout = layout_of(typedef)
    status, detail = kernels.validate(bytes(data), layout.kernel_spec)
    if status == kernels.OK:
        return
    if status == kernels.ERR_TOO_SHORT:
        raise TooShort(
            f"{typedef.name}: buffer is {detail} bytes, "
            f"static section needs {layout.static_size}"
        )
    if status == kernels.ERR_SLOT_BOUNDS:
        raise SlotOutOfBounds(f"{typedef.name}: slot at offset {detail} points out of bounds")
    raise Misaligned(f"{typedef.name}: vector payload at slot offset {detail} misaligned")


class ObjectBuffer:
    """A live object stored in one contiguous byte buffer."""

    __slots__ = ("_type", "_layout", "_storage", "_base", "updated", "__weakref__")

    def __init__(self, typedef: TypeDef, _storage: bytearray | None = None, _base: int = 0):
        self._type = typedef
        self._layout = layout_of(typedef)
        if _storage is None:
            _storage = bytearray(self._layout.static_size)
        self._storage = _storage
        self._base = _base
        #: optional zero-argument callback fired after pub-sub or REST updates
        self.updated = None

    # -- identity ----------------------------------------------------

    @property
    def typedef(self) -> TypeDef:
        return self._type

    @property
    def type_name(self) -> str:
        return self._type.full_name

    @property
    def digest(self):
        return self._type.digest

    @property
    def static_size(self) -> int:
        return self._layout.static_size

    def raw(self) -> bytes:
        """Copy of the live buffer (static section first), for inspection."""
        return bytes(self._storage[self._base :])

    def __eq__(self, other) -> bool:
        if not isinstance(other, ObjectBuffer):
            return NotImplemented
        return self.digest == other.digest and self.to_binary() == other.to_binary()

    def __repr__(self) -> str:
        return f"<ObjectBuffer {self._type.full_name} ({len(self._storage) - self._base} bytes)>"

    # -- reflective access -------------------------------------------

    def get(self, path):
        """Read a field; path is "a.b" or a sequence of field names.

        Nested static fields come back as live views; nested dynamic
        fields and composite vector elements come back detached.
        """
        return self._get(self._norm_path(path), 0)

    def set(self, path, value) -> None:
        """Write a field; value tag must match the declared kind."""
        self._set(self._norm_path(path), 0, value)

    def _norm_path(self, path):
        if isinstance(path, str):
            names = tuple(path.split("."))
        else:
            names = tuple(path)
        if not names or not all(isinstance(n, str) and n for n in names):
            raise NoSuchField(f"invalid field path {path!r}")
        return names

    def _field(self, names, i) -> _Field:
        f = self._layout.fields.get(names[i])
        if f is None:
            raise NoSuchField(f"{self._type.name} has no field {'.'.join(names[: i + 1])!r}")
        return f

    def _get(self, names, i):
        f = self._field(names, i)
        if i == len(names) - 1:
            return self._read_field(f)
        if isinstance(f.kind, Nested):
            return self._descend(f)._get(names, i + 1)
        raise NoSuchField(f"cannot descend into non-composite field {names[i]!r}")

    def _set(self, names, i, value) -> None:
        f = self._field(names, i)
        if i == len(names) - 1:
            self._write_field(f, value)
            return
        if isinstance(f.kind, Nested):
            target = self._descend(f)
            target._set(names, i + 1, value)
            if not f.kind.target.is_static:
                self._write_dyn(f, target)
            return
        raise NoSuchField(f"cannot descend into non-composite field {names[i]!r}")

    def _descend(self, f: _Field) -> "ObjectBuffer":
        if f.kind.target.is_static:
            return ObjectBuffer(f.kind.target, self._storage, self._base + f.offset)
        return self._read_dyn(f)

    # -- field reads ---------------------------------------------------

    def _read_field(self, f: _Field):
        if _is_dynamic(f.kind):
            value = self._read_dyn(f)
            return value
        return _unpack_static(self._storage, self._base + f.offset, f.kind, self._storage)

    def _slot(self, f: _Field) -> tuple[int, int]:
        return _SLOT.unpack_from(self._storage, self._base + f.offset)

    def _read_dyn(self, f: _Field):
        off, length = self._slot(f)
        window = bytes(self._storage[off : off + length]) if length else b""
        kind = f.kind
        if isinstance(kind, Scalar):  # string
            try:
                return window.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise Utf8Error(f"field {f.name!r} holds invalid UTF-8: {exc}") from None
        if isinstance(kind, Vector):
            return _unpack_vector(window, kind.element)
        # dynamic nested: detached copy (empty slot reads as a default object)
        target = kind.target
        if not window:
            return ObjectBuffer(target)
        return ObjectBuffer(target, bytearray(window))

    # -- field writes --------------------------------------------------

    def _write_field(self, f: _Field, value) -> None:
        if _is_dynamic(f.kind):
            self._write_dyn_value(f, value)
            return
        packed = _pack_static(f.kind, value, f.name)
        start = self._base + f.offset
        self._storage[start : start + f.size] = packed

    def _write_dyn_value(self, f: _Field, value) -> None:
        kind = f.kind
        if isinstance(kind, Scalar):  # string
            if not isinstance(value, str):
                raise KindMismatch(f"field {f.name!r} expects str, got {type(value).__name__}")
            try:
                payload = value.encode("utf-8")
            except UnicodeEncodeError as exc:
                raise Utf8Error(f"field {f.name!r}: {exc}") from None
        elif isinstance(kind, Vector):
            payload = _pack_vector(kind.element, value, f.name)
        else:
            if not isinstance(value, ObjectBuffer):
                raise KindMismatch(
                    f"field {f.name!r} expects an ObjectBuffer, got {type(value).__name__}"
                )
            self._write_dyn(f, value)
            return
        self._write_payload(f, payload)

    def _write_dyn(self, f: _Field, sub: "ObjectBuffer") -> None:
        if sub.digest != f.kind.target.digest:
            raise KindMismatch(
                f"field {f.name!r} expects {f.kind.target.full_name}, got {sub.type_name}"
            )
        self._write_payload(f, sub.to_binary())

    def _write_payload(self, f: _Field, payload: bytes) -> None:
        # dynamic fields exist only on root buffers (dynamic types are never
        # reachable through a static view), so offsets are storage offsets
        if not payload:
            _SLOT.pack_into(self._storage, f.offset, 0, 0)
            return
        pos = len(self._storage)
        self._storage += payload
        _SLOT.pack_into(self._storage, f.offset, pos, len(payload))

    # -- serialization -------------------------------------------------

    def to_binary(self) -> bytes:
        """Canonical compacted encoding; a pure function of field values."""
        layout = self._layout
        if not layout.dyn:
            start = self._base
            return bytes(self._storage[start : start + layout.static_size])
        static = bytes(self._storage[: layout.static_size])
        payloads = [self._canonical_payload(f) for f in layout.dyn]
        return kernels.assemble(static, layout.slot_offsets, payloads, layout.static_size)

    def _canonical_payload(self, f: _Field) -> bytes:
        off, length = self._slot(f)
        if off == 0 and length == 0:
            return b""
        window = bytes(self._storage[off : off + length])
        if isinstance(f.kind, Nested):
            sub = ObjectBuffer(f.kind.target, bytearray(window))
            out = sub.to_binary()
            # a default-valued sub-object collapses to the empty slot so
            # that canonical bytes stay value-determined
            if out == bytes(len(out)) and len(out) == sub.static_size:
                return b""
            return out
        return window

    def from_binary(self, data) -> None:
        """In-place replace from a binary buffer (see module from_binary)."""
        if self._base or not self._layout.dyn:
            # static window: accept any buffer long enough, copy the block
            if len(data) < self._layout.static_size:
                raise TooShort(
                    f"{self._type.name}: buffer is {len(data)} bytes, "
                    f"static section needs {self._layout.static_size}"
                )
            start = self._base
            self._storage[start : start + self._layout.static_size] = bytes(
                data[: self._layout.static_size]
            )
            return
        _validate(self._type, data)
        self._storage[:] = data

    def compact(self) -> None:
        """Reclaim stale heap: live bytes become the canonical encoding."""
        if self._base:
            return
        self._storage[:] = self.to_binary()

    # -- JSON ------------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(self._json_value(), separators=(",", ":"), allow_nan=False)

    def _json_value(self) -> dict:
        return {
            f.name: _to_jsonable(f.kind, self._read_field(f)) for f in self._layout.ordered
        }

    def from_json(self, text: str) -> None:
        """Partial update: present keys are written, missing keys keep
        their values, unknown keys are an error."""
        try:
            data = json.loads(text)
        except ValueError as exc:
            raise JsonSyntax(str(exc)) from None
        if not isinstance(data, dict):
            raise KindMismatch("top-level JSON value must be an object")
        self._apply_json(data)

    def _apply_json(self, data: dict) -> None:
        for key, val in data.items():
            f = self._layout.fields.get(key)
            if f is None:
                raise UnknownKey(f"{self._type.name} has no field {key!r}")
            if isinstance(f.kind, Nested):
                if not isinstance(val, dict):
                    raise KindMismatch(f"field {key!r} expects a JSON object")
                target = self._descend(f)
                target._apply_json(val)
                if not f.kind.target.is_static:
                    self._write_dyn(f, target)
                continue
            self._write_field(f, _from_jsonable(f.kind, val, key))


# --- static packing/unpacking ---------------------------------------------


def _pack_static(kind: FieldKind, value, name: str) -> bytes:
    if isinstance(kind, Scalar):
        return _pack_scalar(kind.name, value, name)
    if isinstance(kind, Array):
        if not isinstance(value, (list, tuple)):
            raise KindMismatch(f"field {name!r} expects a sequence")
        if len(value) != kind.length:
            raise LengthMismatch(
                f"field {name!r} expects exactly {kind.length} elements, got {len(value)}"
            )
        return b"".join(_pack_static(kind.element, v, name) for v in value)
    if isinstance(kind, Nested):
        if not isinstance(value, ObjectBuffer):
            raise KindMismatch(
                f"field {name!r} expects an ObjectBuffer, got {type(value).__name__}"
            )
        if value.digest != kind.target.digest:
            raise KindMismatch(
                f"field {name!r} expects {kind.target.full_name}, got {value.type_name}"
            )
        return value.to_binary()
    raise KindMismatch(f"field {name!r} is not static")


def _pack_scalar(scalar: str, value, name: str) -> bytes:
    if scalar == "bool":
        if not isinstance(value, bool):
            raise KindMismatch(f"field {name!r} expects bool, got {type(value).__name__}")
        return b"\x01" if value else b"\x00"
    if scalar in ("float", "double"):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise KindMismatch(f"field {name!r} expects a number, got {type(value).__name__}")
        fmt = _SCALAR_FMT[scalar]
        try:
            return fmt.pack(float(value))
        except OverflowError:
            # IEEE narrowing: round out-of-range doubles to signed infinity
            return fmt.pack(math.inf if value > 0 else -math.inf)
    if scalar == "string":
        raise KindMismatch(f"field {name!r} is not static")
    # integers
    if isinstance(value, bool) or not isinstance(value, int):
        raise KindMismatch(f"field {name!r} expects int, got {type(value).__name__}")
    if scalar in ("int128", "uint128"):
        try:
            return value.to_bytes(16, "little", signed=scalar == "int128")
        except OverflowError:
            raise IntegerRange(f"field {name!r}: {value} out of {scalar} range") from None
    try:
        return _SCALAR_FMT[scalar].pack(value)
    except struct.error:
        raise IntegerRange(f"field {name!r}: {value} out of {scalar} range") from None


def _unpack_static(storage, offset: int, kind: FieldKind, root_storage):
    if isinstance(kind, Scalar):
        return _unpack_scalar(kind.name, storage, offset)
    if isinstance(kind, Array):
        size = kind_static_size(kind.element)
        return [
            _unpack_static(storage, offset + i * size, kind.element, root_storage)
            for i in range(kind.length)
        ]
    if isinstance(kind, Nested):
        if isinstance(storage, bytearray) and storage is root_storage:
            return ObjectBuffer(kind.target, storage, offset)
        block = bytearray(storage[offset : offset + kind.target.static_size])
        return ObjectBuffer(kind.target, block)
    raise KindMismatch("not a static kind")


def _unpack_scalar(scalar: str, storage, offset: int):
    if scalar == "bool":
        return storage[offset] != 0
    if scalar in ("int128", "uint128"):
        raw = bytes(storage[offset : offset + 16])
        return int.from_bytes(raw, "little", signed=scalar == "int128")
    return _SCALAR_FMT[scalar].unpack_from(storage, offset)[0]


# --- vectors ----------------------------------------------------------------


def _pack_vector(element: FieldKind, value, name: str) -> bytes:
    if element == Scalar("uint8"):
        if isinstance(value, (bytes, bytearray)):
            return bytes(value)
        if isinstance(value, (list, tuple)):
            try:
                return bytes(value)
            except (ValueError, TypeError):
                raise IntegerRange(f"field {name!r}: byte values must be 0..255") from None
        raise KindMismatch(f"field {name!r} expects bytes or a list of ints")
    if not isinstance(value, (list, tuple)):
        raise KindMismatch(f"field {name!r} expects a sequence, got {type(value).__name__}")
    return b"".join(_pack_static(element, v, name) for v in value)


def _unpack_vector(window: bytes, element: FieldKind):
    if element == Scalar("uint8"):
        return window
    size = kind_static_size(element)
    count = len(window) // size
    return [_unpack_static(window, i * size, element, None) for i in range(count)]


# --- JSON value mapping -----------------------------------------------------


def _to_jsonable(kind: FieldKind, value):
    if isinstance(kind, Scalar):
        name = kind.name
        if name in ("float", "double"):
            if math.isnan(value):
                return "NaN"
            if math.isinf(value):
                return "Inf" if value > 0 else "-Inf"
            return value
        if name in ("int64", "uint64", "int128", "uint128"):
            return str(value)
        return value
    if isinstance(kind, Vector):
        if kind.element == Scalar("uint8"):
            return base64.b64encode(value).decode("ascii")
        return [_to_jsonable(kind.element, v) for v in value]
    if isinstance(kind, Array):
        return [_to_jsonable(kind.element, v) for v in value]
    return value._json_value()


def _from_jsonable(kind: FieldKind, val, name: str):
    if isinstance(kind, Scalar):
        return _scalar_from_json(kind.name, val, name)
    if isinstance(kind, Vector):
        if kind.element == Scalar("uint8"):
            if not isinstance(val, str):
                raise KindMismatch(f"field {name!r} expects a base64 string")
            try:
                return base64.b64decode(val, validate=True)
            except binascii.Error as exc:
                raise KindMismatch(f"field {name!r}: invalid base64: {exc}") from None
        if not isinstance(val, list):
            raise KindMismatch(f"field {name!r} expects a JSON array")
        return [_from_jsonable(kind.element, v, name) for v in val]
    if isinstance(kind, Array):
        if not isinstance(val, list):
            raise KindMismatch(f"field {name!r} expects a JSON array")
        if len(val) != kind.length:
            raise LengthMismatch(
                f"field {name!r} expects exactly {kind.length} elements, got {len(val)}"
            )
        return [_from_jsonable(kind.element, v, name) for v in val]
    # composite element inside an array/vector: fresh object, full apply
    if not isinstance(val, dict):
        raise KindMismatch(f"field {name!r} expects a JSON object")
    obj = ObjectBuffer(kind.target)
    obj._apply_json(val)
    return obj


def _scalar_from_json(scalar: str, val, name: str):
    if scalar == "bool":
        if not isinstance(val, bool):
            raise KindMismatch(f"field {name!r} expects true/false")
        return val
    if scalar in ("float", "double"):
        if isinstance(val, bool):
            raise KindMismatch(f"field {name!r} expects a number")
        if isinstance(val, (int, float)):
            try:
                return float(val)
            except OverflowError:
                return math.inf if val > 0 else -math.inf
        if val == "NaN":
            return math.nan
        if val == "Inf":
            return math.inf
        if val == "-Inf":
            return -math.inf
        raise KindMismatch(f"field {name!r} expects a number or 'NaN'/'Inf'/'-Inf'")
    if scalar == "string":
        if not isinstance(val, str):
            raise KindMismatch(f"field {name!r} expects a string")
        return val
    # integers; the wide ones travel as decimal strings
    if isinstance(val, bool):
        raise KindMismatch(f"field {name!r} expects an integer")
    if isinstance(val, int):
        return val
    if scalar in ("int64", "uint64", "int128", "uint128") and isinstance(val, str):
        if not _BIG_INT_RE.fullmatch(val):
            raise KindMismatch(f"field {name!r}: {val!r} is not a decimal integer")
        return int(val)
    raise KindMismatch(f"field {name!r} expects an integer")
