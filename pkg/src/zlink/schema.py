"""Schema language compiler: parse, validate, sign and describe types.

The schema language (`.zs` files, UTF-8, `#` line comments)::

    namespace demo;

    table Vec3 {
        x: float;
        y: float;
        z: float;
    }

One `namespace a.b;` declaration, then any number of `table Name { ... }`
entries.  Field types are:

* scalars: ``bool``, ``int8/16/32/64/128``, ``uint8/16/32/64/128``,
  ``float``, ``double``, ``string``
* ``[type:N]``  fixed array of N static-sized elements
* ``[type]``    dynamic vector of static-sized elements
* a bare identifier referencing another table in the same document

Whether a type is *static* is derived, never declared: a type is static
iff none of its fields is (transitively) a string, vector or dynamic
nested type.

Each validated type carries a canonical signature, e.g.
``demo.Vec3{x:float,y:float,z:float}``: the dotted namespace and name,
then ``field:kind`` pairs in declaration order, nested types expanded
recursively, no whitespace.  The 128-bit type digest is the MD5 of that
signature's UTF-8 bytes and is what routes pub-sub messages; renaming or
reordering anything changes the digest, so wire compatibility is
structural rather than nominal.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass

from .errors import (
    CyclicNesting,
    DuplicateName,
    SchemaSyntaxError,
    UnknownType,
    VectorOfDynamic,
)

#: scalar name -> size in bytes inside the static section (string absent:
#: it occupies an 8-byte slot like every dynamic field)
SCALAR_SIZES = {
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

SCALAR_NAMES = frozenset(SCALAR_SIZES) | {"string"}

#: size of a dynamic-field slot: u32 offset + u32 length
SLOT_SIZE = 8


# --- field kinds ---------------------------------------------------------


class FieldKind:
    """Base class of the field-kind union (scalar, array, vector, nested)."""

    __slots__ = ()


@dataclass(frozen=True)
class Scalar(FieldKind):
    name: str  # one of SCALAR_NAMES


@dataclass(frozen=True)
class Array(FieldKind):
    element: FieldKind
    length: int


@dataclass(frozen=True)
class Vector(FieldKind):
    element: FieldKind


@dataclass(frozen=True, eq=False)
class Nested(FieldKind):
    target: "TypeDef"


@dataclass
class FieldDef:
    name: str
    kind: FieldKind


@dataclass(eq=False)
class TypeDef:
    """One `table` entry.  Derived metadata is filled in by validation."""

    name: str
    fields: list[FieldDef]
    is_static: bool = False
    static_size: int = 0
    full_name: str = ""
    signature: str = ""
    digest: "TypeDigest" = None  # type: ignore[assignment]

    def field(self, name: str) -> FieldDef | None:
        return self._by_name.get(name)

    @property
    def _by_name(self) -> dict[str, FieldDef]:
        by = getattr(self, "_by_name_cache", None)
        if by is None:
            by = {f.name: f for f in self.fields}
            self._by_name_cache = by
        return by


@dataclass(eq=False)
class SchemaDocument:
    namespace: list[str]
    types: list[TypeDef]

    def type(self, name: str) -> TypeDef:
        for t in self.types:
            if t.name == name:
                return t
        raise KeyError(name)

    def to_text(self) -> str:
        """Debug rendering that parses back to a structurally equal document."""
        out = [f"namespace {'.'.join(self.namespace)};", ""]
        for t in self.types:
            out.append(f"table {t.name} {{")
            for f in t.fields:
                out.append(f"    {f.name}: {_kind_text(f.kind)};")
            out.append("}")
            out.append("")
        return "\n".join(out)

    def structurally_equal(self, other: "SchemaDocument") -> bool:
        return (
            self.namespace == other.namespace
            and [t.name for t in self.types] == [t.name for t in other.types]
            and [t.signature for t in self.types] == [t.signature for t in other.types]
        )


@dataclass(frozen=True, order=True)
class TypeDigest:
    """128-bit type identifier; routes pub-sub messages."""

    value: int

    def __post_init__(self):
        if not 0 <= self.value < 1 << 128:
            raise ValueError("digest out of 128-bit range")

    @property
    def hex(self) -> str:
        return f"{self.value:032x}"

    @property
    def bytes(self) -> bytes:
        return self.value.to_bytes(16, "big")

    @classmethod
    def from_hex(cls, text: str) -> "TypeDigest":
        if not re.fullmatch(r"[0-9a-fA-F]{32}", text):
            raise ValueError(f"not a 32-digit hex digest: {text!r}")
        return cls(int(text, 16))

    @classmethod
    def from_bytes(cls, raw: bytes) -> "TypeDigest":
        if len(raw) != 16:
            raise ValueError("digest must be 16 bytes")
        return cls(int.from_bytes(raw, "big"))

    def __str__(self) -> str:
        return self.hex


def _kind_text(kind: FieldKind) -> str:
    if isinstance(kind, Scalar):
        return kind.name
    if isinstance(kind, Array):
        return f"[{_kind_text(kind.element)}:{kind.length}]"
    if isinstance(kind, Vector):
        return f"[{_kind_text(kind.element)}]"
    if isinstance(kind, Nested):
        return kind.target.name
    raise TypeError(kind)


# --- tokenizer -----------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>[0-9]+)
  | (?P<punct>[{}\[\]:;.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # ident | number | punct | eof
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SchemaSyntaxError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        group = m.lastgroup
        if group not in ("ws", "comment"):
            tokens.append(_Token(group, m.group(), line, m.start() - line_start + 1))
        nl = m.group().count("\n")
        if nl:
            line += nl
            line_start = m.start() + m.group().rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


# --- parser --------------------------------------------------------------


@dataclass(frozen=True)
class _TypeRef:
    """Unresolved reference to another table, kept until validation."""

    name: str
    line: int
    col: int


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.peek()
        want = text if text is not None else f"<{kind}>"
        if tok.kind != kind or (text is not None and tok.text != text):
            got = tok.text or "end of input"
            raise SchemaSyntaxError(
                f"expected {want!r}, got {got!r}", tok.line, tok.col, expected=want
            )
        return self.next()

    def parse_document(self) -> SchemaDocument:
        self.expect("ident", "namespace")
        namespace = [self.expect("ident").text]
        while self.peek().text == ".":
            self.next()
            namespace.append(self.expect("ident").text)
        self.expect("punct", ";")

        types = []
        while self.peek().kind != "eof":
            types.append(self.parse_table())
        return SchemaDocument(namespace=namespace, types=types)

    def parse_table(self) -> TypeDef:
        self.expect("ident", "table")
        name_tok = self.expect("ident")
        self.expect("punct", "{")
        fields = []
        while self.peek().text != "}":
            fields.append(self.parse_field())
        self.expect("punct", "}")
        tdef = TypeDef(name=name_tok.text, fields=fields)
        tdef._pos = (name_tok.line, name_tok.col)
        return tdef

    def parse_field(self) -> FieldDef:
        name_tok = self.expect("ident")
        self.expect("punct", ":")
        kind = self.parse_kind()
        self.expect("punct", ";")
        fdef = FieldDef(name=name_tok.text, kind=kind)
        fdef._pos = (name_tok.line, name_tok.col)
        return fdef

    def parse_kind(self) -> FieldKind:
        tok = self.peek()
        if tok.text == "[":
            self.next()
            element = self.parse_kind()
            if self.peek().text == ":":
                self.next()
                num = self.expect("number")
                length = int(num.text)
                if length < 1:
                    raise SchemaSyntaxError(
                        "array length must be >= 1", num.line, num.col
                    )
                self.expect("punct", "]")
                return Array(element=element, length=length)
            self.expect("punct", "]")
            return Vector(element=element)
        if tok.kind == "ident":
            self.next()
            if tok.text in SCALAR_NAMES:
                return Scalar(tok.text)
            return _TypeRef(tok.text, tok.line, tok.col)
        raise SchemaSyntaxError(
            f"expected a type, got {tok.text or 'end of input'!r}", tok.line, tok.col,
            expected="<type>",
        )


# --- validation ----------------------------------------------------------


def parse_schema(text: str) -> SchemaDocument:
    """Parse and validate schema text into a SchemaDocument.

    Raises SchemaSyntaxError, UnknownType, DuplicateName, VectorOfDynamic
    or CyclicNesting.  The returned document and everything hanging off it
    is immutable by convention and safe to share between threads.
    """
    doc = _Parser(text).parse_document()
    _validate(doc)
    return doc


def _validate(doc: SchemaDocument) -> None:
    by_name: dict[str, TypeDef] = {}
    for tdef in doc.types:
        line, col = getattr(tdef, "_pos", (0, 0))
        if tdef.name in SCALAR_NAMES:
            raise DuplicateName(
                f"type name {tdef.name!r} collides with a builtin scalar", line, col
            )
        if tdef.name in by_name:
            raise DuplicateName(f"duplicate type name {tdef.name!r}", line, col)
        by_name[tdef.name] = tdef

    for tdef in doc.types:
        seen = set()
        for fdef in tdef.fields:
            line, col = getattr(fdef, "_pos", (0, 0))
            if fdef.name in seen:
                raise DuplicateName(
                    f"duplicate field {fdef.name!r} in type {tdef.name!r}", line, col
                )
            seen.add(fdef.name)
            fdef.kind = _resolve(fdef.kind, by_name)

    for tdef in doc.types:
        _check_cycle(tdef, [], set())

    static: dict[int, bool] = {}
    for tdef in doc.types:
        tdef.is_static = _is_static_type(tdef, static)

    for tdef in doc.types:
        for fdef in tdef.fields:
            _check_elements(fdef, tdef)

    ns = ".".join(doc.namespace)
    for tdef in doc.types:
        tdef.full_name = f"{ns}.{tdef.name}"
        tdef.static_size = sum(kind_static_size(f.kind) for f in tdef.fields)
    for tdef in doc.types:
        tdef.signature = _signature(tdef, ns)
        tdef.digest = TypeDigest.from_bytes(
            hashlib.md5(tdef.signature.encode("utf-8")).digest()
        )


def _resolve(kind, by_name: dict[str, TypeDef]) -> FieldKind:
    if isinstance(kind, _TypeRef):
        target = by_name.get(kind.name)
        if target is None:
            raise UnknownType(f"unknown type {kind.name!r}", kind.line, kind.col)
        return Nested(target=target)
    if isinstance(kind, Array):
        return Array(element=_resolve(kind.element, by_name), length=kind.length)
    if isinstance(kind, Vector):
        return Vector(element=_resolve(kind.element, by_name))
    return kind


def _check_cycle(tdef: TypeDef, stack: list[str], done: set[int]) -> None:
    if id(tdef) in done:
        return
    if tdef.name in stack:
        chain = " -> ".join(stack + [tdef.name])
        raise CyclicNesting(f"cyclic type nesting: {chain}")
    stack.append(tdef.name)
    for fdef in tdef.fields:
        for target in _referenced_types(fdef.kind):
            _check_cycle(target, stack, done)
    stack.pop()
    done.add(id(tdef))


def _referenced_types(kind: FieldKind):
    if isinstance(kind, Nested):
        yield kind.target
    elif isinstance(kind, (Array, Vector)):
        yield from _referenced_types(kind.element)


def _is_static_type(tdef: TypeDef, memo: dict[int, bool]) -> bool:
    cached = memo.get(id(tdef))
    if cached is not None:
        return cached
    result = all(_is_static_kind(f.kind, memo) for f in tdef.fields)
    memo[id(tdef)] = result
    return result


def _is_static_kind(kind: FieldKind, memo: dict[int, bool]) -> bool:
    if isinstance(kind, Scalar):
        return kind.name != "string"
    if isinstance(kind, Array):
        return _is_static_kind(kind.element, memo)
    if isinstance(kind, Vector):
        return False
    return _is_static_type(kind.target, memo)


def _check_elements(fdef: FieldDef, owner: TypeDef) -> None:
    kind = fdef.kind
    if not isinstance(kind, (Array, Vector)):
        return
    line, col = getattr(fdef, "_pos", (0, 0))
    memo: dict[int, bool] = {}
    if not _is_static_kind(kind.element, memo):
        what = "vector" if isinstance(kind, Vector) else "array"
        raise VectorOfDynamic(
            f"{what} field {owner.name}.{fdef.name} has a dynamic-sized element",
            line,
            col,
        )
    if isinstance(kind, Vector) and _kind_size_static(kind.element) == 0:
        # zero-size elements would make the element count unrecoverable
        raise VectorOfDynamic(
            f"vector field {owner.name}.{fdef.name} has a zero-sized element",
            line,
            col,
        )


def _kind_size_static(kind: FieldKind) -> int:
    # size of a *static* kind inside the static section
    if isinstance(kind, Scalar):
        return SCALAR_SIZES[kind.name]
    if isinstance(kind, Array):
        return kind.length * _kind_size_static(kind.element)
    if isinstance(kind, Nested):
        return sum(kind_static_size(f.kind) for f in kind.target.fields)
    raise TypeError(f"{kind} is not static")


def kind_is_static(kind: FieldKind) -> bool:
    """True iff values of this kind occupy a fixed number of bytes."""
    return _is_static_kind(kind, {})


def kind_static_size(kind: FieldKind) -> int:
    """Bytes this kind occupies in the static section (8 for a slot)."""
    if not kind_is_static(kind):
        return SLOT_SIZE
    return _kind_size_static(kind)


# --- signatures and digests ---------------------------------------------


def _signature(tdef: TypeDef, ns: str) -> str:
    parts = ",".join(f"{f.name}:{_kind_sig(f.kind, ns)}" for f in tdef.fields)
    return f"{ns}.{tdef.name}{{{parts}}}"


def _kind_sig(kind: FieldKind, ns: str) -> str:
    if isinstance(kind, Scalar):
        return kind.name
    if isinstance(kind, Array):
        return f"[{_kind_sig(kind.element, ns)}:{kind.length}]"
    if isinstance(kind, Vector):
        return f"[{_kind_sig(kind.element, ns)}]"
    return _signature(kind.target, ns)


def canonical_signature(tdef: TypeDef, doc: SchemaDocument) -> str:
    """Whitespace-free structural rendering; sole input to the digest."""
    return _signature(tdef, ".".join(doc.namespace))


def type_digest(tdef: TypeDef, doc: SchemaDocument) -> TypeDigest:
    """MD5 of the UTF-8 canonical signature as a big-endian 128-bit value."""
    raw = hashlib.md5(canonical_signature(tdef, doc).encode("utf-8")).digest()
    return TypeDigest.from_bytes(raw)


# --- JSON Schema ---------------------------------------------------------

_INT_BOUNDS = {
    "int8": (-128, 127),
    "uint8": (0, 255),
    "int16": (-(1 << 15), (1 << 15) - 1),
    "uint16": (0, (1 << 16) - 1),
    "int32": (-(1 << 31), (1 << 31) - 1),
    "uint32": (0, (1 << 32) - 1),
}

_BIG_INTS = {"int64", "uint64", "int128", "uint128"}


def json_schema(tdef: TypeDef) -> str:
    """JSON Schema text describing the JSON representation of this type.

    Integers up to 32 bits map to "integer"; 64/128-bit integers travel as
    decimal strings; vectors of uint8 travel as base64 strings; nested
    types are inlined.
    """
    return json.dumps(_type_schema(tdef), indent=2)


def _type_schema(tdef: TypeDef) -> dict:
    return {
        "title": tdef.name,
        "type": "object",
        "properties": {f.name: _kind_schema(f.kind) for f in tdef.fields},
    }


def _kind_schema(kind: FieldKind) -> dict:
    if isinstance(kind, Scalar):
        name = kind.name
        if name == "bool":
            return {"type": "boolean"}
        if name in _INT_BOUNDS:
            lo, hi = _INT_BOUNDS[name]
            return {"type": "integer", "minimum": lo, "maximum": hi}
        if name in _BIG_INTS:
            pattern = "^[0-9]+$" if name.startswith("u") else "^-?[0-9]+$"
            return {"type": "string", "pattern": pattern}
        if name in ("float", "double"):
            return {"type": "number"}
        return {"type": "string"}
    if isinstance(kind, Vector):
        if kind.element == Scalar("uint8"):
            return {"type": "string", "contentEncoding": "base64"}
        return {"type": "array", "items": _kind_schema(kind.element)}
    if isinstance(kind, Array):
        return {
            "type": "array",
            "items": _kind_schema(kind.element),
            "minItems": kind.length,
            "maxItems": kind.length,
        }
    return _type_schema(kind.target)
