"""Typed-wrapper code generation.

generate() turns a validated document into Python source defining one
wrapper class per table.  Wrappers delegate every operation to the
reflective buffer runtime, so generated and reflective access are
byte-for-byte equivalent; each class also embeds its type digest as a
constant, re-checked against the runtime at import.

Regeneration is deterministic: the same document yields identical text.
"""

from __future__ import annotations

import keyword
from dataclasses import dataclass
from pathlib import Path

from .schema import Nested, SchemaDocument, TypeDef, TypeDigest, json_schema

_RESERVED = {
    "to_binary",
    "from_binary",
    "to_json",
    "from_json",
    "compact",
    "digest",
    "updated",
    "underlying",
}


@dataclass(frozen=True)
class GeneratedModule:
    source_text: str
    language_tag: str
    schema_digests: dict[str, TypeDigest]


def _method_name(field: str) -> str:
    if keyword.iskeyword(field) or field in _RESERVED:
        return field + "_"
    return field


def generate(doc: SchemaDocument) -> GeneratedModule:
    """Emit a Python module with typed wrappers for every table."""
    ns = ".".join(doc.namespace)
    w = _Writer()
    w.line(f'"""Typed accessors for the {ns} schema.  Generated by zbufc; do not edit."""')
    w.line("")
    w.line("from zlink import buffer as _buffer")
    w.line("from zlink import schema as _schema")
    w.line("")
    w.line('_SCHEMA_TEXT = """\\')
    for text_line in doc.to_text().splitlines():
        w.line(text_line)
    w.line('"""')
    w.line("")
    w.line("_DOC = _schema.parse_schema(_SCHEMA_TEXT)")
    w.line("")

    for tdef in doc.types:
        _emit_class(w, tdef)

    if doc.types:
        w.line("")
        w.line("# digest self-test: embedded constants must match the runtime")
        names = ", ".join(t.name for t in doc.types)
        trailing = "," if len(doc.types) == 1 else ""
        w.line(f"for _cls in ({names}{trailing}):")
        w.line("    if _cls.DIGEST != _cls._TYPE.digest.hex:")
        w.line("        raise AssertionError(f'digest drift for {_cls.TYPE_NAME}')")
        w.line("del _cls")

    return GeneratedModule(
        source_text=w.text(),
        language_tag="python",
        schema_digests={t.name: t.digest for t in doc.types},
    )


def _emit_class(w: "_Writer", tdef: TypeDef) -> None:
    w.line("")
    w.line(f"class {tdef.name}:")
    w.line(f'    """Typed wrapper for `{tdef.full_name}`."""')
    w.line("")
    w.line(f'    TYPE_NAME = "{tdef.full_name}"')
    w.line(f'    DIGEST = "{tdef.digest.hex}"')
    w.line(f'    _TYPE = _DOC.type("{tdef.name}")')
    w.line("")
    w.line("    def __init__(self, obj=None):")
    w.line("        self._obj = obj if obj is not None else _buffer.allocate(self._TYPE)")
    for fdef in tdef.fields:
        getter = _method_name(fdef.name)
        w.line("")
        if isinstance(fdef.kind, Nested):
            wrapper = fdef.kind.target.name
            w.line(f"    def {getter}(self):")
            w.line(f'        return {wrapper}(self._obj.get(("{fdef.name}",)))')
            w.line("")
            w.line(f"    def set_{fdef.name}(self, value):")
            w.line(f"        if isinstance(value, {wrapper}):")
            w.line("            value = value._obj")
            w.line(f'        self._obj.set(("{fdef.name}",), value)')
        else:
            w.line(f"    def {getter}(self):")
            w.line(f'        return self._obj.get(("{fdef.name}",))')
            w.line("")
            w.line(f"    def set_{fdef.name}(self, value):")
            w.line(f'        self._obj.set(("{fdef.name}",), value)')
    w.line("")
    w.line("    def to_binary(self):")
    w.line("        return self._obj.to_binary()")
    w.line("")
    w.line("    def from_binary(self, data):")
    w.line("        self._obj.from_binary(data)")
    w.line("")
    w.line("    def to_json(self):")
    w.line("        return self._obj.to_json()")
    w.line("")
    w.line("    def from_json(self, text):")
    w.line("        self._obj.from_json(text)")
    w.line("")
    w.line("    def compact(self):")
    w.line("        self._obj.compact()")
    w.line("")
    w.line("    def underlying(self):")
    w.line("        return self._obj")
    w.line("")
    w.line("    @property")
    w.line("    def digest(self):")
    w.line("        return self._obj.digest")
    w.line("")
    w.line("    @property")
    w.line("    def type_name(self):")
    w.line("        return self._obj.type_name")
    w.line("")
    w.line("    @property")
    w.line("    def typedef(self):")
    w.line("        return self._obj.typedef")
    w.line("")
    w.line("    @property")
    w.line("    def updated(self):")
    w.line("        return self._obj.updated")
    w.line("")
    w.line("    @updated.setter")
    w.line("    def updated(self, callback):")
    w.line("        self._obj.updated = callback")
    w.line("")
    w.line("    def __eq__(self, other):")
    w.line(f"        if isinstance(other, {tdef.name}):")
    w.line("            return self._obj == other._obj")
    w.line("        return NotImplemented")
    w.line("")


def emit_json_schemas(doc: SchemaDocument, out_dir) -> list[Path]:
    """Write one `<Type>.schema.json` per table; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for tdef in doc.types:
        path = out / f"{tdef.name}.schema.json"
        path.write_text(json_schema(tdef) + "\n", encoding="utf-8")
        paths.append(path)
    return paths


class _Writer:
    def __init__(self):
        self._lines: list[str] = []

    def line(self, text: str) -> None:
        self._lines.append(text)

    def text(self) -> str:
        return "\n".join(self._lines).rstrip("\n") + "\n"
