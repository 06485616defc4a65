"""Schema compiler CLI.

    zbufc compile camera.zs --digests
    zbufc compile camera.zs --gen-code out/ --json-schema schemas/
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from .. import codegen, schema
from ..errors import SchemaError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="zbufc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    comp = sub.add_parser("compile", help="parse a schema and emit artifacts")
    comp.add_argument("schema", type=Path, help="input .zs file")
    comp.add_argument("--gen-code", type=Path, metavar="DIR", help="emit typed accessors")
    comp.add_argument("--json-schema", type=Path, metavar="DIR", help="emit JSON Schemas")
    comp.add_argument(
        "--digests", action="store_true", help="print name<TAB>digest per type"
    )
    args = parser.parse_args(argv)

    try:
        text = args.schema.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"zbufc: {exc}", file=sys.stderr)
        return 1
    try:
        doc = schema.parse_schema(text)
    except SchemaError as exc:
        print(f"{args.schema}:{exc.line}:{exc.col}: {exc.args[0]}", file=sys.stderr)
        return 1

    if args.digests:
        for tdef in doc.types:
            print(f"{tdef.name}\t{tdef.digest.hex}")
    if args.json_schema:
        codegen.emit_json_schemas(doc, args.json_schema)
    if args.gen_code:
        args.gen_code.mkdir(parents=True, exist_ok=True)
        stem = re.sub(r"\W", "_", args.schema.stem)
        out = args.gen_code / f"{stem}_zb.py"
        out.write_text(codegen.generate(doc).source_text, encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
