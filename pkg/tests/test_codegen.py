"""Generated wrappers: equivalence with reflective access, determinism."""

import importlib.util
import random
import sys

from conftest import load_doc, random_value

from zlink import allocate, generate
from zlink.codegen import emit_json_schemas


def load_generated(doc, tmp_path, name="generated_mod"):
    path = tmp_path / f"{name}.py"
    path.write_text(generate(doc).source_text, encoding="utf-8")
    spec = importlib.util.spec_from_file_location(name, path)
    mod = importlib.util.module_from_spec(spec)
    sys.modules[name] = mod
    spec.loader.exec_module(mod)
    return mod


def test_generated_module_compiles(kitchen_doc, tmp_path):
    mod = load_generated(kitchen_doc, tmp_path, "kitchen_zb")
    assert hasattr(mod, "All") and hasattr(mod, "Inner") and hasattr(mod, "Dyn")


def test_digest_constants_match(kitchen_doc, tmp_path):
    mod = load_generated(kitchen_doc, tmp_path, "kitchen_digests")
    for tdef in kitchen_doc.types:
        cls = getattr(mod, tdef.name)
        assert cls.DIGEST == tdef.digest.hex
        assert cls(None if False else None).digest.hex == tdef.digest.hex


def test_simple_accessors_equivalent(vec3_doc, tmp_path):
    mod = load_generated(vec3_doc, tmp_path, "vec3_gen")
    wrapped = mod.Vec3()
    wrapped.set_x(1.0)
    wrapped.set_z(-2.0)
    reflective = allocate(vec3_doc.type("Vec3"))
    reflective.set("x", 1.0)
    reflective.set("z", -2.0)
    assert wrapped.to_binary() == reflective.to_binary()
    assert wrapped.x() == 1.0 and wrapped.z() == -2.0


def test_nested_accessor_chain(tmp_path):
    doc = load_doc("kitchen.zs")
    mod = load_generated(doc, tmp_path, "kitchen_nested")
    obj = mod.All()
    obj.inner().set_a(41)  # live view through the wrapper
    assert obj.inner().a() == 41
    reflective = allocate(doc.type("All"))
    reflective.set("inner.a", 41)
    assert obj.to_binary() == reflective.to_binary()


def test_generated_vs_reflective_random(kitchen_doc, tmp_path):
    mod = load_generated(kitchen_doc, tmp_path, "kitchen_rand")
    rng = random.Random(2024)
    tdef = kitchen_doc.type("All")
    for _ in range(25):
        values = {f.name: random_value(f.kind, rng) for f in tdef.fields}
        wrapped = mod.All()
        reflective = allocate(tdef)
        for name, value in values.items():
            getattr(wrapped, f"set_{name}")(value)
            reflective.set(name, value)
        assert wrapped.to_binary() == reflective.to_binary()


def test_wrapper_passthroughs(tide_doc, tmp_path):
    mod = load_generated(tide_doc, tmp_path, "tide_gen")
    opts = mod.Options()
    opts.set_alphaBlending(True)
    assert opts.to_json() == '{"alphaBlending":true}'
    again = mod.Options()
    again.from_json(opts.to_json())
    assert again == opts
    again.from_binary(opts.to_binary())
    assert again.to_binary() == opts.to_binary()
    fired = []
    again.updated = lambda: fired.append(1)
    assert again.updated is not None
    assert again.type_name == "tide.Options"


def test_generation_deterministic(kitchen_doc):
    first = generate(kitchen_doc)
    second = generate(kitchen_doc)
    assert first.source_text == second.source_text
    assert first.language_tag == "python"
    assert set(first.schema_digests) == {t.name for t in kitchen_doc.types}


def test_keyword_field_names_survive(tmp_path):
    from zlink import parse_schema

    doc = parse_schema("namespace k; table T { class: int8; import: int8; to_json: int8; }")
    mod = load_generated(doc, tmp_path, "kw_gen")
    obj = mod.T()
    obj.set_class(3)
    assert obj.class_() == 3
    obj.set_to_json(4)
    assert obj.to_json_() == 4
    assert obj.to_json().startswith("{")  # passthrough not shadowed


def test_emit_json_schemas(tide_doc, tmp_path):
    paths = emit_json_schemas(tide_doc, tmp_path / "schemas")
    assert [p.name for p in paths] == [
        "Open.schema.json",
        "Options.schema.json",
        "ResizeWindow.schema.json",
    ]
    options = (tmp_path / "schemas" / "Options.schema.json").read_text()
    assert '"alphaBlending": {' in options
    assert '"type": "boolean"' in options


def test_emit_json_schemas_empty_doc(tmp_path):
    from zlink import parse_schema

    doc = parse_schema("namespace e;")
    assert emit_json_schemas(doc, tmp_path / "none") == []
