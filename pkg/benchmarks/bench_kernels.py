#!/usr/bin/env python3
"""Benchmark the compiled buffer kernels against the pure-Python twin.

Drives the full encode/decode path (to_binary / from_binary) and the two
raw kernels (validate / assemble) over a slot-heavy schema and over the
kitchen-sink test schema, once per backend:

    python benchmarks/bench_kernels.py [--seconds 0.5]
"""

import argparse
import random
import time

from zlink import _speedups_py, allocate, from_binary, parse_schema
from zlink import buffer as buffer_mod
from zlink.buffer import layout_of
from zlink.schema import Array, Nested, Scalar, Vector

try:
    from zlink import _speedups

    BACKENDS = [("c", _speedups), ("python", _speedups_py)]
except ImportError:
    print("note: compiled kernels unavailable; benchmarking pure Python only")
    BACKENDS = [("python", _speedups_py)]

# 24 dynamic fields: the validate/assemble loops dominate
SLOT_HEAVY = "namespace bench; table Wide { %s }" % " ".join(
    f"s{i}: string; v{i}: [uint32];" for i in range(12)
)

KITCHEN = """
namespace bench;
table Inner { a: int32; b: double; }
table Dyn { s: string; v: [uint32]; }
table Mixed {
    flag: bool; mid: int32; big: int64; f: float; d: double;
    name: string; blob: [uint8]; fixed: [float:3];
    inner: Inner; dyn: Dyn; objs: [Inner];
}
"""


def build_samples(tdef, count, rng):
    samples = []
    for _ in range(count):
        obj = allocate(tdef)
        for fdef in tdef.fields:
            kind = fdef.kind
            if isinstance(kind, Scalar):
                if kind.name == "string":
                    obj.set(fdef.name, "x" * rng.randrange(0, 32))
                elif kind.name == "bool":
                    obj.set(fdef.name, True)
                elif kind.name in ("float", "double"):
                    obj.set(fdef.name, rng.random())
                else:
                    obj.set(fdef.name, rng.randrange(0, 100))
            elif isinstance(kind, Vector):
                if kind.element == Scalar("uint8"):
                    obj.set(fdef.name, bytes(rng.randrange(0, 32)))
                elif isinstance(kind.element, Scalar):
                    obj.set(fdef.name, [rng.randrange(0, 1000) for _ in range(8)])
                else:
                    subs = []
                    for _ in range(4):
                        sub = allocate(kind.element.target)
                        sub.set("a", 1)
                        subs.append(sub)
                    obj.set(fdef.name, subs)
            elif isinstance(kind, Array):
                obj.set(fdef.name, [1.0] * kind.length)
            elif isinstance(kind, Nested):
                sub = allocate(kind.target)
                if kind.target.is_static:
                    sub.set("a", 2)
                else:
                    sub.set("s", "nested")
                obj.set(fdef.name, sub)
        samples.append(obj)
    return samples


def bench(fn, seconds):
    # warm up, then count calls until the budget is used
    fn()
    count = 0
    start = time.perf_counter()
    while time.perf_counter() - start < seconds:
        fn()
        count += 1
    return count / (time.perf_counter() - start)


def run(seconds):
    rng = random.Random(42)
    results = []
    for label, text, type_name in (
        ("slot-heavy", SLOT_HEAVY, "Wide"),
        ("kitchen", KITCHEN, "Mixed"),
    ):
        doc = parse_schema(text)
        tdef = doc.type(type_name)
        layout = layout_of(tdef)
        samples = build_samples(tdef, 64, rng)
        blobs = [obj.to_binary() for obj in samples]
        static = blobs[0][: layout.static_size]
        payloads = [b"x" * 16 for _ in layout.slot_offsets]

        for backend, impl in BACKENDS:
            buffer_mod.kernels.validate = impl.validate
            buffer_mod.kernels.assemble = impl.assemble

            def do_validate():
                for blob in blobs:
                    impl.validate(blob, layout.kernel_spec)

            def do_assemble():
                impl.assemble(static, layout.slot_offsets, payloads, layout.static_size)

            def do_encode():
                for obj in samples:
                    obj.to_binary()

            def do_decode():
                for blob in blobs:
                    from_binary(tdef, blob)

            results.append(
                (
                    label,
                    backend,
                    bench(do_validate, seconds) * len(blobs),
                    bench(do_assemble, seconds),
                    bench(do_encode, seconds) * len(samples),
                    bench(do_decode, seconds) * len(blobs),
                )
            )
    return results


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seconds", type=float, default=0.5, help="budget per measurement")
    args = parser.parse_args()

    results = run(args.seconds)
    header = f"{'schema':<12} {'backend':<8} {'validate/s':>12} {'assemble/s':>12} {'to_binary/s':>12} {'from_binary/s':>14}"
    print(header)
    print("-" * len(header))
    for label, backend, val, asm, enc, dec in results:
        print(f"{label:<12} {backend:<8} {val:>12,.0f} {asm:>12,.0f} {enc:>12,.0f} {dec:>14,.0f}")
    by_key = {(r[0], r[1]): r for r in results}
    if len(BACKENDS) == 2:
        print()
        for label in ("slot-heavy", "kitchen"):
            c = by_key[(label, "c")]
            py = by_key[(label, "python")]
            print(
                f"{label}: compiled speedup "
                f"validate x{c[2] / py[2]:.1f}, assemble x{c[3] / py[3]:.1f}, "
                f"to_binary x{c[4] / py[4]:.1f}, from_binary x{c[5] / py[5]:.1f}"
            )


if __name__ == "__main__":
    main()
