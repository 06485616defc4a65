"""Shared fixtures: schema corpus, random object builder, receive pump."""

import random
import threading
import uuid
from pathlib import Path

import pytest

from zlink import allocate, parse_schema
from zlink.schema import Array, Scalar, Vector

FIXTURES = Path(__file__).parent / "fixtures"

CORPUS_FILES = ["vec3.zs", "image.zs", "tide.zs", "kitchen.zs", "telemetry.zs"]


def load_doc(name):
    return parse_schema((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def vec3_doc():
    return load_doc("vec3.zs")


@pytest.fixture(scope="session")
def image_doc():
    return load_doc("image.zs")


@pytest.fixture(scope="session")
def tide_doc():
    return load_doc("tide.zs")


@pytest.fixture(scope="session")
def kitchen_doc():
    return load_doc("kitchen.zs")


@pytest.fixture(scope="session")
def telemetry_doc():
    return load_doc("telemetry.zs")


@pytest.fixture(scope="session")
def corpus():
    """Every type of every fixture schema, as (doc, typedef) pairs."""
    pairs = []
    for name in CORPUS_FILES:
        doc = load_doc(name)
        pairs.extend((doc, tdef) for tdef in doc.types)
    return pairs


@pytest.fixture()
def session_name():
    """Unique discovery session per test so parallel suites cannot cross-talk."""
    return f"zt-{uuid.uuid4().hex[:10]}"


# --- random object construction ------------------------------------------

_TEXT_POOL = "abcdefghij κλμν 漢字 zõ然 0123456789 _-"


def random_string(rng: random.Random) -> str:
    return "".join(rng.choice(_TEXT_POOL) for _ in range(rng.randrange(0, 12)))


_INT_RANGES = {
    "int8": (-128, 127),
    "uint8": (0, 255),
    "int16": (-(1 << 15), (1 << 15) - 1),
    "uint16": (0, (1 << 16) - 1),
    "int32": (-(1 << 31), (1 << 31) - 1),
    "uint32": (0, (1 << 32) - 1),
    "int64": (-(1 << 63), (1 << 63) - 1),
    "uint64": (0, (1 << 64) - 1),
    "int128": (-(1 << 127), (1 << 127) - 1),
    "uint128": (0, (1 << 128) - 1),
}


def random_value(kind, rng: random.Random, floats: str = "any"):
    """A random value matching `kind` for set().

    floats: "any" includes NaN and infinities, "no-nan" keeps infinities
    (safe for value-equality checks), "finite" excludes both (needed when
    output must validate against the JSON Schema "number" type).
    """
    if isinstance(kind, Scalar):
        name = kind.name
        if name == "bool":
            return rng.random() < 0.5
        if name == "string":
            return random_string(rng)
        if name in ("float", "double"):
            roll = rng.random()
            if roll < 0.05 and floats != "finite":
                return float("inf") if rng.random() < 0.5 else float("-inf")
            if roll < 0.1 and floats == "any":
                return float("nan")
            if name == "float":
                # keep float32-exact values so comparisons stay simple
                return float(rng.randrange(-(1 << 20), 1 << 20)) / 64.0
            return rng.uniform(-1e12, 1e12)
        lo, hi = _INT_RANGES[name]
        return rng.randint(lo, hi)
    if isinstance(kind, Array):
        return [random_value(kind.element, rng, floats) for _ in range(kind.length)]
    if isinstance(kind, Vector):
        count = rng.randrange(0, 9)
        if kind.element == Scalar("uint8"):
            return rng.randbytes(count)
        return [random_value(kind.element, rng, floats) for _ in range(count)]
    # nested type
    sub = allocate(kind.target)
    fill_random(sub, rng, floats)
    return sub


def fill_random(obj, rng: random.Random, floats: str = "any") -> None:
    for fdef in obj.typedef.fields:
        obj.set((fdef.name,), random_value(fdef.kind, rng, floats))


def random_object(typedef, rng: random.Random, floats: str = "any"):
    obj = allocate(typedef)
    fill_random(obj, rng, floats)
    return obj


# --- HTTP test helper -------------------------------------------------------


class ReceivePump:
    """Background thread driving receive() so plain HTTP clients work."""

    def __init__(self, member):
        self.member = member
        self.thread_id = None
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def _run(self):
        self.thread_id = threading.get_ident()
        while not self._stop.is_set():
            self.member.receive(50)

    def stop(self):
        self._stop.set()
        self._thread.join(timeout=5)


@pytest.fixture()
def pump():
    pumps = []

    def start(member):
        p = ReceivePump(member)
        pumps.append(p)
        return p

    yield start
    for p in pumps:
        p.stop()
