"""Demo schemas and the deterministic mock renderer.

The "rendering" maps the camera origin to a single RGB color so remote
updates are verifiable end to end: each channel is
``round(abs(coordinate) * 255) % 256`` with x -> red, y -> green,
z -> blue, and the frame is that color repeated over a 16x16 image
(raw RGB bytes, no codec).
"""

from __future__ import annotations

from . import buffer, schema

FRAME_SIZE = 16

DEMO_SCHEMA = """\
namespace demo;

table Vec3 {
    x: float;
    y: float;
    z: float;
}

table Camera {
    origin: Vec3;
    lookAt: Vec3;
    up: Vec3;
}

table Frame {
    width: uint32;
    height: uint32;
    data: [uint8];
}
"""

TIDE_SCHEMA = """\
namespace tide;

table Open {
    uri: string;
}

table Options {
    alphaBlending: bool;
}

table ResizeWindow {
    width: uint32;
    height: uint32;
}
"""


def demo_document() -> schema.SchemaDocument:
    return schema.parse_schema(DEMO_SCHEMA)


def tide_document() -> schema.SchemaDocument:
    return schema.parse_schema(TIDE_SCHEMA)


def origin_color(x: float, y: float, z: float) -> tuple[int, int, int]:
    return tuple(round(abs(c) * 255) % 256 for c in (x, y, z))


def render_frame(camera: buffer.ObjectBuffer, frame: buffer.ObjectBuffer) -> None:
    """Fill `frame` with the single color derived from camera.origin."""
    color = origin_color(
        camera.get("origin.x"), camera.get("origin.y"), camera.get("origin.z")
    )
    frame.set("width", FRAME_SIZE)
    frame.set("height", FRAME_SIZE)
    frame.set("data", bytes(color) * (FRAME_SIZE * FRAME_SIZE))
