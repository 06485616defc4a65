"""Demo rendering service: REST camera/frame plus pub-sub camera sync.

Announces `HTTP-SERVER tcp://host:port` on stdout once bound, then loops
on receive(100).  The frame is a pure function of the last accepted
camera value (see zlink.demo), so remote control is verifiable.
"""

from __future__ import annotations

import argparse
import sys

from .. import buffer, demo, http_bridge, pubsub
from ..errors import BindFailed, InvalidUri
from ..uri import Uri


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="mock-renderer", description=__doc__.splitlines()[0])
    parser.add_argument(
        "--http", default=":0", metavar="HOST:PORT", help="HTTP bind address (default :0)"
    )
    parser.add_argument("--session", default=None, help="pub-sub session name")
    args = parser.parse_args(argv)

    host, _, port_text = args.http.rpartition(":")
    try:
        port = int(port_text) if port_text else 0
        bind = Uri(host or "127.0.0.1", port)
    except (ValueError, InvalidUri):
        print(f"mock-renderer: bad --http address {args.http!r}", file=sys.stderr)
        return 1

    doc = demo.demo_document()
    camera = buffer.allocate(doc.type("Camera"))
    frame = buffer.allocate(doc.type("Frame"))
    camera.updated = lambda: demo.render_frame(camera, frame)
    demo.render_frame(camera, frame)

    try:
        server = http_bridge.HttpServer(bind)
    except BindFailed as exc:
        print(f"mock-renderer: {exc}", file=sys.stderr)
        return 1
    server.register(camera, "read_write")
    server.register(frame, "read")
    subscriber = pubsub.Subscriber(session=args.session, share=server)
    subscriber.subscribe(camera)

    print(f"HTTP-SERVER {server.uri}", flush=True)
    try:
        while True:
            server.receive(100)
    except KeyboardInterrupt:
        return 0
    finally:
        subscriber.close()
        server.close()


if __name__ == "__main__":
    sys.exit(main())
