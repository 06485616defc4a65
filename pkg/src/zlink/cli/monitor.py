"""Traffic and discovery monitor.

    zlink-monitor --list                      # print beacons seen for 5 s
    zlink-monitor --session lab --digest HEX  # print matching messages
    zlink-monitor --connect tcp://host:port --digest HEX ...

Message lines are digest<TAB>payload-length<TAB>base64 of the first
16 payload bytes.  Runs until interrupted; SIGINT exits 0.
"""

from __future__ import annotations

import argparse
import base64
import sys
import threading
import time

from .. import discovery, pubsub
from ..errors import InvalidUri
from ..schema import TypeDigest

LIST_WINDOW_S = 5.0
PREFIX_BYTES = 16


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="zlink-monitor", description=__doc__.splitlines()[0])
    parser.add_argument("--list", action="store_true", help="print beacons for 5 s")
    parser.add_argument("--session", help="subscribe within this session")
    parser.add_argument("--connect", metavar="URI", help="subscribe to one publisher")
    parser.add_argument(
        "--digest", action="append", default=[], metavar="HEX", help="32-digit type digest"
    )
    args = parser.parse_args(argv)

    if args.list:
        return _list_beacons()

    if args.session and args.connect:
        print("zlink-monitor: use --session or --connect, not both", file=sys.stderr)
        return 1
    digests = []
    for text in args.digest:
        try:
            digests.append(TypeDigest.from_hex(text))
        except ValueError as exc:
            print(f"zlink-monitor: {exc}", file=sys.stderr)
            return 1
    if not digests:
        print("zlink-monitor: nothing to do (need --list or --digest)", file=sys.stderr)
        return 1

    try:
        if args.connect:
            sub = pubsub.Subscriber(args.connect)
        else:
            sub = pubsub.Subscriber(session=args.session)
    except InvalidUri as exc:
        print(f"zlink-monitor: {exc}", file=sys.stderr)
        return 1

    for digest in digests:
        sub.subscribe_raw(digest, _printer(digest))
    try:
        while True:
            sub.receive(250)
    except KeyboardInterrupt:
        return 0
    finally:
        sub.close()


def _printer(digest: TypeDigest):
    def handle(payload: bytes) -> None:
        prefix = base64.b64encode(payload[:PREFIX_BYTES]).decode("ascii")
        print(f"{digest.hex}\t{len(payload)}\t{prefix}", flush=True)

    return handle


def _list_beacons() -> int:
    seen = set()
    lock = threading.Lock()

    def on_beacon(session: str, uri_text: str) -> None:
        with lock:
            if (session, uri_text) in seen:
                return
            seen.add((session, uri_text))
        print(f"{session}\t{uri_text}", flush=True)

    listener = discovery.BeaconListener(on_beacon)
    try:
        time.sleep(LIST_WINDOW_S)
    except KeyboardInterrupt:
        pass
    finally:
        listener.stop()
    return 0


if __name__ == "__main__":
    sys.exit(main())
