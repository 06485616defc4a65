"""Camera synchronization demo: poll-and-publish loop between instances.

Each instance runs the classic render-loop shape: when the scripted
update source fires, set the camera and publish it; otherwise poll the
subscription.  Instances in the same session converge to the same camera
state; the final camera JSON is printed as the only stdout line.

The scripted source (--origin) first fires at --apply-at and then
re-fires the same values every --reapply-every steps, so instances that
discover each other late still converge.
"""

from __future__ import annotations

import argparse
import sys

from .. import buffer, demo, pubsub


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="camsync", description=__doc__.splitlines()[0])
    parser.add_argument("--session", default=None, help="pub-sub session name")
    parser.add_argument("--origin", metavar="X,Y,Z", help="scripted camera origin update")
    parser.add_argument("--steps", type=int, default=350, help="loop iterations")
    parser.add_argument("--step-ms", type=int, default=10, help="poll budget per step")
    parser.add_argument("--apply-at", type=int, default=50, help="step of the first update")
    parser.add_argument(
        "--reapply-every", type=int, default=100, help="steps between re-fires"
    )
    args = parser.parse_args(argv)

    scripted = None
    if args.origin:
        try:
            x, y, z = (float(part) for part in args.origin.split(","))
        except ValueError:
            print(f"camsync: bad --origin {args.origin!r}", file=sys.stderr)
            return 1
        scripted = (x, y, z)

    doc = demo.demo_document()
    camera = buffer.allocate(doc.type("Camera"))
    publisher = pubsub.Publisher(session=args.session)
    subscriber = pubsub.Subscriber(session=args.session)
    subscriber.subscribe(camera)

    def update_camera(step: int) -> bool:
        if scripted is None or step < args.apply_at:
            return False
        if (step - args.apply_at) % args.reapply_every:
            return False
        camera.set("origin.x", scripted[0])
        camera.set("origin.y", scripted[1])
        camera.set("origin.z", scripted[2])
        return True

    try:
        for step in range(args.steps):
            if update_camera(step):  # had a scripted "user event"
                publisher.publish(camera)
            else:
                subscriber.receive(args.step_ms)
    except KeyboardInterrupt:
        pass
    finally:
        subscriber.close()
        publisher.close()
    print(camera.to_json(), flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
