"""Session discovery over UDP beacons.

Publishers announce (session, uri) once a second on multicast group
239.255.43.21:24117.  Where multicast is unreachable the sender falls
back to limited broadcast, then to plain loopback unicast, so discovery
keeps working on isolated hosts.  Listeners bind the fixed port with
address reuse and join the group on every interface they can, which lets
any number of subscribers coexist on one machine.
"""

from __future__ import annotations

import socket
import struct
import threading
from typing import Callable

from .wire import decode_beacon, encode_beacon

BEACON_GROUP = "239.255.43.21"
BEACON_PORT = 24117
BEACON_INTERVAL_S = 1.0


class BeaconSender:
    """Emits one beacon immediately, then every BEACON_INTERVAL_S."""

    def __init__(self, session: str, uri_text: str):
        self._datagram = encode_beacon(session, uri_text)
        self._stop = threading.Event()
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        try:
            self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_BROADCAST, 1)
        except OSError:
            pass
        try:
            self._sock.setsockopt(
                socket.IPPROTO_IP, socket.IP_MULTICAST_LOOP, 1
            )
        except OSError:
            pass
        self._targets = [(BEACON_GROUP, BEACON_PORT)]
        self._thread = threading.Thread(
            target=self._run, name="zlink-beacon", daemon=True
        )
        self._thread.start()

    def _run(self) -> None:
        while not self._stop.is_set():
            self._send_once()
            self._stop.wait(BEACON_INTERVAL_S)

    def _send_once(self) -> None:
        target = self._targets[0]
        try:
            self._sock.sendto(self._datagram, target)
            return
        except OSError:
            pass
        # multicast unroutable here: retry pinned to loopback, then degrade
        if target[0] == BEACON_GROUP:
            try:
                self._sock.setsockopt(
                    socket.IPPROTO_IP,
                    socket.IP_MULTICAST_IF,
                    socket.inet_aton("127.0.0.1"),
                )
                self._sock.sendto(self._datagram, target)
                return
            except OSError:
                pass
        for fallback in (("255.255.255.255", BEACON_PORT), ("127.0.0.1", BEACON_PORT)):
            try:
                self._sock.sendto(self._datagram, fallback)
                self._targets[0] = fallback
                return
            except OSError:
                continue

    def stop(self) -> None:
        self._stop.set()
        self._thread.join(timeout=2)
        self._sock.close()


class BeaconListener:
    """Invokes callback(session, uri_text) for every beacon heard.

    The callback runs on the listener thread and must be quick and
    exception-free; beacons are low-rate so light work (set lookups,
    connection kickoff) is fine.
    """

    def __init__(self, callback: Callable[[str, str], None]):
        self._callback = callback
        self._stop = threading.Event()
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEPORT, 1)
        except (AttributeError, OSError):
            pass
        self._sock.bind(("", BEACON_PORT))
        for iface in ("0.0.0.0", "127.0.0.1"):
            try:
                mreq = struct.pack(
                    "4s4s", socket.inet_aton(BEACON_GROUP), socket.inet_aton(iface)
                )
                self._sock.setsockopt(socket.IPPROTO_IP, socket.IP_ADD_MEMBERSHIP, mreq)
            except OSError:
                continue
        self._sock.settimeout(0.25)
        self._thread = threading.Thread(
            target=self._run, name="zlink-beacon-listener", daemon=True
        )
        self._thread.start()

    def _run(self) -> None:
        while not self._stop.is_set():
            try:
                datagram, _addr = self._sock.recvfrom(2048)
            except socket.timeout:
                continue
            except OSError:
                return
            decoded = decode_beacon(datagram)
            if decoded is not None:
                self._callback(decoded[0], decoded[1])

    def stop(self) -> None:
        self._stop.set()
        self._thread.join(timeout=2)
        self._sock.close()
