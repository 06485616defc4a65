"""Digest-typed publish-subscribe over TCP with session discovery.

A Publisher binds a TCP listener, fans every published frame out to all
connected subscriber channels, and (unless the session is NULL_SESSION)
announces itself with UDP beacons.  A Subscriber either connects to one
explicit URI (retrying forever at 1 s intervals) or watches beacons and
connects to every publisher in its session.  Delivery is fire and
forget: publishing never blocks beyond a bounded per-channel queue, and
a channel that falls 1024 frames behind is dropped.

Filtering happens on the subscriber: a handler fires only for digests it
subscribed to, on the thread that calls receive().  Subscribers and HTTP
servers can share one ReceiveGroup so a single receive() call services
all of them.
"""

from __future__ import annotations

import getpass
import os
import queue
import select
import socket
import threading
import time
from typing import Callable

from .discovery import BeaconListener, BeaconSender
from .errors import BindFailed, DecodeError, DuplicateSubscription
from .schema import TypeDigest
from .uri import Uri, as_uri
from .wire import FrameDecoder, encode_frame

#: session value that disables discovery entirely
NULL_SESSION = ""

#: environment variable overriding the user-name default session
SESSION_ENV = "ZLINK_SESSION"

#: per-channel frame queue bound; overflow drops the channel
CHANNEL_QUEUE = 1024

RECONNECT_INTERVAL_S = 1.0


def default_session() -> str:
    env = os.environ.get(SESSION_ENV)
    if env:
        return env
    try:
        return getpass.getuser()
    except (KeyError, OSError):
        return "default"


def _resolve_session(session) -> str:
    if session is None:
        return default_session()
    if not isinstance(session, str):
        raise TypeError(f"session must be a string, got {type(session).__name__}")
    return session


def _digest_bytes(digest) -> bytes:
    if isinstance(digest, TypeDigest):
        return digest.bytes
    if isinstance(digest, (bytes, bytearray)) and len(digest) == 16:
        return bytes(digest)
    raise TypeError("digest must be a TypeDigest or 16 bytes")


def _advertised_host() -> str:
    name = socket.gethostname()
    try:
        socket.getaddrinfo(name, None)
        return name
    except OSError:
        return "127.0.0.1"


class _Channel:
    """One connected subscriber, with a bounded queue and a writer thread."""

    def __init__(self, sock: socket.socket):
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        # keep the port rebindable while this connection winds down
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock = sock
        self._queue: "queue.Queue[bytes]" = queue.Queue(maxsize=CHANNEL_QUEUE)
        self.dead = False
        self._thread = threading.Thread(target=self._run, name="zlink-channel", daemon=True)
        self._thread.start()

    def _run(self) -> None:
        while not self.dead:
            try:
                frame = self._queue.get(timeout=0.1)
            except queue.Empty:
                continue
            try:
                self._sock.sendall(frame)
            except OSError:
                self.dead = True
        try:
            self._sock.close()
        except OSError:
            pass

    def offer(self, frame: bytes) -> bool:
        try:
            self._queue.put_nowait(frame)
            return True
        except queue.Full:
            return False

    def close(self, wait: bool = False) -> None:
        self.dead = True
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        if wait:
            self._thread.join(timeout=1.0)


class Publisher:
    """Binds, accepts subscribers, publishes frames, beacons its session."""

    def __init__(self, uri: Uri | str | None = None, session: str | None = None):
        bind_uri = as_uri(uri) if uri is not None else None
        self._session = _resolve_session(session)
        host = bind_uri.host if bind_uri else ""
        port = bind_uri.port if bind_uri else 0
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            self._listener.bind((host, port))
            self._listener.listen(64)
        except OSError as exc:
            self._listener.close()
            raise BindFailed(f"cannot bind {host or '*'}:{port}: {exc}") from None
        bound_port = self._listener.getsockname()[1]
        self._uri = Uri(bind_uri.host if bind_uri else _advertised_host(), bound_port)
        self._channels: list[_Channel] = []
        self._lock = threading.Lock()
        self._closed = False
        self._acceptor = threading.Thread(
            target=self._accept_loop, name="zlink-acceptor", daemon=True
        )
        self._acceptor.start()
        self._beacon = (
            BeaconSender(self._session, str(self._uri))
            if self._session != NULL_SESSION
            else None
        )

    @property
    def uri(self) -> Uri:
        """Concrete address including the bound port."""
        return self._uri

    @property
    def session(self) -> str:
        return self._session

    @property
    def connection_count(self) -> int:
        """Currently connected subscriber channels (delivery stays
        fire-and-forget; this exists so callers can observe readiness)."""
        with self._lock:
            return sum(1 for channel in self._channels if not channel.dead)

    def _accept_loop(self) -> None:
        while True:
            try:
                sock, _addr = self._listener.accept()
            except OSError:
                return
            channel = _Channel(sock)
            with self._lock:
                if self._closed:
                    channel.close()
                    return
                self._channels.append(channel)

    def publish(self, obj) -> None:
        """Publish a serializable object (digest + to_binary)."""
        self.publish_raw(obj.digest, obj.to_binary())

    def publish_raw(self, digest, payload: bytes) -> None:
        """Fan a frame out to all connected channels; never blocks beyond
        the bounded queue, never reports delivery.  Call from one thread
        at a time."""
        frame = encode_frame(_digest_bytes(digest), bytes(payload))
        with self._lock:
            channels = list(self._channels)
        drop = []
        for channel in channels:
            if channel.dead or not channel.offer(frame):
                drop.append(channel)
        if drop:
            with self._lock:
                for channel in drop:
                    channel.close()
                    if channel in self._channels:
                        self._channels.remove(channel)

    def close(self) -> None:
        with self._lock:
            if self._closed:
                return
            self._closed = True
            channels = list(self._channels)
            self._channels.clear()
        if self._beacon:
            self._beacon.stop()
        try:
            # wakes the acceptor thread out of its blocking accept()
            self._listener.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self._listener.close()
        self._acceptor.join(timeout=2)
        for channel in channels:
            channel.close(wait=True)

    def __enter__(self) -> "Publisher":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class ReceiveGroup:
    """Set of receivers (subscribers, HTTP servers) polled by one call."""

    def __init__(self):
        self._members: list = []
        self._lock = threading.Lock()
        self._waker_r, self._waker_w = socket.socketpair()
        self._waker_r.setblocking(False)
        self._waker_w.setblocking(False)

    def _add(self, member) -> None:
        with self._lock:
            self._members.append(member)

    def _remove(self, member) -> None:
        with self._lock:
            if member in self._members:
                self._members.remove(member)

    def wake(self) -> None:
        try:
            self._waker_w.send(b"\x00")
        except OSError:
            pass

    def _drain_waker(self) -> None:
        while True:
            try:
                if not self._waker_r.recv(4096):
                    return
            except OSError:
                return

    def receive(self, timeout_ms: int | None = None) -> bool:
        """Dispatch every queued message/request across all members.

        Blocks up to timeout_ms (0 = non-blocking poll, None = forever);
        returns True iff at least one message or HTTP request was
        processed.  Handlers run on this thread.  One caller at a time
        per group; handlers must not re-enter receive().
        """
        deadline = None if timeout_ms is None else time.monotonic() + timeout_ms / 1000.0
        while True:
            with self._lock:
                members = list(self._members)
            processed = 0
            for member in members:
                processed += member._drain()
            self._drain_waker()
            if processed:
                return True
            if deadline is not None:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return False
            else:
                remaining = None
            socks = [self._waker_r]
            for member in members:
                socks.extend(member._pollables())
            try:
                select.select(socks, [], [], remaining)
            except (OSError, ValueError):
                # a socket was closed under us; re-collect and retry
                time.sleep(0.001)
                continue


class Subscriber:
    """Receives frames and dispatches subscribed digests to handlers."""

    def __init__(
        self,
        uri: Uri | str | None = None,
        *,
        session: str | None = None,
        share=None,
    ):
        if uri is not None and session is not None:
            raise ValueError("pass either a URI or a session, not both")
        self._group = share._group if share is not None else ReceiveGroup()
        self._table: dict[bytes, Callable[[bytes], None]] = {}
        self._conns: dict[socket.socket, FrameDecoder] = {}
        self._conn_uris: set[str] = set()
        self._sock_uri: dict[socket.socket, str] = {}
        self._lock = threading.Lock()
        self._stopped = threading.Event()
        self._listener = None
        self._connector = None
        self._session = None
        if uri is not None:
            self._target = as_uri(uri)
            self._connector = threading.Thread(
                target=self._connect_loop, name="zlink-connector", daemon=True
            )
            self._connector.start()
        else:
            self._session = _resolve_session(session)
            if self._session != NULL_SESSION:
                self._listener = BeaconListener(self._on_beacon)
        self._group._add(self)

    @property
    def session(self) -> str | None:
        return self._session

    @property
    def group(self) -> ReceiveGroup:
        return self._group

    def connected_uris(self) -> set[str]:
        with self._lock:
            return set(self._conn_uris)

    # -- connection management ------------------------------------------

    def _connect_loop(self) -> None:
        key = str(self._target)
        while not self._stopped.is_set():
            with self._lock:
                connected = key in self._conn_uris
            if not connected:
                self._try_connect(self._target, key)
            self._stopped.wait(RECONNECT_INTERVAL_S)

    def _on_beacon(self, session: str, uri_text: str) -> None:
        if session != self._session or self._stopped.is_set():
            return
        try:
            target = Uri.parse(uri_text)
        except Exception:
            return
        with self._lock:
            if str(target) in self._conn_uris:
                return
        self._try_connect(target, str(target))

    def _try_connect(self, target: Uri, key: str) -> None:
        with self._lock:
            if key in self._conn_uris:
                return
            self._conn_uris.add(key)
        try:
            sock = socket.create_connection((target.host, target.port), timeout=2.0)
        except OSError:
            with self._lock:
                self._conn_uris.discard(key)
            return
        sock.setblocking(False)
        with self._lock:
            if self._stopped.is_set():
                sock.close()
                self._conn_uris.discard(key)
                return
            self._conns[sock] = FrameDecoder()
            self._sock_uri[sock] = key
        self._group.wake()

    def _drop(self, sock: socket.socket) -> None:
        with self._lock:
            self._conns.pop(sock, None)
            key = self._sock_uri.pop(sock, None)
            if key:
                self._conn_uris.discard(key)
        try:
            sock.close()
        except OSError:
            pass

    # -- subscriptions ----------------------------------------------------

    def subscribe(self, obj) -> None:
        """Route frames of obj's type into obj (from_binary), then fire
        its optional updated callback."""

        def handle(payload: bytes) -> None:
            try:
                obj.from_binary(payload)
            except DecodeError:
                return  # malformed payload from a peer; keep current state
            callback = obj.updated
            if callback is not None:
                callback()

        self.subscribe_raw(obj.digest, handle)

    def subscribe_raw(self, digest, handler: Callable[[bytes], None]) -> None:
        key = _digest_bytes(digest)
        with self._lock:
            if key in self._table:
                raise DuplicateSubscription(f"digest {key.hex()} already subscribed")
            self._table[key] = handler

    def unsubscribe(self, digest) -> bool:
        key = _digest_bytes(digest)
        with self._lock:
            return self._table.pop(key, None) is not None

    # -- receive loop ------------------------------------------------------

    def receive(self, timeout_ms: int | None = None) -> bool:
        return self._group.receive(timeout_ms)

    def _pollables(self) -> list[socket.socket]:
        with self._lock:
            return list(self._conns)

    def _drain(self) -> int:
        processed = 0
        with self._lock:
            conns = list(self._conns.items())
        for sock, decoder in conns:
            while True:
                try:
                    data = sock.recv(65536)
                except (BlockingIOError, InterruptedError):
                    break
                except OSError:
                    data = b""
                if not data:
                    self._drop(sock)
                    break
                try:
                    frames = decoder.feed(data)
                except ValueError:
                    self._drop(sock)
                    break
                for digest, payload in frames:
                    with self._lock:
                        handler = self._table.get(digest)
                    if handler is not None:
                        handler(payload)
                        processed += 1
        return processed

    def close(self) -> None:
        self._stopped.set()
        if self._listener:
            self._listener.stop()
        with self._lock:
            conns = list(self._conns)
            self._conns.clear()
            self._conn_uris.clear()
        for sock in conns:
            try:
                sock.close()
            except OSError:
                pass
        self._group._remove(self)

    def __enter__(self) -> "Subscriber":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
