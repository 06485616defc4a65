"""Introspectable REST bridge into the receive loop.

Registered objects appear as endpoints named after their fully qualified
type (namespace separators become ``/``, CamelCase becomes kebab-case):
``tide.ResizeWindow`` is served at ``/tide/resize-window``.  The service
is self-describing:

* ``GET /registry``       -> JSON object mapping endpoint name to verbs
* ``GET /<ep>/schema``    -> the endpoint's JSON Schema
* ``GET /<ep>``           -> current object state as JSON
* ``PUT /<ep>``           -> partial update from the JSON body, then the
  object's updated callback fires; replies 200 with an empty body

Network threads only parse and park requests; routing and object access
happen on whichever thread calls receive(), and the parked connection
thread writes the reply once the handler's result is ready.  Every
accepted request is answered exactly once: unroutable protocol errors
(missing Content-Length, malformed request lines) are answered inline,
everything else via the queue.
"""

from __future__ import annotations

import json
import re
import threading
from collections import deque
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .errors import (
    BindFailed,
    DuplicateEndpoint,
    JsonSyntax,
    KindMismatch,
    UnknownKey,
    Utf8Error,
)
from .pubsub import ReceiveGroup
from .schema import json_schema
from .uri import Uri, as_uri

VERB_ORDER = ("GET", "POST", "PUT", "PATCH", "DELETE")

#: how long a connection thread waits for a receive() call to produce
#: the reply before giving up with 503
REPLY_TIMEOUT_S = 30.0

_CAMEL_RE = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")


def endpoint_name(type_name: str) -> str:
    """Derive the REST path for a fully qualified type name."""
    segments = type_name.split(".")
    return "/".join(_CAMEL_RE.sub("-", seg).lower() for seg in segments)


@dataclass
class EndpointRecord:
    name: str
    verbs: tuple[str, ...]
    obj: object
    schema: str


class _Pending:
    __slots__ = ("verb", "path", "body", "event", "response")

    def __init__(self, verb: str, path: str, body: bytes):
        self.verb = verb
        self.path = path
        self.body = body
        self.event = threading.Event()
        self.response: tuple[int, bytes] | None = None

    def resolve(self, status: int, body: bytes) -> None:
        self.response = (status, body)
        self.event.set()


class HttpServer:
    """REST server whose request processing rides the receive loop."""

    def __init__(self, uri: Uri | str | None = None, share=None):
        bind_uri = as_uri(uri) if uri is not None else None
        host = bind_uri.host if bind_uri else ""
        port = bind_uri.port if bind_uri else 0
        try:
            self._httpd = ThreadingHTTPServer((host, port), _Handler)
        except OSError as exc:
            raise BindFailed(f"cannot bind {host or '*'}:{port}: {exc}") from None
        self._httpd.daemon_threads = True
        self._httpd.bridge = self
        advertised = bind_uri.host if bind_uri else "127.0.0.1"
        self._uri = Uri(advertised, self._httpd.server_address[1])
        self._registry: dict[str, EndpointRecord] = {}
        self._pending: deque[_Pending] = deque()
        self._lock = threading.Lock()
        self._group = share._group if share is not None else ReceiveGroup()
        self._group._add(self)
        self._thread = threading.Thread(
            target=self._httpd.serve_forever, name="zlink-http", daemon=True
        )
        self._thread.start()

    @property
    def uri(self) -> Uri:
        return self._uri

    @property
    def group(self) -> ReceiveGroup:
        return self._group

    # -- registry ---------------------------------------------------------

    def register(self, obj, mode: str = "read_write") -> str:
        """Expose an object; mode is "read", "write" or "read_write"."""
        verbs = {"read": ("GET",), "write": ("PUT",), "read_write": ("GET", "PUT")}.get(mode)
        if verbs is None:
            raise ValueError(f"mode must be read, write or read_write, not {mode!r}")
        name = endpoint_name(obj.type_name)
        with self._lock:
            if name in self._registry:
                raise DuplicateEndpoint(f"endpoint {name!r} already registered")
            self._registry[name] = EndpointRecord(
                name=name, verbs=verbs, obj=obj, schema=json_schema(obj.typedef)
            )
        return name

    def remove(self, obj) -> bool:
        with self._lock:
            for name, record in self._registry.items():
                if record.obj is obj:
                    del self._registry[name]
                    return True
        return False

    def registry_json(self) -> str:
        with self._lock:
            table = {name: list(rec.verbs) for name, rec in self._registry.items()}
        return json.dumps(table, separators=(",", ":"))

    # -- receive-loop membership -------------------------------------------

    def receive(self, timeout_ms: int | None = None) -> bool:
        return self._group.receive(timeout_ms)

    def _pollables(self) -> list:
        return []

    def _drain(self) -> int:
        processed = 0
        while True:
            with self._lock:
                if not self._pending:
                    return processed
                request = self._pending.popleft()
            status, body = self._dispatch(request.verb, request.path, request.body)
            request.resolve(status, body)
            processed += 1

    def _enqueue(self, verb: str, path: str, body: bytes) -> _Pending:
        request = _Pending(verb, path, body)
        with self._lock:
            self._pending.append(request)
        self._group.wake()
        return request

    # -- routing (runs on the receive() caller's thread) --------------------

    def _dispatch(self, verb: str, path: str, body: bytes) -> tuple[int, bytes]:
        path = path.split("?", 1)[0].rstrip("/") or "/"
        if path == "/registry":
            if verb != "GET":
                return 405, _error("only GET is valid for /registry")
            return 200, self.registry_json().encode()
        name = path.lstrip("/")
        schema_request = False
        if name.endswith("/schema"):
            base = name[: -len("/schema")]
            with self._lock:
                if base in self._registry:
                    name, schema_request = base, True
        with self._lock:
            record = self._registry.get(name)
        if record is None:
            return 404, _error(f"no endpoint {name!r}")
        if schema_request:
            if verb != "GET":
                return 405, _error("only GET is valid for schemas")
            return 200, record.schema.encode()
        if verb not in record.verbs:
            return 405, _error(f"{verb} not allowed on {name!r}")
        if verb == "GET":
            return 200, record.obj.to_json().encode()
        # PUT: partial update, then notify
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError:
            return 400, _error("body is not valid UTF-8")
        try:
            record.obj.from_json(text)
        except (JsonSyntax, KindMismatch, UnknownKey, Utf8Error) as exc:
            return 400, _error(str(exc))
        callback = record.obj.updated
        if callback is not None:
            callback()
        return 200, b""

    def close(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        self._group._remove(self)
        # release any parked connection threads
        with self._lock:
            pending = list(self._pending)
            self._pending.clear()
        for request in pending:
            request.resolve(503, _error("server closed"))

    def __enter__(self) -> "HttpServer":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def _error(message: str) -> bytes:
    return json.dumps({"error": message}).encode()


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    # every verb the bridge understands is parked on the pending queue;
    # verbs outside this set fall through to the base class's 501
    def do_GET(self):
        self._bridge_request("GET")

    def do_PUT(self):
        self._bridge_request("PUT")

    def do_POST(self):
        self._bridge_request("POST")

    def do_PATCH(self):
        self._bridge_request("PATCH")

    def do_DELETE(self):
        self._bridge_request("DELETE")

    def _bridge_request(self, verb: str) -> None:
        length_header = self.headers.get("Content-Length")
        if verb in ("PUT", "POST", "PATCH") and length_header is None:
            self._reply(411, _error("Content-Length required"))
            return
        try:
            length = int(length_header) if length_header else 0
        except ValueError:
            self._reply(400, _error("bad Content-Length"))
            return
        body = self.rfile.read(length) if length else b""
        request = self.server.bridge._enqueue(verb, self.path, body)
        if not request.event.wait(REPLY_TIMEOUT_S):
            self._reply(503, _error("no receive() call serviced the request"))
            return
        status, payload = request.response
        self._reply(status, payload)

    def _reply(self, status: int, body: bytes) -> None:
        try:
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            if body:
                self.wfile.write(body)
        except OSError:
            pass  # peer went away; nothing to answer anymore

    def log_message(self, fmt, *args):
        pass
