"""tcp:// addresses used by publishers, subscribers and the REST server."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidUri


@dataclass(frozen=True)
class Uri:
    """`tcp://host:port`; port 0 means "pick an ephemeral port at bind"."""

    host: str
    port: int = 0

    def __post_init__(self):
        if not self.host:
            raise InvalidUri("empty host")
        if not 0 <= self.port <= 65535:
            raise InvalidUri(f"port {self.port} out of range")

    @classmethod
    def parse(cls, text: str) -> "Uri":
        """Accepts `tcp://host:port`, `tcp://host`, `host:port` or `host`."""
        if not isinstance(text, str) or not text.strip():
            raise InvalidUri(f"not a URI: {text!r}")
        rest = text.strip()
        if "://" in rest:
            scheme, rest = rest.split("://", 1)
            if scheme != "tcp":
                raise InvalidUri(f"unsupported scheme {scheme!r}")
        if "/" in rest:
            raise InvalidUri(f"unexpected path in {text!r}")
        host, sep, port_text = rest.rpartition(":")
        if not sep:
            host, port_text = rest, ""
        port = 0
        if port_text:
            if not port_text.isdigit():
                raise InvalidUri(f"bad port in {text!r}")
            port = int(port_text)
        if not host:
            raise InvalidUri(f"empty host in {text!r}")
        return cls(host=host, port=port)

    def __str__(self) -> str:
        return f"tcp://{self.host}:{self.port}"


def as_uri(value) -> Uri:
    if isinstance(value, Uri):
        return value
    return Uri.parse(value)
