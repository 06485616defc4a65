"""zlink: schema-defined binary objects, digest-typed pub-sub, REST bridge.

The pieces, bottom to top:

* :mod:`zlink.schema` compiles ``.zs`` schema text into validated type
  definitions with canonical signatures, 128-bit digests and JSON Schemas.
* :mod:`zlink.buffer` stores each object in one contiguous byte buffer
  with reflective get/set, canonical binary encoding and JSON conversion.
* :mod:`zlink.codegen` emits typed Python wrappers for a schema.
* :mod:`zlink.pubsub` moves (digest, payload) messages over TCP with
  UDP-beacon session discovery and shared receive groups.
* :mod:`zlink.http_bridge` exposes registered objects as an
  introspectable REST service serviced by the same receive loop.
"""

from . import errors
from ._kernels import backend_name
from .buffer import ObjectBuffer, allocate, from_binary
from .codegen import GeneratedModule, emit_json_schemas, generate
from .http_bridge import EndpointRecord, HttpServer, endpoint_name
from .pubsub import (
    NULL_SESSION,
    Publisher,
    ReceiveGroup,
    Subscriber,
    default_session,
)
from .schema import (
    SchemaDocument,
    TypeDef,
    TypeDigest,
    canonical_signature,
    json_schema,
    parse_schema,
    type_digest,
)
from .uri import Uri

__version__ = "0.1.0"

__all__ = [
    "ObjectBuffer",
    "allocate",
    "from_binary",
    "parse_schema",
    "canonical_signature",
    "type_digest",
    "json_schema",
    "SchemaDocument",
    "TypeDef",
    "TypeDigest",
    "generate",
    "emit_json_schemas",
    "GeneratedModule",
    "Publisher",
    "Subscriber",
    "ReceiveGroup",
    "HttpServer",
    "EndpointRecord",
    "endpoint_name",
    "Uri",
    "NULL_SESSION",
    "default_session",
    "backend_name",
    "errors",
    "__version__",
]
