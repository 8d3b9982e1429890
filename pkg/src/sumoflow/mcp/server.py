"""MCP request lifecycle: initialize, tools/list, tools/call.

One McpServer instance services one connection, strictly sequentially.
Protocol errors map to JSON-RPC error responses; tool-level failures are
successful RPC responses whose result carries isError=true.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from ..errors import (
    AlreadyInitializedError,
    HandlerFailureError,
    NotInitializedError,
    SchemaViolationError,
    SumoflowError,
    UnknownToolError,
    UnsupportedVersionError,
)
from .messages import RpcMessage

if TYPE_CHECKING:
    from ..toolserver.registry import ToolRegistry

log = logging.getLogger(__name__)

PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
INTERNAL_ERROR = -32603
ALREADY_INITIALIZED = -32001
NOT_INITIALIZED = -32002
UNSUPPORTED_VERSION = -32003

DEFAULT_PROTOCOL_VERSIONS = ["2025-06-18", "2025-03-26", "2024-11-05"]


@dataclass
class ServerConfig:
    name: str = "sumoflow"
    version: str = "0.1.0"
    protocol_versions: list[str] = field(default_factory=lambda: list(DEFAULT_PROTOCOL_VERSIONS))


class McpServer:
    """Stateful per-connection MCP endpoint over a shared tool registry."""

    def __init__(self, registry: "ToolRegistry", config: ServerConfig | None = None):
        self.registry = registry
        self.config = config or ServerConfig()
        self.initialized = False

    # -- lifecycle handlers --------------------------------------------------

    def handle_initialize(self, params: dict | None) -> dict:
        if self.initialized:
            raise AlreadyInitializedError("connection already initialized")
        params = params or {}
        requested = params.get("protocolVersion")
        if requested is not None and requested not in self.config.protocol_versions:
            raise UnsupportedVersionError(str(requested), self.config.protocol_versions)
        selected = requested or self.config.protocol_versions[0]
        self.initialized = True
        return {
            "protocolVersion": selected,
            "serverInfo": {"name": self.config.name, "version": self.config.version},
            "capabilities": {"tools": {}},
        }

    def handle_tools_list(self) -> dict:
        self._require_initialized()
        return {"tools": [d.to_wire() for d in self.registry.descriptors()]}

    def handle_tools_call(self, params: dict | None) -> dict:
        self._require_initialized()
        params = params or {}
        name = params.get("name")
        if not isinstance(name, str):
            raise SchemaViolationError(str(name), ["name: tool name must be a string"])
        result = self.registry.call(name, params.get("arguments") or {})
        return result.to_wire()

    def _require_initialized(self) -> None:
        if not self.initialized:
            raise NotInitializedError("initialize must be the first request")

    # -- dispatch ----------------------------------------------------------------

    def handle_message(self, message: RpcMessage) -> RpcMessage | None:
        """Process one decoded request; None for notifications."""
        if not message.is_request:
            return None
        if message.method.startswith("notifications/"):
            return None
        try:
            result = self._dispatch(message.method, message.params)
        except SumoflowError as exc:
            return RpcMessage(id=message.id, error=self._error_payload(exc))
        except Exception as exc:  # not expected; keep the connection alive
            log.exception("internal error handling %s", message.method)
            return RpcMessage(
                id=message.id, error={"code": INTERNAL_ERROR, "message": str(exc)}
            )
        if message.is_notification:
            return None
        return RpcMessage(id=message.id, result=result)

    def _dispatch(self, method: str, params: Any) -> dict:
        if method == "initialize":
            return self.handle_initialize(params)
        if method == "tools/list":
            return self.handle_tools_list()
        if method == "tools/call":
            return self.handle_tools_call(params)
        raise _MethodNotFound(method)

    @staticmethod
    def _error_payload(exc: SumoflowError) -> dict:
        if isinstance(exc, _MethodNotFound):
            return {"code": METHOD_NOT_FOUND, "message": str(exc)}
        if isinstance(exc, AlreadyInitializedError):
            return {"code": ALREADY_INITIALIZED, "message": str(exc)}
        if isinstance(exc, NotInitializedError):
            return {"code": NOT_INITIALIZED, "message": str(exc)}
        if isinstance(exc, UnsupportedVersionError):
            return {
                "code": UNSUPPORTED_VERSION,
                "message": str(exc),
                "data": {"supported": exc.supported},
            }
        if isinstance(exc, UnknownToolError):
            return {"code": INVALID_PARAMS, "message": str(exc)}
        if isinstance(exc, SchemaViolationError):
            return {
                "code": INVALID_PARAMS,
                "message": str(exc),
                "data": {"violations": exc.violations},
            }
        if isinstance(exc, HandlerFailureError):
            return {"code": INTERNAL_ERROR, "message": str(exc)}
        return {"code": INTERNAL_ERROR, "message": str(exc)}


class _MethodNotFound(SumoflowError):
    def __init__(self, method: str):
        super().__init__(f"method {method!r} not found")
