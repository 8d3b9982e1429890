"""JSON-RPC message model, framing, and tool argument validation.

Transport framing is one UTF-8 JSON object per line. A message is either a
request (method present) or a response (exactly one of result/error present);
decode_message enforces that discipline and encode/decode round-trip exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

import jsonschema

from ..errors import InvalidRpcError, MalformedFrameError, SchemaViolationError

JSONRPC_VERSION = "2.0"


@dataclass(frozen=True)
class RpcMessage:
    id: int | str | None = None
    method: str | None = None
    params: Any = None
    result: Any = None
    error: dict | None = None

    @property
    def is_request(self) -> bool:
        return self.method is not None

    @property
    def is_notification(self) -> bool:
        return self.method is not None and self.id is None

    @property
    def is_response(self) -> bool:
        return self.method is None


def decode_message(raw: str) -> RpcMessage:
    """Parse one transport frame into an RpcMessage."""
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedFrameError(f"frame is not valid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise InvalidRpcError("frame must be a JSON object")

    has_method = "method" in payload
    has_result = "result" in payload
    has_error = "error" in payload
    if has_method and (has_result or has_error):
        raise InvalidRpcError("message mixes request and response fields")
    if not has_method:
        if has_result == has_error:
            raise InvalidRpcError("response must carry exactly one of result/error")
        if "id" not in payload:
            raise InvalidRpcError("response carries no id")
    if has_method and not isinstance(payload["method"], str):
        raise InvalidRpcError("method must be a string")
    msg_id = payload.get("id")
    if msg_id is not None and not isinstance(msg_id, (int, str)):
        raise InvalidRpcError("id must be an integer or string")

    return RpcMessage(
        id=msg_id,
        method=payload.get("method"),
        params=payload.get("params"),
        result=payload.get("result"),
        error=payload.get("error"),
    )


def encode_message(message: RpcMessage) -> str:
    """Serialize to one line; stable key order so repeats are byte-identical."""
    payload: dict[str, Any] = {"jsonrpc": JSONRPC_VERSION}
    if message.is_request:
        if message.id is not None:
            payload["id"] = message.id
        payload["method"] = message.method
        if message.params is not None:
            payload["params"] = message.params
    else:
        payload["id"] = message.id
        if message.error is not None:
            payload["error"] = message.error
        else:
            payload["result"] = message.result
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


@dataclass(frozen=True)
class ToolDescriptor:
    """A published tool: the description is the LLM's selection guidance."""

    name: str
    description: str
    input_schema: dict
    side_effecting: bool = False
    handler: Callable[..., "ToolResult"] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.name or not self.name.replace("_", "").isalnum():
            raise ValueError(f"tool name {self.name!r} is not an identifier")
        if not self.description.strip():
            raise ValueError(f"tool {self.name!r} has an empty description")
        declared = set(self.input_schema.get("properties", {}))
        missing = [p for p in self.input_schema.get("required", []) if p not in declared]
        if missing:
            raise ValueError(f"tool {self.name!r} requires undeclared parameters: {missing}")

    def to_wire(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "inputSchema": self.input_schema,
            "annotations": {"readOnlyHint": not self.side_effecting},
        }


@dataclass
class ToolResult:
    """Typed content blocks plus an error flag, as returned by tools/call."""

    content: list[dict] = field(default_factory=list)
    is_error: bool = False

    @classmethod
    def text(cls, message: str) -> "ToolResult":
        return cls(content=[{"type": "text", "text": message}])

    @classmethod
    def failure(cls, message: str) -> "ToolResult":
        return cls(content=[{"type": "text", "text": message}], is_error=True)

    def add_text(self, message: str) -> "ToolResult":
        self.content.append({"type": "text", "text": message})
        return self

    def add_value(self, value: Any) -> "ToolResult":
        self.content.append({"type": "structured", "value": value})
        return self

    def add_artifact(self, role: str, path: str, content_hash: str) -> "ToolResult":
        self.content.append(
            {"type": "artifact", "role": role, "path": path, "hash": content_hash}
        )
        return self

    def to_wire(self) -> dict:
        return {"content": self.content, "isError": self.is_error}

    def first_text(self) -> str:
        for block in self.content:
            if block.get("type") == "text":
                return block["text"]
        return ""

    def artifacts(self) -> list[dict]:
        return [b for b in self.content if b.get("type") == "artifact"]


def validate_args(descriptor: ToolDescriptor, args: dict) -> None:
    """Validate call arguments against the tool schema, reporting every violation."""
    if not isinstance(args, dict):
        raise SchemaViolationError(descriptor.name, ["arguments must be an object"])
    validator = jsonschema.Draft7Validator(descriptor.input_schema)
    violations = []
    for err in sorted(validator.iter_errors(args), key=lambda e: list(e.absolute_path)):
        where = ".".join(str(p) for p in err.absolute_path) or "arguments"
        violations.append(f"{where}: {err.message}")
    if violations:
        raise SchemaViolationError(descriptor.name, violations)
