from .messages import (
    JSONRPC_VERSION,
    RpcMessage,
    ToolDescriptor,
    ToolResult,
    decode_message,
    encode_message,
    validate_args,
)
from .server import McpServer, ServerConfig

__all__ = [
    "JSONRPC_VERSION",
    "McpServer",
    "RpcMessage",
    "ServerConfig",
    "ToolDescriptor",
    "ToolResult",
    "decode_message",
    "encode_message",
    "validate_args",
]
