"""Newline-delimited JSON-RPC transport over standard streams.

Reads one request per line from stdin, writes one response per line to
stdout, and exits on end-of-stream. Parse failures produce JSON-RPC error
responses rather than terminating the loop.
"""

from __future__ import annotations

import sys
from typing import IO

from ..errors import InvalidRpcError, MalformedFrameError
from .messages import RpcMessage, decode_message, encode_message
from .server import INVALID_REQUEST, PARSE_ERROR, McpServer


def serve_stdio(server: McpServer, stdin: IO[str] | None = None, stdout: IO[str] | None = None) -> None:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            message = decode_message(line)
        except MalformedFrameError as exc:
            _emit(stdout, RpcMessage(id=None, error={"code": PARSE_ERROR, "message": str(exc)}))
            continue
        except InvalidRpcError as exc:
            _emit(stdout, RpcMessage(id=None, error={"code": INVALID_REQUEST, "message": str(exc)}))
            continue
        response = server.handle_message(message)
        if response is not None:
            _emit(stdout, response)


def _emit(stdout: IO[str], message: RpcMessage) -> None:
    stdout.write(encode_message(message) + "\n")
    stdout.flush()
