"""Tool registry: publication, argument validation, gated dispatch."""

from __future__ import annotations

import logging

from ..errors import DuplicateNameError, SumoflowError, UnknownToolError
from ..mcp.messages import ToolDescriptor, ToolResult, validate_args

log = logging.getLogger(__name__)


class ToolRegistry:
    """Ordered, name-unique collection of tool descriptors with handlers.

    Arguments are schema-validated before any handler runs, so a rejected
    call can never cause side effects. Handler exceptions become is_error
    tool results; the registry itself is immutable during a call.
    """

    def __init__(self) -> None:
        self._tools: dict[str, ToolDescriptor] = {}

    def register(self, descriptor: ToolDescriptor) -> ToolDescriptor:
        if descriptor.name in self._tools:
            raise DuplicateNameError(f"tool {descriptor.name!r} already registered")
        if descriptor.handler is None:
            raise ValueError(f"tool {descriptor.name!r} registered without a handler")
        self._tools[descriptor.name] = descriptor
        return descriptor

    def descriptors(self) -> list[ToolDescriptor]:
        return list(self._tools.values())

    def get(self, name: str) -> ToolDescriptor:
        try:
            return self._tools[name]
        except KeyError:
            raise UnknownToolError(f"no tool named {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._tools

    def __len__(self) -> int:
        return len(self._tools)

    def call(self, name: str, args: dict) -> ToolResult:
        """Validate then dispatch; tool failures are results, not exceptions."""
        descriptor = self.get(name)
        validate_args(descriptor, args)
        try:
            result = descriptor.handler(**args)
        except SumoflowError as exc:
            log.info("tool %s failed: %s", name, exc)
            return ToolResult.failure(f"{type(exc).__name__}: {exc}")
        if not isinstance(result, ToolResult):
            result = ToolResult.text(str(result))
        return result
