"""Per-session append-only event logs with sequence numbers.

The log is the single source of truth for what a session's clients see:
every planner event is appended under the session lock before the POST that
caused it returns, so a subsequent stream read always includes it.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field

from ..planner.engine import PlannerEvent


@dataclass
class SequencedEvent:
    seq: int
    kind: str
    payload: dict

    def to_json(self) -> dict:
        return {"seq": self.seq, "kind": self.kind, "payload": self.payload}

    def to_sse(self) -> str:
        body = json.dumps(self.to_json(), sort_keys=True)
        return f"id: {self.seq}\nevent: {self.kind}\ndata: {body}\n\n"


@dataclass
class EventLog:
    events: list[SequencedEvent] = field(default_factory=list)
    _condition: threading.Condition = field(default_factory=threading.Condition)

    def append(self, event: PlannerEvent) -> SequencedEvent:
        with self._condition:
            sequenced = SequencedEvent(seq=len(self.events) + 1, kind=event.kind, payload=event.payload)
            self.events.append(sequenced)
            self._condition.notify_all()
            return sequenced

    def since(self, seq: int) -> list[SequencedEvent]:
        with self._condition:
            return self.events[seq:]

    def wait_for_more(self, seq: int, timeout_s: float) -> list[SequencedEvent]:
        with self._condition:
            self._condition.wait_for(lambda: len(self.events) > seq, timeout=timeout_s)
            return self.events[seq:]
