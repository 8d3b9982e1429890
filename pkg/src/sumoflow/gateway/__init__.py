from .app import Gateway, GatewayConfig, create_app
from .events import EventLog, SequencedEvent

__all__ = ["EventLog", "Gateway", "GatewayConfig", "SequencedEvent", "create_app"]
