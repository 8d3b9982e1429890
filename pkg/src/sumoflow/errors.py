"""Exception hierarchy shared across sumoflow subsystems.

Every error that crosses a module boundary derives from SumoflowError so
callers (RPC layer, planner loop, CLI) can convert failures into structured
responses without blanket ``except Exception`` handlers.
"""

from __future__ import annotations


class SumoflowError(Exception):
    """Base class for all sumoflow errors."""


# --- RPC / MCP layer ---------------------------------------------------------


class MalformedFrameError(SumoflowError):
    """A transport frame was not valid JSON."""


class InvalidRpcError(SumoflowError):
    """A frame parsed as JSON but violates JSON-RPC message discipline."""


class AlreadyInitializedError(SumoflowError):
    """A second initialize request arrived on one connection."""


class UnsupportedVersionError(SumoflowError):
    """Version negotiation failed; carries the supported list."""

    def __init__(self, requested: str, supported: list[str]):
        super().__init__(f"unsupported protocol version {requested!r}; supported: {supported}")
        self.requested = requested
        self.supported = supported


class NotInitializedError(SumoflowError):
    """A request other than initialize arrived before the handshake."""


class UnknownToolError(SumoflowError):
    """tools/call named a tool that is not registered."""


class SchemaViolationError(SumoflowError):
    """Tool arguments failed schema validation; lists every violated field."""

    def __init__(self, tool: str, violations: list[str]):
        super().__init__(f"arguments for {tool!r} violate schema: " + "; ".join(violations))
        self.tool = tool
        self.violations = violations


class HandlerFailureError(SumoflowError):
    """A tool handler raised; wrapped as an is_error tool result."""


# --- Tool server / workspace -------------------------------------------------


class DuplicateNameError(SumoflowError):
    """A tool name was registered twice."""


class NotAllowlistedError(SumoflowError):
    """Subprocess program is not on the executable allowlist."""


class SubprocessTimeoutError(SumoflowError):
    """Subprocess exceeded its timeout and was killed."""


class MissingArtifactError(SumoflowError):
    """Subprocess exited 0 but an expected output file is absent."""


class ArtifactNotFoundError(SumoflowError):
    """No artifact registered for the requested role."""


class SandboxViolationError(SumoflowError):
    """A path argument resolves outside the session workspace."""


# --- Scenario generation ------------------------------------------------------


class PoleProximityError(SumoflowError):
    """Center latitude too close to a pole for the longitude conversion."""


class EmptyDemandError(SumoflowError):
    """An OD demand set contained no pairs or no vehicles."""


class MixedModeError(SumoflowError):
    """Coordinate and zone OD pairs mixed within one demand set."""


class GeocodeNoMatchError(SumoflowError):
    """Geocoding found no result for the query."""


class GeocodeUnavailableError(SumoflowError):
    """Geocoding service unreachable; planner may ask the user instead."""


class DownloadFailureError(SumoflowError):
    """OSM extract retrieval failed."""


class EmptyExtractError(SumoflowError):
    """OSM extract contains no road data."""


class OversizedRegionError(SumoflowError):
    """Requested bbox exceeds the configured area cap."""


class ConversionFailureError(SumoflowError):
    """netconvert exited nonzero; stderr attached."""


class EmptyNetworkError(SumoflowError):
    """Network has no usable lanes (total lane-km is zero)."""


class GenerationFailureError(SumoflowError):
    """Random trip generation failed."""


class RoutingFailureError(SumoflowError):
    """Router crashed or too many trips were unroutable."""

    def __init__(self, message: str, total: int = 0, unrouted: int = 0):
        super().__init__(message)
        self.total = total
        self.unrouted = unrouted


class UnknownZoneError(SumoflowError):
    """OD matrix references a zone id absent from the zone polygons."""


class ChainFailureError(SumoflowError):
    """A stage of the zone-OD chain failed; names the stage."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


class DanglingReferenceError(SumoflowError):
    """Simulation config references an artifact that does not exist."""


# --- Policy tools -------------------------------------------------------------


class NoSignalsError(SumoflowError):
    """Network has no traffic lights; signal tools are inapplicable."""


class PolicyToolFailureError(SumoflowError):
    """A SUMO-distributed policy script exited nonzero."""


class UnknownEdgeError(SumoflowError):
    """Edge id not present in the network."""


class WouldRemoveAllLanesError(SumoflowError):
    """Lane reduction would leave the edge with zero lanes."""


class NonPositiveSpeedError(SumoflowError):
    """Speed adjustment requires a positive speed."""


class EmptyRoutesError(SumoflowError):
    """Route file carries no vehicles."""


# --- Analysis ------------------------------------------------------------------


class SimulationFailureError(SumoflowError):
    """sumo exited nonzero; stderr attached."""


class MalformedXmlError(SumoflowError):
    """Simulation output failed to parse; position reported."""


class NoDataError(SumoflowError):
    """Aggregation requested over zero records."""


class DuplicateRunError(SumoflowError):
    """run_id already persisted."""


class StoreFailureError(SumoflowError):
    """Result store operation failed."""


class UnknownRunError(SumoflowError):
    """run_id not present in the store."""


class PlotFailureError(SumoflowError):
    """Plot script failed or produced no image."""


# --- Planner -------------------------------------------------------------------


class EmptyQueryError(SumoflowError):
    """Classification requires a non-empty user query."""


class UnknownTaskFamilyError(SumoflowError):
    """No scenario schema exists for the requested task family."""


class UnresolvedParametersError(SumoflowError):
    """Plan proposal attempted while required slots are still missing."""


class NoPendingPlanError(SumoflowError):
    """Plan decision arrived with no plan awaiting confirmation."""


class IllegalTransitionError(SumoflowError):
    """Plan status transition outside the allowed state machine."""


class ProviderError(SumoflowError):
    """LLM provider failed after the configured retries."""


class MalformedToolCallError(SumoflowError):
    """LLM tool invocation failed schema validation; never executed."""


# --- Gateway / CLI ---------------------------------------------------------------


class ConfigError(SumoflowError):
    """Configuration file invalid; names the offending field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"config field {field!r}: {message}")
        self.field = field


class ScenarioParseError(SumoflowError):
    """Declarative scenario file failed validation."""
