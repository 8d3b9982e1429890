from .metrics import (
    DEFAULT_PLAN,
    MetricStats,
    MetricsSummary,
    aggregate,
    spatial_filter,
)
from .parsers import (
    EdgeStatRecord,
    SummaryStep,
    TripInfoRecord,
    parse_edgedata,
    parse_summary,
    parse_tripinfo,
)
from .plots import plot_edge_metric
from .simulate import SimulationOutputs, run_simulation
from .store import ResultStore, RunRecord

__all__ = [
    "DEFAULT_PLAN",
    "EdgeStatRecord",
    "MetricStats",
    "MetricsSummary",
    "ResultStore",
    "RunRecord",
    "SimulationOutputs",
    "SummaryStep",
    "TripInfoRecord",
    "aggregate",
    "parse_edgedata",
    "parse_summary",
    "parse_tripinfo",
    "plot_edge_metric",
    "run_simulation",
    "spatial_filter",
]
