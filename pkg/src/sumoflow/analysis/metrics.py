"""Metric aggregation and spatial filtering.

Aggregation is exact arithmetic over parsed records. Emission-like metrics
are reported with both mean-per-trip and network-total labels because a bare
"CO2 (kg)" figure is ambiguous; travel-time-like metrics default to means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import NoDataError
from .parsers import EdgeStatRecord, TripInfoRecord

TRIP_FIELDS = (
    "duration_s",
    "time_loss_s",
    "co2_abs_mg",
    "pmx_abs_mg",
    "nox_abs_mg",
    "fuel_abs_mg",
    "electricity_abs_wh",
)
EDGE_FIELDS = ("density_veh_km", "occupancy_pct", "speed_m_s")

_LABEL_TEXT = {
    "duration_s": "travel time (s)",
    "time_loss_s": "congestion delay (s)",
    "co2_abs_mg": "CO2 emitted (mg)",
    "pmx_abs_mg": "particulate matter emitted (mg)",
    "nox_abs_mg": "nitrogen oxides emitted (mg)",
    "fuel_abs_mg": "fuel consumed (mg)",
    "electricity_abs_wh": "electricity consumed (Wh)",
    "density_veh_km": "traffic density (veh/km)",
    "occupancy_pct": "road occupancy (%)",
    "speed_m_s": "space-mean speed (m/s)",
}

# which statistics each metric reports by default
DEFAULT_PLAN: dict[str, tuple[str, ...]] = {
    "duration_s": ("mean",),
    "time_loss_s": ("mean",),
    "co2_abs_mg": ("mean", "sum"),
    "pmx_abs_mg": ("mean", "sum"),
    "nox_abs_mg": ("mean", "sum"),
    "fuel_abs_mg": ("mean", "sum"),
    "electricity_abs_wh": ("mean", "sum"),
    "density_veh_km": ("mean",),
    "occupancy_pct": ("mean",),
    "speed_m_s": ("mean",),
}


@dataclass(frozen=True)
class MetricStats:
    count: int
    mean: float
    sum: float
    min: float
    max: float

    def stat(self, name: str) -> float:
        return getattr(self, name)


@dataclass
class MetricsSummary:
    run_id: str | None
    metrics: dict[str, MetricStats] = field(default_factory=dict)
    labels: dict[str, str] = field(default_factory=dict)
    plan: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def to_document(self) -> dict:
        """Stable structured document: one entry per planned metric statistic."""
        doc: dict[str, dict] = {}
        for name, stats in sorted(self.metrics.items()):
            entry: dict = {"count": stats.count, "min": stats.min, "max": stats.max}
            for stat_name in self.plan.get(name, ("mean",)):
                key = f"{name}.{stat_name}"
                entry[stat_name] = stats.stat(stat_name)
                entry.setdefault("labels", {})[stat_name] = self.labels.get(key, key)
            doc[name] = entry
        return {"run_id": self.run_id, "metrics": doc}


def _label(name: str, stat_name: str) -> str:
    base = _LABEL_TEXT.get(name, name)
    if stat_name == "sum":
        return f"{base}, network total"
    if name in EDGE_FIELDS or name in ("duration_s", "time_loss_s"):
        return f"average {base}"
    return f"{base}, mean per trip"


def aggregate(
    records: list[TripInfoRecord] | list[EdgeStatRecord],
    plan: dict[str, tuple[str, ...]] | None = None,
    run_id: str | None = None,
) -> MetricsSummary:
    """Exact per-metric statistics over homogeneous records."""
    if not records:
        raise NoDataError("no records to aggregate")
    fields = TRIP_FIELDS if isinstance(records[0], TripInfoRecord) else EDGE_FIELDS
    effective_plan = {
        name: stats for name, stats in (plan or DEFAULT_PLAN).items() if name in fields
    }
    summary = MetricsSummary(run_id=run_id, plan=effective_plan)
    for name in effective_plan:
        values = [getattr(r, name) for r in records]
        total = math.fsum(values)
        summary.metrics[name] = MetricStats(
            count=len(values),
            mean=total / len(values),
            sum=total,
            min=min(values),
            max=max(values),
        )
        for stat_name in effective_plan[name]:
            summary.labels[f"{name}.{stat_name}"] = _label(name, stat_name)
    return summary


def spatial_filter(
    records: list[EdgeStatRecord], center: tuple[float, float], radius_m: float
) -> list[EdgeStatRecord]:
    """Records whose edge midpoint lies within the radius (network coordinates)."""
    if radius_m < 0:
        raise ValueError("radius must be >= 0")
    if math.isinf(radius_m):
        return list(records)
    cx, cy = center
    kept = []
    for record in records:
        if record.midpoint is None:
            continue
        dx, dy = record.midpoint[0] - cx, record.midpoint[1] - cy
        if math.hypot(dx, dy) <= radius_m:
            kept.append(record)
    return kept
