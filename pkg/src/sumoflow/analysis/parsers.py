"""Parsers for the three simulation output dialects.

Each parser is total over files the simulator produces: optional fields
default to zero with a presence flag, malformed XML reports the position,
and records violating physical invariants (negative durations, occupancy
above 100%) are rejected loudly rather than silently skewing aggregates.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import MalformedXmlError


@dataclass
class TripInfoRecord:
    trip_id: str
    depart_s: float
    duration_s: float
    time_loss_s: float
    co2_abs_mg: float = 0.0
    pmx_abs_mg: float = 0.0
    nox_abs_mg: float = 0.0
    fuel_abs_mg: float = 0.0
    electricity_abs_wh: float = 0.0
    present_fields: frozenset[str] = field(default=frozenset(), repr=False)

    def __post_init__(self) -> None:
        if self.duration_s < 0:
            raise ValueError(f"trip {self.trip_id}: negative duration")
        if self.time_loss_s < 0:
            raise ValueError(f"trip {self.trip_id}: negative time loss")
        for name in ("co2_abs_mg", "pmx_abs_mg", "nox_abs_mg", "fuel_abs_mg", "electricity_abs_wh"):
            if getattr(self, name) < 0:
                raise ValueError(f"trip {self.trip_id}: negative {name}")


@dataclass
class EdgeStatRecord:
    edge_id: str
    begin_s: float
    end_s: float
    density_veh_km: float = 0.0
    occupancy_pct: float = 0.0
    speed_m_s: float = 0.0
    midpoint: tuple[float, float] | None = None
    present_fields: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not 0 <= self.occupancy_pct <= 100:
            raise ValueError(f"edge {self.edge_id}: occupancy {self.occupancy_pct} outside [0, 100]")
        if self.density_veh_km < 0:
            raise ValueError(f"edge {self.edge_id}: negative density")
        if self.speed_m_s < 0:
            raise ValueError(f"edge {self.edge_id}: negative speed")


@dataclass(frozen=True)
class SummaryStep:
    time_s: float
    running: int
    inserted: int
    ended: int


_EMISSION_MAP = {
    "CO2_abs": "co2_abs_mg",
    "PMx_abs": "pmx_abs_mg",
    "NOx_abs": "nox_abs_mg",
    "fuel_abs": "fuel_abs_mg",
    "electricity_abs": "electricity_abs_wh",
}


def _parse_root(path: Path) -> ET.Element:
    try:
        return ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise MalformedXmlError(f"{path}: {exc}") from None
    except OSError as exc:
        raise MalformedXmlError(f"{path}: {exc}") from None


def parse_tripinfo(path: Path) -> list[TripInfoRecord]:
    """One record per trip element, emissions mapped from the sub-element."""
    root = _parse_root(path)
    records = []
    for trip in root.iter("tripinfo"):
        present = {"trip_id", "depart_s"}
        values: dict[str, float] = {}
        for attr, key in (("duration", "duration_s"), ("timeLoss", "time_loss_s")):
            raw = trip.get(attr)
            if raw is not None:
                values[key] = float(raw)
                present.add(key)
        emissions = trip.find("emissions")
        if emissions is not None:
            for attr, key in _EMISSION_MAP.items():
                raw = emissions.get(attr)
                if raw is not None:
                    values[key] = float(raw)
                    present.add(key)
        try:
            records.append(
                TripInfoRecord(
                    trip_id=trip.get("id", ""),
                    depart_s=float(trip.get("depart", 0.0)),
                    duration_s=values.get("duration_s", 0.0),
                    time_loss_s=values.get("time_loss_s", 0.0),
                    co2_abs_mg=values.get("co2_abs_mg", 0.0),
                    pmx_abs_mg=values.get("pmx_abs_mg", 0.0),
                    nox_abs_mg=values.get("nox_abs_mg", 0.0),
                    fuel_abs_mg=values.get("fuel_abs_mg", 0.0),
                    electricity_abs_wh=values.get("electricity_abs_wh", 0.0),
                    present_fields=frozenset(present),
                )
            )
        except ValueError as exc:
            raise MalformedXmlError(f"{path}: {exc}") from None
    return records


def parse_edgedata(
    path: Path, midpoints: dict[str, tuple[float, float]] | None = None
) -> list[EdgeStatRecord]:
    """One record per edge per interval; midpoints come from the network geometry."""
    root = _parse_root(path)
    midpoints = midpoints or {}
    records = []
    for interval in root.iter("interval"):
        begin = float(interval.get("begin", 0.0))
        end = float(interval.get("end", 0.0))
        for edge in interval.findall("edge"):
            present = {"edge_id"}
            values = {}
            for attr, key in (
                ("density", "density_veh_km"),
                ("occupancy", "occupancy_pct"),
                ("speed", "speed_m_s"),
            ):
                raw = edge.get(attr)
                if raw is not None:
                    values[key] = float(raw)
                    present.add(key)
            edge_id = edge.get("id", "")
            try:
                records.append(
                    EdgeStatRecord(
                        edge_id=edge_id,
                        begin_s=begin,
                        end_s=end,
                        density_veh_km=values.get("density_veh_km", 0.0),
                        occupancy_pct=values.get("occupancy_pct", 0.0),
                        speed_m_s=values.get("speed_m_s", 0.0),
                        midpoint=midpoints.get(edge_id),
                        present_fields=frozenset(present),
                    )
                )
            except ValueError as exc:
                raise MalformedXmlError(f"{path}: interval [{begin}, {end}]: {exc}") from None
    return records


def parse_summary(path: Path) -> list[SummaryStep]:
    """Per-step counts; cumulative inserted/ended must be monotone."""
    root = _parse_root(path)
    steps = []
    last_inserted = last_ended = -1
    for step in root.iter("step"):
        sample = SummaryStep(
            time_s=float(step.get("time", 0.0)),
            running=int(float(step.get("running", 0))),
            inserted=int(float(step.get("inserted", 0))),
            ended=int(float(step.get("ended", 0))),
        )
        if sample.inserted < last_inserted or sample.ended < last_ended:
            raise MalformedXmlError(
                f"{path}: cumulative counts decreased at step t={sample.time_s}"
            )
        last_inserted, last_ended = sample.inserted, sample.ended
        steps.append(sample)
    return steps
