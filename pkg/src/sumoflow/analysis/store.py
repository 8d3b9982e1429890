"""Embedded relational result store (SQLite file format).

Schema: runs, trip_metrics, edge_metrics, summaries, keyed by run_id. The
single-file database is inspectable with any SQLite client, which is the
point: results outlive the session and support cross-scenario queries.
"""

from __future__ import annotations

import json
import sqlite3
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import DuplicateRunError, StoreFailureError, UnknownRunError
from .metrics import MetricsSummary
from .parsers import EdgeStatRecord, TripInfoRecord

_SCHEMA = """
CREATE TABLE IF NOT EXISTS runs (
    run_id TEXT PRIMARY KEY,
    session_id TEXT NOT NULL,
    config_hash TEXT NOT NULL,
    scenario_label TEXT NOT NULL,
    output_hashes TEXT NOT NULL,
    created_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS trip_metrics (
    run_id TEXT NOT NULL REFERENCES runs(run_id),
    trip_id TEXT NOT NULL,
    depart_s REAL, duration_s REAL, time_loss_s REAL,
    co2_abs_mg REAL, pmx_abs_mg REAL, nox_abs_mg REAL,
    fuel_abs_mg REAL, electricity_abs_wh REAL
);
CREATE TABLE IF NOT EXISTS edge_metrics (
    run_id TEXT NOT NULL REFERENCES runs(run_id),
    edge_id TEXT NOT NULL,
    begin_s REAL, end_s REAL,
    density_veh_km REAL, occupancy_pct REAL, speed_m_s REAL,
    mid_x REAL, mid_y REAL
);
CREATE TABLE IF NOT EXISTS summaries (
    run_id TEXT NOT NULL REFERENCES runs(run_id),
    metric TEXT NOT NULL,
    stat TEXT NOT NULL,
    value REAL NOT NULL,
    label TEXT,
    PRIMARY KEY (run_id, metric, stat)
);
CREATE INDEX IF NOT EXISTS idx_trip_run ON trip_metrics(run_id);
CREATE INDEX IF NOT EXISTS idx_edge_run ON edge_metrics(run_id);
"""


@dataclass(frozen=True)
class RunRecord:
    run_id: str
    session_id: str
    config_hash: str
    scenario_label: str
    output_hashes: dict[str, str] = field(default_factory=dict)
    created_at: float = field(default_factory=time.time)


@dataclass
class ComparisonEntry:
    metric: str
    a: float
    b: float
    delta: float
    percent_change: float | None
    division_guard: bool = False


class ResultStore:
    """Single-writer relational store for runs and their metrics."""

    def __init__(self, path: Path | str):
        self.path = Path(path)
        # served from a request thread pool; the lock keeps us single-writer
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._lock = threading.Lock()
        with self._lock:
            self._conn.executescript(_SCHEMA)
            self._conn.commit()

    def close(self) -> None:
        self._conn.close()

    def _execute(self, sql: str, params: tuple = ()):
        with self._lock:
            return self._conn.execute(sql, params).fetchall()

    # -- writes ----------------------------------------------------------

    def persist_run(
        self,
        run: RunRecord,
        metrics: MetricsSummary | None = None,
        trip_records: list[TripInfoRecord] | None = None,
        edge_records: list[EdgeStatRecord] | None = None,
    ) -> str:
        if self.has_run(run.run_id):
            raise DuplicateRunError(f"run {run.run_id!r} already persisted")
        try:
            with self._lock, self._conn:
                self._conn.execute(
                    "INSERT INTO runs VALUES (?, ?, ?, ?, ?, ?)",
                    (
                        run.run_id,
                        run.session_id,
                        run.config_hash,
                        run.scenario_label,
                        json.dumps(run.output_hashes, sort_keys=True),
                        run.created_at,
                    ),
                )
                for record in trip_records or []:
                    self._conn.execute(
                        "INSERT INTO trip_metrics VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                        (
                            run.run_id,
                            record.trip_id,
                            record.depart_s,
                            record.duration_s,
                            record.time_loss_s,
                            record.co2_abs_mg,
                            record.pmx_abs_mg,
                            record.nox_abs_mg,
                            record.fuel_abs_mg,
                            record.electricity_abs_wh,
                        ),
                    )
                for record in edge_records or []:
                    mid = record.midpoint or (None, None)
                    self._conn.execute(
                        "INSERT INTO edge_metrics VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)",
                        (
                            run.run_id,
                            record.edge_id,
                            record.begin_s,
                            record.end_s,
                            record.density_veh_km,
                            record.occupancy_pct,
                            record.speed_m_s,
                            mid[0],
                            mid[1],
                        ),
                    )
                if metrics is not None:
                    for name, stats in metrics.metrics.items():
                        for stat_name in metrics.plan.get(name, ("mean",)):
                            self._conn.execute(
                                "INSERT INTO summaries VALUES (?, ?, ?, ?, ?)",
                                (
                                    run.run_id,
                                    name,
                                    stat_name,
                                    stats.stat(stat_name),
                                    metrics.labels.get(f"{name}.{stat_name}"),
                                ),
                            )
        except sqlite3.Error as exc:
            raise StoreFailureError(f"persist failed: {exc}") from exc
        return run.run_id

    # -- reads ------------------------------------------------------------

    def has_run(self, run_id: str) -> bool:
        return bool(self._execute("SELECT 1 FROM runs WHERE run_id = ?", (run_id,)))

    def run_count(self) -> int:
        return self._execute("SELECT COUNT(*) FROM runs")[0][0]

    def runs_by_label(self, scenario_label: str) -> list[str]:
        rows = self._execute(
            "SELECT run_id FROM runs WHERE scenario_label = ? ORDER BY created_at",
            (scenario_label,),
        )
        return [r[0] for r in rows]

    def all_runs(self, session_id: str | None = None) -> list[str]:
        if session_id is None:
            rows = self._execute("SELECT run_id FROM runs ORDER BY created_at")
        else:
            rows = self._execute(
                "SELECT run_id FROM runs WHERE session_id = ? ORDER BY created_at",
                (session_id,),
            )
        return [r[0] for r in rows]

    def next_run_id(self, session_id: str) -> str:
        count = self._execute(
            "SELECT COUNT(*) FROM runs WHERE session_id = ?", (session_id,)
        )[0][0]
        return f"{session_id}:run-{count + 1}"

    def summary_value(self, run_id: str, metric: str, stat: str = "mean") -> float:
        if not self.has_run(run_id):
            raise UnknownRunError(f"run {run_id!r} not in store")
        rows = self._execute(
            "SELECT value FROM summaries WHERE run_id = ? AND metric = ? AND stat = ?",
            (run_id, metric, stat),
        )
        if not rows:
            raise StoreFailureError(f"run {run_id!r} has no {metric}.{stat} summary")
        return rows[0][0]

    def summary_rows(self, run_id: str) -> list[tuple[str, str, float, str | None]]:
        if not self.has_run(run_id):
            raise UnknownRunError(f"run {run_id!r} not in store")
        return self._execute(
            "SELECT metric, stat, value, label FROM summaries WHERE run_id = ? ORDER BY metric, stat",
            (run_id,),
        )

    def compare_runs(
        self, run_a: str, run_b: str, metrics: list[str], stat: str = "mean"
    ) -> list[ComparisonEntry]:
        """Per-metric delta and percent change between two stored runs."""
        entries = []
        for metric in metrics:
            a = self.summary_value(run_a, metric, stat)
            b = self.summary_value(run_b, metric, stat)
            delta = b - a
            if a == 0:
                entries.append(
                    ComparisonEntry(metric=metric, a=a, b=b, delta=delta, percent_change=None, division_guard=True)
                )
            else:
                entries.append(
                    ComparisonEntry(metric=metric, a=a, b=b, delta=delta, percent_change=delta / a * 100.0)
                )
        return entries
