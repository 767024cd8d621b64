"""Benchmark harness: times (kind, strategy) pairs over a family of
structured square meshes, writes a CSV, and fits log-log complexity
slopes.

Timing protocol per cell: one discarded warm-up run, then ``repetitions``
timed runs, median reported.  Two practical guards keep superlinear
strategies from hijacking the wall clock: a run that exceeds
``long_run_s`` is not repeated (its single time is the median), and the
element-loop strategies are aborted once they pass ``time_budget_s``.
An aborted cell is recorded with status ``skipped`` and its elapsed time,
which is a *lower bound* on the true cost; larger sizes of the same pair
are skipped outright and inherit the budget as their lower bound.
"""

from __future__ import annotations

import csv
import io
import os
import platform
import statistics
import time
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .assembly import (
    AssemblyBudgetExceeded,
    MatrixKind,
    Strategy,
    WeightField,
    assemble,
)
from .elements import ElasticParams
from .mesh import Mesh, generate_unit_square_mesh

__all__ = [
    "BenchRecord",
    "default_metadata",
    "fit_loglog_slope",
    "read_records_csv",
    "run_bench",
    "write_records_csv",
]

STATUS_OK = "ok"
STATUS_SKIPPED = "skipped"


@dataclass(frozen=True)
class BenchRecord:
    kind: str
    strategy: str
    nq: int
    nme: int
    n_df: int
    wall_time_seconds: float  # median of repetitions; lower bound when skipped
    repetitions: int
    status: str = STATUS_OK
    speedup: Optional[float] = None  # reference strategy time / this time

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


def median_time(samples: Sequence[float]) -> float:
    """Median of the timed runs; robust to one outlier for >= 3 runs."""
    if not samples:
        raise ValueError("no samples")
    return float(statistics.median(samples))


def default_metadata(time_budget_s: float, repetitions: int) -> dict:
    return {
        "version": __version__,
        "machine": platform.platform(),
        "cpu_count": os.cpu_count() or 1,
        "threads": 1,  # all kernels are single-threaded
        "time_budget_s": time_budget_s,
        "repetitions": repetitions,
        "timing": "warmup discarded, median of repetitions",
        "skipped_rows": "wall_time_seconds is a lower bound",
    }


def _bench_args(kind: MatrixKind) -> dict:
    if kind is MatrixKind.WEIGHTED_MASS:
        return {"weight": WeightField.quadratic()}
    if kind is MatrixKind.ELASTIC:
        return {"params": ElasticParams(1.0, 1.0)}
    return {}


def _time_cell(
    mesh: Mesh,
    kind: MatrixKind,
    strategy: Strategy,
    repetitions: int,
    time_budget_s: Optional[float],
    long_run_s: float,
) -> tuple[float, int, str]:
    """(median_seconds, repetitions_used, status) for one cell."""
    kwargs = _bench_args(kind)
    times: list[float] = []
    for rep in range(repetitions + 1):  # rep 0 is the warm-up
        t0 = time.perf_counter()
        try:
            assemble(mesh, kind, strategy, budget_s=time_budget_s, **kwargs)
        except AssemblyBudgetExceeded as exc:
            return exc.elapsed, max(1, len(times)), STATUS_SKIPPED
        elapsed = time.perf_counter() - t0
        if rep > 0:
            times.append(elapsed)
        if elapsed > long_run_s:
            if rep == 0:
                # too slow to warm up separately; count this run instead
                times.append(elapsed)
            break
    return median_time(times), len(times), STATUS_OK


def run_bench(
    kinds: Iterable[MatrixKind],
    strategies: Iterable[Strategy],
    sizes: Sequence[int],
    repetitions: int,
    output_path=None,
    *,
    time_budget_s: float = 60.0,
    long_run_s: float = 10.0,
    reference: Strategy = Strategy.OPTV2,
    verbose: bool = False,
) -> list[BenchRecord]:
    """Time every (kind, strategy, size) cell and optionally write a CSV.

    ``sizes`` are the per-side cell counts of the structured unit-square
    meshes, in ascending order.  Runs are strictly sequential.
    """
    kinds = list(kinds)
    strategies = list(strategies)
    if not sizes:
        raise ValueError("sizes must be nonempty")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly ascending")
    if repetitions < 3:
        raise ValueError(f"repetitions must be >= 3, got {repetitions}")

    records: list[BenchRecord] = []
    meshes: dict[int, Mesh] = {}
    for kind in kinds:
        for strategy in strategies:
            over_budget = False
            for n in sizes:
                if n not in meshes:
                    meshes[n] = generate_unit_square_mesh(n)
                mesh = meshes[n]
                if over_budget:
                    seconds, reps_used, status = float(time_budget_s), 0, STATUS_SKIPPED
                else:
                    seconds, reps_used, status = _time_cell(
                        mesh, kind, strategy, repetitions, time_budget_s, long_run_s
                    )
                    over_budget = status == STATUS_SKIPPED
                rec = BenchRecord(
                    kind=kind.value,
                    strategy=strategy.value,
                    nq=mesh.nq,
                    nme=mesh.nme,
                    n_df=kind.n_dof(mesh.nq),
                    wall_time_seconds=seconds,
                    repetitions=reps_used,
                    status=status,
                )
                records.append(rec)
                if verbose:
                    print(
                        f"{rec.kind:8s} {rec.strategy:10s} nq={rec.nq:<9d} "
                        f"{rec.wall_time_seconds:10.3f}s  [{rec.status}]"
                    )

    records = _attach_speedups(records, reference)
    if output_path is not None:
        write_records_csv(
            records, output_path, default_metadata(time_budget_s, repetitions)
        )
    return records


def _attach_speedups(records: list[BenchRecord], reference: Strategy) -> list[BenchRecord]:
    ref_time = {
        (r.kind, r.nq): r.wall_time_seconds
        for r in records
        if r.strategy == reference.value and r.ok
    }
    out = []
    for r in records:
        ref = ref_time.get((r.kind, r.nq))
        if r.ok and ref is not None:
            out.append(replace(r, speedup=ref / r.wall_time_seconds))
        else:
            out.append(r)
    return out


_CSV_FIELDS = [
    "kind",
    "strategy",
    "nq",
    "nme",
    "n_df",
    "median_seconds",
    "speedup_vs_reference",
    "repetitions",
    "status",
]


def write_records_csv(records: Sequence[BenchRecord], path, metadata: dict) -> None:
    """Deterministic CSV: '#'-prefixed metadata lines, a header row, then
    one row per record (seconds with 3 decimals, speedups with 2)."""
    buf = io.StringIO()
    for key in sorted(metadata):
        buf.write(f"# {key}: {metadata[key]}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_FIELDS)
    for r in records:
        writer.writerow(
            [
                r.kind,
                r.strategy,
                r.nq,
                r.nme,
                r.n_df,
                f"{r.wall_time_seconds:.3f}",
                "" if r.speedup is None else f"{r.speedup:.2f}",
                r.repetitions,
                r.status,
            ]
        )
    with open(path, "w", encoding="ascii") as f:
        f.write(buf.getvalue())


def read_records_csv(path) -> list[BenchRecord]:
    records = []
    with open(path, "r", encoding="ascii") as f:
        rows = [line for line in f if not line.startswith("#")]
    reader = csv.DictReader(rows)
    for row in reader:
        records.append(
            BenchRecord(
                kind=row["kind"],
                strategy=row["strategy"],
                nq=int(row["nq"]),
                nme=int(row["nme"]),
                n_df=int(row["n_df"]),
                wall_time_seconds=float(row["median_seconds"]),
                repetitions=int(row["repetitions"]),
                status=row["status"],
                speedup=float(row["speedup_vs_reference"])
                if row["speedup_vs_reference"]
                else None,
            )
        )
    return records


def fit_loglog_slope(records: Sequence[BenchRecord]) -> float:
    """Least-squares slope of log(time) against log(nq).

    Requires at least 4 completed records spanning at least 1.5 decades
    in nq; skipped records are ignored.
    """
    ok = [r for r in records if r.ok]
    if len(ok) < 4:
        raise ValueError(f"need >= 4 completed records, got {len(ok)}")
    nq = np.array([r.nq for r in ok], dtype=np.float64)
    t = np.array([r.wall_time_seconds for r in ok], dtype=np.float64)
    span = np.log10(nq.max() / nq.min())
    if span < 1.5:
        raise ValueError(f"nq range spans only {span:.2f} decades, need >= 1.5")
    if (t <= 0).any():
        raise ValueError("wall times must be positive")
    slope, _ = np.polyfit(np.log(nq), np.log(t), 1)
    return float(slope)
