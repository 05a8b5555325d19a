"""Sweep execution and CSV I/O.

Each (n, delta, trial) cell is an independent task with its own derived
RNG streams, so tasks can run in any order on any number of workers and
the merged output is identical: rows are always emitted in
(n index, delta index, trial) order. Only this module spawns
parallelism; everything below it is pure.
"""
from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .families import ExperimentSpec, run_trial

CSV_HEADER = ["family", "n", "d", "s_or_r", "delta", "trial", "metric", "value", "converged", "wallclock_s"]


@dataclass(frozen=True)
class ResultRow:
    family: str
    n: int
    d: int
    s_or_r: int
    delta: float
    trial: int
    metric: str
    value: float
    converged: bool
    wallclock_s: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value >= 0):
            raise ValueError(f"metric value must be finite and >= 0, got {self.value}")


def _s_or_r(spec: ExperimentSpec) -> int:
    return int(spec.dims.get("s", spec.dims.get("r", 0)))


def _run_cell(spec: ExperimentSpec, i_n: int, i_delta: int, trial: int, record_timing: bool) -> list[ResultRow]:
    t0 = time.perf_counter()
    results = run_trial(spec, i_n, i_delta, trial)
    elapsed = time.perf_counter() - t0 if record_timing else 0.0
    return [
        ResultRow(
            family=spec.family,
            n=spec.n_grid[i_n],
            d=int(spec.dims["d"]),
            s_or_r=_s_or_r(spec),
            delta=float(spec.delta_grid[i_delta]),
            trial=trial,
            metric=metric,
            value=float(value),
            converged=bool(converged),
            wallclock_s=elapsed,
        )
        for metric, value, converged in results
    ]


def _cell_worker(args) -> tuple[tuple[int, int, int], list[ResultRow]]:
    spec, i_n, i_delta, trial, record_timing = args
    return (i_n, i_delta, trial), _run_cell(spec, i_n, i_delta, trial, record_timing)


def run_experiment(
    spec: ExperimentSpec, threads: int = 1, record_timing: bool = True
) -> list[ResultRow]:
    """Run the full sweep; deterministic output for any thread count.

    record_timing=False writes 0.0 wallclocks, making the CSV
    byte-identical across repeat runs.
    """
    cells = [
        (i_n, i_delta, trial)
        for i_n in range(len(spec.n_grid))
        for i_delta in range(len(spec.delta_grid))
        for trial in range(spec.trials)
    ]
    rows: list[ResultRow] = []
    if threads <= 1:
        for i_n, i_delta, trial in cells:
            rows.extend(_run_cell(spec, i_n, i_delta, trial, record_timing))
        return rows
    collected: dict[tuple[int, int, int], list[ResultRow]] = {}
    with ProcessPoolExecutor(max_workers=threads) as pool:
        args = [(spec, i_n, i_delta, trial, record_timing) for i_n, i_delta, trial in cells]
        for key, cell_rows in pool.map(_cell_worker, args, chunksize=max(1, len(args) // (8 * threads))):
            collected[key] = cell_rows
    for key in cells:
        rows.extend(collected[key])
    return rows


def write_csv(rows: list[ResultRow], path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow(
                [
                    r.family,
                    r.n,
                    r.d,
                    r.s_or_r,
                    repr(r.delta),
                    r.trial,
                    r.metric,
                    repr(r.value),
                    r.converged,
                    f"{r.wallclock_s:.6f}",
                ]
            )


def read_csv(path: str) -> list[ResultRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in CSV_HEADER if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"CSV is missing columns: {missing}")
        for rec in reader:
            rows.append(
                ResultRow(
                    family=rec["family"],
                    n=int(rec["n"]),
                    d=int(rec["d"]),
                    s_or_r=int(rec["s_or_r"]),
                    delta=float(rec["delta"]),
                    trial=int(rec["trial"]),
                    metric=rec["metric"],
                    value=float(rec["value"]),
                    converged=rec["converged"] == "True",
                    wallclock_s=float(rec["wallclock_s"]),
                )
            )
    return rows


def failure_rate(rows: list[ResultRow]) -> float:
    if not rows:
        return 0.0
    bad = sum(1 for r in rows if not r.converged)
    return bad / len(rows)
