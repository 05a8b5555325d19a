"""Log-log slope fitting on Monte Carlo mean error curves.

The rate claims under test say mean error ~ n^(-1/2); on log axes that
is a straight line of slope -1/2, so the check is an OLS fit of
log(mean error) against log(n) per curve, with a pass band around the
ideal slope. Non-converged rows are excluded from the means (but
counted by the harness's failure-rate gate).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .families import FAMILIES
from .runner import ResultRow, failure_rate

DEFAULT_BAND = (-0.7, -0.3)


@dataclass(frozen=True)
class SlopeReport:
    family: str
    metric: str
    d: int
    s_or_r: int
    delta: float
    slope: float
    r2: float
    n_points: int
    passed: bool


def group_means(rows: list[ResultRow], n_min: int | None = None) -> dict:
    """Mean value per (family, metric, d, s_or_r, delta) curve, keyed by n.

    Only converged rows enter the means; rows with n below n_min are
    dropped (used for tail-of-grid slope checks).
    """
    acc: dict[tuple, dict[int, list[float]]] = {}
    for r in rows:
        if not r.converged:
            continue
        if n_min is not None and r.n < n_min:
            continue
        key = (r.family, r.metric, r.d, r.s_or_r, r.delta)
        acc.setdefault(key, {}).setdefault(r.n, []).append(r.value)
    return {
        key: {n: float(np.mean(vals)) for n, vals in sorted(by_n.items())}
        for key, by_n in acc.items()
    }


def fit_slopes(
    rows: list[ResultRow],
    band: tuple[float, float] = DEFAULT_BAND,
    n_min: int | None = None,
) -> list[SlopeReport]:
    """One OLS fit per curve; raises if any curve has fewer than 3 n values."""
    reports = []
    for key, by_n in group_means(rows, n_min=n_min).items():
        family, metric, d, s_or_r, delta = key
        if len(by_n) < 3:
            raise ValueError(
                f"need >= 3 distinct n to fit a slope for {family}/{metric} (d={d}, delta={delta}); got {len(by_n)}"
            )
        ns = np.array(sorted(by_n))
        means = np.array([by_n[n] for n in ns])
        if np.any(means <= 0):
            raise ValueError(f"non-positive mean error in {family}/{metric}; cannot fit log-log slope")
        x = np.log(ns)
        y = np.log(means)
        slope, intercept = np.polyfit(x, y, 1)
        fitted = slope * x + intercept
        ss_res = float(np.sum((y - fitted) ** 2))
        ss_tot = float(np.sum((y - np.mean(y)) ** 2))
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
        reports.append(
            SlopeReport(
                family=family,
                metric=metric,
                d=d,
                s_or_r=s_or_r,
                delta=delta,
                slope=float(slope),
                r2=r2,
                n_points=len(ns),
                passed=band[0] <= slope <= band[1],
            )
        )
    reports.sort(key=lambda r: (r.family, r.metric, r.d, r.s_or_r, r.delta))
    return reports


def check_rows(
    rows: list[ResultRow],
    band: tuple[float, float] = DEFAULT_BAND,
    max_fail_rate: float = 0.05,
) -> tuple[list[SlopeReport], float, bool]:
    """The `check` gate: slope-fit each family's rate metrics, plus the
    solver failure-rate cap. Returns (reports, failure_rate, ok)."""
    fr = failure_rate(rows)
    checked = []
    for fam_name in sorted({r.family for r in rows}):
        fam = FAMILIES.get(fam_name)
        fam_rows = [r for r in rows if r.family == fam_name]
        if fam is None:
            keep = fam_rows  # unknown family: rate-check everything present
        else:
            keep = [r for r in fam_rows if r.metric in fam.rate_metrics]
        if keep:
            checked.extend(fit_slopes(keep, band=band))
    ok = fr <= max_fail_rate and all(r.passed for r in checked)
    return checked, fr, ok


def mean_at_n(rows: list[ResultRow], family: str, metric: str, delta: float, n: int) -> float:
    vals = [
        r.value
        for r in rows
        if r.family == family and r.metric == metric and r.delta == delta and r.n == n and r.converged
    ]
    if not vals:
        raise ValueError(f"no converged rows for {family}/{metric} at delta={delta}, n={n}")
    return float(np.mean(vals))
