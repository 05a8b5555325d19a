"""Log-log mean-error figures from harness result CSVs.

The CSV is the whole interface: this package never imports the library
that produced the file. render() returns the exact data series it drew,
so callers (and tests) can check the figure against the file without
parsing the image back.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")  # batch tool, never a window
import matplotlib.pyplot as plt
import numpy as np

EXPECTED_COLUMNS = (
    "family",
    "n",
    "d",
    "s_or_r",
    "delta",
    "trial",
    "metric",
    "value",
    "converged",
    "wallclock_s",
)


class PlotDataError(ValueError):
    """Input CSV unusable for the requested figure."""


@dataclass(frozen=True)
class PlotSpec:
    csv_path: str
    family: str
    metric: str
    out_path: str
    log_base: int = 10
    reference_slope: float = -0.5


@dataclass(frozen=True)
class Curve:
    label: str
    metric: str
    d: int
    s_or_r: int
    delta: float
    ns: tuple[int, ...]
    means: tuple[float, ...]


@dataclass(frozen=True)
class RenderResult:
    curves: tuple[Curve, ...]
    reference_ns: tuple[int, ...]
    reference_values: tuple[float, ...]
    out_path: str


def _read_rows(path: str):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in EXPECTED_COLUMNS if c not in header]
        if missing:
            raise PlotDataError(f"missing columns: {', '.join(missing)}")
        return list(reader)


def _metric_matches(row_metric: str, wanted: str) -> bool:
    # exact name, or any variant under it ("linf" pulls "linf/triangular")
    return row_metric == wanted or row_metric.startswith(wanted + "/")


def extract_series(spec: PlotSpec) -> list[Curve]:
    """Trial-mean error per n for every (metric, d, s_or_r, delta) curve.

    Only converged trials enter the means, mirroring how the slope gate
    treats the same file.
    """
    rows = _read_rows(spec.csv_path)
    groups: dict[tuple, dict[int, list[float]]] = {}
    for row in rows:
        if row["family"] != spec.family or not _metric_matches(row["metric"], spec.metric):
            continue
        if row["converged"].strip().lower() not in ("true", "1"):
            continue
        key = (row["metric"], int(row["d"]), int(row["s_or_r"]), float(row["delta"]))
        groups.setdefault(key, {}).setdefault(int(row["n"]), []).append(float(row["value"]))
    if not groups:
        raise PlotDataError(
            f"no rows match family={spec.family!r} metric={spec.metric!r} in {spec.csv_path}"
        )
    n_values = {n for by_n in groups.values() for n in by_n}
    if len(n_values) < 3:
        raise PlotDataError(f"need at least 3 distinct n values to plot, got {len(n_values)}")

    many_sr = len({(d, sr) for (_, d, sr, _) in groups}) > 1
    curves = []
    for key in sorted(groups):
        metric, d, sr, delta = key
        by_n = groups[key]
        ns = tuple(sorted(by_n))
        means = tuple(float(np.mean(by_n[n])) for n in ns)
        suffix = metric.partition("/")[2]
        label = f"({d}, {sr}, {delta:g})" if many_sr else f"({d}, {delta:g})"
        if suffix:
            label += f" {suffix}"
        curves.append(Curve(label, metric, d, sr, delta, ns, means))
    return curves


def reference_line(curves: list[Curve], slope: float) -> tuple[tuple[int, ...], tuple[float, ...]]:
    """Dashed guide anchored at the first point of the lowest curve."""
    anchor = min(curves, key=lambda c: c.means[0])
    n0, y0 = anchor.ns[0], anchor.means[0]
    ns = tuple(sorted({n for c in curves for n in c.ns}))
    return ns, tuple(y0 * (n / n0) ** slope for n in ns)


def render(spec: PlotSpec) -> RenderResult:
    curves = extract_series(spec)
    ref_ns, ref_vals = reference_line(curves, spec.reference_slope)

    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    for c in curves:
        ax.plot(c.ns, c.means, marker="o", markersize=3.5, linewidth=1.2, label=c.label)
    ax.plot(
        ref_ns,
        ref_vals,
        linestyle="--",
        color="black",
        linewidth=1.0,
        label=f"slope {spec.reference_slope:g}",
    )
    ax.set_xscale("log", base=spec.log_base)
    ax.set_yscale("log", base=spec.log_base)
    ax.set_xlabel("n")
    ax.set_ylabel(f"mean {spec.metric}")
    ax.set_title(spec.family)
    ax.grid(True, which="both", linewidth=0.3, alpha=0.5)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(spec.out_path)
    plt.close(fig)
    return RenderResult(tuple(curves), ref_ns, ref_vals, spec.out_path)
