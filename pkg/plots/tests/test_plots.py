"""Figure rendering against committed harness CSV fixtures.

Fixtures were produced through the CSV interface only:
    qht run --family qcs-thm4 --trials 3 --no-timing --out qcs_thm4_small.csv
    qht demo-dither --trials 3 --no-timing --out dither_ablation_small.csv
"""
import csv
import math
import os

import numpy as np
import pytest

from qhtplot import PlotDataError, PlotSpec, extract_series, reference_line, render
from qhtplot.cli import main as cli_main

DATA = os.path.join(os.path.dirname(__file__), "data")
THM4 = os.path.join(DATA, "qcs_thm4_small.csv")
ABLATION = os.path.join(DATA, "dither_ablation_small.csv")

HEADER = "family,n,d,s_or_r,delta,trial,metric,value,converged,wallclock_s"


def _write_csv(path, rows):
    with open(path, "w") as fh:
        fh.write(HEADER + "\n")
        for r in rows:
            fh.write(",".join(str(v) for v in r) + "\n")


def _spec(csv_path, out, family="qcs-thm4", metric="l2"):
    return PlotSpec(csv_path=csv_path, family=family, metric=metric, out_path=out)


# ---------------------------------------------------------------------------
# series extraction

def test_mean_series_equal_group_means_of_the_csv(tmp_path):
    """The plotted series must be exactly the per-(delta, n) means of the
    converged values in the file, recomputed here from the raw text."""
    result = render(_spec(THM4, str(tmp_path / "fig.png")))

    expected: dict[tuple, dict[int, list]] = {}
    with open(THM4, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["family"] != "qcs-thm4" or row["metric"] != "l2":
                continue
            if row["converged"] != "True":
                continue
            by_n = expected.setdefault(float(row["delta"]), {})
            by_n.setdefault(int(row["n"]), []).append(float(row["value"]))

    assert {c.delta for c in result.curves} == set(expected)
    for curve in result.curves:
        by_n = expected[curve.delta]
        assert curve.ns == tuple(sorted(by_n))
        exact = tuple(float(np.mean(by_n[n])) for n in curve.ns)
        assert curve.means == exact


def test_one_curve_per_delta_with_tuple_labels(tmp_path):
    result = render(_spec(THM4, str(tmp_path / "fig.png")))
    assert [c.label for c in result.curves] == ["(150, 0)", "(150, 0.5)", "(150, 1)"]


def test_unconverged_rows_are_dropped(tmp_path):
    p = str(tmp_path / "r.csv")
    rows = []
    for n in (100, 200, 400):
        rows.append(("f", n, 10, 2, "1.0", 0, "l2", 0.5, "True", "0.0"))
        rows.append(("f", n, 10, 2, "1.0", 1, "l2", 99.0, "False", "0.0"))
    _write_csv(p, rows)
    (curve,) = extract_series(_spec(p, "", family="f"))
    assert curve.means == (0.5, 0.5, 0.5)


# ---------------------------------------------------------------------------
# reference line

def test_inverse_sqrt_data_runs_parallel_to_reference(tmp_path):
    p = str(tmp_path / "r.csv")
    ns = (100, 400, 1600, 6400)
    _write_csv(p, [("f", n, 10, 2, "1.0", 0, "l2", 1.0 / math.sqrt(n), "True", "0.0") for n in ns])
    result = render(_spec(p, str(tmp_path / "fig.png"), family="f"))
    (curve,) = result.curves
    ratios = [m / r for m, r in zip(curve.means, result.reference_values)]
    assert max(ratios) / min(ratios) == pytest.approx(1.0, abs=1e-12)


def test_reference_is_anchored_at_the_lowest_curve(tmp_path):
    p = str(tmp_path / "r.csv")
    rows = []
    for n in (100, 400, 1600):
        rows.append(("f", n, 10, 2, "0.0", 0, "l2", 0.1 / math.sqrt(n), "True", "0.0"))
        rows.append(("f", n, 10, 2, "1.0", 0, "l2", 1.0 / math.sqrt(n), "True", "0.0"))
    _write_csv(p, rows)
    curves = extract_series(_spec(p, "", family="f"))
    ref_ns, ref_vals = reference_line(curves, -0.5)
    low = min(curves, key=lambda c: c.means[0])
    assert low.delta == 0.0
    assert ref_ns[0] == low.ns[0] and ref_vals[0] == low.means[0]


# ---------------------------------------------------------------------------
# variant metrics (ablation files)

def test_ablation_file_yields_four_curves_triangular_lowest():
    spec = PlotSpec(
        csv_path=ABLATION, family="dither-ablation-cov", metric="linf", out_path=""
    )
    curves = extract_series(spec)
    assert len(curves) == 4
    assert {c.metric for c in curves} == {
        "linf/triangular",
        "linf/no_dither",
        "linf/uniform_raw",
        "linf/uniform_corrected",
    }
    at_max_n = {c.metric: c.means[-1] for c in curves}
    assert min(at_max_n, key=at_max_n.get) == "linf/triangular"
    tri = next(c for c in curves if c.metric == "linf/triangular")
    assert tri.label.endswith("triangular")


# ---------------------------------------------------------------------------
# failure modes

def test_missing_column_is_named(tmp_path):
    p = str(tmp_path / "bad.csv")
    with open(p, "w") as fh:
        fh.write("family,n,d,s_or_r,trial,metric,value,converged,wallclock_s\n")
    with pytest.raises(PlotDataError, match="missing columns: delta"):
        extract_series(_spec(p, ""))


def test_empty_filter_reports_no_rows(tmp_path):
    with pytest.raises(PlotDataError, match="no rows"):
        extract_series(_spec(THM4, "", family="nonexistent"))


def test_fewer_than_three_n_values_rejected(tmp_path):
    p = str(tmp_path / "r.csv")
    _write_csv(p, [("f", n, 10, 2, "1.0", 0, "l2", 0.5, "True", "0.0") for n in (100, 200)])
    with pytest.raises(PlotDataError, match="3 distinct n"):
        extract_series(_spec(p, "", family="f"))


# ---------------------------------------------------------------------------
# determinism and outputs

def test_same_csv_bytes_give_same_series(tmp_path):
    a = render(_spec(THM4, str(tmp_path / "a.png")))
    b = render(_spec(THM4, str(tmp_path / "b.png")))
    assert a.curves == b.curves
    assert a.reference_values == b.reference_values


def test_png_and_svg_outputs(tmp_path):
    for name in ("fig.png", "fig.svg"):
        out = tmp_path / name
        render(_spec(THM4, str(out)))
        assert out.stat().st_size > 0


# ---------------------------------------------------------------------------
# command line

def test_cli_writes_figure_and_exits_zero(tmp_path, capsys):
    out = str(tmp_path / "fig.png")
    code = cli_main(["--csv", THM4, "--family", "qcs-thm4", "--metric", "l2", "--out", out])
    assert code == 0
    assert "3 curves" in capsys.readouterr().out
    assert os.path.getsize(out) > 0


def test_cli_reports_data_errors_on_stderr(tmp_path, capsys):
    out = str(tmp_path / "fig.png")
    code = cli_main(["--csv", THM4, "--family", "nope", "--metric", "l2", "--out", out])
    assert code == 1
    assert "no rows" in capsys.readouterr().err
    assert not os.path.exists(out)
