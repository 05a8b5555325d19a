"""plot: draw one log-log figure from a harness CSV.

    plot --csv r.csv --family qcs-thm4 --metric l2 --out fig.png

Output format follows the file extension (png or svg). Exit codes:
0 success, 1 unusable data (missing columns, empty filter), 2 usage.
"""
from __future__ import annotations

import argparse
import sys

from . import PlotDataError, PlotSpec, render


def main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="plot", description="log-log error figure from a results CSV")
    p.add_argument("--csv", required=True, help="input results CSV")
    p.add_argument("--family", required=True, help="family name to filter on")
    p.add_argument("--metric", required=True, help="metric name (variants included automatically)")
    p.add_argument("--out", required=True, help="output image path, .png or .svg")
    p.add_argument("--ref-slope", type=float, default=-0.5, help="dashed reference slope")
    args = p.parse_args(argv)

    spec = PlotSpec(
        csv_path=args.csv,
        family=args.family,
        metric=args.metric,
        out_path=args.out,
        reference_slope=args.ref_slope,
    )
    try:
        result = render(spec)
    except (PlotDataError, OSError) as exc:
        print(f"plot: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.out_path} ({len(result.curves)} curves)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
