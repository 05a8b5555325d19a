"""Programmatic use of the experiment harness.

The same pipeline the CLI drives: pick a family, shrink its grid,
run it, fit log-log slopes, write the CSV. Everything is keyed off one
seed, so a rerun reproduces the file byte for byte (timing column
zeroed for that purpose).
"""
from qht.harness.families import default_spec
from qht.harness.runner import run_experiment, write_csv
from qht.harness.slopes import fit_slopes

spec = default_spec(
    "cov-elementwise",
    n_grid=(100, 200, 400, 800),
    delta_grid=(0.0, 1.0),
    trials=8,
)
rows = run_experiment(spec, record_timing=False)
print(f"{len(rows)} result rows")

for rep in fit_slopes(rows):
    flag = "ok" if rep.passed else "OUT OF BAND"
    print(
        f"  {rep.family} {rep.metric} delta={rep.delta}: "
        f"slope {rep.slope:+.3f} (r2 {rep.r2:.3f}) {flag}"
    )

write_csv(rows, "cov_small.csv")
print("wrote cov_small.csv")
print("CLI equivalent (dims overrides go through a TOML spec file):")
print(
    "  qht run --family cov-elementwise --n-grid 100,200,400,800 "
    "--delta-grid 0,1 --trials 8 --no-timing --out cov_small.csv"
)
print("  qht check cov_small.csv")
