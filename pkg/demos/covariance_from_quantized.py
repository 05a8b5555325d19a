"""Covariance estimation when you only keep quantized samples.

Heavy-tailed data is truncated entrywise, dither-quantized, and the
known dither noise power is subtracted back off the diagonal. The
punchline: the quantized estimator tracks the unquantized one at a
modestly inflated constant, and only the triangular dither admits a
bias correction at all.
"""
import numpy as np

from qht import substream
from qht.covest import CovEstimatorSpec, ablation_estimators, estimate_covariance
from qht.quantize import QuantizerSpec, TruncationRule
from qht.randgen import StudentTScaled, covariance_of, sample_covariates

d = 20
model = StudentTScaled(d=d, nu=4.5)
sigma_star = covariance_of(model)

print("entrywise max error of the corrected estimator, d=20")
print(f"{'n':>6} {'raw':>8} {'delta=1':>8} {'delta=2':>8}")
for n in (500, 2000, 8000):
    rng = substream(7002, n)
    x = sample_covariates(model, n, rng)
    zeta = 1.0 * (n * 3.0) ** 0.25  # truncation level grows with n
    row = []
    for delta in (0.0, 1.0, 2.0):
        spec = CovEstimatorSpec(
            truncation=TruncationRule("elementwise", zeta),
            quantizer=QuantizerSpec(delta, "triangular" if delta else None),
        )
        est = estimate_covariance(x, spec, substream(7003, n, int(delta)), sigma_star=sigma_star)
        row.append(est.errors["linf"])
    print(f"{n:>6} {row[0]:8.4f} {row[1]:8.4f} {row[2]:8.4f}")

print("\nwhy the dither must be triangular: scalar second-moment ablation")
rng = substream(7004, 0)
x = rng.standard_normal(100_000) * 1.3  # true second moment 1.69
out = ablation_estimators(x, delta=3.0, rng=rng)
for name, v in out.items():
    print(f"  {name:18s} {v:7.3f}   (true 1.690)")
print("  only the triangular-corrected estimator lands on the truth;")
print("  the others keep an error floor no sample size removes")
