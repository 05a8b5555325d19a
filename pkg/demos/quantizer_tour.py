"""Tour of the dithered uniform quantizer.

Shows the three facts the rest of the library leans on: plain rounding
has signal-dependent bias, a uniform dither removes it, and a triangular
dither additionally fixes the noise second moment at delta^2/4.
"""
import numpy as np

from qht import substream
from qht.quantize import QuantizerSpec, quantize_to_grid, quantize_vector, sample_dither

rng = substream(7001, 0)
delta = 1.0
n = 200_000

print("== rounding alone is biased ==")
for a in (0.1, 0.25, 0.49):
    x = np.full(n, a)
    err = float(np.mean(quantize_to_grid(x, delta))) - a
    print(f"  input {a:4.2f}: mean output offset {err:+.4f}")

print("\n== uniform dither is unbiased at every input ==")
spec_u = QuantizerSpec(delta, "uniform")
for a in (0.1, 0.25, 0.49):
    x = np.full(n, a)
    err = float(np.mean(quantize_vector(x, spec_u, rng))) - a
    print(f"  input {a:4.2f}: mean output offset {err:+.4f}")

print("\n== triangular dither pins the noise power ==")
# noise = output - input; its second moment should be delta^2/4 = 0.25
# at every input, not just on average over inputs
spec_t = QuantizerSpec(delta, "triangular")
for a in (0.0, 0.17, 3.77):
    x = np.full(n, a)
    xi = quantize_vector(x, spec_t, rng) - a
    print(f"  input {a:4.2f}: mean(noise^2) = {float(np.mean(xi**2)):.4f}  (target 0.25)")

print("\n== the error inside the quantizer is uniform once dithered ==")
a = rng.standard_normal(n) + sample_dither(n, delta, "uniform", rng)
w = quantize_to_grid(a, delta) - a
# w should fill [-delta/2, delta/2] evenly; compare decile edges
edges = np.quantile(w, np.linspace(0, 1, 11))
print("  deciles:", np.array2string(edges, precision=3))
