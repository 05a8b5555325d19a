"""Truncation operators and dithered uniform / one-bit quantizers.

The scalar quantizer maps a real value onto the grid of bin midpoints,

    quantize_to_grid(a) = delta * (floor(a / delta) + 1/2),

with level 0 meaning the identity map. Adding random dither before
quantization makes the rounding error independent of the signal: uniform
dither on [-delta/2, delta/2] gives exactly uniform, signal-independent
error; triangular dither (the sum of two independent uniforms) further
pins the second moment of the total quantization noise at delta^2/4
whatever the input, which is what lets downstream covariance estimators
subtract the noise term in closed form.

Truncation (clipping at a threshold zeta) tames heavy tails before
quantization; it comes in an element-wise and an l4-norm flavor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DITHER_KINDS = (None, "uniform", "triangular")


@dataclass(frozen=True)
class QuantizerSpec:
    """Uniform quantizer configuration.

    delta=0 is the identity map (and then no dither is drawn). When
    delta>0 and dither is not None, quantization draws fresh dither from
    ``stream`` unless an explicit generator is passed to the call.
    """

    delta: float
    dither: str | None = None
    stream: np.random.Generator | None = None

    def __post_init__(self):
        if not (math.isfinite(self.delta) and self.delta >= 0):
            raise ValueError(f"delta must be finite and >= 0, got {self.delta}")
        if self.dither not in DITHER_KINDS:
            raise ValueError(f"dither must be one of {DITHER_KINDS}, got {self.dither!r}")


@dataclass(frozen=True)
class TruncationRule:
    """Shrinkage rule applied before quantization.

    kind "none" is the explicit no-truncation variant (zeta ignored,
    conventionally inf). "elementwise" clips each entry to [-zeta, zeta].
    "l4" rescales a whole sample vector so its l4 norm is at most zeta.
    """

    kind: str
    zeta: float = math.inf

    def __post_init__(self):
        if self.kind not in ("none", "elementwise", "l4"):
            raise ValueError(f"unknown truncation kind {self.kind!r}")
        if self.kind != "none":
            if not (self.zeta > 0):
                raise ValueError(f"zeta must be > 0, got {self.zeta}")


def no_truncation() -> TruncationRule:
    return TruncationRule("none")


@dataclass(frozen=True)
class OneBitSpec:
    """Dither ranges and truncation thresholds for one-bit quantization.

    gamma_x / gamma_y are the uniform dither half-ranges for covariates
    and responses. zeta_x / zeta_y are truncation thresholds (inf to
    disable). A finite threshold must stay below its dither range,
    otherwise the sign observation loses the mean identity the
    estimators rely on.
    """

    gamma_x: float
    gamma_y: float
    zeta_x: float = math.inf
    zeta_y: float = math.inf

    def __post_init__(self):
        if not (self.gamma_x > 0 and self.gamma_y > 0):
            raise ValueError("dither ranges must be positive")
        if math.isfinite(self.zeta_x) and not (0 < self.zeta_x < self.gamma_x):
            raise ValueError(f"need 0 < zeta_x < gamma_x, got zeta_x={self.zeta_x}, gamma_x={self.gamma_x}")
        if math.isfinite(self.zeta_y) and not (0 < self.zeta_y < self.gamma_y):
            raise ValueError(f"need 0 < zeta_y < gamma_y, got zeta_y={self.zeta_y}, gamma_y={self.gamma_y}")


def quantize_to_grid(a, delta: float):
    """Bare (undithered) uniform quantizer; delta=0 is the identity.

    Exact grid points use floor semantics: an input sitting on a bin
    boundary maps to the midpoint of the bin above it.
    """
    a = np.asarray(a, dtype=float)
    if np.any(~np.isfinite(a)):
        raise ValueError("quantizer input must be finite")
    if delta == 0:
        return a.copy()
    return delta * (np.floor(a / delta) + 0.5)


def sample_dither(shape, delta: float, kind: str | None, rng: np.random.Generator):
    """Draw dither of the given shape: one uniform on [-delta/2, delta/2],
    or the sum of two independent such uniforms (triangular)."""
    if kind is None or delta == 0:
        return np.zeros(shape)
    half = delta / 2.0
    if kind == "uniform":
        return rng.uniform(-half, half, size=shape)
    if kind == "triangular":
        return rng.uniform(-half, half, size=shape) + rng.uniform(-half, half, size=shape)
    raise ValueError(f"unknown dither kind {kind!r}")


def _resolve_stream(spec: QuantizerSpec, rng: np.random.Generator | None) -> np.random.Generator | None:
    if rng is not None:
        return rng
    return spec.stream


def uniform_quantize(a: float, spec: QuantizerSpec, rng: np.random.Generator | None = None) -> float:
    """Quantize one scalar, drawing a fresh dither sample per the spec."""
    out = quantize_vector(np.asarray([a], dtype=float), spec, rng)
    return float(out[0])


def quantize_vector(x, spec: QuantizerSpec, rng: np.random.Generator | None = None):
    """Dither-then-quantize an array elementwise, i.i.d. dither per entry.

    With delta=0 the input is returned unchanged (no dither is drawn),
    so the same code path covers the unquantized baselines.
    """
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)):
        raise ValueError("quantizer input must be finite")
    if spec.delta == 0:
        return x.copy()
    if spec.dither is None:
        return quantize_to_grid(x, spec.delta)
    stream = _resolve_stream(spec, rng)
    if stream is None:
        raise ValueError("dithered quantization needs an RNG stream")
    tau = sample_dither(x.shape, spec.delta, spec.dither, stream)
    return quantize_to_grid(x + tau, spec.delta)


def truncate(x, rule: TruncationRule):
    """Apply a truncation rule.

    Element-wise: each entry clipped to [-zeta, zeta]. l4: each sample
    vector (the last axis) rescaled by min(1, zeta / ||x||_4); the zero
    vector stays zero. "none" is the identity.
    """
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)):
        raise ValueError("truncation input must be finite")
    if rule.kind == "none" or not math.isfinite(rule.zeta):
        return x.copy()
    if rule.kind == "elementwise":
        return np.clip(x, -rule.zeta, rule.zeta)
    # l4: norms over the last axis, one scale factor per sample
    norms = np.power(np.sum(x**4, axis=-1, keepdims=True), 0.25)
    scale = np.where(norms > rule.zeta, np.divide(rule.zeta, norms, out=np.ones_like(norms), where=norms > 0), 1.0)
    return x * scale


def sign_pm1(v):
    """Sign with the convention sign(0) = +1, returning floats in {-1, +1}."""
    return np.where(np.asarray(v) >= 0, 1.0, -1.0)


def one_bit_quantize_response(y, spec: OneBitSpec, rng: np.random.Generator):
    """Truncate at zeta_y, add uniform dither on [-gamma_y, gamma_y], keep the sign."""
    y = np.asarray(y, dtype=float)
    yt = truncate(y, TruncationRule("elementwise", spec.zeta_y) if math.isfinite(spec.zeta_y) else no_truncation())
    phi = rng.uniform(-spec.gamma_y, spec.gamma_y, size=y.shape)
    return sign_pm1(yt + phi)


def one_bit_quantize_covariate(x, spec: OneBitSpec, rng: np.random.Generator):
    """Collect two independent sign observations of the truncated covariates.

    Returns a pair of {-1,+1} arrays, each from its own uniform dither
    draw on [-gamma_x, gamma_x]; the pair is what lets the covariance
    surrogate stay unbiased (the two dithers are independent).
    """
    x = np.asarray(x, dtype=float)
    xt = truncate(x, TruncationRule("elementwise", spec.zeta_x) if math.isfinite(spec.zeta_x) else no_truncation())
    tau1 = rng.uniform(-spec.gamma_x, spec.gamma_x, size=x.shape)
    tau2 = rng.uniform(-spec.gamma_x, spec.gamma_x, size=x.shape)
    return sign_pm1(xt + tau1), sign_pm1(xt + tau2)
