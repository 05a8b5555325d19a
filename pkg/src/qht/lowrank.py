"""Low-rank matrix completion from dither-quantized observations.

The estimator minimizes

    (1/2n) sum_k (ydot_k - Theta[i_k, j_k])^2 + lam ||Theta||_nuclear

subject to ||Theta||_inf <= alpha (the spikiness bound that makes
completion from uniform index samples well posed). Solved by consensus
ADMM with two proximal blocks: singular-value soft-thresholding for the
nuclear norm and an entrywise clip for the max-norm ball; the data term
is separable over matrix entries because every observation touches a
single entry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quantize import QuantizerSpec, TruncationRule, no_truncation, quantize_vector, truncate
from .randgen import McObservations


@dataclass(frozen=True)
class QmcProblem:
    """d x d completion problem: quantized observations, max-norm bound
    alpha, nuclear-norm weight lam."""

    d: int
    observations: McObservations
    alpha: float
    lam: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if len(self.observations) < 1:
            raise ValueError("need at least one observation")
        r, c = self.observations.rows, self.observations.cols
        if np.min(r) < 0 or np.max(r) >= self.d or np.min(c) < 0 or np.max(c) >= self.d:
            raise ValueError("observation indices out of range")


@dataclass(frozen=True)
class QmcEstimate:
    theta_hat: np.ndarray
    iterations: int
    residuals: tuple[float, float]
    converged: bool
    errors: dict = field(default_factory=dict)


@dataclass(frozen=True)
class QmcSolverOptions:
    max_iter: int = 4000
    tol_abs: float = 1e-8
    tol_rel: float = 1e-7
    rho: float = 1.0


def svt(M: np.ndarray, tau: float) -> np.ndarray:
    """Singular-value soft-thresholding, the prox of tau * nuclear norm.

    tau=0 returns the input unchanged (skips the SVD round-trip error).
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    M = np.asarray(M, dtype=float)
    if tau == 0:
        return M.copy()
    u, s, vt = np.linalg.svd(M, full_matrices=False)
    s = np.maximum(s - tau, 0.0)
    return (u * s) @ vt


def quantize_mc_observations(
    raw: McObservations, zeta_y: float, spec: QuantizerSpec, rng: np.random.Generator | None = None
) -> McObservations:
    """Truncate each observed value at zeta_y, then uniform-dither quantize.

    zeta_y = inf disables truncation (the sub-exponential-noise regime);
    delta = 0 makes the whole map the identity.
    """
    rule = TruncationRule("elementwise", zeta_y) if math.isfinite(zeta_y) else no_truncation()
    ydot = quantize_vector(truncate(raw.y, rule), spec, rng)
    return McObservations(rows=raw.rows.copy(), cols=raw.cols.copy(), y=ydot)


def _errors_vs(theta_hat: np.ndarray, theta_star: np.ndarray | None) -> dict:
    if theta_star is None:
        return {}
    d = theta_hat.shape[0]
    diff = theta_hat - theta_star
    return {
        "fro_over_d": float(np.linalg.norm(diff, "fro") / d),
        "nuc_over_d": float(np.sum(np.linalg.svd(diff, compute_uv=False)) / d),
    }


def solve_qmc(
    problem: QmcProblem,
    opts: QmcSolverOptions | None = None,
    theta_star: np.ndarray | None = None,
) -> QmcEstimate:
    """Consensus ADMM for the constrained nuclear-norm program.

    Variables: Theta (data block) with copies Z1 (nuclear prox) and Z2
    (clip to [-alpha, alpha]). The Theta update is entrywise closed form
    because the loss decomposes over observed entries: with per-entry
    observation counts C and value sums S,

        Theta = (S/n + rho (Z1 - U1 + Z2 - U2)) / (C/n + 2 rho).

    Repeated indices are kept as separate terms (they accumulate in C
    and S). The returned matrix is the clip-block copy, so the max-norm
    constraint holds exactly. rho adapts by residual balancing.
    """
    opts = opts or QmcSolverOptions()
    d = problem.d
    n = len(problem.observations)
    counts = np.zeros((d, d))
    sums = np.zeros((d, d))
    np.add.at(counts, (problem.observations.rows, problem.observations.cols), 1.0)
    np.add.at(sums, (problem.observations.rows, problem.observations.cols), problem.observations.y)
    counts /= n
    sums /= n

    rho = opts.rho
    theta = np.zeros((d, d))
    z1 = np.zeros((d, d))
    z2 = np.zeros((d, d))
    u1 = np.zeros((d, d))
    u2 = np.zeros((d, d))
    converged = False
    it = 0
    r_norm = s_norm = math.inf
    size = math.sqrt(2.0) * d  # dimension of the stacked consensus constraint
    for it in range(1, opts.max_iter + 1):
        theta = (sums + rho * (z1 - u1 + z2 - u2)) / (counts + 2.0 * rho)
        z1_old, z2_old = z1, z2
        z1 = svt(theta + u1, problem.lam / rho)
        z2 = np.clip(theta + u2, -problem.alpha, problem.alpha)
        u1 = u1 + theta - z1
        u2 = u2 + theta - z2
        r_norm = math.sqrt(
            float(np.sum((theta - z1) ** 2)) + float(np.sum((theta - z2) ** 2))
        )
        s_norm = rho * math.sqrt(
            float(np.sum((z1 - z1_old) ** 2)) + float(np.sum((z2 - z2_old) ** 2))
        )
        eps_pri = size * opts.tol_abs + opts.tol_rel * max(
            math.sqrt(2.0) * float(np.linalg.norm(theta, "fro")),
            math.sqrt(float(np.sum(z1**2)) + float(np.sum(z2**2))),
        )
        eps_dual = size * opts.tol_abs + opts.tol_rel * rho * math.sqrt(
            float(np.sum(u1**2)) + float(np.sum(u2**2))
        )
        if r_norm <= eps_pri and s_norm <= eps_dual:
            converged = True
            break
        if it % 10 == 0:
            if r_norm > 10.0 * s_norm:
                rho *= 2.0
                u1 /= 2.0
                u2 /= 2.0
            elif s_norm > 10.0 * r_norm:
                rho /= 2.0
                u1 *= 2.0
                u2 *= 2.0
    theta_hat = np.clip(z2, -problem.alpha, problem.alpha)
    return QmcEstimate(
        theta_hat=theta_hat,
        iterations=it,
        residuals=(r_norm, s_norm),
        converged=converged,
        errors=_errors_vs(theta_hat, theta_star),
    )
