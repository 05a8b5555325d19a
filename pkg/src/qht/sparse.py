"""Sparse recovery from quantized data.

All estimators here minimize a quadratic surrogate objective

    f(theta) = (1/2) theta' Q theta - b' theta + lambda ||theta||_1

over either all of R^d (when Q is positive semidefinite) or an l1 ball
(when quantizing the covariates makes Q indefinite). The (Q, b) pair is
built so that its population version is (covariance, cross-moment) of
the clean data even though the inputs are truncated, dithered, and
quantized, possibly down to one bit.

Solvers:
  * solve_generalized_lasso  -- ADMM for the PSD / unconstrained case.
  * solve_nonconvex_constrained -- projected composite gradient descent
    for indefinite Q over {||theta||_1 <= R}; termination is a
    variational-inequality residual that certifies a stationary point.
  * solve_constrained_lasso  -- projected gradient descent for the plain
    least-squares objective over an l1 ball.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .quantize import TruncationRule, truncate, OneBitSpec


@dataclass(frozen=True)
class SurrogatePair:
    """Covariance surrogate Q (symmetric, possibly indefinite) and
    cross-moment surrogate b.

    built_from records the pipeline ("full_covariate", "quantized_covariate",
    "one_bit"). ridge is the curvature slack the quantization correction
    can remove (delta_bar^2/4 for the quantized-covariate builder, 0
    otherwise); the composite-gradient step size accounts for it.
    """

    Q: np.ndarray
    b: np.ndarray
    built_from: str
    ridge: float = 0.0

    def __post_init__(self):
        if self.Q.shape[0] != self.Q.shape[1] or self.Q.shape[0] != self.b.shape[0]:
            raise ValueError("Q must be d x d and b length d")


@dataclass(frozen=True)
class QcsSolverOptions:
    """Options shared by the sparse solvers.

    l1_radius=inf selects the unconstrained ADMM path (requires PSD Q);
    a finite radius selects the composite-gradient path (any Q).
    step_size None means 1 / (spectral norm of Q + ridge).
    """

    lam: float = 0.0
    l1_radius: float = math.inf
    max_iter: int = 20000
    tol_primal: float = 1e-9
    tol_dual: float = 1e-8
    tol_stationarity: float = 5e-7
    step_size: float | None = None
    rho: float = 1.0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if not self.l1_radius > 0:
            raise ValueError("l1_radius must be > 0 (inf for unconstrained)")


@dataclass(frozen=True)
class QcsEstimate:
    theta_hat: np.ndarray
    iterations: int
    stationarity_residual: float
    converged: bool
    errors: dict = field(default_factory=dict)


def _errors_vs(theta_hat: np.ndarray, theta_star: np.ndarray | None) -> dict:
    if theta_star is None:
        return {}
    diff = theta_hat - theta_star
    return {"l2": float(np.linalg.norm(diff)), "l1": float(np.sum(np.abs(diff)))}


# ---------------------------------------------------------------------------
# surrogate builders


def build_surrogates_full_covariate(
    X: np.ndarray, ydot: np.ndarray, trunc_x: TruncationRule | None = None
) -> SurrogatePair:
    """Q from (optionally truncated) raw covariates, b from quantized
    responses: Q = X~'X~/n, b = X~'ydot/n. PSD by construction."""
    X = np.asarray(X, dtype=float)
    ydot = np.asarray(ydot, dtype=float).reshape(-1)
    if X.ndim != 2 or X.shape[0] != ydot.shape[0]:
        raise ValueError("X must be n x d with one response per row")
    n = X.shape[0]
    xt = truncate(X, trunc_x) if trunc_x is not None else X
    return SurrogatePair(Q=xt.T @ xt / n, b=xt.T @ ydot / n, built_from="full_covariate")


def build_surrogates_quantized_covariate(
    Xdot: np.ndarray, ydot: np.ndarray, delta_bar: float
) -> SurrogatePair:
    """Q = Xdot'Xdot/n - (delta_bar^2/4) I, b = Xdot'ydot/n.

    Xdot must come from triangular-dithered quantization at level
    delta_bar; the diagonal correction removes that dither's noise second
    moment. For n < d the corrected Q is necessarily indefinite (at least
    d-n of its eigenvalues equal -delta_bar^2/4).
    """
    Xdot = np.asarray(Xdot, dtype=float)
    ydot = np.asarray(ydot, dtype=float).reshape(-1)
    if Xdot.ndim != 2 or Xdot.shape[0] != ydot.shape[0]:
        raise ValueError("Xdot must be n x d with one response per row")
    n, d = Xdot.shape
    if delta_bar < 0:
        raise ValueError("delta_bar must be >= 0")
    if delta_bar == 0:
        return build_surrogates_full_covariate(Xdot, ydot)
    Q = Xdot.T @ Xdot / n - (delta_bar**2 / 4.0) * np.eye(d)
    return SurrogatePair(
        Q=Q, b=Xdot.T @ ydot / n, built_from="quantized_covariate", ridge=delta_bar**2 / 4.0
    )


def build_surrogates_one_bit(
    Xdot1: np.ndarray, Xdot2: np.ndarray, ydot: np.ndarray, spec: OneBitSpec
) -> SurrogatePair:
    """Surrogates from sign observations.

    Q = (gamma_x^2 / 2n) sum(x1 x2' + x2 x1'), b = (gamma_x gamma_y / n) X1' ydot.
    The two independent covariate dithers make the off-diagonal products
    unbiased for the truncated covariance; symmetrizing the two orders
    keeps Q symmetric. Generally indefinite.
    """
    Xdot1 = np.asarray(Xdot1, dtype=float)
    Xdot2 = np.asarray(Xdot2, dtype=float)
    ydot = np.asarray(ydot, dtype=float).reshape(-1)
    if Xdot1.shape != Xdot2.shape or Xdot1.ndim != 2 or Xdot1.shape[0] != ydot.shape[0]:
        raise ValueError("Xdot1/Xdot2 must be equal-shape n x d with one response per row")
    n = Xdot1.shape[0]
    cross = Xdot1.T @ Xdot2
    Q = (spec.gamma_x**2 / (2.0 * n)) * (cross + cross.T)
    b = (spec.gamma_x * spec.gamma_y / n) * (Xdot1.T @ ydot)
    return SurrogatePair(Q=Q, b=b, built_from="one_bit")


# ---------------------------------------------------------------------------
# small pieces shared by the solvers


def soft_threshold(v, t: float):
    """Entrywise sign(v) * max(|v| - t, 0); ties |v| = t map to 0."""
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def project_l1_ball(v: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection onto {||x||_1 <= radius} by sorting.

    Finds the KKT threshold t as the largest value for which the
    soft-thresholded vector lands on the ball boundary; O(d log d).
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    v = np.asarray(v, dtype=float)
    if radius == 0:
        return np.zeros_like(v)
    a = np.abs(v)
    if a.sum() <= radius:
        return v.copy()
    u = np.sort(a)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, v.size + 1)
    admissible = u - (css - radius) / k > 0
    rho = np.max(np.nonzero(admissible)[0])  # last index with positive gap
    t = (css[rho] - radius) / (rho + 1.0)
    return soft_threshold(v, t)


def spectral_norm_sym(Q: np.ndarray) -> float:
    """Largest |eigenvalue| of a symmetric matrix.

    Dense symmetric eigensolver rather than power iteration: iterative
    estimates only approach the norm from below, and a step size built
    on an under-estimate breaks the monotone-descent guarantee of the
    composite-gradient solver. Exact is also cheap at the problem sizes
    this library runs (d in the low hundreds).
    """
    return float(np.max(np.abs(np.linalg.eigvalsh(Q))))


def stationarity_residual(
    Q: np.ndarray, b: np.ndarray, lam: float, theta: np.ndarray, radius: float = math.inf
) -> float:
    """Certificate that theta is a stationary point of the surrogate
    objective over {||x||_1 <= radius}.

    With F = Q theta - b + lam * g for the least-violating valid
    subgradient g of the l1 norm at theta, stationarity means
    <F, x - theta> >= 0 for all feasible x. The minimum of the linear
    functional <F, x> over the l1 ball is attained at an extreme point
    (+/- radius e_i), so the condition is exactly
    <F, theta> + radius * ||F||_inf <= 0. The returned residual is that
    left-hand side; it is >= 0 for any feasible theta (Hoelder) and
    equals 0 exactly at stationary points, so the check against it is
    complete, not sampled. For radius=inf the residual is ||F||_inf
    instead (unconstrained first-order condition).
    """
    grad = Q @ theta - b
    g = np.where(theta != 0.0, np.sign(theta), np.clip(-grad / lam, -1.0, 1.0) if lam > 0 else 0.0)
    F = grad + lam * g
    if math.isinf(radius):
        return float(np.max(np.abs(F)))
    return float(F @ theta + radius * np.max(np.abs(F)))


# ---------------------------------------------------------------------------
# solvers


def solve_generalized_lasso(
    pair: SurrogatePair,
    opts: QcsSolverOptions,
    theta_star: np.ndarray | None = None,
) -> QcsEstimate:
    """ADMM on f(theta) + lam ||z||_1 with consensus theta = z.

    Requires Q PSD (smallest eigenvalue >= -1e-10) and no l1 constraint.
    The theta update solves (Q + rho I) theta = b + rho (z - u) through a
    cached Cholesky factor; the penalty rho adapts by residual balancing
    (double / halve when one residual is 10x the other) with the factor
    refreshed on change.
    """
    if not math.isinf(opts.l1_radius):
        raise ValueError("generalized lasso path is unconstrained; use solve_nonconvex_constrained")
    Q, b = pair.Q, pair.b
    d = Q.shape[0]
    if float(np.min(np.linalg.eigvalsh(Q))) < -1e-10:
        raise ValueError("Q is indefinite; use the composite-gradient path (finite l1_radius)")

    rho = opts.rho
    chol = scipy.linalg.cho_factor(Q + rho * np.eye(d))
    theta = np.zeros(d)
    z = np.zeros(d)
    u = np.zeros(d)
    converged = False
    it = 0
    sqrt_d = math.sqrt(d)
    for it in range(1, opts.max_iter + 1):
        theta = scipy.linalg.cho_solve(chol, b + rho * (z - u))
        z_old = z
        z = soft_threshold(theta + u, opts.lam / rho)
        u = u + theta - z
        r_norm = float(np.linalg.norm(theta - z))
        s_norm = float(rho * np.linalg.norm(z - z_old))
        eps_pri = sqrt_d * opts.tol_primal + opts.tol_dual * max(
            float(np.linalg.norm(theta)), float(np.linalg.norm(z))
        )
        eps_dual = sqrt_d * opts.tol_primal + opts.tol_dual * float(rho * np.linalg.norm(u))
        if r_norm <= eps_pri and s_norm <= eps_dual:
            converged = True
            break
        if it % 10 == 0:
            if r_norm > 10.0 * s_norm:
                rho *= 2.0
                u = u / 2.0
                chol = scipy.linalg.cho_factor(Q + rho * np.eye(d))
            elif s_norm > 10.0 * r_norm:
                rho /= 2.0
                u = u * 2.0
                chol = scipy.linalg.cho_factor(Q + rho * np.eye(d))
    resid = stationarity_residual(Q, b, opts.lam, z)
    return QcsEstimate(
        theta_hat=z,
        iterations=it,
        stationarity_residual=resid,
        converged=converged,
        errors=_errors_vs(z, theta_star),
    )


def surrogate_objective(pair: SurrogatePair, lam: float, theta: np.ndarray) -> float:
    return float(0.5 * theta @ (pair.Q @ theta) - pair.b @ theta + lam * np.sum(np.abs(theta)))


def solve_nonconvex_constrained(
    pair: SurrogatePair,
    opts: QcsSolverOptions,
    theta_star: np.ndarray | None = None,
    theta0: np.ndarray | None = None,
    multi_start: int = 0,
    rng: np.random.Generator | None = None,
) -> QcsEstimate:
    """Projected composite gradient descent over {||theta||_1 <= R}.

    Each iteration takes a gradient step on the quadratic part, soft
    thresholds by step*lam, and projects onto the l1 ball; the two prox
    pieces compose exactly for this pair (soft-threshold then project is
    the prox of lam||.||_1 plus the ball indicator). With step
    1/(||Q||_op + ridge) the objective is monotone non-increasing even
    for indefinite Q. Terminates when the variational-inequality
    residual certifies a stationary point to tol_stationarity.

    multi_start > 0 reruns from that many random feasible starts (needs
    rng) and returns the best objective among all runs.
    """
    R = opts.l1_radius
    if not (R > 0 and math.isfinite(R)):
        raise ValueError("composite-gradient path needs a finite positive l1_radius")
    if multi_start > 0:
        if rng is None:
            raise ValueError("multi_start needs an rng")
        best = _composite_gd(pair, opts, theta_star, np.zeros(pair.b.shape[0]))
        best_obj = surrogate_objective(pair, opts.lam, best.theta_hat)
        for _ in range(multi_start):
            start = rng.standard_normal(pair.b.shape[0])
            start = project_l1_ball(start * (R / max(np.sum(np.abs(start)), 1e-12)) * rng.uniform(), R)
            cand = _composite_gd(pair, opts, theta_star, start)
            obj = surrogate_objective(pair, opts.lam, cand.theta_hat)
            if obj < best_obj:
                best, best_obj = cand, obj
        return best
    start = np.zeros(pair.b.shape[0]) if theta0 is None else project_l1_ball(np.asarray(theta0, float), R)
    return _composite_gd(pair, opts, theta_star, start)


def _composite_gd(
    pair: SurrogatePair,
    opts: QcsSolverOptions,
    theta_star: np.ndarray | None,
    theta0: np.ndarray,
) -> QcsEstimate:
    Q, b, lam, R = pair.Q, pair.b, opts.lam, opts.l1_radius
    if opts.step_size is not None:
        eta = opts.step_size
    else:
        eta = 1.0 / (spectral_norm_sym(Q) + pair.ridge)
    theta = theta0
    converged = False
    it = 0
    resid = math.inf
    for it in range(1, opts.max_iter + 1):
        grad = Q @ theta - b
        # VI certificate at the current iterate, from the already-computed gradient
        g = np.where(theta != 0.0, np.sign(theta), np.clip(-grad / lam, -1.0, 1.0) if lam > 0 else 0.0)
        F = grad + lam * g
        resid = float(F @ theta + R * np.max(np.abs(F)))
        if resid <= opts.tol_stationarity:
            converged = True
            break
        theta = project_l1_ball(soft_threshold(theta - eta * grad, eta * lam), R)
    return QcsEstimate(
        theta_hat=theta,
        iterations=it,
        stationarity_residual=resid,
        converged=converged,
        errors=_errors_vs(theta, theta_star),
    )


def solve_constrained_lasso(
    X: np.ndarray,
    ydot: np.ndarray,
    radius: float,
    opts: QcsSolverOptions | None = None,
    theta_star: np.ndarray | None = None,
) -> QcsEstimate:
    """Projected gradient descent for min (1/2n)||ydot - X theta||^2 over
    {||theta||_1 <= radius}; the constraint plays the role of the penalty
    (the harness supplies radius = ||theta*||_1)."""
    if not radius > 0:
        raise ValueError("radius must be > 0")
    X = np.asarray(X, dtype=float)
    ydot = np.asarray(ydot, dtype=float).reshape(-1)
    n = X.shape[0]
    opts = opts or QcsSolverOptions()
    G = X.T @ X / n
    c = X.T @ ydot / n
    eta = opts.step_size if opts.step_size is not None else 1.0 / spectral_norm_sym(G)
    theta = np.zeros(X.shape[1])
    converged = False
    it = 0
    resid = math.inf
    for it in range(1, opts.max_iter + 1):
        grad = G @ theta - c
        resid = float(grad @ theta + radius * np.max(np.abs(grad)))
        if resid <= opts.tol_stationarity:
            converged = True
            break
        theta = project_l1_ball(theta - eta * grad, radius)
    return QcsEstimate(
        theta_hat=theta,
        iterations=it,
        stationarity_residual=resid,
        converged=converged,
        errors=_errors_vs(theta, theta_star),
    )


__all__ = [
    "SurrogatePair",
    "QcsSolverOptions",
    "QcsEstimate",
    "build_surrogates_full_covariate",
    "build_surrogates_quantized_covariate",
    "build_surrogates_one_bit",
    "soft_threshold",
    "project_l1_ball",
    "spectral_norm_sym",
    "stationarity_residual",
    "surrogate_objective",
    "solve_generalized_lasso",
    "solve_nonconvex_constrained",
    "solve_constrained_lasso",
]
