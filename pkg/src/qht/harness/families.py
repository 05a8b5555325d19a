"""Experiment families: one runnable recipe per figure-style study.

A family bundles a data-generating law, the truncate/dither/quantize
pipeline, the estimator, its tuning-parameter formulas, and the error
metrics to record. Trials are deterministic functions of
(seed, family, grid indices, trial index) via derived RNG streams; the
data/signal/noise streams are keyed without the delta index so the
curves for different quantization levels are computed on paired
instances (common random numbers), which is what makes the
monotone-in-delta comparisons sharp at moderate trial counts.

Tuning constants: theory fixes thresholds and penalty weights only up to
absolute constants, so each formula carries a named constant with a
family default (swept once during development, slope targets are
unaffected by the choice); all of them can be overridden per run.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import covest, lowrank, sparse
from ..quantize import (
    OneBitSpec,
    QuantizerSpec,
    TruncationRule,
    no_truncation,
    one_bit_quantize_covariate,
    one_bit_quantize_response,
    quantize_to_grid,
    quantize_vector,
    truncate,
)
from ..randgen import (
    CustomCovarianceT,
    GaussianIdentity,
    LowRankSpec,
    NoiseModel,
    SignalSpec,
    StudentTScaled,
    covariance_of,
    sample_covariates,
    sample_lowrank_matrix,
    sample_mc_observations,
    sample_sparse_signal,
)
from ..streams import substream

DEFAULT_SEED = 20260822

# stream roles within a trial
_DATA, _SIGNAL, _NOISE, _DITHER, _SOLVER = range(5)


@dataclass(frozen=True)
class ExperimentSpec:
    """A sweep over (n, delta) x trials for one family."""

    family: str
    n_grid: tuple[int, ...]
    dims: dict
    delta_grid: tuple[float, ...]
    trials: int
    seed: int = DEFAULT_SEED
    constants: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; see list-families")
        if len(self.n_grid) == 0 or len(self.delta_grid) == 0:
            raise ValueError("n_grid and delta_grid must be non-empty")
        if any(n < 1 for n in self.n_grid):
            raise ValueError("sample sizes must be >= 1")
        if any(d < 0 for d in self.delta_grid):
            raise ValueError("quantization levels must be >= 0")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        fam = FAMILIES[self.family]
        missing = [k for k in fam.required_dims if k not in self.dims]
        if missing:
            raise ValueError(f"family {self.family} needs dims {missing}")

    def constant(self, name: str) -> float:
        fam = FAMILIES[self.family]
        if name in self.constants:
            return float(self.constants[name])
        return float(fam.default_constants[name])


@dataclass(frozen=True)
class Family:
    name: str
    description: str
    required_dims: tuple[str, ...]
    metrics: tuple[str, ...]
    rate_metrics: tuple[str, ...]
    default_n_grid: tuple[int, ...]
    default_dims: dict
    default_delta_grid: tuple[float, ...]
    default_trials: int
    default_constants: dict
    trial_fn: Callable


def default_spec(family: str, **overrides) -> ExperimentSpec:
    fam = FAMILIES[family]
    base = dict(
        family=family,
        n_grid=fam.default_n_grid,
        dims=dict(fam.default_dims),
        delta_grid=fam.default_delta_grid,
        trials=fam.default_trials,
        seed=DEFAULT_SEED,
        constants={},
    )
    base.update(overrides)
    return ExperimentSpec(**base)


def run_trial(spec: ExperimentSpec, i_n: int, i_delta: int, trial: int) -> list[tuple[str, float, bool]]:
    """Run one (n, delta, trial) cell; returns (metric, value, converged) rows."""
    fam = FAMILIES[spec.family]
    return fam.trial_fn(spec, i_n, i_delta, trial)


def _grid(a: int, step: int, b: int) -> tuple[int, ...]:
    return tuple(range(a, b + 1, step))


def _fam_id(name: str) -> int:
    return _FAMILY_ORDER.index(name)


def _stream(spec: ExperimentSpec, role: int, i_n: int, trial: int, i_delta: int | None = None):
    fid = _fam_id(spec.family)
    if i_delta is None:
        return substream(spec.seed, fid, role, i_n, trial)
    return substream(spec.seed, fid, role, i_n, trial, i_delta)


def _conf_term(spec: ExperimentSpec, d: int) -> float:
    """delta_conf * log d, the confidence factor shared by every threshold formula."""
    return spec.constant("delta_conf") * math.log(d)


def _fourth_moment(x: np.ndarray, floor: float = 1.0) -> float:
    """Empirical 4th-moment plug-in: max over coordinates, clipped below."""
    m = np.mean(np.asarray(x, dtype=float) ** 4, axis=0)
    return float(max(np.max(m), floor))


def _abs_moment(y: np.ndarray, p: float, floor: float = 1.0) -> float:
    return float(max(np.mean(np.abs(y) ** p), floor))


# ---------------------------------------------------------------------------
# covariance families


def _cov_elementwise_data(spec, n, i_n, trial):
    d = spec.dims["d"]
    model = CustomCovarianceT(d)
    x = sample_covariates(model, n, _stream(spec, _DATA, i_n, trial))
    return x, covariance_of(model)


def _trial_cov_elementwise(spec: ExperimentSpec, i_n: int, i_delta: int, trial: int):
    n = spec.n_grid[i_n]
    delta = spec.delta_grid[i_delta]
    x, sigma_star = _cov_elementwise_data(spec, n, i_n, trial)
    d = spec.dims["d"]
    m4 = _fourth_moment(x)
    zeta = spec.constant("c_zeta") * (n * m4 / _conf_term(spec, d)) ** 0.25
    est = covest.estimate_covariance(
        x,
        covest.CovEstimatorSpec(
            truncation=TruncationRule("elementwise", zeta),
            quantizer=QuantizerSpec(delta, "triangular" if delta > 0 else None),
        ),
        rng=_stream(spec, _DITHER, i_n, trial, i_delta),
        sigma_star=sigma_star,
    )
    return [("linf", est.errors["linf"], True)]


def _trial_cov_operator(spec: ExperimentSpec, i_n: int, i_delta: int, trial: int):
    n = spec.n_grid[i_n]
    delta = spec.delta_grid[i_delta]
    d = spec.dims["d"]
    target_var = np.ones(d)
    target_var[:2] = 2.0
    model = StudentTScaled(d, 4.5, tuple(np.sqrt(target_var / 1.8)))
    x = sample_covariates(model, n, _stream(spec, _DATA, i_n, trial))
    m4 = _fourth_moment(x)
    zeta = spec.constant("c_zeta") * (m4**0.25 + delta) * (n / _conf_term(spec, d)) ** 0.25
    est = covest.estimate_covariance(
        x,
        covest.CovEstimatorSpec(
            truncation=TruncationRule("l4", zeta),
            quantizer=QuantizerSpec(delta, "triangular" if delta > 0 else None),
        ),
        rng=_stream(spec, _DITHER, i_n, trial, i_delta),
        sigma_star=covariance_of(model),
    )
    return [("op", est.errors["op"], True)]


def _trial_cov_sparse_threshold(spec: ExperimentSpec, i_n: int, i_delta: int, trial: int):
    n = spec.n_grid[i_n]
    delta = spec.delta_grid[i_delta]
    x, sigma_star = _cov_elementwise_data(spec, n, i_n, trial)
    d = spec.dims["d"]
    m4 = _fourth_moment(x)
    zeta = spec.constant("c_zeta") * (n * m4 / _conf_term(spec, d)) ** 0.25
    mu = spec.constant("c_mu") * (math.sqrt(m4) + delta**2) * math.sqrt(_conf_term(spec, d) / n)
    est = covest.estimate_covariance(
        x,
        covest.CovEstimatorSpec(
            truncation=TruncationRule("elementwise", zeta),
            quantizer=QuantizerSpec(delta, "triangular" if delta > 0 else None),
        ),
        rng=_stream(spec, _DITHER, i_n, trial, i_delta),
    )
    thr = covest.threshold_covariance(est, mu, sigma_star=sigma_star)
    return [("linf", thr.errors["linf"], True), ("op", thr.errors["op"], True)]


# ---------------------------------------------------------------------------
# quantized compressed sensing families


def _qcs_instance(spec, n, i_n, trial, covariates: str, noise: NoiseModel):
    d, s = spec.dims["d"], spec.dims["s"]
    if covariates == "gaussian":
        model = GaussianIdentity(d)
    else:
        model = StudentTScaled(d, 4.5, math.sqrt(5.0) / 3.0)
    x = sample_covariates(model, n, _stream(spec, _DATA, i_n, trial))
    theta = sample_sparse_signal(SignalSpec(d, s), _stream(spec, _SIGNAL, i_n, trial))
    eps = noise.sample(n, _stream(spec, _NOISE, i_n, trial))
    return x, theta, x @ theta + eps


_T3_NOISE = NoiseModel("scaled_t", nu=3.0, scale=1.0 / math.sqrt(6.0))
_T45_NOISE = NoiseModel("scaled_t", nu=4.5, scale=1.0 / math.sqrt(3.0))


def _quantize_response(y, zeta_y, delta, rng):
    yt = truncate(y, TruncationRule("elementwise", zeta_y) if math.isfinite(zeta_y) else no_truncation())
    return quantize_vector(yt, QuantizerSpec(delta, "uniform" if delta > 0 else None), rng)


def _solve_admm(pair, lam, theta, opts_extra=None):
    opts = sparse.QcsSolverOptions(
        lam=lam, max_iter=4000, tol_primal=1e-9, tol_dual=1e-8, **(opts_extra or {})
    )
    return sparse.solve_generalized_lasso(pair, opts, theta_star=theta)


def _solve_composite(pair, lam, radius, theta):
    opts = sparse.QcsSolverOptions(
        lam=lam, l1_radius=radius, max_iter=40000, tol_stationarity=1e-7
    )
    return sparse.solve_nonconvex_constrained(pair, opts, theta_star=theta)


def _qcs_rows(est):
    return [
        ("l2", est.errors["l2"], est.converged),
        ("l1", est.errors["l1"], est.converged),
    ]


def _trial_qcs_thm4(spec: ExperimentSpec, i_n: int, i_delta: int, trial: int):
    n = spec.n_grid[i_n]
    delta = spec.delta_grid[i_delta]
    d = spec.dims["d"]
    x, theta, y = _qcs_instance(spec, n, i_n, trial, "gaussian", _T3_NOISE)
    el = spec.constant("moment_l")
    my = _abs_moment(y, 2 * el)
    conf = _conf_term(spec, d)
    zeta_y = spec.constant("c_zeta_y") * math.sqrt(n * my ** (1 / el) / conf)
    ydot = _quantize_response(y, zeta_y, delta, _stream(spec, _DITHER, i_n, trial, i_delta))
    pair = sparse.build_surrogates_full_covariate(x, ydot)
    sigma = spec.constant("sigma")
    lam = (
        spec.constant("c_lambda")
        * (sigma**2 / math.sqrt(spec.constant("kappa0")))
        * (delta + my ** (1 / (2 * el)))
        * math.sqrt(conf / n)
    )
    return _qcs_rows(_solve_admm(pair, lam, theta))


def _trial_qcs_thm5(spec: ExperimentSpec, i_n: int, i_delta: int, trial: int):
    n = spec.n_grid[i_n]
    delta = spec.delta_grid[i_delta]
    d = spec.dims["d"]
    x, theta, y = _qcs_instance(spec, n, i_n, trial, "student_t", _T45_NOISE)
    m4 = max(_fourth_moment(x), _abs_moment(y, 4.0))
    conf = _conf_term(spec, d)
    zeta = spec.constant("c_zeta") * (n * m4 / conf) ** 0.25
    ydot = _quantize_response(y, zeta, delta, _stream(spec, _DITHER, i_n, trial, i_delta))
    pair = sparse.build_surrogates_full_covariate(x, ydot, TruncationRule("elementwise", zeta))
    radius_bound = float(np.sum(np.abs(theta)))
    lam = (
        spec.constant("c_lambda")
        * (radius_bound * math.sqrt(m4) + delta**2)
        * math.sqrt(conf / n)
    )
    return _qcs_rows(_solve_admm(pair, lam, theta))


def _trial_qcs_thm6(spec: ExperimentSpec, i_n: int, i_delta: int, trial: int):
    n = spec.n_grid[i_n]
    delta = spec.delta_grid[i_delta]
    delta_bar = delta  # covariate quantizer runs at the same level in this study
    d = spec.dims["d"]
    x, theta, y = _qcs_instance(spec, n, i_n, trial, "gaussian", _T3_NOISE)
    el = spec.constant("moment_l")
    sigma = spec.constant("sigma")
    my = _abs_moment(y, 2 * el)
    conf = _conf_term(spec, d)
    zeta_y = spec.constant("c_zeta_y") * math.sqrt(
        (sigma * my ** (1 / el) / (sigma + delta)) * n / conf
    )
    dith = _stream(spec, _DITHER, i_n, trial, i_delta)
    ydot = _quantize_response(y, zeta_y, delta, dith)
    xdot = quantize_vector(x, QuantizerSpec(delta_bar, "triangular" if delta_bar > 0 else None), dith)
    pair = sparse.build_surrogates_quantized_covariate(xdot, ydot, delta_bar)
    lam = (
        spec.constant("c_lambda")
        * ((sigma + delta_bar) ** 2 / math.sqrt(spec.constant("kappa0")))
        * (delta + my ** (1 / (2 * el)))
        * math.sqrt(conf / n)
    )
    return _qcs_rows(_solve_composite(pair, lam, float(np.sum(np.abs(theta))), theta))


def _trial_qcs_thm7(spec: ExperimentSpec, i_n: int, i_delta: int, trial: int):
    n = spec.n_grid[i_n]
    delta = spec.delta_grid[i_delta]
    delta_bar = delta
    d = spec.dims["d"]
    x, theta, y = _qcs_instance(spec, n, i_n, trial, "student_t", _T45_NOISE)
    m4 = max(_fourth_moment(x), _abs_moment(y, 4.0))
    conf = _conf_term(spec, d)
    zeta = spec.constant("c_zeta") * (n * m4 / conf) ** 0.25
    dith = _stream(spec, _DITHER, i_n, trial, i_delta)
    ydot = _quantize_response(y, zeta, delta, dith)
    xt = truncate(x, TruncationRule("elementwise", zeta))
    xdot = quantize_vector(xt, QuantizerSpec(delta_bar, "triangular" if delta_bar > 0 else None), dith)
    pair = sparse.build_surrogates_quantized_covariate(xdot, ydot, delta_bar)
    radius_bound = float(np.sum(np.abs(theta)))
    lam = (
        spec.constant("c_lambda")
        * (radius_bound * math.sqrt(m4) + delta**2 + radius_bound * delta_bar**2)
        * math.sqrt(conf / n)
    )
    return _qcs_rows(_solve_composite(pair, lam, radius_bound, theta))


def _trial_qcs_onebit_sg(spec: ExperimentSpec, i_n: int, i_delta: int, trial: int):
    n = spec.n_grid[i_n]
    gamma_scale = spec.delta_grid[i_delta] if spec.delta_grid[i_delta] > 0 else 1.0
    d = spec.dims["d"]
    x, theta, y = _qcs_instance(spec, n, i_n, trial, "gaussian", NoiseModel("gaussian", var=0.25))
    sigma = spec.constant("sigma")
    conf = _conf_term(spec, d)
    gamma = gamma_scale * spec.constant("c_gamma") * sigma * math.sqrt(max(math.log(n / (2 * conf)), 1.0))
    ob = OneBitSpec(gamma_x=gamma, gamma_y=gamma)
    dith = _stream(spec, _DITHER, i_n, trial, i_delta)
    ydot = one_bit_quantize_response(y, ob, dith)
    x1, x2 = one_bit_quantize_covariate(x, ob, dith)
    pair = sparse.build_surrogates_one_bit(x1, x2, ydot, ob)
    radius_bound = float(np.sum(np.abs(theta)))
    lam = (
        spec.constant("c_lambda")
        * sigma**2
        * radius_bound
        * math.sqrt(conf * math.log(n) ** 2 / n)
    )
    return _qcs_rows(_solve_composite(pair, lam, radius_bound, theta))


def _trial_qcs_onebit_ht(spec: ExperimentSpec, i_n: int, i_delta: int, trial: int):
    n = spec.n_grid[i_n]
    gamma_scale = spec.delta_grid[i_delta] if spec.delta_grid[i_delta] > 0 else 1.0
    d = spec.dims["d"]
    x, theta, y = _qcs_instance(spec, n, i_n, trial, "student_t", _T45_NOISE)
    m4 = max(_fourth_moment(x), _abs_moment(y, 4.0))
    conf = _conf_term(spec, d)
    gamma = gamma_scale * spec.constant("c_gamma") * (n * m4**2 / conf) ** 0.125
    zeta = 0.9 * gamma  # the truncation threshold must sit inside the dither range
    ob = OneBitSpec(gamma_x=gamma, gamma_y=gamma, zeta_x=zeta, zeta_y=zeta)
    dith = _stream(spec, _DITHER, i_n, trial, i_delta)
    ydot = one_bit_quantize_response(y, ob, dith)
    x1, x2 = one_bit_quantize_covariate(x, ob, dith)
    pair = sparse.build_surrogates_one_bit(x1, x2, ydot, ob)
    radius_bound = float(np.sum(np.abs(theta)))
    lam = spec.constant("c_lambda") * math.sqrt(m4) * radius_bound * (conf / n) ** 0.25
    return _qcs_rows(_solve_composite(pair, lam, radius_bound, theta))


def _uniform_lasso_pipeline(spec, x, theta, eps, delta, dither_rng):
    """Shared by the constrained-lasso family and the uniform spot check."""
    n, d = x.shape
    y = x @ theta + eps
    el = spec.constant("moment_l")
    sigma = spec.constant("sigma")
    my = _abs_moment(y, 2 * el)
    conf = _conf_term(spec, d)
    zeta_y = spec.constant("c_zeta_y") * math.sqrt(n * (my ** (1 / el) + sigma**2) / conf)
    ydot = _quantize_response(y, zeta_y, delta, dither_rng)
    radius = float(np.sum(np.abs(theta)))
    opts = sparse.QcsSolverOptions(max_iter=20000, tol_stationarity=1e-9)
    return sparse.solve_constrained_lasso(x, ydot, radius, opts, theta_star=theta)


def _trial_qcs_uniform(spec: ExperimentSpec, i_n: int, i_delta: int, trial: int):
    n = spec.n_grid[i_n]
    delta = spec.delta_grid[i_delta]
    x, theta, y = _qcs_instance(spec, n, i_n, trial, "gaussian", _T3_NOISE)
    eps = y - x @ theta
    est = _uniform_lasso_pipeline(spec, x, theta, eps, delta, _stream(spec, _DITHER, i_n, trial, i_delta))
    return _qcs_rows(est)


def uniform_recovery_check(
    d: int = 50,
    s: int = 3,
    n: int = 800,
    delta: float = 1.0,
    n_signals: int = 100,
    seed: int = DEFAULT_SEED,
    constants: dict | None = None,
) -> dict:
    """Probe the uniform-recovery claim for the constrained lasso.

    Uniform pass: ONE draw of covariates, noise, and dither, reused for
    n_signals random sparse signals; records the max l2 error. Baseline
    pass: n_signals independent fresh-draw instances; records the median
    l2 error. A bounded ratio max/median is the observable trace of
    recovery holding uniformly over signals on a single realization.
    """
    spec = default_spec("qcs-uniform", dims={"d": d, "s": s}, constants=dict(constants or {}), seed=seed)
    fid = _fam_id("qcs-uniform")

    model = GaussianIdentity(d)
    x = sample_covariates(model, n, substream(seed, fid, 100, 0))
    eps = _T3_NOISE.sample(n, substream(seed, fid, 101, 0))
    dither_master = substream(seed, fid, 102, 0)
    # one dither draw: a fixed per-sample dither vector reused across signals
    tau = dither_master.uniform(-delta / 2.0, delta / 2.0, size=n) if delta > 0 else np.zeros(n)

    uniform_errors = []
    for j in range(n_signals):
        theta = sample_sparse_signal(SignalSpec(d, s), substream(seed, fid, 103, j))
        y = x @ theta + eps
        el = spec.constant("moment_l")
        my = _abs_moment(y, 2 * el)
        conf = _conf_term(spec, d)
        zeta_y = spec.constant("c_zeta_y") * math.sqrt(n * (my ** (1 / el) + spec.constant("sigma") ** 2) / conf)
        yt = truncate(y, TruncationRule("elementwise", zeta_y))
        ydot = quantize_to_grid(yt + tau, delta) if delta > 0 else yt
        opts = sparse.QcsSolverOptions(max_iter=20000, tol_stationarity=1e-9)
        est = sparse.solve_constrained_lasso(x, ydot, float(np.sum(np.abs(theta))), opts, theta_star=theta)
        uniform_errors.append(est.errors["l2"])

    fresh_errors = []
    for j in range(n_signals):
        xj = sample_covariates(model, n, substream(seed, fid, 200, j, _DATA))
        thetaj = sample_sparse_signal(SignalSpec(d, s), substream(seed, fid, 200, j, _SIGNAL))
        epsj = _T3_NOISE.sample(n, substream(seed, fid, 200, j, _NOISE))
        est = _uniform_lasso_pipeline(
            spec, xj, thetaj, epsj, delta, substream(seed, fid, 200, j, _DITHER)
        )
        fresh_errors.append(est.errors["l2"])

    uniform_errors = np.asarray(uniform_errors)
    fresh_errors = np.asarray(fresh_errors)
    return {
        "max_uniform_error": float(np.max(uniform_errors)),
        "median_fresh_error": float(np.median(fresh_errors)),
        "uniform_errors": uniform_errors,
        "fresh_errors": fresh_errors,
    }


# ---------------------------------------------------------------------------
# quantized matrix completion families


def _qmc_trial(spec: ExperimentSpec, i_n: int, i_delta: int, trial: int, noise: NoiseModel, heavy: bool):
    n = spec.n_grid[i_n]
    delta = spec.delta_grid[i_delta]
    d, r = spec.dims["d"], spec.dims["r"]
    theta = sample_lowrank_matrix(LowRankSpec(d, r), _stream(spec, _DATA, i_n, trial))
    obs = sample_mc_observations(theta, n, noise, _stream(spec, _NOISE, i_n, trial))
    alpha = float(np.max(np.abs(theta)))
    conf = _conf_term(spec, d)
    if heavy:
        m2 = max(float(np.mean(obs.y**2)), 1e-12)
        zeta_y = spec.constant("c_zeta_y") * (math.sqrt(m2) + alpha) * math.sqrt(n / (conf * d))
        lam = spec.constant("c_lambda") * (alpha + math.sqrt(m2) + delta) * math.sqrt(conf / (n * d))
    else:
        zeta_y = math.inf
        lam = spec.constant("c_lambda") * (spec.constant("sigma") + delta) * math.sqrt(conf / (n * d))
    qobs = lowrank.quantize_mc_observations(
        obs,
        zeta_y,
        QuantizerSpec(delta, "uniform" if delta > 0 else None),
        _stream(spec, _DITHER, i_n, trial, i_delta),
    )
    est = lowrank.solve_qmc(
        lowrank.QmcProblem(d=d, observations=qobs, alpha=alpha, lam=lam),
        lowrank.QmcSolverOptions(max_iter=3000),
        theta_star=theta,
    )
    return [
        ("fro_over_d", est.errors["fro_over_d"], est.converged),
        ("nuc_over_d", est.errors["nuc_over_d"], est.converged),
    ]


def _trial_qmc_subexp(spec, i_n, i_delta, trial):
    return _qmc_trial(spec, i_n, i_delta, trial, NoiseModel("gaussian", var=0.25), heavy=False)


def _trial_qmc_heavy(spec, i_n, i_delta, trial):
    return _qmc_trial(spec, i_n, i_delta, trial, _T3_NOISE, heavy=True)


# ---------------------------------------------------------------------------
# dither ablation families


def _trial_ablation_cov(spec: ExperimentSpec, i_n: int, i_delta: int, trial: int):
    n = spec.n_grid[i_n]
    delta = spec.delta_grid[i_delta]
    x = _stream(spec, _DATA, i_n, trial).standard_normal(n)
    ests = covest.ablation_estimators(x, delta, _stream(spec, _DITHER, i_n, trial, i_delta))
    truth = 1.0  # Var of the standard normal samples
    return [(f"linf/{k}", abs(v - truth), True) for k, v in ests.items()]


def _trial_ablation_qcs(spec: ExperimentSpec, i_n: int, i_delta: int, trial: int):
    n = spec.n_grid[i_n]
    delta = spec.delta_grid[i_delta]
    d = spec.dims["d"]
    x, theta, y = _qcs_instance(spec, n, i_n, trial, "gaussian", _T3_NOISE)
    el = spec.constant("moment_l")
    my = _abs_moment(y, 2 * el)
    conf = _conf_term(spec, d)
    zeta_y = spec.constant("c_zeta_y") * math.sqrt(n * my ** (1 / el) / conf)
    yt = truncate(y, TruncationRule("elementwise", zeta_y))
    dith = _stream(spec, _DITHER, i_n, trial, i_delta)
    ydot = quantize_vector(yt, QuantizerSpec(delta, "uniform"), dith)
    ydot_plain = quantize_vector(yt, QuantizerSpec(delta, None), dith)
    lam = (
        spec.constant("c_lambda")
        * (spec.constant("sigma") ** 2 / math.sqrt(spec.constant("kappa0")))
        * (delta + my ** (1 / (2 * el)))
        * math.sqrt(conf / n)
    )
    pair = sparse.build_surrogates_full_covariate(x, ydot)
    pair_plain = sparse.SurrogatePair(Q=pair.Q, b=x.T @ ydot_plain / n, built_from="full_covariate")
    est = _solve_admm(pair, lam, theta)
    est_plain = _solve_admm(pair_plain, lam, theta)
    return [
        ("l2/dithered", est.errors["l2"], est.converged),
        ("l2/undithered", est_plain.errors["l2"], est_plain.converged),
    ]


def _trial_ablation_qmc(spec: ExperimentSpec, i_n: int, i_delta: int, trial: int):
    n = spec.n_grid[i_n]
    delta = spec.delta_grid[i_delta]
    d, r = spec.dims["d"], spec.dims["r"]
    theta = sample_lowrank_matrix(LowRankSpec(d, r), _stream(spec, _DATA, i_n, trial))
    sigma = spec.constant("sigma")
    obs = sample_mc_observations(theta, n, NoiseModel("gaussian", var=sigma ** 2), _stream(spec, _NOISE, i_n, trial))
    alpha = float(np.max(np.abs(theta)))
    conf = _conf_term(spec, d)
    lam = spec.constant("c_lambda") * (sigma + delta) * math.sqrt(conf / (n * d))
    dith = _stream(spec, _DITHER, i_n, trial, i_delta)
    qobs = lowrank.quantize_mc_observations(obs, math.inf, QuantizerSpec(delta, "uniform"), dith)
    qobs_plain = lowrank.quantize_mc_observations(obs, math.inf, QuantizerSpec(delta, None), dith)
    opts = lowrank.QmcSolverOptions(max_iter=3000)
    est = lowrank.solve_qmc(lowrank.QmcProblem(d, qobs, alpha, lam), opts, theta_star=theta)
    est_plain = lowrank.solve_qmc(lowrank.QmcProblem(d, qobs_plain, alpha, lam), opts, theta_star=theta)
    return [
        ("fro_over_d/dithered", est.errors["fro_over_d"], est.converged),
        ("fro_over_d/undithered", est_plain.errors["fro_over_d"], est_plain.converged),
    ]


# ---------------------------------------------------------------------------
# registry

_BASE_CONSTANTS = {
    "delta_conf": 4.0,
    "sigma": 1.0,
    "kappa0": 1.0,
    "moment_l": 1.25,
}


def _constants(**kw):
    out = dict(_BASE_CONSTANTS)
    out.update(kw)
    return out


_FAMILY_LIST = [
    Family(
        name="cov-elementwise",
        description="Entrywise covariance error for mixed-t data, elementwise truncation, triangular dither",
        required_dims=("d",),
        metrics=("linf",),
        rate_metrics=("linf",),
        default_n_grid=_grid(80, 20, 220),
        default_dims={"d": 100},
        default_delta_grid=(0.0, 1.0, 2.0),
        default_trials=50,
        default_constants=_constants(c_zeta=1.0),
        trial_fn=_trial_cov_elementwise,
    ),
    Family(
        name="cov-operator",
        description="Operator-norm covariance error for scaled-t data, l4-norm truncation",
        required_dims=("d",),
        metrics=("op",),
        rate_metrics=("op",),
        default_n_grid=_grid(200, 100, 1000),
        default_dims={"d": 100},
        default_delta_grid=(0.0, 1.0),
        default_trials=50,
        default_constants=_constants(c_zeta=1.0),
        trial_fn=_trial_cov_operator,
    ),
    Family(
        name="cov-sparse-threshold",
        description="Hard-thresholded covariance estimator on the entrywise pipeline",
        required_dims=("d",),
        metrics=("linf", "op"),
        rate_metrics=(),
        default_n_grid=_grid(80, 20, 220),
        default_dims={"d": 100},
        default_delta_grid=(0.0, 1.0, 2.0),
        default_trials=50,
        default_constants=_constants(c_zeta=1.0, c_mu=0.12),
        trial_fn=_trial_cov_sparse_threshold,
    ),
    Family(
        name="qcs-thm4",
        description="Generalized lasso, Gaussian covariates, heavy-tailed noise, quantized responses",
        required_dims=("d", "s"),
        metrics=("l2", "l1"),
        rate_metrics=("l2",),
        default_n_grid=_grid(100, 100, 1000),
        default_dims={"d": 150, "s": 5},
        default_delta_grid=(0.0, 0.5, 1.0),
        default_trials=50,
        default_constants=_constants(c_zeta_y=1.0, c_lambda=0.2),
        trial_fn=_trial_qcs_thm4,
    ),
    Family(
        name="qcs-thm5",
        description="Generalized lasso, heavy-tailed covariates and noise, truncation on both sides",
        required_dims=("d", "s"),
        metrics=("l2", "l1"),
        rate_metrics=("l2",),
        default_n_grid=_grid(100, 100, 1000),
        default_dims={"d": 150, "s": 5},
        default_delta_grid=(0.0, 0.5, 1.0),
        default_trials=50,
        default_constants=_constants(c_zeta=1.0, c_lambda=0.02),
        trial_fn=_trial_qcs_thm5,
    ),
    Family(
        name="qcs-thm6",
        description="Covariate-quantized lasso (indefinite surrogate), Gaussian covariates, composite gradient descent",
        required_dims=("d", "s"),
        metrics=("l2", "l1"),
        rate_metrics=("l2",),
        default_n_grid=_grid(100, 100, 1000),
        default_dims={"d": 150, "s": 5},
        default_delta_grid=(0.0, 0.5, 1.0),
        default_trials=50,
        default_constants=_constants(c_zeta_y=1.0, c_lambda=0.1),
        trial_fn=_trial_qcs_thm6,
    ),
    Family(
        name="qcs-thm7",
        description="Covariate-quantized lasso, heavy-tailed covariates, truncation everywhere",
        required_dims=("d", "s"),
        metrics=("l2", "l1"),
        rate_metrics=("l2",),
        default_n_grid=_grid(100, 100, 1000),
        default_dims={"d": 150, "s": 5},
        default_delta_grid=(0.0, 0.5, 1.0),
        default_trials=50,
        default_constants=_constants(c_zeta=1.0, c_lambda=0.01),
        trial_fn=_trial_qcs_thm7,
    ),
    Family(
        name="qcs-onebit-sg",
        description="One-bit covariates and responses, sub-Gaussian data",
        required_dims=("d", "s"),
        metrics=("l2", "l1"),
        rate_metrics=(),
        default_n_grid=_grid(200, 200, 2000),
        default_dims={"d": 100, "s": 5},
        default_delta_grid=(1.0,),
        default_trials=50,
        default_constants=_constants(c_gamma=1.0, c_lambda=0.1),
        trial_fn=_trial_qcs_onebit_sg,
    ),
    Family(
        name="qcs-onebit-ht",
        description="One-bit covariates and responses, heavy-tailed data, truncation inside the dither range",
        required_dims=("d", "s"),
        metrics=("l2", "l1"),
        rate_metrics=(),
        default_n_grid=_grid(200, 200, 2000),
        default_dims={"d": 100, "s": 5},
        default_delta_grid=(1.0,),
        default_trials=50,
        default_constants=_constants(c_gamma=1.0, c_lambda=0.1),
        trial_fn=_trial_qcs_onebit_ht,
    ),
    Family(
        name="qcs-uniform",
        description="Constrained lasso with quantized responses (fresh instance per trial)",
        required_dims=("d", "s"),
        metrics=("l2", "l1"),
        rate_metrics=("l2",),
        default_n_grid=_grid(100, 100, 1000),
        default_dims={"d": 50, "s": 3},
        default_delta_grid=(1.0,),
        default_trials=50,
        default_constants=_constants(c_zeta_y=1.0),
        trial_fn=_trial_qcs_uniform,
    ),
    Family(
        name="qmc-subexp",
        description="Quantized matrix completion, Gaussian noise, no response truncation",
        required_dims=("d", "r"),
        metrics=("fro_over_d", "nuc_over_d"),
        rate_metrics=("fro_over_d",),
        default_n_grid=_grid(2000, 1000, 8000),
        default_dims={"d": 30, "r": 5},
        default_delta_grid=(0.0, 0.5, 1.0),
        default_trials=50,
        default_constants=_constants(sigma=0.5, c_lambda=0.2),
        trial_fn=_trial_qmc_subexp,
    ),
    Family(
        name="qmc-heavy",
        description="Quantized matrix completion, heavy-tailed noise, response truncation",
        required_dims=("d", "r"),
        metrics=("fro_over_d", "nuc_over_d"),
        rate_metrics=("fro_over_d",),
        default_n_grid=_grid(2000, 1000, 8000),
        default_dims={"d": 30, "r": 5},
        default_delta_grid=(0.0, 0.5, 1.0),
        default_trials=50,
        default_constants=_constants(c_zeta_y=1.0, c_lambda=0.05),
        trial_fn=_trial_qmc_heavy,
    ),
    Family(
        name="dither-ablation-cov",
        description="d=1 variance estimation: triangular-corrected vs undithered and uniform-dither competitors",
        required_dims=("d",),
        metrics=("linf/triangular", "linf/no_dither", "linf/uniform_raw", "linf/uniform_corrected"),
        rate_metrics=("linf/triangular",),
        default_n_grid=_grid(2000, 2000, 20000),
        default_dims={"d": 1},
        default_delta_grid=(3.0,),
        default_trials=100,
        default_constants=_constants(),
        trial_fn=_trial_ablation_cov,
    ),
    Family(
        name="dither-ablation-qcs",
        description="Generalized lasso with dithered vs undithered response quantization",
        required_dims=("d", "s"),
        metrics=("l2/dithered", "l2/undithered"),
        rate_metrics=("l2/dithered",),
        default_n_grid=_grid(2000, 2000, 20000),
        default_dims={"d": 50, "s": 3},
        default_delta_grid=(2.0,),
        default_trials=50,
        default_constants=_constants(c_zeta_y=1.0, c_lambda=0.05),
        trial_fn=_trial_ablation_qcs,
    ),
    Family(
        name="dither-ablation-qmc",
        description="Matrix completion with dithered vs undithered observation quantization",
        required_dims=("d", "r"),
        metrics=("fro_over_d/dithered", "fro_over_d/undithered"),
        rate_metrics=("fro_over_d/dithered",),
        default_n_grid=_grid(5000, 5000, 25000),
        default_dims={"d": 30, "r": 5},
        default_delta_grid=(1.5,),
        default_trials=50,
        default_constants=_constants(sigma=0.15, c_lambda=0.1),
        trial_fn=_trial_ablation_qmc,
    ),
]

_FAMILY_ORDER = [f.name for f in _FAMILY_LIST]
FAMILIES = {f.name: f for f in _FAMILY_LIST}
