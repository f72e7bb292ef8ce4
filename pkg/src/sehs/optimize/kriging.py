"""Kriging (Gaussian-process) surrogate with a constant trend.

Squared-exponential kernel with per-dimension length scales; the trend
coefficient and process variance are profiled out analytically, and the
remaining log length scales are fitted by concentrated maximum likelihood
with a multi-start pattern search (gradient-free, deterministic).
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from sehs.errors import DomainError, NumericalError


@dataclass(frozen=True)
class KrigingModel:
    points: np.ndarray        # (n, d) support designs
    values: np.ndarray        # (n,)
    log_lengths: np.ndarray   # (d,) fitted log10 length scales
    beta: float               # constant trend
    sigma2: float             # process variance
    nugget: float
    chol: np.ndarray          # Cholesky factor of the correlation matrix
    alpha: np.ndarray         # K^{-1} (y - beta)
    box_lo: np.ndarray
    box_hi: np.ndarray


def _correlation(points_a, points_b, lengths):
    d2 = np.sum(((points_a[:, None, :] - points_b[None, :, :]) / lengths)**2,
                axis=-1)
    return np.exp(-0.5 * d2)


def _profile_likelihood(points, values, lengths, nugget):
    """Concentrated negative log likelihood; beta and sigma2 profiled out."""
    n = points.shape[0]
    corr = _correlation(points, points, lengths)
    corr[np.diag_indices_from(corr)] += nugget
    try:
        chol = sla.cholesky(corr, lower=True)
    except np.linalg.LinAlgError:
        return np.inf, None
    ones = np.ones(n)
    ki_y = sla.cho_solve((chol, True), values)
    ki_1 = sla.cho_solve((chol, True), ones)
    beta = float(ones @ ki_y / (ones @ ki_1))
    resid = values - beta
    sigma2 = float(resid @ sla.cho_solve((chol, True), resid)) / n
    sigma2 = max(sigma2, 1e-300)
    log_det = 2.0 * np.sum(np.log(np.diag(chol)))
    nll = 0.5 * (n * np.log(sigma2) + log_det)
    return nll, (beta, sigma2, chol)


def kriging_fit(points, values, nugget: float = 1e-8,
                n_starts: int = 20, seed: int = 0) -> KrigingModel:
    """Fit by concentrated MLE over log length scales (pattern search)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] < points.shape[1] and points.shape[0] == 1:
        points = points.T
    values = np.asarray(values, dtype=float).ravel()
    n, d = points.shape
    if n < 4:
        raise DomainError("kriging needs at least 4 support points")
    if values.size != n:
        raise DomainError("points and values disagree in length")
    for i in range(n):
        for j in range(i + 1, n):
            if np.allclose(points[i], points[j], atol=1e-12) \
                    and abs(values[i] - values[j]) > 1e-12:
                raise DomainError(
                    "duplicate support points with conflicting values")

    box_lo, box_hi = points.min(axis=0), points.max(axis=0)
    span = np.where(box_hi > box_lo, box_hi - box_lo, 1.0)

    def objective(log_len, nug):
        return _profile_likelihood(points, values, span * 10.0**log_len,
                                   nug)[0]

    rng = np.random.default_rng(seed)
    starts = [np.zeros(d)] + [rng.uniform(-1.5, 1.0, d)
                              for _ in range(n_starts - 1)]
    best_nll, best_log = np.inf, np.zeros(d)
    for start in starts:
        log_len = start.copy()
        step = 0.5
        f0 = objective(log_len, nugget)
        while step > 1e-3:
            improved = False
            for k in range(d):
                for sgn in (1.0, -1.0):
                    trial = log_len.copy()
                    trial[k] = np.clip(trial[k] + sgn * step, -3.0, 2.0)
                    f_t = objective(trial, nugget)
                    if f_t < f0:
                        log_len, f0 = trial, f_t
                        improved = True
            if not improved:
                step *= 0.5
        if f0 < best_nll:
            best_nll, best_log = f0, log_len

    nug = nugget
    nll, parts = _profile_likelihood(points, values, span * 10.0**best_log,
                                     nug)
    while parts is None and nug < 1e-2:
        nug *= 10.0
        warnings.warn(
            f"ill-conditioned correlation matrix; nugget raised to {nug:g}")
        nll, parts = _profile_likelihood(points, values,
                                         span * 10.0**best_log, nug)
    if parts is None:
        raise NumericalError("correlation matrix not positive definite even "
                             "with escalated nugget")
    beta, sigma2, chol = parts
    alpha = sla.cho_solve((chol, True), values - beta)
    return KrigingModel(points=points, values=values, log_lengths=best_log,
                        beta=beta, sigma2=sigma2, nugget=nug, chol=chol,
                        alpha=alpha, box_lo=box_lo, box_hi=box_hi)


def kriging_predict(model: KrigingModel, x):
    """(mean, variance, extrapolating) at query points.

    ``extrapolating`` flags queries more than 10% of the box span outside
    the fitted box.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    single = x.shape[0] == 1
    span = np.where(model.box_hi > model.box_lo,
                    model.box_hi - model.box_lo, 1.0)
    lengths = span * 10.0**model.log_lengths
    k_star = _correlation(x, model.points, lengths)
    # The nugget is part of the kernel (white-noise term shared at zero
    # lag), so queries that coincide with a support point reproduce the
    # observation exactly.
    same = np.all(np.isclose(x[:, None, :], model.points[None, :, :],
                             rtol=0.0, atol=1e-12), axis=-1)
    k_star = k_star + model.nugget * same
    mean = model.beta + k_star @ model.alpha
    v = sla.solve_triangular(model.chol, k_star.T, lower=True)
    var = model.sigma2 * np.maximum(
        1.0 + model.nugget - np.sum(v**2, axis=0), 0.0)
    margin = 0.1 * span
    outside = np.any((x < model.box_lo - margin)
                     | (x > model.box_hi + margin), axis=1)
    if np.any(outside):
        warnings.warn("kriging prediction outside the fitted design box")
    if single:
        return float(mean[0]), float(var[0]), bool(outside[0])
    return mean, var, outside
