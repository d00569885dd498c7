"""Pure NumPy/SciPy reference implementations of the hot kernels.

This is the fallback backend selected when the compiled extension is
unavailable (and the oracle the extension is tested against). Both backends
expose the same functions with the same contracts:

* ``km_curve(times, events)`` -- product-limit survival curve arrays.
* ``fit_exponential / fit_lognormal`` -- closed-form MLE, ``(params..., loglik)``.
* ``fit_gamma / fit_weibull`` -- iterative MLE, ``(params..., loglik, converged)``.
* ``ad_statistic(family, p0, p1, x_sorted)`` -- tail-weighted distance between
  the sorted sample and the fitted CDF.
* ``ad_bootstrap(family, rows)`` -- refit each (pre-sorted) replicate row and
  return its statistic; non-converged refits keep the last iterate.

Family codes: 0 exponential, 1 weibull, 2 gamma, 3 lognormal.
"""

from __future__ import annotations

import numpy as np
from scipy import special

EXPONENTIAL, WEIBULL, GAMMA, LOGNORMAL = 0, 1, 2, 3

CDF_EPS = 1e-12
_LOG_2PI = float(np.log(2.0 * np.pi))


def km_curve(times, events):
    """Kaplan-Meier curve from durations and event flags (1=event, 0=censored).

    Returns ``(event_times, deaths, at_risk, survival)`` with one row per
    distinct time that saw at least one event. Censored observations shrink
    the risk set after their time but contribute no factor.
    """
    t = np.asarray(times, dtype=np.float64)
    e = np.asarray(events, dtype=np.int64)
    order = np.argsort(t, kind="stable")
    t = t[order]
    e = e[order]
    n = t.shape[0]

    uniq, first_index = np.unique(t, return_index=True)
    deaths = np.add.reduceat(e, first_index)
    at_risk = n - first_index
    mask = deaths > 0
    factors = 1.0 - deaths[mask] / at_risk[mask]
    survival = np.cumprod(factors)
    return uniq[mask], deaths[mask], at_risk[mask], survival


def fit_exponential(x):
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    mean = float(x.mean())
    rate = 1.0 / mean
    loglik = -n * np.log(mean) - n
    return rate, float(loglik)


def fit_lognormal(x):
    x = np.asarray(x, dtype=np.float64)
    if np.ptp(x) == 0.0:
        raise ValueError("log-normal fit needs dispersion in the data")
    lx = np.log(x)
    n = lx.shape[0]
    mu = float(lx.mean())
    sigma = float(np.sqrt(np.mean((lx - mu) ** 2)))
    if sigma <= 0.0:
        raise ValueError("log-normal fit needs dispersion in the data")
    loglik = -lx.sum() - n * np.log(sigma) - 0.5 * n * (_LOG_2PI + 1.0)
    return mu, sigma, float(loglik)


def fit_gamma(x, tol=1e-9, max_iter=200):
    """Gamma MLE by Newton iteration on ``log(a) - digamma(a) = s``.

    ``s`` is the log-moment gap ``log(mean x) - mean(log x)``; the start
    value is the standard closed-form approximation of the root.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    mean = float(x.mean())
    mean_log = float(np.log(x).mean())
    s = np.log(mean) - mean_log
    if s <= 0.0 or np.ptp(x) == 0.0:
        raise ValueError("gamma fit needs dispersion in the data")

    alpha = (3.0 - s + np.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    converged = False
    for _ in range(max_iter):
        f = np.log(alpha) - special.psi(alpha) - s
        fprime = 1.0 / alpha - special.polygamma(1, alpha)
        step = f / fprime
        new_alpha = alpha - step
        if new_alpha <= 0.0:
            new_alpha = alpha / 2.0
        done = abs(new_alpha - alpha) <= tol * alpha
        alpha = new_alpha
        if done:
            converged = True
            break
    beta = alpha / mean
    loglik = (
        n * alpha * np.log(beta)
        + (alpha - 1.0) * n * mean_log
        - beta * n * mean
        - n * special.gammaln(alpha)
    )
    return float(alpha), float(beta), float(loglik), converged


def fit_weibull(x, tol=1e-9, max_iter=200):
    """Weibull MLE by Newton iteration on the shape profile equation.

    Data are rescaled by their mean first (the shape is scale-invariant),
    which keeps ``z**k`` in range for any realistic duration data.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.ptp(x) == 0.0:
        raise ValueError("weibull fit needs dispersion in the data")
    n = x.shape[0]
    mean = float(x.mean())
    z = x / mean
    lz = np.log(z)
    mean_lz = float(lz.mean())
    sd_lz = float(np.sqrt(np.mean((lz - mean_lz) ** 2)))
    if sd_lz <= 0.0:
        raise ValueError("weibull fit needs dispersion in the data")

    k = 1.28255 / sd_lz  # pi / sqrt(6) over the log-data spread
    converged = False
    for _ in range(max_iter):
        zk = z**k
        b = float(zk.sum())
        a = float((zk * lz).sum())
        a2 = float((zk * lz * lz).sum())
        g = a / b - 1.0 / k - mean_lz
        gprime = (a2 * b - a * a) / (b * b) + 1.0 / (k * k)
        new_k = k - g / gprime
        if new_k <= 0.0:
            new_k = k / 2.0
        done = abs(new_k - k) <= tol * k
        k = new_k
        if done:
            converged = True
            break
    scale_z = float(np.mean(z**k)) ** (1.0 / k)
    scale = scale_z * mean
    loglik = (
        n * np.log(k)
        - n * k * np.log(scale)
        + (k - 1.0) * float(np.log(x).sum())
        - float(np.sum((x / scale) ** k))
    )
    return float(k), float(scale), float(loglik), converged


def _cdf(family, p0, p1, x):
    if family == EXPONENTIAL:
        return -np.expm1(-p0 * x)
    if family == WEIBULL:
        return -np.expm1(-((x / p1) ** p0))
    if family == GAMMA:
        return special.gammainc(p0, p1 * x)
    if family == LOGNORMAL:
        return special.ndtr((np.log(x) - p0) / p1)
    raise ValueError(f"unknown family code {family}")


def ad_statistic(family, p0, p1, x_sorted):
    """A-squared distance of a sorted sample from the fitted CDF.

    CDF values are clamped into ``(CDF_EPS, 1 - CDF_EPS)`` so extreme order
    statistics cannot underflow the logarithms.
    """
    x = np.asarray(x_sorted, dtype=np.float64)
    n = x.shape[0]
    cdf = np.clip(_cdf(family, p0, p1, x), CDF_EPS, 1.0 - CDF_EPS)
    i = np.arange(1, n + 1, dtype=np.float64)
    total = np.sum((2.0 * i - 1.0) * (np.log(cdf) + np.log1p(-cdf[::-1])))
    return float(-n - total / n)


def _fit_params(family, row):
    if family == EXPONENTIAL:
        rate, _ = fit_exponential(row)
        return rate, 0.0
    if family == WEIBULL:
        shape, scale, _, _ = fit_weibull(row)
        return shape, scale
    if family == GAMMA:
        alpha, beta, _, _ = fit_gamma(row)
        return alpha, beta
    if family == LOGNORMAL:
        mu, sigma, _ = fit_lognormal(row)
        return mu, sigma
    raise ValueError(f"unknown family code {family}")


def ad_bootstrap(family, rows):
    """Statistic per replicate row, each refit to its own draw.

    ``rows`` must be sorted ascending along axis 1.
    """
    rows = np.asarray(rows, dtype=np.float64)
    out = np.empty(rows.shape[0])
    for j in range(rows.shape[0]):
        p0, p1 = _fit_params(family, rows[j])
        out[j] = ad_statistic(family, p0, p1, rows[j])
    return out
