# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Contracts, family codes, and error messages match pure.py; that module is
the reference these routines are tested against.
"""

from libc.math cimport erfc, expm1, exp, fabs, lgamma, log, log1p, pow, sqrt

import numpy as np

cimport numpy as cnp
from scipy.special.cython_special cimport gammainc, psi

cnp.import_array()

EXPONENTIAL, WEIBULL, GAMMA, LOGNORMAL = 0, 1, 2, 3

cdef double CDF_EPS = 1e-12
cdef double LOG_2PI = 1.8378770664093453
cdef double SQRT2 = 1.4142135623730951
cdef int F_EXP = 0, F_WEI = 1, F_GAM = 2, F_LOGN = 3


# ---------------------------------------------------------------------------
# scalar helpers

cdef double _trigamma(double x) noexcept nogil:
    # Recurrence up to x >= 8, then the standard asymptotic expansion.
    cdef double r = 0.0
    cdef double ix, ix2
    while x < 8.0:
        r += 1.0 / (x * x)
        x += 1.0
    ix = 1.0 / x
    ix2 = ix * ix
    return r + ix * (1.0 + ix * (0.5 + ix * (1.0 / 6.0 + ix2 * (
        -1.0 / 30.0 + ix2 * (1.0 / 42.0 - ix2 / 30.0)))))


cdef double _clamp01(double p) noexcept nogil:
    if p < CDF_EPS:
        return CDF_EPS
    if p > 1.0 - CDF_EPS:
        return 1.0 - CDF_EPS
    return p


cdef double _cdf_c(int family, double p0, double p1, double x) noexcept nogil:
    if family == F_EXP:
        return -expm1(-p0 * x)
    elif family == F_WEI:
        return -expm1(-pow(x / p1, p0))
    elif family == F_GAM:
        return gammainc(p0, p1 * x)
    else:
        return 0.5 * erfc(-(log(x) - p0) / (p1 * SQRT2))


cdef double _mean_c(const double* v, Py_ssize_t n) noexcept nogil:
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        s += v[i]
    return s / n


cdef void _log_into(const double* x, double* lx, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(n):
        lx[i] = log(x[i])


cdef bint _is_constant(const double* x, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(1, n):
        if x[i] != x[0]:
            return 0
    return 1


# ---------------------------------------------------------------------------
# per-family MLE (status 0 = ok, -1 = degenerate data)

cdef int _fit_exponential_c(const double* x, Py_ssize_t n,
                            double* rate, double* loglik) noexcept nogil:
    cdef double mean = _mean_c(x, n)
    rate[0] = 1.0 / mean
    loglik[0] = -n * log(mean) - n
    return 0


cdef int _fit_lognormal_c(const double* lx, Py_ssize_t n,
                          double* mu, double* sigma, double* loglik) noexcept nogil:
    if _is_constant(lx, n):
        return -1
    cdef double m = _mean_c(lx, n)
    cdef double var = 0.0
    cdef double d
    cdef Py_ssize_t i
    for i in range(n):
        d = lx[i] - m
        var += d * d
    var /= n
    if var <= 0.0:
        return -1
    mu[0] = m
    sigma[0] = sqrt(var)
    loglik[0] = -n * m - n * log(sigma[0]) - 0.5 * n * (LOG_2PI + 1.0)
    return 0


cdef int _fit_gamma_c(const double* x, const double* lx, Py_ssize_t n,
                      double tol, int max_iter,
                      double* alpha, double* beta, double* loglik,
                      int* converged) noexcept nogil:
    if _is_constant(x, n):
        return -1
    cdef double mean = _mean_c(x, n)
    cdef double mean_log = _mean_c(lx, n)
    cdef double s = log(mean) - mean_log
    if s <= 0.0:
        return -1
    cdef double a = (3.0 - s + sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s)
    cdef double f, fprime, new_a
    cdef int it
    converged[0] = 0
    for it in range(max_iter):
        f = log(a) - psi(a) - s
        fprime = 1.0 / a - _trigamma(a)
        new_a = a - f / fprime
        if new_a <= 0.0:
            new_a = a / 2.0
        if fabs(new_a - a) <= tol * a:
            a = new_a
            converged[0] = 1
            break
        a = new_a
    alpha[0] = a
    beta[0] = a / mean
    loglik[0] = (n * a * log(beta[0]) + (a - 1.0) * n * mean_log
                 - beta[0] * n * mean - n * lgamma(a))
    return 0


cdef int _fit_weibull_c(const double* x, const double* lx, Py_ssize_t n,
                        double tol, int max_iter,
                        double* shape, double* scale, double* loglik,
                        int* converged) noexcept nogil:
    # Work on z = x / mean(x); the shape is scale-invariant and z**k stays
    # in floating-point range. lz[i] = lx[i] - log(mean).
    if _is_constant(x, n):
        return -1
    cdef double mean = _mean_c(x, n)
    cdef double log_mean = log(mean)
    cdef double mean_lz = _mean_c(lx, n) - log_mean
    cdef double var_lz = 0.0
    cdef double d, zk, lzi
    cdef Py_ssize_t i
    for i in range(n):
        d = (lx[i] - log_mean) - mean_lz
        var_lz += d * d
    var_lz /= n
    if var_lz <= 0.0:
        return -1

    cdef double k = 1.28255 / sqrt(var_lz)
    cdef double a, b, a2, g, gprime, new_k
    cdef int it
    converged[0] = 0
    for it in range(max_iter):
        a = 0.0
        b = 0.0
        a2 = 0.0
        for i in range(n):
            lzi = lx[i] - log_mean
            zk = exp(k * lzi)
            b += zk
            a += zk * lzi
            a2 += zk * lzi * lzi
        g = a / b - 1.0 / k - mean_lz
        gprime = (a2 * b - a * a) / (b * b) + 1.0 / (k * k)
        new_k = k - g / gprime
        if new_k <= 0.0:
            new_k = k / 2.0
        if fabs(new_k - k) <= tol * k:
            k = new_k
            converged[0] = 1
            break
        k = new_k
    b = 0.0
    for i in range(n):
        b += exp(k * (lx[i] - log_mean))
    cdef double scale_z = pow(b / n, 1.0 / k)
    shape[0] = k
    scale[0] = scale_z * mean
    # Sum((x/scale)**k) == n exactly by the scale definition.
    loglik[0] = (n * log(k) - n * k * log(scale[0])
                 + (k - 1.0) * n * _mean_c(lx, n) - n)
    return 0


cdef int _fit_c(int family, const double* x, double* scratch, Py_ssize_t n,
                double* p0, double* p1) noexcept nogil:
    cdef double loglik
    cdef int converged
    if family == F_EXP:
        p1[0] = 0.0
        return _fit_exponential_c(x, n, p0, &loglik)
    _log_into(x, scratch, n)
    if family == F_WEI:
        return _fit_weibull_c(x, scratch, n, 1e-9, 200, p0, p1, &loglik, &converged)
    elif family == F_GAM:
        return _fit_gamma_c(x, scratch, n, 1e-9, 200, p0, p1, &loglik, &converged)
    else:
        return _fit_lognormal_c(scratch, n, p0, p1, &loglik)


cdef double _ad_stat_c(int family, double p0, double p1,
                       const double* x, double* work, Py_ssize_t n) noexcept nogil:
    # work: scratch of length n, overwritten with clamped CDF values.
    cdef double total = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        work[i] = _clamp01(_cdf_c(family, p0, p1, x[i]))
    for i in range(n):
        total += (2.0 * i + 1.0) * (log(work[i]) + log1p(-work[n - 1 - i]))
    return -<double>n - total / n


# ---------------------------------------------------------------------------
# python-visible wrappers

def _as_vector(x):
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise ValueError("expected a non-empty 1-d array")
    return arr


def km_curve(times, events):
    t = np.asarray(times, dtype=np.float64)
    e = np.asarray(events, dtype=np.int64)
    order = np.argsort(t, kind="stable")
    t = np.ascontiguousarray(t[order])
    e = np.ascontiguousarray(e[order])

    cdef Py_ssize_t n = t.shape[0]
    out_t = np.empty(n, dtype=np.float64)
    out_d = np.empty(n, dtype=np.int64)
    out_r = np.empty(n, dtype=np.int64)
    out_s = np.empty(n, dtype=np.float64)

    cdef double[::1] tv = t
    cdef cnp.int64_t[::1] ev = e
    cdef double[::1] otv = out_t
    cdef cnp.int64_t[::1] odv = out_d
    cdef cnp.int64_t[::1] orv = out_r
    cdef double[::1] osv = out_s

    cdef Py_ssize_t i = 0, j, m = 0
    cdef cnp.int64_t at_risk = n, d
    cdef double s = 1.0
    with nogil:
        while i < n:
            j = i
            d = 0
            while j < n and tv[j] == tv[i]:
                d += ev[j]
                j += 1
            if d > 0:
                s *= 1.0 - <double>d / <double>at_risk
                otv[m] = tv[i]
                odv[m] = d
                orv[m] = at_risk
                osv[m] = s
                m += 1
            at_risk -= j - i
            i = j
    return out_t[:m].copy(), out_d[:m].copy(), out_r[:m].copy(), out_s[:m].copy()


def fit_exponential(x):
    arr = _as_vector(x)
    cdef double[::1] xv = arr
    cdef double rate, loglik
    _fit_exponential_c(&xv[0], xv.shape[0], &rate, &loglik)
    return rate, loglik


def fit_lognormal(x):
    arr = _as_vector(x)
    lx = np.log(arr)
    cdef double[::1] lv = lx
    cdef double mu, sigma, loglik
    if _fit_lognormal_c(&lv[0], lv.shape[0], &mu, &sigma, &loglik) != 0:
        raise ValueError("log-normal fit needs dispersion in the data")
    return mu, sigma, loglik


def fit_gamma(x, double tol=1e-9, int max_iter=200):
    arr = _as_vector(x)
    lx = np.log(arr)
    cdef double[::1] xv = arr
    cdef double[::1] lv = lx
    cdef double alpha, beta, loglik
    cdef int converged
    if _fit_gamma_c(&xv[0], &lv[0], xv.shape[0], tol, max_iter,
                    &alpha, &beta, &loglik, &converged) != 0:
        raise ValueError("gamma fit needs dispersion in the data")
    return alpha, beta, loglik, bool(converged)


def fit_weibull(x, double tol=1e-9, int max_iter=200):
    arr = _as_vector(x)
    lx = np.log(arr)
    cdef double[::1] xv = arr
    cdef double[::1] lv = lx
    cdef double shape, scale, loglik
    cdef int converged
    if _fit_weibull_c(&xv[0], &lv[0], xv.shape[0], tol, max_iter,
                      &shape, &scale, &loglik, &converged) != 0:
        raise ValueError("weibull fit needs dispersion in the data")
    return shape, scale, loglik, bool(converged)


def ad_statistic(int family, double p0, double p1, x_sorted):
    arr = _as_vector(x_sorted)
    cdef double[::1] xv = arr
    if not 0 <= family <= 3:
        raise ValueError(f"unknown family code {family}")
    work = np.empty(xv.shape[0], dtype=np.float64)
    cdef double[::1] wv = work
    return _ad_stat_c(family, p0, p1, &xv[0], &wv[0], xv.shape[0])


def ad_bootstrap(int family, rows):
    """Statistic per replicate row (rows pre-sorted ascending along axis 1)."""
    mat = np.ascontiguousarray(rows, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[1] == 0:
        raise ValueError("expected a 2-d array of replicate rows")
    if not 0 <= family <= 3:
        raise ValueError(f"unknown family code {family}")
    cdef double[:, ::1] mv = mat
    cdef Py_ssize_t reps = mv.shape[0], n = mv.shape[1]
    out = np.empty(reps, dtype=np.float64)
    scratch = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double[::1] sv = scratch
    cdef Py_ssize_t j
    cdef double p0, p1
    with nogil:
        for j in range(reps):
            _fit_c(family, &mv[j, 0], &sv[0], n, &p0, &p1)
            # The log scratch is dead after the fit; reuse it for CDF values.
            ov[j] = _ad_stat_c(family, p0, p1, &mv[j, 0], &sv[0], n)
    return out
