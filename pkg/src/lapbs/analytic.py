"""Closed-form Black-Scholes put, high-precision erf, and error metrics."""

import math

import numpy as np

__all__ = ["erf", "bs_put", "l2_error", "reduction_rate"]

_SQRT_PI = math.sqrt(math.pi)


def _erf_series(x):
    # incomplete-gamma series P(1/2, x^2), fast for small |x|
    x2 = x * x
    ap = 0.5
    term = 1.0 / ap
    total = term
    for _ in range(200):
        ap += 1.0
        term *= x2 / ap
        total += term
        if abs(term) < abs(total) * 1e-18:
            break
    return total * x * math.exp(-x2) / _SQRT_PI


def _erfc_cf(x):
    # modified Lentz continued fraction for Gamma(1/2, x^2)
    x2 = x * x
    tiny = 1e-300
    b = x2 + 0.5
    c = 1.0 / tiny
    d = 1.0 / b
    f = d
    for i in range(1, 300):
        an = -i * (i - 0.5)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        f *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    return x * math.exp(-x2) * f / _SQRT_PI


def erf(x):
    """Error function accurate to ~1 ulp; odd, saturating to +-1."""
    if isinstance(x, np.ndarray):
        return np.vectorize(erf)(x)
    if x == 0.0:
        return 0.0
    ax = abs(x)
    if ax * ax > 708.0:  # exp underflow: erfc is below the subnormal range
        return math.copysign(1.0, x)
    if ax < 2.0:
        val = _erf_series(ax)
    else:
        val = 1.0 - _erfc_cf(ax)
    return math.copysign(val, x)


def _norm_cdf(x):
    return 0.5 * (1.0 + erf(x / math.sqrt(2.0)))


def bs_put(x, t, strike, r, sigma):
    """Black-Scholes European put value."""
    if t <= 0:
        raise ValueError("t must be positive")
    if sigma <= 0 or strike <= 0:
        raise ValueError("sigma and strike must be positive")
    if np.ndim(x) > 0:
        return np.array([bs_put(xi, t, strike, r, sigma) for xi in x])
    if x <= 0:
        return strike * math.exp(-r * t)
    srt = sigma * math.sqrt(t)
    d1 = (math.log(x / strike) + (r + 0.5 * sigma * sigma) * t) / srt
    d2 = d1 - srt
    return strike * math.exp(-r * t) * _norm_cdf(-d2) - x * _norm_cdf(-d1)


_G5X, _G5W = np.polynomial.legendre.leggauss(5)


def l2_error(values, exact, mesh):
    """L2(0, L) distance between the P1 interpolant of ``values`` and the
    function ``exact``, by 5-point Gauss per element."""
    x = mesh.x
    v = np.asarray(values, dtype=float)
    total = 0.0
    for e in range(mesh.m):
        a, b = x[e], x[e + 1]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        pts = mid + half * _G5X
        interp = v[e] + (v[e + 1] - v[e]) * (pts - a) / mesh.h
        ex = np.array([exact(p) for p in pts])
        total += half * np.dot(_G5W, (interp - ex) ** 2)
    return math.sqrt(total)


def reduction_rate(e_coarse, e_fine):
    """log2 error ratio under mesh halving; NaN when either error is zero."""
    if e_coarse <= 0 or e_fine <= 0:
        return float("nan")
    return math.log2(e_coarse / e_fine)
