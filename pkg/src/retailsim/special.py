"""Numerical special functions for the analysis suite.

Two pieces are implemented from scratch so the analysis pipeline does not
lean on the same library the tests use as an oracle:

* the regularized incomplete beta function (continued fraction, modified
  Lentz), which gives F-distribution tail probabilities, and
* the studentized range distribution (double Gauss-Legendre quadrature over
  the normal-range integral and the chi scale mixture), which gives Tukey
  HSD critical values.
"""

from __future__ import annotations

import math

import numpy as np

_MAX_ITER = 300
_EPS = 3e-15
_TINY = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    return h  # converged to working precision in practice


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError(f"betainc_reg needs a, b > 0, got ({a}, {b})")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # The continued fraction converges fastest below the distribution mode.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_sf(f: float, df1: int, df2: int) -> float:
    """Upper tail P(F(df1, df2) > f) via the incomplete beta."""
    if f <= 0.0:
        return 1.0
    x = df2 / (df2 + df1 * f)
    return betainc_reg(df2 / 2.0, df1 / 2.0, x)


_SQRT_2PI = math.sqrt(2.0 * math.pi)
_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_erf_vec = np.vectorize(math.erf, otypes=[float])

# Fixed quadrature grids, shared by every CDF evaluation.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(128)
_Z_LO, _Z_HI = -8.5, 8.5
_Z = 0.5 * (_Z_HI + _Z_LO) + 0.5 * (_Z_HI - _Z_LO) * _GL_NODES
_WZ = 0.5 * (_Z_HI - _Z_LO) * _GL_WEIGHTS
_PHI_Z = 0.5 * (1.0 + _erf_vec(_Z * _INV_SQRT2))
_PDF_W = np.exp(-0.5 * _Z * _Z) / _SQRT_2PI * _WZ


def studentized_range_cdf(q: float, k: int, df: int) -> float:
    """P(Q <= q) for the studentized range with k groups and df error dof.

    Integrates the standard-normal range CDF against the density of
    s = chi_df / sqrt(df).  Quadrature accuracy is well inside the
    documented ±1e-4 target on the quantile scale.
    """
    if k < 2 or df < 1:
        raise ValueError(f"studentized range needs k >= 2, df >= 1, got ({k}, {df})")
    if q <= 0.0:
        return 0.0
    # Scale-mixture density: f(s) = C * s^(df-1) * exp(-df*s^2/2).
    ln_c = (df / 2.0) * math.log(df) - math.lgamma(df / 2.0) - (df / 2.0 - 1.0) * math.log(2.0)
    s_hi = 1.0 + 14.0 / math.sqrt(df) + 20.0 / df
    s = 0.5 * s_hi + 0.5 * s_hi * _GL_NODES + 0.5e-10
    ws = 0.5 * s_hi * _GL_WEIGHTS
    dens = np.exp(ln_c + (df - 1) * np.log(s) - df * s * s / 2.0)
    shifted = _Z[None, :] - (q * s)[:, None]
    phi_shifted = 0.5 * (1.0 + _erf_vec(shifted * _INV_SQRT2))
    inner = np.clip(_PHI_Z[None, :] - phi_shifted, 0.0, 1.0)
    range_cdf = k * (inner ** (k - 1) @ _PDF_W)
    np.clip(range_cdf, 0.0, 1.0, out=range_cdf)
    return float(min(1.0, np.dot(ws, dens * range_cdf)))


def studentized_range_ppf(p: float, k: int, df: int, tol: float = 1e-7) -> float:
    """Quantile of the studentized range by bisection on the CDF."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile level must be in (0, 1), got {p}")
    lo, hi = 0.0, 2.0
    while studentized_range_cdf(hi, k, df) < p:
        hi *= 2.0
        if hi > 1e4:  # pragma: no cover - defensive
            break
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if studentized_range_cdf(mid, k, df) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)
