"""Scalar special functions: modified Bessel K1 and the standard normal CDF.

K1 is built from two pieces split at x = 2:

* ``x <= 2``: the ascending series with the logarithmic term,

      K1(x) = 1/x + ln(x/2) I1(x) - (x/4) sum_k [psi(k+1)+psi(k+2)] w^k / (k! (k+1)!)

  with w = x^2/4 and I1(x) = (x/2) sum_k w^k / (k! (k+1)!); 25 terms put the
  truncation error far below double-precision roundoff on (0, 2].

* ``x > 2``: a Chebyshev expansion of the scaled function g(u) = e^x sqrt(x) K1(x)
  in u = 4/x - 1 on [-1, 1].  The 22 retained coefficients give ~4e-16 max
  relative error against a 50-digit quadrature oracle over [2, 1e5].

All functions accept floats or numpy arrays and return matching shapes.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

from .errors import DomainError

__all__ = ["bessel_k1", "bessel_k1e", "log_bessel_k1", "std_normal_cdf"]


# Chebyshev coefficients of e^x sqrt(x) K1(x) in u = 4/x - 1, x in [2, inf).
_CHEB_K1E = np.array([
    2.7206261904844426694e+00,
    1.0392373657681723844e-01,
    -2.8578168596227793868e-03,
    1.9521551847135163111e-04,
    -1.9361979741660829600e-05,
    2.4064849478372171171e-06,
    -3.5019606030878125421e-07,
    5.7410841254500492923e-08,
    -1.0345762465678097027e-08,
    2.0150497551970346161e-09,
    -4.1903547593419255842e-10,
    9.2183151876053141258e-11,
    -2.1299678384277910216e-11,
    5.1396396734823435404e-12,
    -1.2891739609498229351e-12,
    3.3484196660522431189e-13,
    -8.9767051820101460409e-14,
    2.4771544242195986155e-14,
    -7.0198370892147673128e-15,
    2.0387031662398572624e-15,
    -6.0570472706429322910e-16,
    1.8380935752428420410e-16,
])

_EULER = 0.57721566490153286061

# Series coefficients for the x <= 2 branch: a_k = 1/(k!(k+1)!) for I1,
# b_k = (psi(k+1)+psi(k+2))/(k!(k+1)!) for the correction sum.
_KMAX = 25


def _series_coefficients():
    fact = [1.0]
    for k in range(1, _KMAX + 2):
        fact.append(fact[-1] * k)
    psi = [0.0] * (_KMAX + 3)
    psi[1] = -_EULER
    for n in range(2, _KMAX + 3):
        psi[n] = psi[n - 1] + 1.0 / (n - 1)
    a = np.array([1.0 / (fact[k] * fact[k + 1]) for k in range(_KMAX + 1)])
    b = np.array([(psi[k + 1] + psi[k + 2]) / (fact[k] * fact[k + 1])
                  for k in range(_KMAX + 1)])
    return a, b


_A_I1, _B_SUM = _series_coefficients()
_A_I1_REV = _A_I1[::-1].copy()
_B_SUM_REV = _B_SUM[::-1].copy()


def _cheb_eval(u, coef):
    """Clenshaw recurrence for a Chebyshev series with halved c0."""
    b1 = np.zeros_like(u)
    b2 = np.zeros_like(u)
    for c in coef[:0:-1]:
        b1, b2 = 2.0 * u * b1 - b2 + c, b1
    return u * b1 - b2 + 0.5 * coef[0]


def _k1_small(x):
    """K1 on (0, 2] via the ascending series."""
    w = 0.25 * x * x
    i1 = 0.5 * x * np.polyval(_A_I1_REV, w)
    s = np.polyval(_B_SUM_REV, w)
    return 1.0 / x + np.log(0.5 * x) * i1 - 0.25 * x * s


def _k1e_large(x):
    """e^x K1(x) on (2, inf) via the Chebyshev fit."""
    u = 4.0 / x - 1.0
    return _cheb_eval(u, _CHEB_K1E) / np.sqrt(x)


def _validated(x):
    arr = np.asarray(x, dtype=float)
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr <= 0.0)):
        raise DomainError("bessel K1 requires finite x > 0")
    return arr


def bessel_k1(x):
    """Modified Bessel function of the second kind, order 1.

    Relative error <= ~5e-16 on [1e-8, 700]; for larger x the value underflows
    toward 0 together with e^{-x}.
    """
    arr = _validated(x)
    out = np.empty_like(arr)
    small = arr <= 2.0
    if np.any(small):
        out[small] = _k1_small(arr[small])
    if np.any(~small):
        xl = arr[~small]
        with np.errstate(under="ignore"):
            out[~small] = _k1e_large(xl) * np.exp(-xl)
    return float(out) if np.ndim(x) == 0 else out


def bessel_k1e(x):
    """Exponentially scaled K1: e^x K1(x). Stable for arbitrarily large x."""
    arr = _validated(x)
    out = np.empty_like(arr)
    small = arr <= 2.0
    if np.any(small):
        xs = arr[small]
        out[small] = _k1_small(xs) * np.exp(xs)
    if np.any(~small):
        out[~small] = _k1e_large(arr[~small])
    return float(out) if np.ndim(x) == 0 else out


def log_bessel_k1(x):
    """ln K1(x) without intermediate under/overflow (valid for x up to 1e308)."""
    arr = _validated(x)
    out = np.empty_like(arr)
    small = arr <= 2.0
    if np.any(small):
        out[small] = np.log(_k1_small(arr[small]))
    if np.any(~small):
        xl = arr[~small]
        u = 4.0 / xl - 1.0
        out[~small] = np.log(_cheb_eval(u, _CHEB_K1E)) - 0.5 * np.log(xl) - xl
    return float(out) if np.ndim(x) == 0 else out


def std_normal_cdf(x):
    """Standard normal CDF Phi(x), absolute error below 1e-15."""
    if np.ndim(x) == 0:
        xv = float(x)
        if math.isnan(xv):
            raise DomainError("std_normal_cdf requires a finite argument")
        return 0.5 * math.erfc(-xv / math.sqrt(2.0))
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("std_normal_cdf requires finite arguments")
    return ndtr(arr)
