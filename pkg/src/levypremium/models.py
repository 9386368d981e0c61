"""Parameter types, densities, transforms, and samplers for the heavy-tailed
growth-rate models: normal, inverse Gaussian (IG), normal inverse Gaussian
(NIG), the doubly subordinated IG clock, and the normal compound inverse
Gaussian (NCIG) law built on that clock.

Conventions used throughout:

* An IG Lévy subordinator with T(1) ~ IG(lam, mu) has T(t) ~ IG(lam t^2, mu t);
  this is the unique scaling compatible with e^{-t phi(s)} for the Laplace
  exponent phi(s) = -(lam/mu)(1 - sqrt(1 + 2 mu^2 s / lam)).
* Lévy exponent psi(u) = -ln E[e^{iuX(1)}]; all complex square roots are
  principal-branch.  For the NCIG nesting the innermost radicand always has
  real part >= 1 for real u, so the branch cut is never crossed (asserted).
* The doubly subordinated clock is V(t) = T(U(t)) with the *outer* process T
  evaluated at the *inner* process U's value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, InvalidParameterError, QuadratureError
from .special import bessel_k1e

__all__ = [
    "NigParams", "IgParams", "DoubleIgParams", "NcigParams", "NormalParams",
    "Moments",
    "nig_log_pdf", "nig_pdf", "nig_chf", "nig_mgf_log", "nig_moments",
    "ig_pdf", "ig_laplace_exponent",
    "double_ig_mgf_log", "double_ig_pdf", "double_ig_cumulants",
    "ncig_levy_exponent", "ncig_chf", "ncig_mgf_log", "ncig_cumulants",
    "ncig_moments",
    "ig_sample", "nig_sample", "double_ig_sample", "ncig_sample",
]


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidParameterError(msg)


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class NigParams:
    """NIG parameters (mu, alpha, beta, delta); requires alpha^2 > beta^2, delta > 0."""

    mu: float
    alpha: float
    beta: float
    delta: float

    def __post_init__(self):
        _require(_finite(self.mu, self.alpha, self.beta, self.delta),
                 "NIG parameters must be finite")
        _require(self.alpha * self.alpha > self.beta * self.beta,
                 f"NIG requires alpha^2 > beta^2 (got alpha={self.alpha}, beta={self.beta})")
        _require(self.delta > 0.0, f"NIG requires delta > 0 (got {self.delta})")

    @property
    def gamma(self) -> float:
        """Steepness sqrt(alpha^2 - beta^2), in the factored form that keeps
        the MGF boundary identities exact."""
        return math.sqrt((self.alpha - self.beta) * (self.alpha + self.beta))


@dataclass(frozen=True)
class IgParams:
    """Inverse Gaussian shape/mean pair (lam, mu), both positive."""

    lam: float
    mu: float

    def __post_init__(self):
        _require(_finite(self.lam, self.mu), "IG parameters must be finite")
        _require(self.lam > 0.0, f"IG requires lam > 0 (got {self.lam})")
        _require(self.mu > 0.0, f"IG requires mu > 0 (got {self.mu})")


@dataclass(frozen=True)
class DoubleIgParams:
    """Doubly subordinated IG clock V(t) = T(U(t)): outer = T, inner = U."""

    outer: IgParams
    inner: IgParams

    def __post_init__(self):
        _require(isinstance(self.outer, IgParams) and isinstance(self.inner, IgParams),
                 "DoubleIgParams components must be IgParams")


@dataclass(frozen=True)
class NcigParams:
    """NCIG parameters: subordinator (lam, mu) shared by both IG levels,
    Brownian drift nu and variance sigma2."""

    lam: float
    mu: float
    nu: float
    sigma2: float

    def __post_init__(self):
        _require(_finite(self.lam, self.mu, self.nu, self.sigma2),
                 "NCIG parameters must be finite")
        _require(self.lam > 0.0, f"NCIG requires lam > 0 (got {self.lam})")
        _require(self.mu > 0.0, f"NCIG requires mu > 0 (got {self.mu})")
        _require(self.sigma2 > 0.0, f"NCIG requires sigma2 > 0 (got {self.sigma2})")

    @property
    def clock(self) -> DoubleIgParams:
        level = IgParams(self.lam, self.mu)
        return DoubleIgParams(outer=level, inner=level)


@dataclass(frozen=True)
class NormalParams:
    """Normal mean/standard-deviation pair."""

    mu: float
    sigma: float

    def __post_init__(self):
        _require(_finite(self.mu, self.sigma), "normal parameters must be finite")
        _require(self.sigma > 0.0, f"normal requires sigma > 0 (got {self.sigma})")


@dataclass(frozen=True)
class Moments:
    """First four standardized moments of a distribution."""

    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float

    def __post_init__(self):
        _require(self.variance > 0.0, f"variance must be positive (got {self.variance})")


# ---------------------------------------------------------------------------
# NIG
# ---------------------------------------------------------------------------

def nig_log_pdf(p: NigParams, x):
    """Log-density of NIG(mu, alpha, beta, delta) at x (scalar or array).

    Uses the cancellation-free identity
        delta*gamma - alpha*q = -(alpha^2 r^2 + beta^2 delta^2) / (alpha*q + gamma*delta),
    q = sqrt(delta^2 + r^2), r = x - mu, so the density stays accurate for
    arbitrarily large alpha (the near-normal regime).
    """
    r = np.asarray(x, dtype=float) - p.mu
    q = np.hypot(p.delta, r)
    omega = p.alpha * q
    log_k1e = np.log(bessel_k1e(omega))
    # log K1(omega) + delta*gamma = log_k1e - (alpha*q - delta*gamma)
    shift = (p.alpha * p.alpha * r * r + p.beta * p.beta * p.delta * p.delta) \
        / (omega + p.gamma * p.delta)
    out = (math.log(p.alpha * p.delta / math.pi) - np.log(q)
           + log_k1e - shift + p.beta * r)
    return float(out) if np.ndim(x) == 0 else out


def nig_pdf(p: NigParams, x):
    """NIG density at x."""
    return np.exp(nig_log_pdf(p, x))


def nig_chf(p: NigParams, t):
    """NIG characteristic function exp(i mu t + delta(gamma - sqrt(alpha^2-(beta+it)^2)))."""
    tt = np.asarray(t, dtype=complex)
    root = np.sqrt(p.alpha ** 2 - (p.beta + 1j * tt) ** 2)
    out = np.exp(1j * p.mu * tt + p.delta * (p.gamma - root))
    return complex(out) if np.ndim(t) == 0 else out


def nig_mgf_log(p: NigParams, s: float) -> float:
    """ln E[e^{sX}] for X ~ NIG(p); defined only while (beta+s)^2 < alpha^2.

    The radicand is evaluated in the factored form (alpha-beta-s)(alpha+beta+s),
    which stays well conditioned near the feasibility boundary.
    """
    rad = (p.alpha - p.beta - s) * (p.alpha + p.beta + s)
    if rad < 0.0:
        raise DomainError(
            "MGF argument outside NIG feasibility region: "
            f"(beta + s)^2 >= alpha^2 = {p.alpha ** 2:.6g} at s = {s}")
    return p.mu * s + p.delta * (p.gamma - math.sqrt(rad))


def nig_moments(p: NigParams) -> Moments:
    """Mean, variance, skewness, excess kurtosis of NIG(p)."""
    g = p.gamma
    return Moments(
        mean=p.mu + p.delta * p.beta / g,
        variance=p.delta * p.alpha ** 2 / g ** 3,
        skewness=3.0 * p.beta / (p.alpha * math.sqrt(p.delta * g)),
        excess_kurtosis=3.0 * (1.0 + 4.0 * p.beta ** 2 / p.alpha ** 2) / (p.delta * g),
    )


# ---------------------------------------------------------------------------
# IG and the doubly subordinated clock
# ---------------------------------------------------------------------------

def ig_pdf(p: IgParams, x):
    """IG(lam, mu) density sqrt(lam/(2 pi x^3)) exp(-lam (x-mu)^2 / (2 mu^2 x)); x > 0."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0.0):
        raise DomainError("IG density requires x > 0")
    out = np.sqrt(p.lam / (2.0 * np.pi * arr ** 3)) * np.exp(
        -p.lam * (arr - p.mu) ** 2 / (2.0 * p.mu ** 2 * arr))
    return float(out) if np.ndim(x) == 0 else out


def ig_laplace_exponent(p: IgParams, s) -> float:
    """Laplace exponent phi(s) = -ln E[e^{-s T(1)}] = -(lam/mu)(1 - sqrt(1 + 2 mu^2 s / lam))."""
    arr = np.asarray(s, dtype=float)
    rad = 1.0 + 2.0 * p.mu ** 2 * arr / p.lam
    if np.any(rad < 0.0):
        raise DomainError("IG Laplace exponent: radicand negative (s too negative)")
    out = -(p.lam / p.mu) * (1.0 - np.sqrt(rad))
    return float(out) if np.ndim(s) == 0 else out


def double_ig_mgf_log(p: DoubleIgParams, v: float) -> float:
    """ln E[e^{v V(1)}] for the clock V = T(U); domain enforced on both radicands."""
    lt, mt = p.outer.lam, p.outer.mu
    lu, mu_ = p.inner.lam, p.inner.mu
    inner = 1.0 - 2.0 * mt * mt * v / lt
    if inner < 0.0:
        raise DomainError(
            f"nested radicand negative at inner level: 1 - 2*mu_T^2*v/lam_T = {inner:.6g} "
            f"for v = {v}")
    outer = 1.0 - 2.0 * (mu_ * mu_ * lt / (lu * mt)) * (1.0 - math.sqrt(inner))
    if outer < 0.0:
        raise DomainError(
            f"nested radicand negative at outer level: value {outer:.6g} for v = {v}")
    return (lu / mu_) * (1.0 - math.sqrt(outer))


def double_ig_cumulants(p: DoubleIgParams) -> tuple[float, float, float, float]:
    """First four cumulants of V(1) = T(U(1)) by Faà di Bruno composition of
    the IG cumulants (t_n for T(1), u_n for U(1))."""
    t1, t2, t3, t4 = _ig_cumulants(p.outer)
    u1, u2, u3, u4 = _ig_cumulants(p.inner)
    c1 = u1 * t1
    c2 = u2 * t1 ** 2 + u1 * t2
    c3 = u3 * t1 ** 3 + 3.0 * u2 * t1 * t2 + u1 * t3
    c4 = (u4 * t1 ** 4 + 6.0 * u3 * t1 ** 2 * t2
          + u2 * (3.0 * t2 ** 2 + 4.0 * t1 * t3) + u1 * t4)
    return c1, c2, c3, c4


def _ig_cumulants(p: IgParams) -> tuple[float, float, float, float]:
    m, l = p.mu, p.lam
    return m, m ** 3 / l, 3.0 * m ** 5 / l ** 2, 15.0 * m ** 7 / l ** 3


def double_ig_pdf(p: DoubleIgParams, x: float, abs_tol: float = 1e-8) -> float:
    """Density of V(1) at x > 0 by adaptive quadrature of the mixture integral

        f(x) = (1/2pi) sqrt(lam_T lam_U / x^3)
               * int_0^inf u^{-1/2} exp(-lam_T (x - mu_T u)^2 / (2 mu_T^2 x)
                                        - lam_U (u - mu_U)^2 / (2 mu_U^2 u)) du.

    This is an oracle-grade routine (scalar x), not a hot path.
    """
    if x <= 0.0:
        raise DomainError("doubly subordinated IG density requires x > 0")
    lt, mt = p.outer.lam, p.outer.mu
    lu, mu_ = p.inner.lam, p.inner.mu
    prefactor = math.sqrt(lt * lu / x ** 3) / (2.0 * math.pi)

    def integrand(u):
        expo = (-lt * (x - mt * u) ** 2 / (2.0 * mt * mt * x)
                - lu * (u - mu_) ** 2 / (2.0 * mu_ * mu_ * u))
        return prefactor * math.exp(expo) / math.sqrt(u) if expo > -745.0 else 0.0

    # Breakpoints near both factor peaks keep quad from missing narrow modes.
    peak_t = x / mt
    width_t = math.sqrt(mt * x / lt) / mt
    width_u = math.sqrt(mu_ ** 3 / lu)
    pts = sorted({max(v, 1e-300) for v in (
        peak_t - 4 * width_t, peak_t, peak_t + 4 * width_t,
        mu_ - 4 * width_u, mu_, mu_ + 4 * width_u)})
    hi = max(peak_t + 12 * width_t, mu_ + 12 * width_u, 1.0)
    segments = [0.0] + [v for v in pts if 0.0 < v < hi] + [hi]

    seg_tol = 0.1 * abs_tol / len(segments)
    total, err_total = 0.0, 0.0
    for a, b in zip(segments[:-1], segments[1:]):
        val, err = integrate.quad(integrand, a, b, epsabs=seg_tol, epsrel=1e-10,
                                  limit=200)
        total += val
        err_total += err
    tail, tail_err = integrate.quad(integrand, hi, np.inf, epsabs=seg_tol, limit=200)
    total += tail
    err_total += tail_err

    if err_total > abs_tol:
        raise QuadratureError(
            f"doubly subordinated IG density quadrature error {err_total:.3g} "
            f"exceeds {abs_tol} at x = {x}")
    return total


# ---------------------------------------------------------------------------
# NCIG
# ---------------------------------------------------------------------------

def _ncig_nested_root(p: NcigParams, z):
    """sqrt(1 - 2 mu (1 - sqrt(1 - (2 mu^2 / lam) z))) with principal branches.

    z is the (possibly complex) Brownian-exponent argument; for real u the
    innermost radicand has real part >= 1.
    """
    inner = 1.0 - (2.0 * p.mu ** 2 / p.lam) * z
    assert np.all(np.real(np.asarray(inner)) > 0.0), "inner radicand crossed the branch cut"
    outer = 1.0 - 2.0 * p.mu * (1.0 - np.sqrt(inner))
    assert np.all(np.real(np.asarray(outer)) > 0.0), "outer radicand crossed the branch cut"
    return np.sqrt(outer)


def ncig_levy_exponent(p: NcigParams, u):
    """Lévy exponent psi_Z(u) = -(lam/mu)(1 - sqrt(1 - 2mu(1 - sqrt(1 - (2mu^2/lam)(iu nu - sigma^2 u^2/2)))))."""
    uu = np.asarray(u, dtype=complex)
    z = 1j * uu * p.nu - 0.5 * p.sigma2 * uu * uu
    out = -(p.lam / p.mu) * (1.0 - _ncig_nested_root(p, z))
    return complex(out) if np.ndim(u) == 0 else out


def ncig_chf(p: NcigParams, u):
    """Characteristic function of Z(1): exp((lam/mu)(1 - sqrt(1 - 2mu(1 - sqrt(1 - (2mu^2/lam)(iu nu - sigma^2 u^2/2))))))."""
    uu = np.asarray(u, dtype=complex)
    inner = 1.0 - (2.0 * p.mu ** 2 / p.lam) * (1j * uu * p.nu - 0.5 * p.sigma2 * uu * uu)
    outer = 1.0 - 2.0 * p.mu * (1.0 - np.sqrt(inner))
    out = np.exp((p.lam / p.mu) * (1.0 - np.sqrt(outer)))
    return complex(out) if np.ndim(u) == 0 else out


def ncig_mgf_log(p: NcigParams, s: float) -> float:
    """ln E[e^{s Z(1)}]; feasibility is checked directly on both nested radicands."""
    q = s * p.nu + 0.5 * p.sigma2 * s * s
    inner = 1.0 - (2.0 * p.mu ** 2 / p.lam) * q
    if inner < 0.0:
        raise DomainError(
            f"nested radicand negative at inner level for MGF argument s = {s}: "
            f"1 - (2 mu^2/lam)(s nu + sigma^2 s^2/2) = {inner:.6g}")
    outer = 1.0 - 2.0 * p.mu * (1.0 - math.sqrt(inner))
    if outer < 0.0:
        raise DomainError(
            f"nested radicand negative at outer level for MGF argument s = {s}: "
            f"value {outer:.6g}")
    return (p.lam / p.mu) * (1.0 - math.sqrt(outer))


def ncig_cumulants(p: NcigParams) -> tuple[float, float, float, float]:
    """First four cumulants of Z(1) = B^{nu, sigma2}(V(1)).

    With h(s) = nu s + sigma^2 s^2 / 2 the cumulant function is K_V(h(s)), so
    k1 = nu c1, k2 = nu^2 c2 + sigma^2 c1, k3 = nu^3 c3 + 3 nu sigma^2 c2,
    k4 = nu^4 c4 + 6 nu^2 sigma^2 c3 + 3 sigma^4 c2 for clock cumulants c_n.
    """
    c1, c2, c3, c4 = double_ig_cumulants(p.clock)
    nu, s2 = p.nu, p.sigma2
    k1 = nu * c1
    k2 = nu ** 2 * c2 + s2 * c1
    k3 = nu ** 3 * c3 + 3.0 * nu * s2 * c2
    k4 = nu ** 4 * c4 + 6.0 * nu ** 2 * s2 * c3 + 3.0 * s2 ** 2 * c2
    return k1, k2, k3, k4


def ncig_moments(p: NcigParams) -> Moments:
    """Mean/variance/skewness/excess-kurtosis summary of Z(1)."""
    k1, k2, k3, k4 = ncig_cumulants(p)
    return Moments(mean=k1, variance=k2,
                   skewness=k3 / k2 ** 1.5, excess_kurtosis=k4 / k2 ** 2)


# ---------------------------------------------------------------------------
# Samplers (deterministic per seed; one generator per call)
# ---------------------------------------------------------------------------

def _ig_draw(rng: np.random.Generator, lam, mu, n: int) -> np.ndarray:
    """n IG draws via the transform-with-rejection method: one chi-square
    variate, one uniform, standard two-root selection.  lam/mu may be arrays
    (per-draw parameters)."""
    lam = np.broadcast_to(np.asarray(lam, dtype=float), (n,))
    mu = np.broadcast_to(np.asarray(mu, dtype=float), (n,))
    y = rng.standard_normal(n) ** 2
    muy = mu * y
    x = mu + mu * muy / (2.0 * lam) - (mu / (2.0 * lam)) * np.sqrt(
        4.0 * lam * muy + muy * muy)
    u = rng.uniform(size=n)
    return np.where(u <= mu / (mu + x), x, mu * mu / x)


def ig_sample(p: IgParams, n: int, seed: int) -> np.ndarray:
    """n i.i.d. IG(lam, mu) variates; identical output for identical seed."""
    if n < 1:
        raise InvalidParameterError("ig_sample requires n >= 1")
    rng = np.random.default_rng(seed)
    return _ig_draw(rng, p.lam, p.mu, n)


def _double_ig_draw(rng: np.random.Generator, p: DoubleIgParams, n: int) -> np.ndarray:
    inner = _ig_draw(rng, p.inner.lam, p.inner.mu, n)          # U(1)
    # T evaluated at elapsed time v: T(v) ~ IG(lam_T v^2, mu_T v)
    return _ig_draw(rng, p.outer.lam * inner ** 2, p.outer.mu * inner, n)


def double_ig_sample(p: DoubleIgParams, n: int, seed: int) -> np.ndarray:
    """n draws of the compound clock V(1) = T(U(1))."""
    if n < 1:
        raise InvalidParameterError("double_ig_sample requires n >= 1")
    rng = np.random.default_rng(seed)
    return _double_ig_draw(rng, p, n)


def ncig_sample(p: NcigParams, n: int, seed: int) -> np.ndarray:
    """n draws of Z(1) = nu V + sqrt(sigma^2 V) N(0,1) with V the doubly
    subordinated IG clock."""
    if n < 1:
        raise InvalidParameterError("ncig_sample requires n >= 1")
    rng = np.random.default_rng(seed)
    v = _double_ig_draw(rng, p.clock, n)
    return p.nu * v + np.sqrt(p.sigma2 * v) * rng.standard_normal(n)


def nig_sample(p: NigParams, n: int, seed: int) -> np.ndarray:
    """n NIG draws via subordination: X = mu + beta T + sqrt(T) N(0,1) with
    T ~ IG(delta^2, delta/gamma)."""
    if n < 1:
        raise InvalidParameterError("nig_sample requires n >= 1")
    rng = np.random.default_rng(seed)
    t = _ig_draw(rng, p.delta ** 2, p.delta / p.gamma, n)
    return p.mu + p.beta * t + np.sqrt(t) * rng.standard_normal(n)
