"""Equity-premium engine: expected gross return, risk-free rate, and log
premium under log-normal, log-NIG, and log-NCIG growth; the heavy-tail
amplification ratio; and risk-aversion calibration by bracketed bisection.

All quantities are per the period of the fitted parameters (monthly inputs
give monthly premia); annualization is a caller concern.  The log premium
equals mgf_log(1) - mgf_log(1-a) + mgf_log(-a) for every model; for NIG and
the ratio function the radical differences are evaluated in cancellation-free
pairwise form so the large-alpha limit is measurable to machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import CalibrationError, DomainError, LevyPremiumError
from .models import NcigParams, NigParams, NormalParams, ncig_mgf_log, nig_mgf_log

__all__ = [
    "PremiumInputs", "PremiumResult",
    "premium_lognormal", "premium_nig", "premium_ncig", "ratio_r",
    "log_premium", "feasible_crra_max", "calibrate_crra",
]

GrowthModel = Union[NormalParams, NigParams, NcigParams]


@dataclass(frozen=True)
class PremiumInputs:
    """Discount factor b in (0,1), CRRA a > 0, and the log-growth model."""

    b: float
    a: float
    model: GrowthModel

    def __post_init__(self):
        if not 0.0 < self.b < 1.0:
            raise DomainError(f"discount factor must lie in (0, 1), got {self.b}")
        if not self.a >= 0.0:
            raise DomainError(f"CRRA must be nonnegative, got {self.a}")


@dataclass(frozen=True)
class PremiumResult:
    """Gross expected return, gross risk-free return, and their log spread."""

    expected_return: float
    risk_free: float
    log_premium: float


def _result(log_rf: float, log_premium_stable: float) -> PremiumResult:
    # The stable pairwise premium is authoritative; the gross returns are
    # reconstructed from it so ln E - ln Rf equals log_premium identically.
    with np.errstate(over="ignore", under="ignore"):
        return PremiumResult(expected_return=float(np.exp(log_rf + log_premium_stable)),
                             risk_free=float(np.exp(log_rf)),
                             log_premium=log_premium_stable)


def premium_lognormal(b: float, a: float, p: NormalParams) -> PremiumResult:
    """Log-normal growth: log premium = a sigma^2."""
    s2 = p.sigma ** 2
    log_rf = -math.log(b) - (-a * p.mu + 0.5 * a * a * s2)
    return _result(log_rf, a * s2)


def premium_nig(b: float, a: float, p: NigParams) -> PremiumResult:
    """Log-NIG growth.  Requires the MGF arguments 1, 1-a, -a all feasible:
    alpha^2 must exceed (beta+1)^2, (beta+1-a)^2, and (beta-a)^2."""
    al, be, de = p.alpha, p.beta, p.delta
    rads = {}
    for arg, rad_name in ((1.0, "(beta + 1)"), (1.0 - a, "(beta + 1 - a)"),
                          (-a, "(beta - a)")):
        rad = (al - be - arg) * (al + be + arg)   # alpha^2 - (beta + arg)^2
        if rad <= 0.0:
            raise DomainError(
                f"CRRA outside NIG feasibility region: radicand alpha^2 - {rad_name}^2 "
                f"<= 0 at a = {a}")
        rads[arg] = rad
    g = p.gamma
    r_ma = math.sqrt(rads[-a])
    r_p1ma = math.sqrt(rads[1.0 - a])
    r_p1 = math.sqrt(rads[1.0])
    # gamma - r_ma and r_p1ma - r_p1 in cancellation-free pairwise form.
    term1 = (a * a - 2.0 * a * be) / (g + r_ma)
    term2 = (2.0 * a * (be + 1.0) - a * a) / (r_p1ma + r_p1)
    premium = de * (term1 + term2)
    # Independent of b and mu by construction; cross-check the MGF composition.
    # Its roundoff scales with the cancelled magnitude delta*gamma and blows
    # up like 1/r near the feasibility boundary where a radical approaches 0.
    composed = (nig_mgf_log(p, 1.0) - nig_mgf_log(p, 1.0 - a) + nig_mgf_log(p, -a))
    eps = float(np.finfo(float).eps)
    conditioning = al * al / max(min(r_ma, r_p1ma, r_p1), 1e-300)
    assert abs(premium - composed) <= 1e-12 + 64.0 * eps * de * (g + conditioning)

    log_rf = -math.log(b) - nig_mgf_log(p, -a)
    return _result(log_rf, premium)


def premium_ncig(b: float, a: float, p: NcigParams) -> PremiumResult:
    """Log-NCIG growth: log premium = (lam/mu)(1 + A1 - A2 - A3) with the
    three nested radicals evaluated at MGF arguments 1-a, -a, and 1."""
    try:
        g1 = ncig_mgf_log(p, 1.0)
        g1ma = ncig_mgf_log(p, 1.0 - a)
        gma = ncig_mgf_log(p, -a)
    except DomainError as exc:
        raise DomainError(f"CRRA outside NCIG feasibility region at a = {a}: {exc}") from exc

    a1 = _ncig_outer_root(p, 1.0 - a)
    a2 = _ncig_outer_root(p, -a)
    a3 = _ncig_outer_root(p, 1.0)
    premium = (p.lam / p.mu) * (1.0 + a1 - a2 - a3)

    composed = g1 - g1ma + gma
    tol = max(1e-12, 32.0 * np.finfo(float).eps * (p.lam / p.mu))
    if abs(premium - composed) > tol:
        raise LevyPremiumError(
            f"NCIG premium formulations disagree: {premium!r} vs {composed!r}")

    log_rf = -math.log(b) - gma
    return _result(log_rf, premium)


def _ncig_outer_root(p: NcigParams, s: float) -> float:
    q = s * p.nu + 0.5 * p.sigma2 * s * s
    inner = 1.0 - (2.0 * p.mu ** 2 / p.lam) * q
    outer = 1.0 - 2.0 * p.mu * (1.0 - math.sqrt(inner))
    return math.sqrt(outer)


def ratio_r(a: float, alpha: float) -> float:
    """Heavy-tail premium amplification relative to the Gaussian benchmark:
    alpha (alpha - sqrt(alpha^2-a^2) - sqrt(alpha^2-1) + sqrt(alpha^2-(1-a)^2)) / a."""
    if a <= 0.0:
        raise DomainError("ratio requires a > 0")
    if alpha * alpha <= max(a * a, 1.0, (1.0 - a) ** 2):
        raise DomainError(
            f"ratio requires alpha^2 > max(a^2, 1, (1-a)^2); got alpha = {alpha}, a = {a}")
    r_a = math.sqrt(alpha * alpha - a * a)
    r_1 = math.sqrt(alpha * alpha - 1.0)
    r_1ma = math.sqrt(alpha * alpha - (1.0 - a) ** 2)
    term1 = a * a / (alpha + r_a)                       # alpha - r_a
    term2 = (2.0 * a - a * a) / (r_1ma + r_1)           # r_1ma - r_1
    return alpha * (term1 + term2) / a


def log_premium(model: GrowthModel, a: float, b: float = 0.5) -> float:
    """Log equity premium under ``model`` at CRRA ``a`` (b cancels)."""
    if isinstance(model, NormalParams):
        return premium_lognormal(b, a, model).log_premium
    if isinstance(model, NigParams):
        return premium_nig(b, a, model).log_premium
    if isinstance(model, NcigParams):
        return premium_ncig(b, a, model).log_premium
    raise DomainError(f"unsupported growth model type {type(model).__name__}")


def feasible_crra_max(model: GrowthModel, probe: float = 1.0,
                      tol: float = 1e-12) -> float:
    """Largest feasible CRRA under the model's MGF domain.

    Located numerically: geometric expansion until the feasibility error
    fires, then bisection on the boundary.  Infinite for the normal model.
    """
    if isinstance(model, NormalParams):
        return math.inf

    def feasible(a: float) -> bool:
        try:
            log_premium(model, a)
            return True
        except DomainError:
            return False

    if not feasible(0.0):
        raise DomainError("model is infeasible even at a = 0 "
                          "(the unit MGF argument lies outside the domain)")
    a = max(probe, tol)
    while feasible(a):
        a *= 2.0
        if a > 1e12:
            return math.inf
    lo, hi = a / 2.0, a
    while hi - lo > tol * max(1.0, lo):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def calibrate_crra(target_log_premium: float, b: float, model: GrowthModel,
                   tol: float = 1e-10, grid_points: int = 17) -> float:
    """CRRA a > 0 solving log_premium(a) = target by bracketed bisection.

    Monotonicity of the premium in a is verified on a grid before bisecting;
    a target above the feasible maximum raises CalibrationError reporting the
    attainable premium.  target = 0 returns the boundary solution a = 0.
    """
    if target_log_premium < 0.0:
        raise CalibrationError("target premium must be nonnegative")
    if target_log_premium == 0.0:
        return 0.0

    a_max = feasible_crra_max(model)
    if math.isinf(a_max):
        hi = 1.0
        while log_premium(model, hi) < target_log_premium:
            hi *= 2.0
            if hi > 1e12:
                raise CalibrationError(
                    "target premium unattainable: premium still below target at a = 1e12")
    else:
        hi = a_max

    grid = np.linspace(0.0, hi, grid_points)
    vals = [log_premium(model, float(a)) for a in grid]
    if any(v2 < v1 - 1e-13 for v1, v2 in zip(vals[:-1], vals[1:])):
        raise CalibrationError("premium not monotone in bracket")

    attainable = vals[-1]
    if attainable < target_log_premium:
        raise CalibrationError(
            f"target premium unattainable: feasible maximum log premium is "
            f"{attainable:.10g} at a = {hi:.10g}, target {target_log_premium:.10g}")

    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if log_premium(model, mid) < target_log_premium:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
