"""FFT recovery of a density, CDF, and quantiles from a characteristic function.

The grid covers [x_min, x_max) with N = 2^k nodes x_j = x_min + j dx; the
frequency grid u_k = (k - N/2) du with du = 2 pi / (N dx) then makes the
discrete sum a single FFT:

    f(x_j) ~ (du / 2 pi) (-1)^j  FFT_j[ w_k chf(u_k) e^{-i u_k x_min} ]

Endpoint-corrected trapezoid weights (interior 1, endpoints 1/2) remove the
leading-order discretization bias; a decay check on |chf| at the Nyquist
frequency guards against wrap-around aliasing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridError, InvalidParameterError
from .models import Moments

__all__ = [
    "InversionGrid", "GriddedDensity", "invert_chf",
    "log_likelihood_from_grid", "default_grid", "cdf_function", "quantile_function",
]

_PDF_FLOOR = 1e-300
_DEFAULT_N = 2 ** 14


@dataclass(frozen=True)
class InversionGrid:
    """Uniform inversion grid; n_points must be a power of two >= 2^10."""

    n_points: int
    x_min: float
    x_max: float

    def __post_init__(self):
        n = self.n_points
        if n < 2 ** 10 or (n & (n - 1)) != 0:
            raise InvalidParameterError(
                f"n_points must be a power of two >= 1024 (got {n})")
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)
                and self.x_min < self.x_max):
            raise InvalidParameterError(
                f"grid bounds must satisfy x_min < x_max (got [{self.x_min}, {self.x_max}])")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def nodes(self) -> np.ndarray:
        return self.x_min + self.spacing * np.arange(self.n_points)


@dataclass(frozen=True)
class GriddedDensity:
    """pdf/CDF values on an inversion grid, plus inversion diagnostics."""

    grid: InversionGrid
    pdf_values: np.ndarray
    cdf_values: np.ndarray
    clipped_mass: float = 0.0
    total_mass: float = field(default=1.0)

    def __post_init__(self):
        if np.any(self.pdf_values < 0.0):
            raise InvalidParameterError("pdf_values must be nonnegative")
        if abs(self.total_mass - 1.0) > 1e-4:
            raise InvalidParameterError(
                f"trapezoid mass {self.total_mass:.6g} outside [1 - 1e-4, 1 + 1e-4]")
        if np.any(np.diff(self.cdf_values) < 0.0):
            raise InvalidParameterError("cdf_values must be nondecreasing")
        last = self.cdf_values[-1]
        if not (1.0 - 1e-4 <= last <= 1.0):
            raise InvalidParameterError(
                f"cdf_values[last] = {last:.6g} outside [1 - 1e-4, 1]")


def invert_chf(chf, grid: InversionGrid) -> GriddedDensity:
    """Recover the density on ``grid`` from a characteristic-function handle.

    ``chf`` must accept an ndarray of real frequencies and return complex
    values.  Raises GridError when |chf| has not decayed below 1e-8 at the
    Nyquist frequency ("chf decay too slow") or when the recovered mass
    deviates from 1 by more than 1e-3 ("support too narrow").
    """
    n = grid.n_points
    dx = grid.spacing
    du = 2.0 * np.pi / (n * dx)
    u = (np.arange(n) - n // 2) * du

    phi = np.asarray(chf(u), dtype=complex)
    nyquist_mag = max(abs(phi[0]), abs(phi[-1]))
    if nyquist_mag > 1e-8:
        raise GridError(
            f"chf decay too slow: |chf| = {nyquist_mag:.3g} at the Nyquist "
            f"frequency {u[0]:.6g} (needs <= 1e-8; widen the grid or raise n_points)")

    weights = np.ones(n)
    weights[0] = 0.5
    weights[-1] = 0.5
    coeff = weights * phi * np.exp(-1j * u * grid.x_min)
    signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    raw = (du / (2.0 * np.pi)) * signs * np.fft.fft(coeff).real

    clipped = np.clip(raw, 0.0, None)
    clipped_mass = float(np.trapezoid(clipped - raw, dx=dx))
    total = float(np.trapezoid(clipped, dx=dx))
    if abs(1.0 - total) > 1e-4:
        raise GridError(
            f"support too narrow: recovered mass {total:.6g}; extend [x_min, x_max]")

    cdf = np.concatenate(([0.0], np.cumsum(0.5 * (clipped[1:] + clipped[:-1]) * dx)))
    cdf = np.minimum(cdf, 1.0)
    return GriddedDensity(grid=grid, pdf_values=clipped, cdf_values=cdf,
                          clipped_mass=clipped_mass, total_mass=total)


def log_likelihood_from_grid(d: GriddedDensity, data) -> float:
    """Sum of ln pdf at each datum, with ln pdf interpolated between nodes and
    the pdf floored at 1e-300.  Raises GridError listing any datum outside the
    grid.

    Interpolation acts on ln pdf (geometric interpolation of the density):
    for semi-heavy exponential tails this keeps the per-point error an order
    of magnitude below linear-density interpolation at the same resolution.
    """
    arr = np.asarray(data, dtype=float)
    outside = arr[(arr < d.grid.x_min) | (arr > d.grid.x_max)]
    if outside.size:
        shown = ", ".join(f"{v:.6g}" for v in outside[:10])
        more = "" if outside.size <= 10 else f" (+{outside.size - 10} more)"
        raise GridError(f"datum outside grid [{d.grid.x_min:.6g}, {d.grid.x_max:.6g}]: "
                        f"{shown}{more}")
    log_pdf = np.log(np.maximum(d.pdf_values, _PDF_FLOOR))
    return float(np.sum(np.interp(arr, d.grid.nodes, log_pdf)))


def default_grid(m: Moments, n_points: int = _DEFAULT_N) -> InversionGrid:
    """Grid spanning mean +- 12 std (1 + excess_kurtosis/3), n = 2^14.

    The kurtosis factor enters linearly (not as a square root): semi-heavy
    exponential tails need the extra width for the wrapped-tail aliasing to
    stay below the grid's accuracy targets and for the span to hold all but
    <= 1e-10 of the mass.
    """
    std = np.sqrt(m.variance)
    half = 12.0 * std * (1.0 + m.excess_kurtosis / 3.0)
    return InversionGrid(n_points=n_points, x_min=m.mean - half, x_max=m.mean + half)


def cdf_function(d: GriddedDensity):
    """CDF handle: linear interpolation of the gridded CDF (0 below, last value above)."""
    nodes = d.grid.nodes
    cdf = d.cdf_values

    def cdf_at(x):
        out = np.interp(np.asarray(x, dtype=float), nodes, cdf)
        return float(out) if np.ndim(x) == 0 else out

    return cdf_at


def quantile_function(d: GriddedDensity, tol: float = 1e-12):
    """Quantile handle: bisection of the interpolated CDF on the grid span."""
    cdf_at = cdf_function(d)
    lo0, hi0 = d.grid.x_min, d.grid.nodes[-1]

    def quantile_at(prob):
        p = np.asarray(prob, dtype=float)
        if np.any((p < 0.0) | (p > 1.0)):
            raise GridError("quantile argument outside [0, 1]")
        scalar = np.ndim(prob) == 0
        p = np.atleast_1d(p)
        lo = np.full_like(p, lo0)
        hi = np.full_like(p, hi0)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            below = cdf_at(mid) < p
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.max(hi - lo) < tol:
                break
        out = 0.5 * (lo + hi)
        return float(out[0]) if scalar else out

    return quantile_at
