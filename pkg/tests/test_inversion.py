"""FFT density inversion against closed-form and sampler oracles."""

import math

import numpy as np
import pytest
from scipy import integrate

from levypremium import (
    GridError, InvalidParameterError, InversionGrid, Moments, cdf_function,
    default_grid, invert_chf, log_likelihood_from_grid, ncig_chf, ncig_moments,
    ncig_sample, nig_chf, nig_log_pdf, nig_moments, nig_pdf, quantile_function,
)
from levypremium.cli import REFERENCE_MODELS

REF_NIG = REFERENCE_MODELS["nig"]
REF_NCIG = REFERENCE_MODELS["ncig"]


def normal_chf(u):
    return np.exp(-0.5 * np.asarray(u, dtype=complex) ** 2)


def normal_pdf(x):
    return np.exp(-0.5 * x ** 2) / math.sqrt(2.0 * math.pi)


class TestInvertChf:
    def test_standard_normal_sup_norm(self):
        grid = InversionGrid(n_points=2 ** 14, x_min=-8.0, x_max=8.0)
        d = invert_chf(normal_chf, grid)
        err = np.abs(d.pdf_values - normal_pdf(grid.nodes))
        assert err.max() < 1e-8
        assert abs(d.total_mass - 1.0) < 1e-6

    def test_nig_reference_sup_norm(self):
        grid = default_grid(nig_moments(REF_NIG))
        d = invert_chf(lambda u: nig_chf(REF_NIG, u), grid)
        err = np.abs(d.pdf_values - nig_pdf(REF_NIG, grid.nodes))
        assert err.max() < 1e-6

    def test_ncig_reference_mass_and_ks(self):
        grid = default_grid(ncig_moments(REF_NCIG))
        d = invert_chf(lambda u: ncig_chf(REF_NCIG, u), grid)
        assert abs(d.total_mass - 1.0) <= 1e-4
        draws = np.sort(ncig_sample(REF_NCIG, 1_000_000, seed=17))
        cdf = cdf_function(d)(draws)
        n = draws.size
        i = np.arange(1, n + 1)
        ks = max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n))
        assert ks < 1.628 / math.sqrt(n)   # 1% asymptotic critical value

    @pytest.mark.parametrize("bounds", [(-2.0, 2.0), (-8.0, 0.0)])
    def test_support_too_narrow(self, bounds):
        grid = InversionGrid(n_points=2 ** 10, x_min=bounds[0], x_max=bounds[1])
        with pytest.raises(GridError, match="support too narrow"):
            invert_chf(normal_chf, grid)

    def test_chf_decay_too_slow(self):
        grid = InversionGrid(n_points=2 ** 10, x_min=-800.0, x_max=800.0)
        with pytest.raises(GridError, match="decay too slow"):
            invert_chf(normal_chf, grid)

    def test_cdf_monotone_and_capped(self):
        grid = InversionGrid(n_points=2 ** 12, x_min=-10.0, x_max=10.0)
        d = invert_chf(normal_chf, grid)
        assert np.all(np.diff(d.cdf_values) >= 0.0)
        assert d.cdf_values[-1] <= 1.0
        assert d.cdf_values[-1] >= 1.0 - 1e-4
        assert d.clipped_mass >= 0.0

    def test_refinement_error_non_increasing(self):
        # NIG reference parameters: chf truncation dominates at the coarsest
        # grid and falls to the roundoff floor as n doubles.
        m = nig_moments(REF_NIG)
        errors = []
        for k in (11, 12, 13, 14):
            grid = default_grid(m, n_points=2 ** k)
            d = invert_chf(lambda u: nig_chf(REF_NIG, u), grid)
            errors.append(np.abs(d.pdf_values - nig_pdf(REF_NIG, grid.nodes)).max())
        floor = 1e-10
        for coarse, fine in zip(errors[:-1], errors[1:]):
            assert fine <= max(coarse, floor)
        assert errors[-1] < 1e-6


class TestLogLikelihoodFromGrid:
    def test_exact_at_grid_nodes(self):
        grid = InversionGrid(n_points=2 ** 12, x_min=-8.0, x_max=8.0)
        d = invert_chf(normal_chf, grid)
        nodes = grid.nodes[100:200]
        expected = float(np.sum(np.log(d.pdf_values[100:200])))
        assert log_likelihood_from_grid(d, nodes) == pytest.approx(expected, rel=1e-14)

    def test_normal_per_point_agreement(self):
        grid = InversionGrid(n_points=2 ** 14, x_min=-6.0, x_max=6.0)
        d = invert_chf(normal_chf, grid)
        rng = np.random.default_rng(3)
        data = rng.normal(size=1000)
        for x in data[:50]:
            got = log_likelihood_from_grid(d, [x])
            assert got == pytest.approx(math.log(normal_pdf(x)), abs=1e-6)
        total = log_likelihood_from_grid(d, data)
        assert total == pytest.approx(float(np.sum(np.log(normal_pdf(data)))),
                                      abs=1e-6 * data.size)

    def test_nig_per_point_agreement(self):
        # The reference NIG has a quasi-cusp at the mode (log-curvature
        # ~ 1/delta^2), so the 1e-5 per-point target needs the finer grid.
        grid = default_grid(nig_moments(REF_NIG), n_points=2 ** 16)
        d = invert_chf(lambda u: nig_chf(REF_NIG, u), grid)
        from levypremium import nig_sample
        data = nig_sample(REF_NIG, 1000, seed=5)
        interp = np.array([log_likelihood_from_grid(d, [x]) for x in data])
        exact = nig_log_pdf(REF_NIG, data)
        assert np.max(np.abs(interp - exact)) <= 1e-5

    def test_datum_outside_grid(self):
        grid = InversionGrid(n_points=2 ** 10, x_min=-8.0, x_max=8.0)
        d = invert_chf(normal_chf, grid)
        with pytest.raises(GridError, match="datum outside grid.*9.5"):
            log_likelihood_from_grid(d, [0.0, 9.5])


class TestDefaultGrid:
    def test_normal_summary_spans_12_sigma(self):
        g = default_grid(Moments(mean=0.0, variance=1.0, skewness=0.0,
                                 excess_kurtosis=0.0))
        assert g.x_min <= -12.0 and g.x_max >= 12.0
        assert g.n_points == 2 ** 14

    def test_covers_nig_reference_mass(self):
        g = default_grid(nig_moments(REF_NIG))
        mass, _ = integrate.quad(lambda x: nig_pdf(REF_NIG, x), g.x_min, g.x_max,
                                 points=[nig_moments(REF_NIG).mean], limit=400)
        assert mass >= 1.0 - 1e-10

    def test_grid_validation(self):
        with pytest.raises(InvalidParameterError):
            InversionGrid(n_points=3000, x_min=-1.0, x_max=1.0)
        with pytest.raises(InvalidParameterError):
            InversionGrid(n_points=2 ** 10, x_min=1.0, x_max=-1.0)
        with pytest.raises(InvalidParameterError):
            InversionGrid(n_points=2 ** 8, x_min=-1.0, x_max=1.0)


class TestCdfQuantile:
    def test_roundtrip(self):
        grid = InversionGrid(n_points=2 ** 13, x_min=-10.0, x_max=10.0)
        d = invert_chf(normal_chf, grid)
        quantile = quantile_function(d)
        cdf = cdf_function(d)
        for p in (0.05, 0.25, 0.5, 0.9, 0.99):
            x = quantile(p)
            assert cdf(x) == pytest.approx(p, abs=1e-6)

    def test_quantile_domain(self):
        grid = InversionGrid(n_points=2 ** 10, x_min=-10.0, x_max=10.0)
        d = invert_chf(normal_chf, grid)
        with pytest.raises(GridError):
            quantile_function(d)(1.5)
