import math

import mpmath
import numpy as np
import pytest

import quadbounds.evt as evt
from quadbounds.edgeworth import EdgeworthDist, edgeworth_cdf, edgeworth_pdf, hypothesis_distribution
from quadbounds.evt import EvtParams, QuantileError, alpha_edgeworth, alpha_evt, evt_params, inverse_cdf
from quadbounds.tcd import alpha_grid, analytic_grid, empirical_alpha, sample_window_sums

from conftest import sam_scenario
from test_edgeworth import acceptance_dists

STD = EdgeworthDist.gaussian()


@pytest.fixture(scope="module")
def z0_m6():
    return sample_window_sums(sam_scenario(m=6), 0, 10**6, seed=606)


class TestInverseCdf:
    def test_median_of_standard_normal(self):
        assert abs(inverse_cdf(STD, 0.5)) <= 1e-10

    def test_975_quantile(self):
        z = inverse_cdf(STD, 0.975)
        assert z == pytest.approx(1.959963984540054, abs=1e-5)
        assert edgeworth_cdf(STD, z) == pytest.approx(0.975, abs=1e-12)

    @pytest.mark.parametrize("q", [1e-4, 1e-2, 0.5, 1 - 1e-2, 1 - 1e-4])
    @pytest.mark.parametrize("d", list(acceptance_dists()))
    def test_round_trip(self, d, q):
        assert abs(edgeworth_cdf(d, inverse_cdf(d, q)) - q) <= 1e-10

    @pytest.mark.parametrize("q", [0.0, 1.0, -0.1, 1.5])
    def test_level_out_of_range(self, q):
        with pytest.raises(ValueError):
            inverse_cdf(STD, q)

    def test_bracket_failure_names_level(self, monkeypatch):
        monkeypatch.setattr(evt, "edgeworth_sf", lambda d, z: 0.3)
        with pytest.raises(QuantileError, match="q=0.9") as info:
            inverse_cdf(STD, 0.9)
        assert info.value.q == 0.9

    def test_discontinuous_cdf_reported(self, monkeypatch):
        monkeypatch.setattr(evt, "edgeworth_cdf", lambda d, z: 0.0 if z < 0.25 else 0.4)
        with pytest.raises(QuantileError, match="not monotone"):
            inverse_cdf(STD, 0.2)


class TestEvtParams:
    def test_median_window(self):
        p = evt_params(STD, 2)
        assert abs(p.delta) <= 1e-10
        assert p.gamma == pytest.approx(0.7978845608028654, rel=1e-10)

    def test_location_grows_with_window(self):
        d0 = hypothesis_distribution(sam_scenario(m=6), 6, 0)
        assert evt_params(d0, 900).delta > evt_params(d0, 60).delta

    def test_rejects_small_window(self):
        with pytest.raises(ValueError):
            evt_params(STD, 1)

    def test_rejects_nonpositive_rate(self, monkeypatch):
        monkeypatch.setattr(evt, "edgeworth_pdf", lambda d, z: 0.0)
        with pytest.raises(ValueError, match="rate"):
            evt_params(STD, 10)

    def test_params_validation(self):
        with pytest.raises(ValueError):
            EvtParams(0.0, 0.0, 10)

    @pytest.mark.slow
    def test_location_matches_sampled_quantile(self, z0_m6):
        s = sam_scenario(m=6)
        d0 = s.dist(0)
        delta = evt_params(d0, 60).delta
        grid = analytic_grid(s.replace(m_alpha=60), "alpha", 400)
        step = grid[1] - grid[0]
        assert abs(delta - np.quantile(z0_m6, 1 - 1 / 60)) <= 2 * step


class TestAlphaEvt:
    def test_value_at_location(self):
        d0 = hypothesis_distribution(sam_scenario(m=6), 6, 0)
        p = evt_params(d0, 60)
        assert alpha_evt(d0, 60, p.delta) == -math.expm1(-1.0)
        assert alpha_evt(STD, 2, evt_params(STD, 2).delta) == pytest.approx(0.6321205588285577, abs=1e-15)

    def test_limits(self):
        assert alpha_evt(STD, 50, 1e6) == 0.0
        assert alpha_evt(STD, 50, -1e6) == 1.0

    @pytest.mark.parametrize("d", list(acceptance_dists()))
    def test_non_increasing(self, d):
        h = np.linspace(d.mean - 4 * d.sigma, d.mean + 15 * d.sigma, 1000)
        for m_alpha in (30, 60, 900):
            assert np.all(np.diff(alpha_evt(d, m_alpha, h)) <= 0)
            assert np.all(np.diff(alpha_edgeworth(d, m_alpha, h)) <= 0)

    def test_precomputed_params(self):
        p = evt_params(STD, 30)
        h = np.linspace(0, 5, 11)
        np.testing.assert_array_equal(alpha_evt(STD, 30, h, params=p), alpha_evt(STD, 30, h))

    @pytest.mark.slow
    def test_stays_above_empirical_bound(self, z0_m6):
        d0 = sam_scenario(m=6).dist(0)
        h = alpha_grid(z0_m6, 400)
        emp, se = empirical_alpha(z0_m6, h, 60)
        assert np.all(alpha_evt(d0, 60, h) >= emp - 3 * se)


class TestAlphaEdgeworth:
    def test_single_window(self):
        d0 = hypothesis_distribution(sam_scenario(m=6), 6, 0)
        h = np.linspace(d0.mean - 3 * d0.sigma, d0.mean + 6 * d0.sigma, 50)
        np.testing.assert_allclose(alpha_edgeworth(d0, 1, h), 1 - edgeworth_cdf(d0, h), atol=1e-15)

    def test_zero_at_clamp(self):
        d = EdgeworthDist(0.0, 1.0, {3: 0.5, 4: 0.2, 6: 2.5})
        assert edgeworth_cdf(d, 40.0) == 1.0
        assert alpha_edgeworth(d, 900, 40.0) == 0.0

    @pytest.mark.parametrize("z", [6.0, 7.0, 7.5])
    def test_precision_for_tiny_alpha(self, z):
        mpmath.mp.dps = 50
        sf = mpmath.ncdf(-z)
        exact = float(1 - (1 - sf) ** 900)
        assert alpha_edgeworth(STD, 900, z) == pytest.approx(exact, rel=1e-12)

    def test_rejects_window(self):
        with pytest.raises(ValueError):
            alpha_edgeworth(STD, 0, 0.0)

    @pytest.mark.slow
    def test_dips_below_empirical_bound_for_long_window(self, z0_m6):
        d0 = sam_scenario(m=6).dist(0)
        h = alpha_grid(z0_m6, 400)
        emp, se = empirical_alpha(z0_m6, h, 900)
        assert np.any(alpha_edgeworth(d0, 900, h) < emp - 3 * se)
