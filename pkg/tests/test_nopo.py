import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twinbeam.nopo import (
    NopoParams, ParameterError, detected_spectra, phasematch_edges, phasematch_factor,
    pump_parameter, squeezed_variances, twin_beam_covariance,
)
from twinbeam.quadrature import (
    combined_variances, db_to_variance, duan_criterion, variance_to_db,
)


def hand_levels(eta=0.90, zeta=0.81, xi=0.88, p=195.0, p0=130.0, b=15.4e6, f=2e6):
    # plain-float evaluation of the correlation formulas
    k = eta * zeta * zeta * xi
    x2 = (f / b) ** 2
    return 1.0 - k / (1.0 + x2), 1.0 - k / (p / p0 + x2)


class TestPumpParameter:
    @pytest.mark.parametrize("p,p0,sigma", [(130, 130, 1.0), (520, 130, 2.0),
                                            (195, 130, 1.224744871391589)])
    def test_values(self, p, p0, sigma):
        # NopoParams insists on sigma > 1, so nudge the threshold case just above
        q = NopoParams(pump_power=p * 1.0001, threshold_power=p0)
        assert pump_parameter(q) == pytest.approx(sigma, rel=1e-4)

    def test_four_times_threshold_is_exact(self):
        assert pump_parameter(NopoParams(pump_power=520.0, threshold_power=130.0)) == 2.0

    def test_reference_rounds_to_1_22(self, paper):
        assert round(paper.sigma, 2) == 1.22

    def test_below_threshold_rejected(self):
        with pytest.raises(ParameterError, match="sigma > 1"):
            NopoParams(pump_power=100.0)

    def test_nonpositive_threshold_rejected(self):
        with pytest.raises(ParameterError, match="threshold_power"):
            NopoParams(threshold_power=0.0)


@pytest.mark.parametrize("field,value", [
    ("eta", 1.1), ("zeta", -0.1), ("xi", 2.0), ("bandwidth", 0.0), ("qnl", -1.0),
    ("linewidth", 0.0), ("excess_phase_noise", -0.01), ("band_low", 2e12),
    ("antisqueeze_excess", 0.5),
])
def test_invalid_params_name_the_field(field, value):
    with pytest.raises(ParameterError, match=field):
        NopoParams(**{field: value})


class TestSqueezedVariances:
    def test_reference_levels(self, paper):
        vx, vy = squeezed_variances(paper, 2e6)
        hx, hy = hand_levels()
        assert vx == pytest.approx(hx, abs=1e-15)
        assert vy == pytest.approx(hy, abs=1e-15)
        assert vx == pytest.approx(0.48898766216619644, abs=1e-15)
        assert vy == pytest.approx(0.6574311019291709, abs=1e-15)
        assert variance_to_db(vx) == pytest.approx(-3.11, abs=0.02)
        assert variance_to_db(vy) == pytest.approx(-1.82, abs=0.02)

    def test_excess_phase_noise(self):
        vx, vy = squeezed_variances(NopoParams(excess_phase_noise=0.051), 2e6)
        assert vy == pytest.approx(0.6574311019291709 + 0.051, abs=1e-15)
        assert variance_to_db(vy) == pytest.approx(-1.50, abs=0.02)
        assert vx == pytest.approx(0.48898766216619644)

    def test_no_gain_no_correlation(self):
        vx, vy = squeezed_variances(NopoParams(eta=0.0, excess_phase_noise=0.05), 2e6)
        assert (vx, vy) == (1.0, 1.05)

    def test_far_outside_bandwidth(self, paper):
        vx, vy = squeezed_variances(paper, 1e12)
        assert vx == pytest.approx(1.0, abs=1e-8)
        assert vy == pytest.approx(1.0, abs=1e-8)

    def test_qnl_scaling(self):
        vx, vy = squeezed_variances(NopoParams(qnl=3.0), 2e6)
        assert vx == pytest.approx(3 * 0.48898766216619644)

    def test_vectorized(self, paper):
        f = np.array([0.0, 2e6, 15.4e6])
        vx, _ = squeezed_variances(paper, f)
        k = 0.9 * 0.81 ** 2 * 0.88
        np.testing.assert_allclose(vx, [1 - k, 0.48898766216619644, 1 - k / 2])

    def test_negative_frequency_rejected(self, paper):
        with pytest.raises(ParameterError):
            squeezed_variances(paper, -1.0)


def test_monotone_in_efficiencies():
    grid = np.linspace(0.0, 1.0, 6)
    for name in ("eta", "zeta", "xi"):
        for others in itertools.product(grid, repeat=2):
            kw = dict(zip([n for n in ("eta", "zeta", "xi") if n != name], others))
            vals = [squeezed_variances(NopoParams(**kw, **{name: g}), 2e6) for g in grid]
            vx, vy = np.array(vals).T
            assert np.all(np.diff(vx) <= 1e-15)
            assert np.all(np.diff(vy) <= 1e-15)


def test_monotone_in_sigma():
    powers = np.linspace(131.0, 2000.0, 40)
    vy = [squeezed_variances(NopoParams(pump_power=p), 2e6)[1] for p in powers]
    assert np.all(np.diff(vy) >= 0)


@given(st.floats(-40.0, 40.0), st.floats(0.1, 10.0))
def test_db_round_trip_with_qnl(x, s0):
    assert float(variance_to_db(db_to_variance(x, s0), s0)) == pytest.approx(x, abs=1e-12)


class TestPhaseMatching:
    def test_centre_and_edges(self, paper):
        assert phasematch_factor(0.0, paper) == 1.0
        assert phasematch_factor(paper.band_high, paper) == 1.0
        assert phasematch_factor(paper.band_low, paper) == 1.0

    def test_far_outside(self, paper):
        assert phasematch_factor(paper.band_low - 10 * paper.band_softness, paper) < 0.01
        assert phasematch_factor(paper.band_high + 10 * paper.band_softness, paper) < 0.01

    def test_half_softness_is_one_half(self, paper):
        # raised cosine: 0.5 * (1 + cos(pi / 2))
        d = paper.band_high + paper.band_softness / 2
        assert phasematch_factor(d, paper) == pytest.approx(0.5, abs=1e-12)

    def test_monotone_each_side(self, paper):
        hi = np.linspace(paper.band_high, paper.band_high + 2 * paper.band_softness, 200)
        lo = np.linspace(paper.band_low, paper.band_low - 2 * paper.band_softness, 200)
        assert np.all(np.diff(phasematch_factor(hi, paper)) <= 0)
        assert np.all(np.diff(phasematch_factor(lo, paper)) <= 0)

    def test_edges_inverse(self, paper):
        lo, hi = phasematch_edges(paper, 0.25)
        assert phasematch_factor(lo, paper) == pytest.approx(0.25)
        assert phasematch_factor(hi, paper) == pytest.approx(0.25)


class TestCovariance:
    def test_reference_duan(self, paper):
        r = duan_criterion(combined_variances(twin_beam_covariance(paper, 2e6)))
        assert r.value_corr == pytest.approx(0.48898766216619644 + 0.6574311019291709,
                                             abs=1e-12)
        assert r.value_corr == pytest.approx(1.146, abs=5e-4)

    def test_minimum_uncertainty_completion(self, paper):
        cv = combined_variances(twin_beam_covariance(paper, 2e6))
        assert cv.vx_plus * cv.vy_plus == pytest.approx(1.0)
        assert cv.vy_minus * cv.vx_minus == pytest.approx(1.0)

    def test_far_detuned_is_vacuum_plus_excess(self):
        p = NopoParams(excess_phase_noise=0.051)
        cv = combined_variances(twin_beam_covariance(p, 2e6, 5e12))
        assert cv == pytest.approx((1.0, 1.0, 1.051, 1.0), abs=1e-12)

    def test_excess_matches_measured_phase_level(self):
        p = NopoParams(excess_phase_noise=0.051)
        cv = combined_variances(twin_beam_covariance(p, 2e6))
        assert cv.vy_plus == pytest.approx(0.708, abs=1e-3)
        assert duan_criterion(cv).value_corr == pytest.approx(1.198, abs=1e-3)

    def test_antisqueeze_excess(self):
        base = detected_spectra(NopoParams(), 2e6)
        more = detected_spectra(NopoParams(antisqueeze_excess=1.5), 2e6)
        assert more[0] == pytest.approx(1.5 * base[0])
        assert more[1] == base[1]

    def test_flat_inside_band(self, paper):
        ds = np.linspace(paper.band_low, paper.band_high, 101)
        vals = {duan_criterion(combined_variances(twin_beam_covariance(paper, 2e6, d)))
                .value_corr for d in ds}
        assert len(vals) == 1

    def test_physical_everywhere(self, paper):
        for f in (0.0, 2e6, 1e8):
            for d in np.linspace(-500e9, 1.2e12, 50):
                assert twin_beam_covariance(paper, f, d).symplectic_eigenvalues()[0] >= 1 - 1e-9

    def test_analysis_frequency_recorded(self, paper):
        assert twin_beam_covariance(paper, 3e6).analysis_frequency == 3e6


def test_reference_db_figures():
    hx, hy = hand_levels()
    assert 10 * math.log10(hx) == pytest.approx(-3.1070, abs=1e-4)
    assert 10 * math.log10(hy) == pytest.approx(-1.8215, abs=1e-4)
