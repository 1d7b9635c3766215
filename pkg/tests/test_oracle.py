from dataclasses import replace

import numpy as np
import pytest

from twinbeam.interferometer import ConfigurationError, MzConfig
from twinbeam.nopo import NopoParams, squeezed_variances
from twinbeam.oracle import (
    NoiseTrace, OracleError, attenuate, combine, oracle_run, qnl_calibration, rng_stream,
    shape_noise, synthesize_twin_traces, welch_estimate, white_spectrum, write_trace_csv,
)

FS = 64e6
N = 2 ** 20


def white_trace(seed, n=N, fs=FS):
    return NoiseTrace(np.random.default_rng(seed).standard_normal(n), fs, seed)


def db(x):
    return 10 * np.log10(x)


class TestNoiseTrace:
    def test_power_of_two(self):
        with pytest.raises(OracleError, match="power of two"):
            NoiseTrace(np.zeros(1000), 1e6)

    def test_finite(self):
        x = np.zeros(1024)
        x[3] = np.nan
        with pytest.raises(OracleError, match="finite"):
            NoiseTrace(x, 1e6)

    def test_csv(self, tmp_path):
        tr = white_trace(1, n=16, fs=4.0)
        write_trace_csv(tr, tmp_path / "t.csv")
        data = np.loadtxt(tmp_path / "t.csv", delimiter=",", skiprows=1)
        np.testing.assert_array_equal(data[:, 1], tr.samples)
        assert data[1, 0] == 0.25


class TestWelch:
    def test_white_calibration(self):
        est = welch_estimate(white_trace(7), 30e3)
        # Hann at 50% overlap: the window overlap correlation is 1/6, so the
        # relative variance per bin is (1 + 2 / 36) / K
        sigma = np.sqrt(1.056 / est.n_averages)
        inside = np.abs(est.variance - 1.0) <= 3 * sigma
        assert inside.mean() >= 0.99
        assert est.variance.mean() == pytest.approx(1.0, abs=3 * sigma / np.sqrt(len(inside)))

    def test_averages_and_rbw(self):
        est = welch_estimate(white_trace(0), 30e3)
        assert est.rbw == FS / 2048
        assert est.n_averages == 1023
        assert est.freqs[0] == 0.0 and est.freqs[-1] == FS / 2

    def test_rbw_too_small(self):
        with pytest.raises(OracleError, match="rbw"):
            welch_estimate(white_trace(0, n=2 ** 10), 10.0)

    def test_sinusoid_peak(self):
        n, fs = 2 ** 16, 1e6
        f0 = 123 * fs / 1024
        t = np.arange(n) / fs
        est = welch_estimate(NoiseTrace(np.sin(2 * np.pi * f0 * t), fs), fs / 1024)
        k = int(np.argmax(est.variance))
        assert est.freqs[k] == pytest.approx(f0)
        # Hann main lobe spans one bin either side, everything else is leakage
        off = np.delete(est.variance, [k - 1, k, k + 1])
        assert off.max() < 1e-6 * est.variance[k]

    def test_lorentzian_psd(self):
        b, k = 15.4e6, 0.52
        freqs = np.fft.rfftfreq(N, d=1 / FS)
        psd = 1 - k / (1 + (freqs / b) ** 2)
        trace = NoiseTrace(shape_noise(white_trace(11).samples, psd), FS)
        est = welch_estimate(trace, 250e3)
        assert est.n_averages >= 256
        for f in (1e6, 2e6, 5e6, 15.4e6, 25e6):
            sel = np.abs(est.freqs - f) <= 500e3
            target = np.mean(1 - k / (1 + (est.freqs[sel] / b) ** 2))
            assert db(est.variance[sel].mean()) == pytest.approx(db(target), abs=0.1)


class TestSynthesis:
    def test_deterministic(self):
        a = synthesize_twin_traces(NopoParams(), 0.0, 2 ** 16, FS, 5)
        b = synthesize_twin_traces(NopoParams(), 0.0, 2 ** 16, FS, 5)
        for x, y in zip(a, b):
            assert np.array_equal(x.samples, y.samples)

    def test_seeds_differ(self):
        a = synthesize_twin_traces(NopoParams(), 0.0, 2 ** 16, FS, 5)
        b = synthesize_twin_traces(NopoParams(), 0.0, 2 ** 16, FS, 6)
        assert not np.array_equal(a[0].samples, b[0].samples)

    def test_seed_independent_spectra(self):
        ests = []
        for seed in (1, 2):
            x1, _, x2, _ = synthesize_twin_traces(NopoParams(), 0.0, N, FS, seed)
            ests.append(welch_estimate(combine(x1, x2, -1), 250e3))
        sel = (ests[0].freqs > 0.5e6) & (ests[0].freqs < 10e6)
        diff = db(ests[0].variance[sel].mean()) - db(ests[1].variance[sel].mean())
        assert abs(diff) < 0.05

    def test_no_gain_gives_white(self):
        traces = synthesize_twin_traces(NopoParams(eta=0.0), 0.0, N, FS, 3)
        for tr in traces:
            assert np.var(tr.samples) == pytest.approx(1.0, abs=0.01)

    def test_x_minus_converges(self, paper):
        x1, _, x2, _ = synthesize_twin_traces(paper, 0.0, N, FS, 0)
        est = welch_estimate(combine(x1, x2, -1), 30e3)
        # vx_minus is independent of the interferometers, so a wide band
        # around 2 MHz is compared with the model averaged over the same bins
        sel = np.abs(est.freqs - 2e6) <= 1e6
        target = np.mean(squeezed_variances(paper, est.freqs[sel])[0])
        assert db(est.variance[sel].mean()) == pytest.approx(db(target), abs=0.1)
        assert db(target) == pytest.approx(db(0.489), abs=0.02)

    def test_phase_sum_with_excess(self):
        p = NopoParams(excess_phase_noise=0.051)
        _, y1, _, y2 = synthesize_twin_traces(p, 0.0, N, FS, 4)
        est = welch_estimate(combine(y1, y2, 1), 30e3)
        sel = np.abs(est.freqs - 2e6) <= 1e6
        target = np.mean(squeezed_variances(p, est.freqs[sel])[1])
        assert db(est.variance[sel].mean()) == pytest.approx(db(target), abs=0.1)

    def test_source_referred(self, paper):
        x1, _, x2, _ = synthesize_twin_traces(paper, 0.0, N, FS, 0, referred="source")
        est = welch_estimate(combine(x1, x2, -1), 250e3)
        sel = np.abs(est.freqs - 2e6) <= 1e6
        source = replace(paper, eta=1.0, zeta=1.0)
        target = np.mean(squeezed_variances(source, est.freqs[sel])[0])
        assert db(est.variance[sel].mean()) == pytest.approx(db(target), abs=0.1)

    @pytest.mark.parametrize("kw,msg", [({"n_samples": 2 ** 15}, "2\\*\\*16"),
                                        ({"n_samples": 3 * 2 ** 16}, "power of two"),
                                        ({"sample_rate": 50e6}, "4 cavity bandwidths")])
    def test_invalid(self, kw, msg):
        args = {"n_samples": 2 ** 16, "sample_rate": FS} | kw
        with pytest.raises(OracleError, match=msg):
            synthesize_twin_traces(NopoParams(), 0.0, seed=0, **args)


class TestCombineAndLoss:
    def test_self_difference_is_zero(self):
        a = white_trace(1, n=1024)
        assert np.all(combine(a, a, -1).samples == 0.0)
        np.testing.assert_allclose(combine(a, a, 1).samples, np.sqrt(2) * a.samples)

    def test_independent_unit_variance(self):
        a, b = white_trace(1), white_trace(2)
        for sign in (1, -1):
            assert np.var(combine(a, b, sign).samples) == pytest.approx(1.0, abs=0.01)

    def test_mismatch(self):
        with pytest.raises(OracleError, match="length"):
            combine(white_trace(1, n=1024), white_trace(2, n=2048), 1)
        with pytest.raises(OracleError, match="sign"):
            combine(white_trace(1, n=1024), white_trace(2, n=1024), 2)

    @pytest.mark.parametrize("t", [0.0, 0.3, 0.9, 1.0])
    def test_vacuum_maps_to_vacuum(self, t):
        x = white_trace(1).samples
        v = white_trace(2).samples
        assert np.var(attenuate(x, t, v)) == pytest.approx(1.0, abs=0.01)

    def test_squeezed_moves_toward_vacuum(self):
        x = np.sqrt(0.3) * white_trace(1).samples
        v = white_trace(2).samples
        assert np.var(attenuate(x, 0.5, v)) == pytest.approx(0.65, abs=0.01)

    def test_bad_transmittance(self):
        with pytest.raises(OracleError):
            attenuate(np.zeros(4), 1.2, np.zeros(4))


def test_white_spectrum_has_unit_variance():
    spec = white_spectrum(rng_stream(0, 0), N, 2)
    x = np.fft.irfft(spec, n=N, axis=-1)
    np.testing.assert_allclose(np.var(x, axis=-1), 1.0, atol=0.01)


def test_rng_streams_are_distinct():
    a = rng_stream(0, 0).standard_normal(4)
    assert not np.array_equal(a, rng_stream(0, 1).standard_normal(4))
    assert not np.array_equal(a, rng_stream(0, 0, record=1).standard_normal(4))
    assert np.array_equal(a, rng_stream(0, 0).standard_normal(4))


class TestOracleRun:
    def test_reference_levels(self, paper, tuned):
        res = oracle_run(paper, tuned, tuned, seed=0)
        vx, vy = squeezed_variances(paper, 2e6)
        assert res.vx_minus_db == pytest.approx(db(vx), abs=0.1)
        assert res.vy_plus_db == pytest.approx(db(vy), abs=0.1)
        assert res.qnl_db == pytest.approx(0.0, abs=0.05)

    def test_no_gain(self, tuned):
        p = NopoParams(eta=0.0, excess_phase_noise=0.051)
        res = oracle_run(p, tuned, tuned, seed=1, n_records=4)
        assert res.vx_minus_db == pytest.approx(0.0, abs=0.1)
        assert res.vy_plus_db == pytest.approx(db(1.051), abs=0.1)
        assert res.qnl_db == pytest.approx(0.0, abs=0.05)

    def test_measured_phase_level(self, tuned):
        res = oracle_run(NopoParams(excess_phase_noise=0.051), tuned, tuned, seed=2)
        assert res.vy_plus_db == pytest.approx(-1.50, abs=0.1)

    def test_deterministic(self, paper, tuned):
        kw = dict(n_samples=2 ** 16, n_records=1)
        assert oracle_run(paper, tuned, tuned, seed=3, **kw) == \
            oracle_run(paper, tuned, tuned, seed=3, **kw)

    def test_off_point_rejected(self, paper):
        with pytest.raises(ConfigurationError, match="theta"):
            oracle_run(paper, MzConfig(), MzConfig(), f=3e6, n_samples=2 ** 16)


def test_qnl_calibration(paper, tuned):
    readings, spectra = qnl_calibration(paper, tuned, tuned, seed=0, n_records=4)
    assert len(readings) == 4
    assert set(spectra) == {(1, "phase"), (2, "phase"), (1, "amplitude"), (2, "amplitude")}
    for r in readings:
        assert r.expected == 1.0
        est = spectra[(r.interferometer, r.mode)]
        if r.mode == "amplitude":
            assert abs(r.error_db) <= 0.05, r
        else:
            # narrow-band read: Hann bins overlap, so count half the bins in
            # the span as independent
            n_bins = 300e3 / est.rbw / 2
            sigma = np.sqrt(1.056 / est.n_averages / n_bins)
            assert abs(r.measured - 1.0) <= 3 * sigma, r


# (eta, zeta, xi, pump mW, bandwidth Hz, excess phase noise)
GRID = [
    (0.90, 0.81, 0.88, 195.0, 15.4e6, 0.0),
    (0.90, 0.81, 0.88, 195.0, 15.4e6, 0.051),
    (1.00, 1.00, 1.00, 195.0, 15.4e6, 0.0),
    (0.50, 0.81, 0.88, 195.0, 15.4e6, 0.0),
    (0.90, 0.60, 0.88, 195.0, 15.4e6, 0.0),
    (0.90, 0.81, 0.50, 195.0, 15.4e6, 0.0),
    (0.90, 0.81, 0.88, 140.0, 15.4e6, 0.0),
    (0.90, 0.81, 0.88, 520.0, 15.4e6, 0.0),
    (0.90, 0.81, 0.88, 195.0, 8.0e6, 0.0),
    (0.95, 0.95, 0.95, 300.0, 12.0e6, 0.02),
    (0.20, 0.50, 0.30, 195.0, 15.4e6, 0.1),
]


@pytest.mark.parametrize("point", GRID, ids=[f"grid{i}" for i in range(len(GRID))])
def test_oracle_grid(point, tuned):
    eta, zeta, xi, pump, b, eps = point
    p = NopoParams(eta=eta, zeta=zeta, xi=xi, pump_power=pump, bandwidth=b,
                   excess_phase_noise=eps)
    vx, vy = squeezed_variances(p, 2e6)
    for seed in (0, 1, 2):
        res = oracle_run(p, tuned, tuned, seed=seed)
        assert res.vx_minus_db == pytest.approx(db(vx), abs=0.1), (seed, res)
        assert res.vy_plus_db == pytest.approx(db(vy), abs=0.1), (seed, res)
