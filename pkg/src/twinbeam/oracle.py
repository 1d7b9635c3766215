"""
Monte Carlo reference for the analytic correlation spectra.

Stationary Gaussian quadrature noise is synthesized in the time domain with
the model spectra, attenuated, sent through time-domain interferometers,
combined on simulated power combiners and read out with an averaged
periodogram, the way a spectrum analyzer would.

Random numbers come from numpy's PCG64 generator. Every named sub-stream is
derived from a single integer seed with ``SeedSequence(seed, spawn_key=(k,))``
so runs are reproducible bit for bit.
"""

import csv
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy import signal

from .interferometer import check_operating_point
from .nopo import detected_spectra

_SOURCE, _LOSS, _PHASE_NOISE, _MZ_PHASE, _MZ_AMPLITUDE = range(5)


class OracleError(ValueError):
    """Bad sampling or shape parameters for a time-domain run."""


@dataclass(frozen=True)
class NoiseTrace:
    """Real-valued noise samples in QNL-normalized quadrature units."""

    samples: np.ndarray
    sample_rate: float
    seed: int = None

    def __post_init__(self):
        x = np.array(self.samples, dtype=float)
        if x.ndim != 1:
            raise OracleError("samples must be one-dimensional")
        if not np.all(np.isfinite(x)):
            raise OracleError("samples must be finite")
        n = len(x)
        if n < 2 or n & (n - 1):
            raise OracleError(f"trace length must be a power of two, got {n}")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    def __len__(self):
        return len(self.samples)

    def scaled(self, k):
        return NoiseTrace(self.samples * k, self.sample_rate, self.seed)


@dataclass(frozen=True)
class SpectrumEstimate:
    """Noise power per bin in QNL units (unit white noise reads 1.0)."""

    freqs: np.ndarray
    variance: np.ndarray
    rbw: float
    n_averages: int

    @property
    def variance_db(self):
        return 10.0 * np.log10(np.maximum(self.variance, 1e-300))

    def band_mean(self, f_lo, f_hi):
        """Mean reading over bins with ``f_lo <= f <= f_hi``."""
        sel = (self.freqs >= f_lo) & (self.freqs <= f_hi)
        if not np.any(sel):
            raise OracleError(f"no bins in [{f_lo:.6g}, {f_hi:.6g}] Hz")
        return float(self.variance[sel].mean())

    def at(self, f):
        return float(self.variance[np.argmin(np.abs(self.freqs - f))])

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["freq_hz", "variance", "variance_db"])
            for f, v, db in zip(self.freqs, self.variance, self.variance_db):
                w.writerow([repr(float(f)), repr(float(v)), repr(float(db))])


def write_trace_csv(trace, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["time_s", "value"])
        for k, x in enumerate(trace.samples):
            w.writerow([repr(k / trace.sample_rate), repr(float(x))])


def rng_stream(seed, key, record=0):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(key, record)))


def _check_length(n_samples):
    if n_samples < 2 or n_samples & (n_samples - 1):
        raise OracleError(f"n_samples must be a power of two, got {n_samples}")


def white_spectrum(rng, n_samples, count=1):
    """
    ``rfft`` of ``count`` independent unit-variance white Gaussian series.

    Drawn directly in the frequency domain: interior bins are circular
    complex Gaussian with ``E|X|**2 = n``, DC and Nyquist are real.
    """
    m = n_samples // 2 + 1
    z = rng.standard_normal((count, 2, m)) * np.sqrt(n_samples / 2.0)
    spec = z[:, 0] + 1j * z[:, 1]
    spec[:, 0] = z[:, 0, 0] * np.sqrt(2.0)
    spec[:, -1] = z[:, 0, -1] * np.sqrt(2.0)
    return spec


def shape_noise(white, psd):
    """Color white noise by multiplying its spectrum with ``sqrt(psd)``.

    ``psd`` is sampled on ``rfftfreq(len(white))`` in units of the white level.
    """
    spec = np.fft.rfft(white) * np.sqrt(psd)
    return np.fft.irfft(spec, n=len(white))


def _check_synthesis(p, n_samples, sample_rate, referred):
    _check_length(n_samples)
    if n_samples < 2 ** 16:
        raise OracleError(f"n_samples must be at least 2**16, got {n_samples}")
    if not sample_rate > 4.0 * p.bandwidth:
        raise OracleError(
            f"sample_rate {sample_rate:.6g} Hz must exceed 4 cavity bandwidths "
            f"({4.0 * p.bandwidth:.6g} Hz)")
    if referred not in ("detector", "source"):
        raise OracleError(f"referred must be 'detector' or 'source', got {referred!r}")


def twin_spectra(p, d, n_samples, sample_rate, seed, referred="detector", record=0):
    """Frequency-domain realization behind ``synthesize_twin_traces``.

    Returns ``rfft`` arrays of ``(x1, y1, x2, y2)``.
    """
    _check_synthesis(p, n_samples, sample_rate, referred)
    q = replace(p, excess_phase_noise=0.0)
    if referred == "source":
        q = replace(q, eta=1.0, zeta=1.0)
    freqs = np.fft.rfftfreq(n_samples, d=1.0 / sample_rate)
    # AC-coupled: no DC fluctuation, where perfect squeezing would make the
    # anti-squeezed partner infinite
    psd = np.zeros((4, len(freqs)))
    psd[:, 1:] = detected_spectra(q, freqs[1:], d)

    white = white_spectrum(rng_stream(seed, _SOURCE, record), n_samples, 4)
    xu, xv, yu, yv = (w * np.sqrt(s) for w, s in zip(white, psd))
    k = 1.0 / np.sqrt(2.0)
    x1, x2 = k * (xu + xv), k * (xu - xv)
    y1, y2 = k * (yu + yv), k * (yu - yv)
    if referred == "detector":
        y1, y2 = add_phase_noise(y1, y2, p.excess_phase_noise / p.qnl, seed, record)
    return x1, y1, x2, y2


def synthesize_twin_traces(p, d, n_samples, sample_rate, seed, referred="detector"):
    """
    Time series of the four twin-beam quadratures ``(x1, y1, x2, y2)``.

    The normal modes ``u = (1 + 2)/sqrt(2)`` and ``v = (1 - 2)/sqrt(2)`` are
    synthesized independently by shaping white Gaussian noise with the
    square root of the model spectra, then rotated back to the beams.
    Excess phase noise enters as common-mode noise on ``y1`` and ``y2``.

    Parameters
    ----------
    p : NopoParams
    d : float
        Detuning in Hz.
    n_samples : int
        Power of two, at least ``2**16``.
    sample_rate : float
        Hz; must exceed four cavity bandwidths.
    seed : int
    referred : {"detector", "source"}
        ``"detector"`` gives the spectra seen after all losses (including the
        excess phase noise). ``"source"`` gives the NOPO output before the
        detection and interferometer losses, without excess phase noise.

    Returns
    -------
    tuple of NoiseTrace
    """
    specs = twin_spectra(p, d, n_samples, sample_rate, seed, referred)
    return tuple(NoiseTrace(np.fft.irfft(x, n=n_samples), sample_rate, seed)
                 for x in specs)


def add_phase_noise(y1, y2, excess, seed, record=0):
    """Common-mode white phase noise raising the phase-sum variance by ``excess``.

    Operates on ``rfft`` arrays.
    """
    if excess == 0:
        return y1, y2
    n = 2 * (len(y1) - 1)
    m = np.sqrt(excess / 2.0) * white_spectrum(rng_stream(seed, _PHASE_NOISE, record), n)[0]
    return y1 + m, y2 + m


def combine(trace_a, trace_b, sign):
    """Power-combiner output ``(a +/- b) / sqrt(2)``."""
    if sign not in (1, -1):
        raise OracleError(f"sign must be +1 or -1, got {sign!r}")
    if len(trace_a) != len(trace_b) or trace_a.sample_rate != trace_b.sample_rate:
        raise OracleError("traces differ in length or sample rate")
    out = (trace_a.samples + sign * trace_b.samples) / np.sqrt(2.0)
    return NoiseTrace(out, trace_a.sample_rate, trace_a.seed)


def attenuate(x, t, vacuum):
    """Transmit a quadrature with efficiency ``t``, filling in vacuum noise."""
    if not 0.0 <= t <= 1.0:
        raise OracleError(f"transmittance must lie in [0, 1], got {t}")
    return np.sqrt(t) * x + np.sqrt(1.0 - t) * vacuum


def welch_estimate(trace, rbw):
    """
    Averaged modified periodogram of a trace.

    Hann-windowed segments of ``sample_rate / rbw`` samples (rounded to a
    power of two), 50% overlap, scaled so that unit-variance white noise
    reads 1.0 in every bin including DC and Nyquist.
    """
    n = len(trace)
    fs = trace.sample_rate
    if not rbw >= 2.0 * fs / n:
        raise OracleError(
            f"rbw {rbw:.6g} Hz is below the minimum {2.0 * fs / n:.6g} Hz for "
            f"{n} samples at {fs:.6g} Hz")
    nperseg = int(2 ** round(np.log2(fs / rbw)))
    nperseg = min(max(nperseg, 8), n // 2)
    freqs, psd = signal.welch(trace.samples, fs=fs, window="hann", nperseg=nperseg,
                              noverlap=nperseg // 2, detrend=False,
                              scaling="density", return_onesided=True)
    var = psd * fs / 2.0
    var[0] *= 2.0
    var[-1] *= 2.0
    n_avg = 1 + (n - nperseg) // (nperseg // 2)
    return SpectrumEstimate(freqs, var, fs / nperseg, n_avg)


def fractional_delay(x, tau, sample_rate):
    """Circularly delay a real trace by ``tau`` seconds (any fraction of a sample)."""
    freqs = np.fft.rfftfreq(len(x), d=1.0 / sample_rate)
    return np.fft.irfft(np.fft.rfft(x) * np.exp(-2j * np.pi * freqs * tau), n=len(x))


def interferometer_photocurrents(cfg, xa, ya, xv, yv, sample_rate):
    """
    Sum and difference photocurrent fluctuations of one interferometer.

    Takes time series of the input-mode and vacuum-port quadratures and
    returns the two photocurrent time series.
    """
    n = len(xa)
    freqs = np.fft.rfftfreq(n, d=1.0 / sample_rate)
    specs = np.fft.rfft(np.stack([xa, ya, xv, yv]), axis=-1)
    out = propagate_interferometer(cfg, *specs, freqs)
    return tuple(np.fft.irfft(o, n=n) for o in out)


def propagate_interferometer(cfg, xa, ya, xv, yv, freqs):
    """
    Element-by-element propagation of quadrature spectra through one
    interferometer: input splitter (or none), carrier phase shift and delay
    in the long arm, output splitter, then linearized photodetection
    ``dn = Re(beta) dX + Im(beta) dY`` on each output.

    Returns the ``rfft`` arrays of the (sum, difference) photocurrents.
    """
    alpha = cfg.classical_amplitude
    r1 = cfg.splitter_reflectivity if cfg.input_splitter_present else 0.0
    r2 = cfg.splitter_reflectivity
    t1, t2 = 1.0 - r1, 1.0 - r2

    xs = np.sqrt(t1) * xa + np.sqrt(r1) * xv
    ys = np.sqrt(t1) * ya + np.sqrt(r1) * yv
    xl = np.sqrt(r1) * xa - np.sqrt(t1) * xv
    yl = np.sqrt(r1) * ya - np.sqrt(t1) * yv
    c, s = np.cos(cfg.carrier_phase), np.sin(cfg.carrier_phase)
    xl, yl = c * xl - s * yl, s * xl + c * yl
    delay = np.exp(-2j * np.pi * freqs * cfg.delay)
    xl, yl = delay * xl, delay * yl

    carrier_s = np.sqrt(t1) * alpha
    carrier_l = np.sqrt(r1) * alpha * np.exp(1j * cfg.carrier_phase)
    carrier_b = np.sqrt(t2) * carrier_s + np.sqrt(r2) * carrier_l
    carrier_c = np.sqrt(r2) * carrier_s - np.sqrt(t2) * carrier_l
    xb, yb = np.sqrt(t2) * xs + np.sqrt(r2) * xl, np.sqrt(t2) * ys + np.sqrt(r2) * yl
    xc, yc = np.sqrt(r2) * xs - np.sqrt(t2) * xl, np.sqrt(r2) * ys - np.sqrt(t2) * yl

    nb = carrier_b.real * xb + carrier_b.imag * yb
    nc = carrier_c.real * xc + carrier_c.imag * yc
    return nb + nc, nb - nc


class OracleResult(NamedTuple):
    vx_minus_db: float
    vy_plus_db: float
    qnl_db: float


def _record_spectra(p, mz1, mz2, d, seed, record, n_samples, sample_rate, rbw):
    """One record: returns Welch estimates of (X-, Y+, QNL) channels."""
    n = n_samples
    freqs = np.fft.rfftfreq(n, d=1.0 / sample_rate)
    x1, y1, x2, y2 = twin_spectra(p, d, n, sample_rate, seed, "source", record)

    t = p.eta * p.zeta ** 2
    vac = white_spectrum(rng_stream(seed, _LOSS, record), n, 4)
    x1, y1, x2, y2 = (attenuate(q, t, v) for q, v in zip((x1, y1, x2, y2), vac))
    y1, y2 = add_phase_noise(y1, y2, p.excess_phase_noise / p.qnl, seed, record)

    def read(mode, key):
        vac = white_spectrum(rng_stream(seed, key, record), n, 4)
        out = []
        for cfg, xa, ya, xv, yv in ((mz1, x1, y1, vac[0], vac[1]),
                                    (mz2, x2, y2, vac[2], vac[3])):
            cfg = cfg.with_mode(mode)
            a = cfg.classical_amplitude
            out.append([o / a for o in propagate_interferometer(cfg, xa, ya, xv, yv, freqs)])
        return out

    def trace(spec):
        return NoiseTrace(np.fft.irfft(spec, n=n), sample_rate, seed)

    (_, diff1), (_, diff2) = read("phase", _MZ_PHASE)
    y_plus = welch_estimate(combine(trace(diff1), trace(diff2), +1), rbw)
    (sum1, diff1), (sum2, diff2) = read("amplitude", _MZ_AMPLITUDE)
    x_minus = welch_estimate(combine(trace(sum1), trace(sum2), -1), rbw)
    # balanced-detection difference channel is vacuum at every frequency
    qnl = welch_estimate(combine(trace(diff1), trace(diff2), +1), rbw)
    return x_minus, y_plus, qnl


def average_spectra(estimates):
    """Average spectrum-analyzer traces recorded with identical settings."""
    first = estimates[0]
    var = np.mean([e.variance for e in estimates], axis=0)
    return SpectrumEstimate(first.freqs, var, first.rbw,
                            sum(e.n_averages for e in estimates))


def oracle_spectra(p, mz1, mz2, d=0.0, seed=0, *, f=2e6, n_samples=2 ** 20,
                   sample_rate=64e6, rbw=30e3, n_records=8):
    """Record-averaged spectra of the X-, Y+ and QNL channels."""
    for cfg in (mz1, mz2):
        check_operating_point(cfg, f)
        check_operating_point(cfg.with_mode("amplitude"), f)
    if n_records < 1:
        raise OracleError(f"n_records must be >= 1, got {n_records}")
    recs = [_record_spectra(p, mz1, mz2, d, seed, k, n_samples, sample_rate, rbw)
            for k in range(n_records)]
    return tuple(average_spectra(list(ch)) for ch in zip(*recs))


def oracle_run(p, mz1, mz2, d=0.0, seed=0, *, f=2e6, n_samples=2 ** 20,
               sample_rate=64e6, rbw=30e3, n_records=8, readout_span=300e3):
    """
    Monte Carlo measurement of the amplitude-difference and phase-sum
    noise at sideband frequency ``f``.

    The source is synthesized before losses, attenuated by ``eta * zeta**2``
    with vacuum refill, given the excess common-mode phase noise, then read
    by both interferometers in phase mode (difference channels, added) and in
    amplitude mode (sum channels, subtracted). ``n_records`` independent
    records of ``n_samples`` each are averaged like analyzer sweeps.

    Readings are averaged over ``readout_span`` around ``f``; the span must
    stay narrow because the phase readout is exact only where the sideband
    phase equals pi. They are normalized to the balanced-detection
    difference channel, which is vacuum at every frequency and is averaged
    over its whole band.

    Parameters
    ----------
    p : NopoParams
    mz1, mz2 : MzConfig
        Phase-mode configurations; amplitude mode removes the input splitter.
    d : float
        Detuning in Hz.
    seed : int

    Returns
    -------
    OracleResult
        Readings in dB relative to the QNL; ``qnl_db`` relative to ``a**2``.
    """
    x_minus, y_plus, qnl = oracle_spectra(
        p, mz1, mz2, d, seed, f=f, n_samples=n_samples, sample_rate=sample_rate,
        rbw=rbw, n_records=n_records)
    lo, hi = f - readout_span / 2.0, f + readout_span / 2.0
    qnl_level = float(qnl.variance[1:-1].mean())
    vx = x_minus.band_mean(lo, hi) / qnl_level
    vy = y_plus.band_mean(lo, hi) / qnl_level
    return OracleResult(float(10 * np.log10(vx)), float(10 * np.log10(vy)),
                        float(10 * np.log10(qnl_level)))


class QnlReading(NamedTuple):
    interferometer: int
    mode: str
    channel: str
    expected: float
    measured: float

    @property
    def error_db(self):
        return float(10 * np.log10(self.measured / self.expected))


def qnl_calibration(p, mz1, mz2, seed=0, *, f=2e6, n_samples=2 ** 20,
                    sample_rate=64e6, rbw=30e3, n_records=4, readout_span=300e3):
    """
    Read the shot-noise channel of each interferometer with the twin beams
    as input.

    In phase mode the sum channel is vacuum only near ``theta = pi`` and is
    read over ``readout_span`` around ``f``; in amplitude mode the
    difference channel is vacuum at all frequencies and is read over the
    whole band. Photocurrents are not normalized, so the readings estimate
    ``a**2``.

    Returns
    -------
    readings : list of QnlReading
    spectra : dict
        Record-averaged ``SpectrumEstimate`` of each vacuum channel keyed by
        ``(interferometer, mode)``.
    """
    for cfg in (mz1, mz2):
        check_operating_point(cfg, f)
    n = n_samples
    freqs = np.fft.rfftfreq(n, d=1.0 / sample_rate)
    collected = {}
    for record in range(n_records):
        x1, y1, x2, y2 = twin_spectra(p, 0.0, n, sample_rate, seed, "detector", record)
        for mode, key in (("phase", _MZ_PHASE), ("amplitude", _MZ_AMPLITUDE)):
            vac = white_spectrum(rng_stream(seed, key, record), n, 4)
            for i, (cfg, xa, ya, xv, yv) in enumerate(
                    ((mz1, x1, y1, vac[0], vac[1]), (mz2, x2, y2, vac[2], vac[3])), start=1):
                s, dif = propagate_interferometer(cfg.with_mode(mode), xa, ya, xv, yv, freqs)
                spec = s if mode == "phase" else dif
                trace = NoiseTrace(np.fft.irfft(spec, n=n), sample_rate, seed)
                collected.setdefault((i, mode), []).append(welch_estimate(trace, rbw))

    lo, hi = f - readout_span / 2.0, f + readout_span / 2.0
    readings, spectra = [], {}
    for (i, mode), ests in collected.items():
        est = average_spectra(ests)
        cfg = (mz1, mz2)[i - 1]
        if mode == "phase":
            level, chan = est.band_mean(lo, hi), "sum"
        else:
            level, chan = float(est.variance[1:-1].mean()), "difference"
        readings.append(QnlReading(i, mode, chan, cfg.classical_amplitude ** 2, level))
        spectra[(i, mode)] = est
    return readings, spectra
