"""
Classical interference between the twin beams.

Fringe visibility for two beams with Gaussian frequency spread, synthesis of
the fringe intensity an oscilloscope would record, and the beat-note
readout of the frequency difference.
"""

import csv
from dataclasses import dataclass

import numpy as np

# fringes count as vanished below the visibility reached at 3.37 linewidths
VANISH_VISIBILITY = 0.0034
# smallest fringe modulation depth (relative to mean intensity) detectable as a beat
BEAT_DETECTION_FLOOR = 1e-4


class SamplingError(ValueError):
    """Trace too short or too coarsely sampled for the requested analysis."""


class BeatNotDetected(RuntimeError):
    """No beat note stands above the detection floor."""


@dataclass(frozen=True)
class CoherenceParams:
    """Optical frequencies (Hz), per-beam linewidth (Hz) and intensities."""

    detuning: float = 0.0
    linewidth: float = 1.0e6
    intensity1: float = 1.0
    intensity2: float = 1.0
    reference_frequency: float = 0.0

    def __post_init__(self):
        if not self.linewidth > 0:
            raise ValueError(f"linewidth must be > 0, got {self.linewidth}")
        if self.intensity1 < 0 or self.intensity2 < 0:
            raise ValueError("intensities must be >= 0")
        if self.intensity1 == 0 and self.intensity2 == 0:
            raise ValueError("at least one intensity must be > 0")

    @property
    def nu1(self):
        return self.reference_frequency + self.detuning

    @property
    def nu2(self):
        return self.reference_frequency

    @classmethod
    def from_frequencies(cls, nu1, nu2, **kwargs):
        return cls(detuning=nu1 - nu2, reference_frequency=nu2, **kwargs)


def coherence_factor(detuning, linewidth):
    """Gaussian mutual coherence ``exp(-d**2 / (2 dnu**2))`` at zero delay."""
    d = np.asarray(detuning, dtype=float)
    return np.exp(-d ** 2 / (2.0 * linewidth ** 2))


def intensity_balance(i1, i2):
    """Visibility penalty ``2 sqrt(I1 I2) / (I1 + I2)`` for unequal beams."""
    return 2.0 * np.sqrt(i1 * i2) / (i1 + i2)


def visibility(p):
    """Fringe visibility of the two beams interfering at zero delay."""
    v = coherence_factor(p.detuning, p.linewidth) * intensity_balance(p.intensity1, p.intensity2)
    return float(v)


def vanish_detuning(linewidth, level=VANISH_VISIBILITY):
    """Detuning beyond which equal-intensity visibility is below ``level``."""
    return linewidth * np.sqrt(2.0 * np.log(1.0 / level))


@dataclass(frozen=True)
class FringeTrace:
    """Sampled interference intensity.

    ``fringe_frequency`` (Hz) and ``background`` (``I1 + I2``) are known
    for synthesized traces and ``None`` for imported ones.
    """

    time: np.ndarray
    intensity: np.ndarray
    fringe_frequency: float = None
    background: float = None

    def __post_init__(self):
        t = np.array(self.time, dtype=float)
        i = np.array(self.intensity, dtype=float)
        if t.shape != i.shape or t.ndim != 1:
            raise ValueError("time and intensity must be 1-D arrays of equal length")
        if len(t) < 3:
            raise SamplingError("trace needs at least 3 samples")
        if np.any(i < -1e-12 * max(1.0, np.max(np.abs(i)))):
            raise ValueError("intensity must be >= 0")
        for a in (t, i):
            a.setflags(write=False)
        object.__setattr__(self, "time", t)
        object.__setattr__(self, "intensity", i)

    @property
    def sample_rate(self):
        return 1.0 / float(self.time[1] - self.time[0])

    @property
    def duration(self):
        return len(self.time) / self.sample_rate

    @property
    def i_max(self):
        return _refined_extremum(self.intensity, np.argmax(self.intensity))

    @property
    def i_min(self):
        return max(_refined_extremum(self.intensity, np.argmin(self.intensity)), 0.0)


def _refined_extremum(y, k):
    # parabola through the extreme sample and its neighbours
    if k == 0 or k == len(y) - 1:
        return float(y[k])
    a, b, c = y[k - 1], y[k], y[k + 1]
    denom = a - 2.0 * b + c
    if denom == 0:
        return float(b)
    return float(b - 0.125 * (a - c) ** 2 / denom)


def fringe_trace(p, phase_ramp_rate, duration, sample_rate):
    """
    Interference intensity while one path length is ramped.

    ``I(t) = I1 + I2 + 2 sqrt(I1 I2) g cos(2 pi (nu1 - nu2) t + ramp t)``
    with ``g`` the Gaussian coherence factor.

    Parameters
    ----------
    p : CoherenceParams
    phase_ramp_rate : float
        Optical phase sweep in rad/s from moving a mirror.
    duration, sample_rate : float
        Trace length in s and sampling rate in Hz.
    """
    fringe = abs(p.detuning + phase_ramp_rate / (2.0 * np.pi))
    if not sample_rate > 2.0 * fringe:
        raise SamplingError(
            f"sample_rate {sample_rate:.6g} Hz does not exceed twice the fringe "
            f"frequency {fringe:.6g} Hz")
    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate
    i1, i2 = p.intensity1, p.intensity2
    g = coherence_factor(p.detuning, p.linewidth)
    phase = 2.0 * np.pi * p.detuning * t + phase_ramp_rate * t
    intensity = i1 + i2 + 2.0 * np.sqrt(i1 * i2) * g * np.cos(phase)
    return FringeTrace(t, intensity, fringe_frequency=fringe, background=i1 + i2)


def extract_visibility(trace):
    """``(I_max - I_min) / (I_max + I_min)`` over the whole trace."""
    if trace.fringe_frequency is not None:
        periods = trace.fringe_frequency * trace.duration
        if periods < 2:
            raise SamplingError(
                f"trace spans {periods:.3g} fringe periods, need at least 2")
    hi, lo = trace.i_max, trace.i_min
    if hi + lo == 0:
        return 0.0
    return float(np.clip((hi - lo) / (hi + lo), 0.0, 1.0))


def beat_spectrum(trace):
    """One-sided amplitude spectrum of the AC part of the trace.

    Returns ``(freq_hz, amplitude)`` where a cosine of amplitude A reads A.
    """
    x = trace.intensity - trace.intensity.mean()
    n = len(x)
    spec = np.abs(np.fft.rfft(x)) * 2.0 / n
    freqs = np.fft.rfftfreq(n, d=1.0 / trace.sample_rate)
    return freqs, spec


def beat_frequency(trace):
    """
    Frequency difference read from the dominant beat note, in Hz.

    A static interference term (beams at the same frequency) shifts the mean
    intensity away from ``I1 + I2`` and reads as 0 Hz.

    Raises
    ------
    BeatNotDetected
        If neither a spectral peak nor a static interference term exceeds
        the detection floor.
    """
    mean = float(trace.intensity.mean())
    freqs, spec = beat_spectrum(trace)
    k = 1 + int(np.argmax(spec[1:]))
    if spec[k] > BEAT_DETECTION_FLOOR * mean:
        if trace.fringe_frequency is not None and trace.fringe_frequency * trace.duration < 4:
            raise SamplingError("beat measurement needs at least 4 beat periods")
        return float(freqs[k])
    if trace.background is not None and abs(mean - trace.background) > BEAT_DETECTION_FLOOR * mean:
        return 0.0
    raise BeatNotDetected(
        f"no beat note above {BEAT_DETECTION_FLOOR:g} of the mean intensity "
        f"(largest peak {spec[k] / mean:.3g} at {freqs[k]:.6g} Hz)")


def write_trace_csv(trace, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["time_s", "intensity"])
        for t, i in zip(trace.time, trace.intensity):
            w.writerow([repr(float(t)), repr(float(i))])


def read_trace_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return FringeTrace(data[:, 0], data[:, 1])


def write_beat_spectrum_csv(trace, path):
    freqs, spec = beat_spectrum(trace)
    power_db = 20.0 * np.log10(np.maximum(spec, 1e-300))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["freq_hz", "power_db"])
        for f, p in zip(freqs, power_db):
            w.writerow([repr(float(f)), repr(float(p))])
