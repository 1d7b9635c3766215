"""
Twin-beam source model for a nondegenerate OPO above threshold.

Correlation spectra of the amplitude difference and phase sum, a smooth
phase-matching window over the signal-idler detuning, and the completion of
those two spectra into a full two-mode covariance.
"""

from dataclasses import dataclass, fields

import numpy as np

from .quadrature import build_covariance


class ParameterError(ValueError):
    """Invalid model parameter; the message names the offending field."""


@dataclass(frozen=True)
class NopoParams:
    """Source and detection parameters.

    Defaults are the operating point of the reference experiment. Powers are
    in mW, frequencies in Hz. ``excess_phase_noise`` is added to the
    phase-sum variance; ``antisqueeze_excess`` (>= 1) multiplies both
    anti-squeezed variances.
    """

    eta: float = 0.90
    zeta: float = 0.81
    xi: float = 0.88
    pump_power: float = 195.0
    threshold_power: float = 130.0
    bandwidth: float = 15.4e6
    qnl: float = 1.0
    linewidth: float = 1.0e6
    band_low: float = -83.2e9
    band_high: float = 975e9
    band_softness: float = 50e9
    excess_phase_noise: float = 0.0
    antisqueeze_excess: float = 1.0

    def __post_init__(self):
        for name in ("eta", "zeta", "xi"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1], got {val}")
        for f in fields(self):
            val = getattr(self, f.name)
            if not np.isfinite(val):
                raise ParameterError(f"{f.name} must be finite, got {val}")
        if self.pump_power < 0:
            raise ParameterError(f"pump_power must be >= 0, got {self.pump_power}")
        for name in ("threshold_power", "bandwidth", "qnl", "linewidth", "band_softness"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be > 0, got {getattr(self, name)}")
        if not self.band_low < self.band_high:
            raise ParameterError(
                f"band_low ({self.band_low}) must be < band_high ({self.band_high})")
        if self.excess_phase_noise < 0:
            raise ParameterError(
                f"excess_phase_noise must be >= 0, got {self.excess_phase_noise}")
        if self.antisqueeze_excess < 1:
            raise ParameterError(
                f"antisqueeze_excess must be >= 1, got {self.antisqueeze_excess}")
        if not pump_parameter(self) > 1.0:
            raise ParameterError(
                "pump_power must exceed threshold_power (sigma > 1) for "
                f"above-threshold operation, got sigma = {pump_parameter(self):.4g}")

    @property
    def sigma(self):
        return pump_parameter(self)

    @property
    def efficiency(self):
        """Product eta * zeta**2 * xi setting the correlated fraction."""
        return self.eta * self.zeta ** 2 * self.xi


def pump_parameter(p):
    """Pump power in units of threshold, ``sqrt(P / P0)``."""
    if not p.threshold_power > 0:
        raise ParameterError(f"threshold_power must be > 0, got {p.threshold_power}")
    return float(np.sqrt(p.pump_power / p.threshold_power))


def _correlation_spectra(p, f, window=1.0):
    # returns (vx_minus, vy_plus without excess noise) in absolute units
    f = np.asarray(f, dtype=float)
    k = p.efficiency * np.asarray(window, dtype=float)
    x2 = (f / p.bandwidth) ** 2
    vx = p.qnl * (1.0 - k / (1.0 + x2))
    vy = p.qnl * (1.0 - k / (p.sigma ** 2 + x2))
    return vx, vy


def squeezed_variances(p, f):
    """
    Amplitude-difference and phase-sum variances at noise frequency ``f``.

    Parameters
    ----------
    p : NopoParams
    f : float or ndarray
        Sideband frequency in Hz.

    Returns
    -------
    vx_minus, vy_plus : float or ndarray
        In the same units as ``p.qnl``.
    """
    if np.any(np.asarray(f) < 0):
        raise ParameterError("analysis frequency must be >= 0")
    vx, vy = _correlation_spectra(p, f)
    vy = vy + p.excess_phase_noise
    if np.ndim(vx) == 0:
        return float(vx), float(vy)
    return vx, vy


def phasematch_factor(d, p):
    """
    Phase-matching window over the detuning ``d = nu1 - nu2`` (Hz).

    Equal to 1 on ``[band_low, band_high]`` (edges included), rolling off
    to 0 with a raised-cosine edge of width ``band_softness`` on either side.
    """
    d = np.asarray(d, dtype=float)
    x = np.maximum(p.band_low - d, d - p.band_high) / p.band_softness
    x = np.clip(x, 0.0, 1.0)
    w = 0.5 * (1.0 + np.cos(np.pi * x))
    if w.ndim == 0:
        return float(w)
    return w


def phasematch_edges(p, level):
    """Detunings where the window falls to ``level`` in (0, 1), as (low, high)."""
    x = np.arccos(2.0 * level - 1.0) / np.pi
    return p.band_low - x * p.band_softness, p.band_high + x * p.band_softness


def detected_spectra(p, f, d=0.0):
    """
    QNL-normalized spectra of all four combined quadratures.

    Returns ``(vx_plus, vx_minus, vy_plus, vy_minus)`` as evaluated at the
    detectors. Anti-squeezed partners are the minimum-uncertainty completion
    of the noise-free squeezed spectra, scaled by ``antisqueeze_excess``;
    excess phase noise is then added to the phase sum only.
    """
    w = phasematch_factor(d, p)
    vx_m, vy_p = _correlation_spectra(p, f, w)
    vx_m = vx_m / p.qnl
    vy_p = vy_p / p.qnl
    vx_p = p.antisqueeze_excess / vy_p
    vy_m = p.antisqueeze_excess / vx_m
    vy_p = vy_p + p.excess_phase_noise / p.qnl
    return vx_p, vx_m, vy_p, vy_m


def twin_beam_covariance(p, f, d=0.0):
    """
    Two-mode covariance of the detected twin beams.

    Parameters
    ----------
    p : NopoParams
    f : float
        Analysis (sideband) frequency in Hz.
    d : float
        Signal-idler detuning in Hz.

    Returns
    -------
    TwoModeCovariance
    """
    vx_p, vx_m, vy_p, vy_m = (float(v) for v in detected_spectra(p, f, d))
    return build_covariance(vx_p, vx_m, vy_p, vy_m, analysis_frequency=float(f))
