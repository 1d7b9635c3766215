"""
Unbalanced Mach-Zehnder self-homodyne detection.

A bright beam is split on B1, one copy is delayed by the arm-length
difference, and both recombine on B2. Photocurrent fluctuations of the two
outputs are linear in the sideband quadratures of the input mode ``a`` and
of the vacuum ``v`` entering B1's open port. With B1 removed the same two
detectors form an ordinary balanced detector.

Quadratures are linearized around a real input carrier of amplitude ``a``;
the long arm rotates the optical carrier by ``phi`` and multiplies the
sideband component at frequency ``f`` by ``exp(i theta)``.
"""

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .quadrature import combined_variances

SPEED_OF_LIGHT = 299_792_458.0
THETA_TOLERANCE = 0.05


class ConfigurationError(ValueError):
    """Interferometer not at the operating point a measurement requires."""


@dataclass(frozen=True)
class MzConfig:
    """Geometry and operating point of one interferometer.

    ``input_splitter_present`` selects phase-quadrature (True) or amplitude
    (False, balanced detection) measurement.
    """

    delta_l: float = 48.0
    refractive_index: float = 1.55
    carrier_phase: float = np.pi / 2
    input_splitter_present: bool = True
    splitter_reflectivity: float = 0.5
    classical_amplitude: float = 1.0

    def __post_init__(self):
        if not self.delta_l > 0:
            raise ConfigurationError(f"delta_l must be > 0, got {self.delta_l}")
        if not self.refractive_index >= 1:
            raise ConfigurationError(
                f"refractive_index must be >= 1, got {self.refractive_index}")
        if not 0.0 <= self.splitter_reflectivity <= 1.0:
            raise ConfigurationError(
                f"splitter_reflectivity must lie in [0, 1], got {self.splitter_reflectivity}")
        if not self.classical_amplitude >= 0:
            raise ConfigurationError(
                f"classical_amplitude must be >= 0, got {self.classical_amplitude}")

    @property
    def mode(self):
        return "phase" if self.input_splitter_present else "amplitude"

    def with_mode(self, mode):
        """Copy switched to ``"amplitude"`` or ``"phase"`` measurement."""
        if mode not in ("amplitude", "phase"):
            raise ConfigurationError(f"mode must be 'amplitude' or 'phase', got {mode!r}")
        return replace(self, input_splitter_present=(mode == "phase"))

    @property
    def delay(self):
        """Group delay of the long arm relative to the short arm, in s."""
        return self.refractive_index * self.delta_l / SPEED_OF_LIGHT

    @classmethod
    def tuned(cls, f, **kwargs):
        """Config whose arm-length difference gives ``theta = pi`` at ``f`` exactly."""
        n = kwargs.get("refractive_index", cls.refractive_index)
        return cls(delta_l=SPEED_OF_LIGHT / (2.0 * n * f), **kwargs)


class PhotocurrentSpectra(NamedTuple):
    sum_variance: float
    diff_variance: float


def sideband_phase(cfg, f):
    """Unwrapped sideband phase ``2 pi f n dL / c`` in radians."""
    if np.any(np.asarray(f) < 0):
        raise ValueError("sideband frequency must be >= 0")
    return 2.0 * np.pi * np.asarray(f, dtype=float) * cfg.delay


def wrapped_phase(angle):
    """Reduce an angle to [0, 2 pi)."""
    return np.mod(angle, 2.0 * np.pi)


def _rotation(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def channel_coefficients(cfg, theta):
    """
    Linear map from input quadratures to output photocurrent fluctuations.

    Parameters
    ----------
    cfg : MzConfig
    theta : float or ndarray
        Sideband phase of the long arm.

    Returns
    -------
    ndarray, complex, shape ``(..., 2, 4)``
        Rows are the (sum, diff) photocurrents; columns act on
        ``(dX_a, dY_a, dX_v, dY_v)``.
    """
    theta = np.asarray(theta, dtype=float)
    alpha = cfg.classical_amplitude
    r1 = cfg.splitter_reflectivity if cfg.input_splitter_present else 0.0
    r2 = cfg.splitter_reflectivity
    t1, t2 = 1.0 - r1, 1.0 - r2
    pa = np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0]])
    pv = np.array([[0, 0, 1.0, 0], [0, 0, 0, 1.0]])

    short = np.sqrt(t1) * pa + np.sqrt(r1) * pv
    long_ = _rotation(cfg.carrier_phase) @ (np.sqrt(r1) * pa - np.sqrt(t1) * pv)
    beta_s = np.sqrt(t1) * alpha
    beta_l = np.sqrt(r1) * alpha * np.exp(1j * cfg.carrier_phase)

    delay = np.exp(1j * theta)[..., None, None]
    long_ = delay * long_
    qb = np.sqrt(t2) * short + np.sqrt(r2) * long_
    qc = np.sqrt(r2) * short - np.sqrt(t2) * long_
    beta_b = np.sqrt(t2) * beta_s + np.sqrt(r2) * beta_l
    beta_c = np.sqrt(r2) * beta_s - np.sqrt(t2) * beta_l

    # dn = Re(beta) dX + Im(beta) dY for a field with carrier beta
    nb = beta_b.real * qb[..., 0, :] + beta_b.imag * qb[..., 1, :]
    nc = beta_c.real * qc[..., 0, :] + beta_c.imag * qc[..., 1, :]
    return np.stack([nb + nc, nb - nc], axis=-2)


def _quadratic_form(c, cov):
    return float(np.real(np.conj(c) @ cov @ c))


def transfer(cfg, input_x_var, input_y_var, f):
    """
    Sum and difference photocurrent variances at sideband frequency ``f``.

    The input mode has quadrature variances ``(input_x_var, input_y_var)``
    and no X-Y correlation; the open port carries vacuum.
    """
    if not (input_x_var > 0 and input_y_var > 0):
        raise ValueError("input variances must be > 0")
    c = channel_coefficients(cfg, sideband_phase(cfg, f))
    cov = np.diag([input_x_var, input_y_var, 1.0, 1.0])
    return PhotocurrentSpectra(_quadratic_form(c[0], cov), _quadratic_form(c[1], cov))


def _angle_error(angle, target):
    return abs((angle - target + np.pi) % (2.0 * np.pi) - np.pi)


def check_operating_point(cfg, f, theta_tolerance=THETA_TOLERANCE):
    """Raise ConfigurationError unless ``cfg`` is at a valid measurement point."""
    if cfg.classical_amplitude <= 0:
        raise ConfigurationError("classical_amplitude must be > 0 to measure")
    if not cfg.input_splitter_present:
        return
    dphi = _angle_error(cfg.carrier_phase, np.pi / 2)
    if dphi > theta_tolerance:
        raise ConfigurationError(
            f"carrier phase is {dphi:.4g} rad from pi/2 (tolerance {theta_tolerance})")
    theta = float(sideband_phase(cfg, f))
    dtheta = _angle_error(theta, np.pi)
    if dtheta > theta_tolerance:
        raise ConfigurationError(
            f"sideband phase theta = {theta:.4g} rad at f = {f:.6g} Hz deviates from pi "
            f"by {dtheta:.4g} rad (tolerance {theta_tolerance})")


def measurement_row(cfg, theta):
    """Per-beam coefficient row of the quadrature channel, normalized by ``a``."""
    c = channel_coefficients(cfg, theta)
    # phase mode reads the difference, balanced detection reads the sum
    row = c[..., 1, :] if cfg.input_splitter_present else c[..., 0, :]
    return row / cfg.classical_amplitude


def measure_twin_beams(cm, cfg1, cfg2, combiner, f=None, theta_tolerance=THETA_TOLERANCE):
    """
    Combined quadrature variance read through two interferometers.

    Each beam's quadrature photocurrent (difference channel in phase mode,
    sum channel in amplitude mode) is normalized to its QNL and the two are
    added (``combiner=+1``) or subtracted (``-1``) on a power combiner.

    Parameters
    ----------
    cm : TwoModeCovariance
    cfg1, cfg2 : MzConfig
        Both in the same mode.
    combiner : int
        +1 or -1.
    f : float, optional
        Sideband frequency; defaults to ``cm.analysis_frequency``.

    Returns
    -------
    float
        ``V X-`` for amplitude/minus, ``V Y+`` for phase/plus, etc.
    """
    if combiner not in (1, -1):
        raise ConfigurationError(f"combiner must be +1 or -1, got {combiner!r}")
    if cfg1.input_splitter_present != cfg2.input_splitter_present:
        raise ConfigurationError(
            f"interferometers disagree on mode: {cfg1.mode} vs {cfg2.mode}")
    f = cm.analysis_frequency if f is None else f
    for cfg in (cfg1, cfg2):
        check_operating_point(cfg, f, theta_tolerance)

    c1 = measurement_row(cfg1, sideband_phase(cfg1, f))
    c2 = measurement_row(cfg2, sideband_phase(cfg2, f))
    # inputs: (X1, Y1, X2, Y2, Xv1, Yv1, Xv2, Yv2)
    row = np.zeros(8, dtype=complex)
    row[[0, 1, 4, 5]] = c1
    row[[2, 3, 6, 7]] = combiner * c2
    row /= np.sqrt(2.0)
    cov = np.eye(8)
    cov[:4, :4] = cm.entries
    return _quadratic_form(row, cov)


def qnl_reference(cfg, f):
    """
    Shot-noise calibration level ``a**2``.

    This is what the vacuum channel reads (sum in phase mode, difference in
    amplitude mode) whatever the input state.
    """
    check_operating_point(cfg, f)
    return cfg.classical_amplitude ** 2


def expected_reading(cm, cfg1, cfg2, combiner):
    """The ideal combined variance a measurement is meant to report."""
    cv = combined_variances(cm)
    if cfg1.input_splitter_present:
        return cv.vy_plus if combiner > 0 else cv.vy_minus
    return cv.vx_plus if combiner > 0 else cv.vx_minus
