"""
Two-mode Gaussian sideband states in quadrature form.

All matrices use the basis order (X1, Y1, X2, Y2) and are normalized so that
an ideal coherent state (or vacuum) has unit variance in every quadrature.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-10
PHYSICAL_TOL = 1e-9

# symplectic form for (X1, Y1, X2, Y2)
OMEGA = np.array([[0.0, 1.0, 0.0, 0.0],
                  [-1.0, 0.0, 0.0, 0.0],
                  [0.0, 0.0, 0.0, 1.0],
                  [0.0, 0.0, -1.0, 0.0]])


class PhysicalityError(ValueError):
    """Raised when a covariance matrix violates a physical invariant."""


def symplectic_eigenvalues(matrix):
    """
    Symplectic eigenvalues of a 4x4 covariance matrix.

    Parameters
    ----------
    matrix : array_like or TwoModeCovariance
        Symmetric 4x4 matrix in (X1, Y1, X2, Y2) order.

    Returns
    -------
    tuple of float
        ``(nu1, nu2)`` sorted ascending. A state is physical iff both are >= 1.
    """
    v = _as_array(matrix)
    ev = np.abs(np.linalg.eigvals(OMEGA @ v).imag)
    ev = np.sort(ev)
    # eigenvalues of Omega V come in +/- i nu pairs
    return float(ev[0]), float(ev[2])


def check_physical(matrix):
    """Raise PhysicalityError naming the first violated invariant."""
    v = np.asarray(matrix, dtype=float)
    if v.shape != (4, 4):
        raise PhysicalityError(f"covariance must be 4x4, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise PhysicalityError("covariance has non-finite entries")
    asym = np.max(np.abs(v - v.T))
    if asym > SYMMETRY_TOL:
        raise PhysicalityError(f"symmetry violated: max |V - V^T| = {asym:.3e}")
    min_eig = np.linalg.eigvalsh(v).min()
    if min_eig < -PSD_TOL:
        raise PhysicalityError(
            f"positive semidefiniteness violated: min eigenvalue = {min_eig:.6g}")
    nu = symplectic_eigenvalues(v)
    if nu[0] < 1.0 - PHYSICAL_TOL:
        raise PhysicalityError(
            "uncertainty principle violated: symplectic eigenvalues "
            f"({nu[0]:.6g}, {nu[1]:.6g}) must both be >= 1")


@dataclass(frozen=True)
class TwoModeCovariance:
    """QNL-normalized covariance of the quadratures (X1, Y1, X2, Y2).

    ``analysis_frequency`` is the sideband frequency (Hz) the matrix describes.
    Construction validates symmetry, positivity and the uncertainty principle.
    """

    entries: np.ndarray
    analysis_frequency: float = 0.0

    def __post_init__(self):
        v = np.array(self.entries, dtype=float)
        check_physical(v)
        v.setflags(write=False)
        object.__setattr__(self, "entries", v)

    @classmethod
    def vacuum(cls, analysis_frequency=0.0):
        return cls(np.eye(4), analysis_frequency)

    def mode_block(self, i):
        """2x2 covariance of mode ``i`` (1 or 2)."""
        k = 2 * (i - 1)
        return self.entries[k:k + 2, k:k + 2]

    def symplectic_eigenvalues(self):
        return symplectic_eigenvalues(self.entries)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)


class CombinedVariances(NamedTuple):
    """Sum/difference quadrature variances in QNL units."""

    vx_plus: float
    vx_minus: float
    vy_plus: float
    vy_minus: float


class DuanResult(NamedTuple):
    value_corr: float
    value_anticorr: float
    entangled: bool


def _as_array(matrix):
    if isinstance(matrix, TwoModeCovariance):
        return matrix.entries
    return np.asarray(matrix, dtype=float)


def _validate_combined(vx_plus, vx_minus, vy_plus, vy_minus):
    for name, val in (("vx_plus", vx_plus), ("vx_minus", vx_minus),
                      ("vy_plus", vy_plus), ("vy_minus", vy_minus)):
        if not val > 0:
            raise PhysicalityError(f"{name} must be > 0, got {val}")


def combined_variances(cm):
    """
    Sum and difference variances of the two beams' quadratures.

    ``V(X1 +/- X2) / 2 = (V X1 + V X2 +/- 2 Cov(X1, X2)) / 2``, and likewise
    for Y.

    Parameters
    ----------
    cm : TwoModeCovariance

    Returns
    -------
    CombinedVariances
    """
    if not isinstance(cm, TwoModeCovariance):
        cm = TwoModeCovariance(cm)
    v = cm.entries
    vx_p = 0.5 * (v[0, 0] + v[2, 2] + 2.0 * v[0, 2])
    vx_m = 0.5 * (v[0, 0] + v[2, 2] - 2.0 * v[0, 2])
    vy_p = 0.5 * (v[1, 1] + v[3, 3] + 2.0 * v[1, 3])
    vy_m = 0.5 * (v[1, 1] + v[3, 3] - 2.0 * v[1, 3])
    return CombinedVariances(float(vx_p), float(vx_m), float(vy_p), float(vy_m))


def build_covariance(vx_plus, vx_minus, vy_plus, vy_minus, analysis_frequency=0.0):
    """
    Symmetric-beam covariance reproducing four combined variances.

    Assumes both beams have identical single-mode statistics and that there
    is no X-Y cross-correlation, which is all the combined variances can fix.

    Raises
    ------
    PhysicalityError
        If any input is non-positive or the resulting state is unphysical.
    """
    _validate_combined(vx_plus, vx_minus, vy_plus, vy_minus)
    vx = 0.5 * (vx_plus + vx_minus)
    cx = 0.5 * (vx_plus - vx_minus)
    vy = 0.5 * (vy_plus + vy_minus)
    cy = 0.5 * (vy_plus - vy_minus)
    m = np.array([[vx, 0.0, cx, 0.0],
                  [0.0, vy, 0.0, cy],
                  [cx, 0.0, vx, 0.0],
                  [0.0, cy, 0.0, vy]])
    return TwoModeCovariance(m, analysis_frequency)


def duan_criterion(cv):
    """
    Inseparability test ``V X+/- + V Y-/+ < 2``.

    Returns both sums and whether either falls strictly below 2.
    """
    cv = CombinedVariances(*cv)
    _validate_combined(*cv)
    corr = cv.vx_minus + cv.vy_plus
    anti = cv.vx_plus + cv.vy_minus
    return DuanResult(float(corr), float(anti), bool(min(corr, anti) < 2.0))


def apply_loss(cm, t1, t2):
    """Attenuate each beam with transmittance ``t_i``, admixing vacuum."""
    for name, t in (("t1", t1), ("t2", t2)):
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"transmittance {name} must lie in [0, 1], got {t}")
    g = np.sqrt(np.array([t1, t1, t2, t2], dtype=float))
    noise = np.array([1 - t1, 1 - t1, 1 - t2, 1 - t2], dtype=float)
    v = g[:, None] * cm.entries * g[None, :] + np.diag(noise)
    return TwoModeCovariance(0.5 * (v + v.T), cm.analysis_frequency)


def passive_symplectic(u):
    """Real 4x4 symplectic for a 2x2 unitary acting on mode amplitudes."""
    u = np.asarray(u, dtype=complex)
    s = np.zeros((4, 4))
    for j in range(2):
        for k in range(2):
            re, im = u[j, k].real, u[j, k].imag
            s[2 * j:2 * j + 2, 2 * k:2 * k + 2] = [[re, -im], [im, re]]
    return s


def beamsplitter_matrix(reflectivity, phase=0.0):
    """
    Symplectic matrix of a lossless beamsplitter.

    Output amplitudes are ``a1' = sqrt(T) a1 + sqrt(R) e^{i phase} a2`` and
    ``a2' = -sqrt(R) e^{-i phase} a1 + sqrt(T) a2`` with ``T = 1 - R``.
    """
    if not 0.0 <= reflectivity <= 1.0:
        raise ValueError(f"reflectivity must lie in [0, 1], got {reflectivity}")
    tt = np.sqrt(1.0 - reflectivity)
    rr = np.sqrt(reflectivity)
    u = np.array([[tt, rr * np.exp(1j * phase)],
                  [-rr * np.exp(-1j * phase), tt]])
    return passive_symplectic(u)


def beamsplitter(cm, reflectivity, phase=0.0):
    """Mix the two beams on a beamsplitter; returns ``S V S^T``."""
    s = beamsplitter_matrix(reflectivity, phase)
    v = s @ cm.entries @ s.T
    return TwoModeCovariance(0.5 * (v + v.T), cm.analysis_frequency)


def variance_to_db(v, qnl=1.0):
    """Noise power relative to the QNL in dB (negative below QNL)."""
    return 10.0 * np.log10(np.asarray(v, dtype=float) / qnl)


def db_to_variance(db, qnl=1.0):
    return qnl * 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def random_covariance(rng, max_squeeze_db=15.0, max_thermal=3.0):
    """
    Draw a random physical two-mode covariance.

    Thermal diagonal ``diag(n1, n1, n2, n2)`` with ``n_i >= 1`` transformed by
    passive-squeeze-passive symplectics (Bloch-Messiah form).
    """
    n = 1.0 + rng.uniform(0.0, max_thermal - 1.0, size=2)
    v = np.diag([n[0], n[0], n[1], n[1]])
    r = rng.uniform(0.0, max_squeeze_db, size=2) * np.log(10.0) / 20.0
    sq = np.diag([np.exp(-r[0]), np.exp(r[0]), np.exp(-r[1]), np.exp(r[1])])
    s = _haar_passive(rng) @ sq @ _haar_passive(rng)
    m = s @ v @ s.T
    return TwoModeCovariance(0.5 * (m + m.T))


def _haar_passive(rng):
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return passive_symplectic(q)
