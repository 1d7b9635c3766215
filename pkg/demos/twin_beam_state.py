"""
Twin-beam covariance and the inseparability test
================================================

Build the two-mode state of the reference experiment, read off its combined
quadrature variances, and watch what loss and a beamsplitter do to it.
"""

import numpy as np

from twinbeam import (NopoParams, apply_loss, beamsplitter, combined_variances,
                      duan_criterion, twin_beam_covariance, variance_to_db)

# The source at 2 MHz analysis frequency, zero signal-idler detuning.
p = NopoParams()
cm = twin_beam_covariance(p, 2e6)
np.set_printoptions(precision=4, suppress=True)
print("covariance (X1, Y1, X2, Y2):")
print(cm.entries)

# Amplitude difference and phase sum are squeezed, their partners are not.
cv = combined_variances(cm)
for name, v in cv._asdict().items():
    print(f"{name:9s} {v:.4f}  ({variance_to_db(v):+.2f} dB)")

# A sum below 2 certifies entanglement.
print("inseparability:", duan_criterion(cv))

# Symplectic eigenvalues equal 1: the completion is a minimum-uncertainty state.
print("symplectic eigenvalues:", cm.symplectic_eigenvalues())

# Loss pulls the sum toward 2 along a straight line, never past it.
for t in (1.0, 0.75, 0.5, 0.25, 0.0):
    s = duan_criterion(combined_variances(apply_loss(cm, t, t))).value_corr
    print(f"transmission {t:.2f}: sum {s:.4f}")

# A 50/50 beamsplitter turns the correlated pair into two single-mode
# squeezed beams, with the correlation moved into each mode's variances.
out = beamsplitter(cm, 0.5)
print("after 50/50 beamsplitter:")
print(out.entries)
