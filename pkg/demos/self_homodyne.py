"""
Reading the phase quadrature with an unbalanced Mach-Zehnder
============================================================

A 48 m fibre delay turns the interferometer into its own local oscillator
at sideband frequencies where the delay phase is pi.
"""

import numpy as np

from twinbeam import (MzConfig, measure_twin_beams, NopoParams, sideband_phase, transfer,
                      twin_beam_covariance)

cfg = MzConfig()
theta = float(sideband_phase(cfg, 2e6))
print(f"sideband phase at 2 MHz: {theta:.4f} rad = {theta / np.pi:.4f} pi")
print(f"exactly pi at {299792458.0 / (2 * cfg.refractive_index * cfg.delta_l) / 1e6:.4f} MHz")

# With the input splitter in place the difference photocurrent carries the
# phase quadrature and the sum carries vacuum. Without it, the detectors form
# a balanced pair: the sum carries the amplitude quadrature.
tuned = MzConfig.tuned(2e6)
amplitude = MzConfig(input_splitter_present=False)
print("phase mode     (sum, diff):", transfer(tuned, 0.489, 2.045, 2e6))
print("amplitude mode (sum, diff):", transfer(amplitude, 0.489, 2.045, 2e6))

# Away from theta = pi the difference channel mixes in vacuum and amplitude noise.
for f in (1.0e6, 1.5e6, 2.0e6, 2.0147e6, 2.5e6, 3.0e6):
    s = transfer(cfg, 0.489, 2.045, f)
    print(f"f = {f / 1e6:6.4f} MHz: diff {s.diff_variance:.4f}")

# Two interferometers plus a power combiner measure the combined variances.
cm = twin_beam_covariance(NopoParams(), 2e6)
print("V(X1 - X2) via balanced detection:", measure_twin_beams(cm, amplitude, amplitude, -1))
print("V(Y1 + Y2) via self-homodyne:     ", measure_twin_beams(cm, tuned, tuned, +1))
print("same with the 48 m fibre as built:", measure_twin_beams(cm, cfg, cfg, +1))
