"""
Classical interference of beams at different frequencies
========================================================

Fringes between the two beams wash out once their frequency difference
exceeds a few linewidths. The beat note tells how far apart they are.
"""

from twinbeam import (BeatNotDetected, CoherenceParams, beat_frequency, extract_visibility,
                      fringe_trace, visibility)
from twinbeam.coherence import vanish_detuning

for d in (0.0, 0.5e6, 1.414e6, 2e6, 3.37e6, 5e6):
    print(f"detuning {d / 1e6:5.3f} MHz: visibility {visibility(CoherenceParams(detuning=d)):.4f}")
print(f"fringes count as gone beyond {vanish_detuning(1e6) / 1e6:.4f} MHz")

# Synthesize what an oscilloscope shows and measure it back.
p = CoherenceParams(detuning=1.414e6)
trace = fringe_trace(p, phase_ramp_rate=0.0, duration=20e-6, sample_rate=50e6)
print(f"extracted visibility {extract_visibility(trace):.4f}, "
      f"model {visibility(p):.4f}")

# The beat note at 2 MHz, read from a 1 ms trace.
trace = fringe_trace(CoherenceParams(detuning=2e6, linewidth=10e6), 0.0, 1e-3, 50e6)
print(f"beat frequency {beat_frequency(trace) / 1e6:.4f} MHz")

# Far apart the beat is buried.
trace = fringe_trace(CoherenceParams(detuning=5.3e6), 0.0, 1e-3, 50e6)
try:
    beat_frequency(trace)
except BeatNotDetected as exc:
    print("no beat:", exc)
