"""
Monte Carlo check of the analytic levels
========================================

Synthesize the quadrature noise, pass it through loss, both interferometers
and the power combiners, and read the result on an emulated spectrum
analyzer. Takes about ten seconds.
"""

import numpy as np

from twinbeam import MzConfig, NopoParams, squeezed_variances, variance_to_db
from twinbeam.oracle import combine, oracle_run, synthesize_twin_traces, welch_estimate

p = NopoParams()

# First the bare source: (x1 - x2)/sqrt(2) dips below the QNL inside the
# cavity bandwidth.
x1, y1, x2, y2 = synthesize_twin_traces(p, 0.0, 2 ** 20, 64e6, seed=1)
est = welch_estimate(combine(x1, x2, -1), rbw=250e3)
for f in (1e6, 2e6, 10e6, 25e6):
    print(f"{f / 1e6:4.0f} MHz: simulated {10 * np.log10(est.at(f)):+.2f} dB, "
          f"model {variance_to_db(squeezed_variances(p, f)[0]):+.2f} dB")

# Then the full measurement chain with the 48 m interferometers.
mz = MzConfig()
res = oracle_run(p, mz, mz, seed=0)
vx, vy = squeezed_variances(p, 2e6)
print(f"X-: oracle {res.vx_minus_db:+.3f} dB, analytic {variance_to_db(vx):+.3f} dB")
print(f"Y+: oracle {res.vy_plus_db:+.3f} dB, analytic {variance_to_db(vy):+.3f} dB")
print(f"QNL channel {res.qnl_db:+.3f} dB")
