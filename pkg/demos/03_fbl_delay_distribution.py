"""
Transmission delay with finite blocklength coding.

At a target error probability eps the achievable rate carries a dispersion
penalty, so the delay is longer than with ideal coding. Two closed-form
laws are compared with a simulation of the exact minimum blocklength: the
Lambert-W series law and the simpler high-SNR law.
"""

import numpy as np

from txdelay import fbl, mc
from txdelay.channel import ChannelModel

m = ChannelModel(8, 10.0)
c = fbl.FblConfig(200.0, 2e5, 1e-7)
s = fbl.SeriesParams(20)
d = mc.simulate_fbl(m, c, mc.McConfig(10 ** 6, seed=11))

print(f"high-SNR law is meant for SNR above {fbl.approx_validity_snr(c):.3g}")
print("delay (ms)   Lambert-W CDF   high-SNR CDF   empirical CDF")
for t in d.quantile(np.linspace(0.05, 0.95, 10)):
    a = float(fbl.fbl_delay_cdf(m, c, s, t))
    b = float(fbl.fbl_delay_cdf_highsnr(m, c, t))
    print(f"{t * 1e3:9.4f}   {a:13.5f}   {b:12.5f}   {d.ecdf(t):13.5f}")

g = np.array([2.0, 10.0, 100.0])
print("\nexact blocklength vs its upper bound (channel uses):")
for gi, n, u in zip(g, fbl.min_blocklength(g, c), fbl.delay_upper(g, c) * c.bandwidth):
    print(f"  gamma={gi:6.1f}  n*={float(n):9.2f}  bound={float(u):9.2f}")
