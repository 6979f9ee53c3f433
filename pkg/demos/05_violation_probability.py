"""
Delay violation probability.

P(tau > tau_th) is the quantity a latency budget is written against. For a
threshold at the empirical 99.9th percentile the closed forms are checked
against the exceedance frequency and its 95% Wilson interval, then the
effect of extra antennas is shown at a fixed threshold.
"""

from txdelay import fbl, ibl, mc
from txdelay.channel import ChannelModel

link = ibl.LinkConfig(200.0, 2e5)
cfg = fbl.FblConfig(200.0, 2e5, 1e-7)
m = ChannelModel(8, 10.0)
run = mc.McConfig(10 ** 6, seed=5)

for name, d, closed in (
    ("IBL", mc.simulate_ibl(m, link, run), lambda t: ibl.delay_violation(m, link, t)),
    ("FBL", mc.simulate_fbl(m, cfg, run), lambda t: fbl.fbl_delay_violation(m, cfg, t)),
):
    t = d.quantile(0.999)
    e = mc.empirical_violation(d, t)
    print(f"{name}: tau_th={t * 1e3:.4f} ms  closed={float(closed(t)):.3e}  "
          f"mc={e.p:.3e}  CI=[{e.ci_low:.3e}, {e.ci_high:.3e}]")

tau = 0.6e-3
print(f"\nFBL violation at tau_th={tau * 1e3} ms versus antennas:")
for n in (1, 2, 4, 8, 16, 32):
    print(f"  N={n:2d}  {float(fbl.fbl_delay_violation(ChannelModel(n, 10.0), cfg, tau)):.3e}")
