"""
Analytical-versus-simulation cross-checks.

Each ``check_*`` function runs one acceptance criterion and returns a list of
:class:`CheckResult`; :func:`run_all` strings them together. Trial counts are
parameters so the same checks run at full scale in the test-suite and at a
reduced scale from the command line. Binomial tolerances are computed from
the trial count actually used.
"""

import math
import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import fbl, ibl, mc, specfun
from .channel import ChannelModel, db_to_linear, snr_cdf, snr_pdf

__all__ = ["CheckResult", "TABLE1", "pdf_cdf_consistency", "run_all"] + [
    f"check_{n}" for n in (
        "ibl_distribution", "fbl_distribution", "moments", "antenna_trend",
        "violation", "approx_tightness", "threshold_constant", "collapse_reduction")
]

# default link of the reference experiments
TABLE1 = dict(snr_db=10.0, antennas=8, ibl_bits=1000.0, fbl_bits=200.0,
              bandwidth=2e5, bler=1e-7, trials=1_000_000, violation_trials=10_000_000)


@dataclass
class CheckResult:
    criterion: str
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: dict = field(default_factory=dict)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.criterion:<3} {self.name}: measured={self.measured:.6g} tol={self.tolerance:.6g}"

    def to_dict(self):
        d = asdict(self)
        d["passed"] = bool(self.passed)
        d["measured"] = _clean(self.measured)
        d["tolerance"] = _clean(self.tolerance)
        d["detail"] = {k: _clean(v) for k, v in self.detail.items()}
        return d


def _clean(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_clean(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return v


def _model(snr_db, n):
    return ChannelModel(n, db_to_linear(snr_db))


def _quantile_points(d, k=20):
    return d.quantile((np.arange(k) + 0.5) / k)


def _worst(diff, tol):
    ratio = np.abs(diff) / tol
    i = int(np.argmax(ratio))
    return float(np.abs(diff)[i]), float(np.asarray(tol)[i]), bool(np.all(ratio <= 1.0))


# --------------------------------------------------------------------------
# 1. IBL delay distribution
# --------------------------------------------------------------------------

def check_ibl_distribution(trials=TABLE1["trials"], seed=0):
    out = []
    link = ibl.LinkConfig(TABLE1["ibl_bits"], TABLE1["bandwidth"])
    configs = [(TABLE1["antennas"], TABLE1["snr_db"]), (1, 0.0), (1, 10.0), (1, 20.0)]
    for j, (n, snr_db) in enumerate(configs):
        m = _model(snr_db, n)
        t0 = time.perf_counter()
        d = mc.simulate_ibl(m, link, mc.McConfig(trials, seed + j))
        t = _quantile_points(d)
        f = ibl.delay_cdf(m, link, t)
        tol = 3.0 * mc.binomial_sigma(f, trials) + 1e-4
        worst, wtol, ok = _worst(f - d.ecdf(t), tol)
        runtime_ok = time.perf_counter() - t0 < 30.0
        out.append(CheckResult("1", f"IBL delay CDF vs MC (N={n}, rho={snr_db:g} dB)", ok and runtime_ok,
                               worst, wtol, {"points": len(t), "runtime_ok": runtime_ok}))
    return out


# --------------------------------------------------------------------------
# 2. FBL delay distribution
# --------------------------------------------------------------------------

def check_fbl_distribution(trials=TABLE1["trials"], seed=0, series=fbl.SeriesParams(20)):
    m = _model(TABLE1["snr_db"], TABLE1["antennas"])
    c = fbl.FblConfig(TABLE1["fbl_bits"], TABLE1["bandwidth"], TABLE1["bler"])
    d = mc.simulate_fbl(m, c, mc.McConfig(trials, seed))
    t = _quantile_points(d)
    f5 = fbl.fbl_delay_cdf(m, c, series, t)
    f6 = fbl.fbl_delay_cdf_highsnr(m, c, t)
    tol = np.maximum(3.0 * mc.binomial_sigma(f5, trials), 0.01)
    worst, wtol, ok = _worst(f5 - d.ecdf(t), tol)
    gap = float(np.max(np.abs(f6 - f5)))
    return [
        CheckResult("2", "FBL Lambert-W delay CDF vs MC of exact blocklength delay", ok, worst, wtol,
                    {"points": len(t)}),
        CheckResult("2", "FBL high-SNR CDF vs Lambert-W CDF", gap <= 0.02, gap, 0.02),
    ]


# --------------------------------------------------------------------------
# 3. moments versus SNR
# --------------------------------------------------------------------------

def _strictly_decreasing(v):
    v = np.asarray(v, dtype=float)
    return bool(np.all(np.diff(v) < 0))


def check_moments(trials=TABLE1["trials"], seed=0, snr_db=(5.0, 10.0, 15.0, 20.0)):
    n = TABLE1["antennas"]
    link = ibl.LinkConfig(TABLE1["ibl_bits"], TABLE1["bandwidth"])
    fc = fbl.FblConfig(TABLE1["fbl_bits"], TABLE1["bandwidth"], TABLE1["bler"])
    cols = {k: [] for k in ("t1_mean", "t1_jit", "t2_mean", "t2_jit", "t3_mean", "t3_jit",
                            "mc_ibl_mean", "mc_ibl_jit", "mc_fbl_mean", "mc_fbl_jit")}
    for j, s in enumerate(snr_db):
        m = _model(s, n)
        rm1 = ibl.rate_moments_exact(m)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", specfun.DomainWarning)
            rm2 = ibl.rate_moments_highsnr(m)
        r1 = ibl.delay_moments(m, link, rm1, "theorem1")
        r2 = ibl.delay_moments(m, link, rm2, "theorem2")
        r3 = fbl.fbl_delay_moments(m, fc, rm1)
        cfg = mc.McConfig(trials, seed + 100 + j)
        e_ibl = mc.empirical_moments(mc.simulate_ibl(m, link, cfg))
        e_fbl = mc.empirical_moments(mc.simulate_fbl(m, fc, cfg))
        for key, val in (("t1_mean", r1.mean_delay), ("t1_jit", r1.jitter), ("t2_mean", r2.mean_delay),
                         ("t2_jit", r2.jitter), ("t3_mean", r3.mean_delay), ("t3_jit", r3.jitter),
                         ("mc_ibl_mean", e_ibl.mean), ("mc_ibl_jit", e_ibl.variance),
                         ("mc_fbl_mean", e_fbl.mean), ("mc_fbl_jit", e_fbl.variance)):
            cols[key].append(val)
    c = {k: np.array(v) for k, v in cols.items()}
    out = []
    specs = [
        ("Theorem 1 mean delay vs MC", c["t1_mean"], c["mc_ibl_mean"], 0.05),
        ("Theorem 2 mean delay vs MC", c["t2_mean"], c["mc_ibl_mean"], 0.05),
        ("Theorem 1 jitter vs MC", c["t1_jit"], c["mc_ibl_jit"], 0.25),
        ("Theorem 2 jitter vs MC", c["t2_jit"], c["mc_ibl_jit"], 0.25),
        ("Theorem 3 mean delay vs MC (FBL)", c["t3_mean"], c["mc_fbl_mean"], 0.15),
        ("Theorem 3 jitter vs MC (FBL)", c["t3_jit"], c["mc_fbl_jit"], 0.35),
    ]
    for name, approx, ref, tol in specs:
        rel = approx / ref - 1.0
        i = int(np.argmax(np.abs(rel)))
        out.append(CheckResult("3", name, bool(np.all(np.abs(rel) <= tol)), float(abs(rel[i])), tol,
                               {"snr_db": list(snr_db), "rel_err": rel.tolist(),
                                "worst_snr_db": snr_db[i]}))
    dec = {k: _strictly_decreasing(v) for k, v in c.items()}
    out.append(CheckResult("3", "all mean/jitter columns strictly decreasing in SNR", all(dec.values()),
                           float(sum(not v for v in dec.values())), 0.0, dec))
    return out


# --------------------------------------------------------------------------
# 4. antenna trend
# --------------------------------------------------------------------------

def check_antenna_trend(trials=TABLE1["trials"], seed=0):
    link = ibl.LinkConfig(TABLE1["ibl_bits"], TABLE1["bandwidth"])
    fc = fbl.FblConfig(TABLE1["fbl_bits"], TABLE1["bandwidth"], TABLE1["bler"])
    out = []
    for regime in ("ibl", "fbl"):
        jit = {}
        for n in (2, 8, 16, 32):
            m = _model(TABLE1["snr_db"], n)
            cfg = mc.McConfig(trials, seed + 200 + n)
            d = mc.simulate_ibl(m, link, cfg) if regime == "ibl" else mc.simulate_fbl(m, fc, cfg)
            jit[n] = mc.empirical_moments(d).variance
        drop = jit[2] / jit[8]
        change = abs(jit[32] - jit[16]) / jit[16]
        detail = {f"jitter_N{n}": v for n, v in jit.items()}
        out.append(CheckResult("4", f"MC jitter N=2 over N=8 ({regime.upper()})", drop >= 2.0, drop, 2.0, detail))
        out.append(CheckResult("4", f"MC jitter change N=16 to N=32 ({regime.upper()})", change < 0.10,
                               change, 0.10, detail))
    return out


# --------------------------------------------------------------------------
# 5. violation probability
# --------------------------------------------------------------------------

def _ci_excess(est, p):
    """Distance of ``p`` from the estimate in units of the CI half-width on that side."""
    worst = 0.0
    for e, v in zip(est, p):
        half = e.ci_high - e.p if v >= e.p else e.p - e.ci_low
        dist = abs(v - e.p)
        worst = max(worst, dist / half if half > 0 else (math.inf if dist > 0 else 0.0))
    return worst


def _tau_grid(d, k=10):
    lo, hi = d.quantile([0.5, 0.9999])
    return np.linspace(lo, hi, k)


def check_violation(trials=TABLE1["violation_trials"], seed=0):
    m = _model(TABLE1["snr_db"], TABLE1["antennas"])
    link = ibl.LinkConfig(TABLE1["ibl_bits"], TABLE1["bandwidth"])
    fc = fbl.FblConfig(TABLE1["fbl_bits"], TABLE1["bandwidth"], TABLE1["bler"])
    cfg = mc.McConfig(trials, seed + 300)
    out = []

    d_ibl = mc.simulate_ibl(m, link, cfg)
    taus = _tau_grid(d_ibl)
    pv = ibl.delay_violation(m, link, taus)
    est = [mc.empirical_violation(d_ibl, t) for t in taus]
    covered = [e.covers(p) for e, p in zip(est, pv)]
    dev = _ci_excess(est, pv)
    out.append(CheckResult("5", "IBL violation closed form inside MC 95% Wilson CI", all(covered), dev, 1.0,
                           {"tau_ms": (taus * 1e3).tolist(), "closed_form": pv.tolist(),
                            "mc": [e.p for e in est], "covered": covered}))

    d_fbl = mc.simulate_fbl(m, fc, cfg)
    taus_f = _tau_grid(d_fbl)
    pvf = fbl.fbl_delay_violation(m, fc, taus_f)
    estf = [mc.empirical_violation(d_fbl, t) for t in taus_f]
    coveredf = [e.covers(p) for e, p in zip(estf, pvf)]
    devf = _ci_excess(estf, pvf)
    out.append(CheckResult("5", "FBL high-SNR violation closed form inside MC 95% Wilson CI", all(coveredf),
                           devf, 1.0, {"tau_ms": (taus_f * 1e3).tolist(), "closed_form": pvf.tolist(),
                                       "mc": [e.p for e in estf], "covered": coveredf}))

    # same payload on both sides so the comparison isolates the coding regime
    link_same = ibl.LinkConfig(TABLE1["fbl_bits"], TABLE1["bandwidth"])
    pv_ibl_same = ibl.delay_violation(m, link_same, taus_f)
    d_same = mc.simulate_ibl(m, link_same, cfg)
    mc_ibl_same = np.array([mc.empirical_violation(d_same, t).p for t in taus_f])
    mc_fbl = np.array([e.p for e in estf])
    dom = bool(np.all(pvf >= pv_ibl_same) and np.all(mc_fbl >= mc_ibl_same))
    out.append(CheckResult("5", "FBL violation >= IBL violation at equal payload", dom,
                           float(np.min(pvf - pv_ibl_same)), 0.0))

    mono_tau = _strictly_decreasing(pv) and _strictly_decreasing(pvf)
    out.append(CheckResult("5", "violation decreasing in tau_th", mono_tau, float(mono_tau), 1.0))

    antennas = [1, 2, 4, 8, 16, 32]
    rows_i, rows_f = [], []
    for n in antennas:
        mn = _model(TABLE1["snr_db"], n)
        rows_i.append(ibl.delay_violation(mn, link, taus[:3]))
        rows_f.append(fbl.fbl_delay_violation(mn, fc, taus_f[:3]))
    rows_i, rows_f = np.array(rows_i), np.array(rows_f)
    mono_n = bool(np.all(np.diff(rows_i, axis=0) < 0) and np.all(np.diff(rows_f, axis=0) < 0))
    out.append(CheckResult("5", "violation decreasing in N", mono_n, float(mono_n), 1.0,
                           {"antennas": antennas, "ibl": rows_i.tolist(), "fbl": rows_f.tolist()}))
    return out


# --------------------------------------------------------------------------
# 6. approximation tightness
# --------------------------------------------------------------------------

def check_approx_tightness():
    out = []
    b = 1000.0
    t = np.linspace(0.1, 10.0, 2001)
    err = np.abs(ibl.log_surrogate(t, b) - np.log(t))
    bound = np.log(t) ** 2 / (2.0 * b) * 1.1
    ratio = np.max(np.where(bound > 0, err / np.where(bound > 0, bound, 1.0), 0.0))
    out.append(CheckResult("6", "log surrogate error within 1.1 (ln t)^2/(2b), b=1000", bool(np.all(err <= bound)),
                           float(ratio), 1.0))

    x = np.linspace(3.0, 1000.0, 5000)
    gap = np.abs(np.sqrt(1.0 - 1.0 / (1.0 + x) ** 2) - (1.0 - 1.0 / (2.0 * (1.0 + x) ** 2)))
    out.append(CheckResult("6", "dispersion binomial approximation gap for x >= 3", bool(np.all(gap < 0.01)),
                           float(gap.max()), 0.01))

    c = fbl.FblConfig(200.0, TABLE1["bandwidth"], 1e-7)
    g = db_to_linear(np.linspace(5.0, 30.0, 251))
    exact = fbl.exact_delay_sample(g, c)
    hs = fbl.delay_highsnr(g, c)
    up = fbl.delay_upper(g, c)
    order = bool(np.all(exact <= hs) and np.all(hs <= up))
    out.append(CheckResult("6", "exact <= high-SNR <= upper bound on 5..30 dB", order,
                           float(np.max(np.maximum(exact - hs, hs - up))), 0.0))
    g10 = db_to_linear(10.0)
    tight = float(fbl.delay_upper(g10, c) / fbl.exact_delay_sample(g10, c) - 1.0)
    out.append(CheckResult("6", "upper bound within 10% of exact at 10 dB", 0.0 <= tight < 0.10, tight, 0.10))
    return out


# --------------------------------------------------------------------------
# 7. validity constant
# --------------------------------------------------------------------------

def check_threshold_constant():
    v = fbl.approx_validity_snr(fbl.FblConfig(100.0, 1.0, 1e-9))
    return [CheckResult("7", "validity SNR at eps=1e-9, L=100 equals 0.14 +- 0.01", abs(v - 0.14) <= 0.01,
                        v, 0.01, {"target": 0.14})]


# --------------------------------------------------------------------------
# 8. collapse and reduction
# --------------------------------------------------------------------------

def _rel_gap(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b) / scale))


def pdf_cdf_consistency(pdf, cdf, grid, rel_tol=1e-5, name="pdf vs dCDF", criterion="8"):
    """Compare ``pdf`` with a central difference of ``cdf`` on ``grid``."""
    grid = np.asarray(grid, dtype=float)
    h = grid * 1e-5
    num = (np.asarray(cdf(grid + h)) - np.asarray(cdf(grid - h))) / (2.0 * h)
    ana = np.asarray(pdf(grid))
    rel = np.abs(ana - num) / np.maximum(np.abs(num), 1e-300)
    return CheckResult(criterion, name, bool(np.all(rel <= rel_tol)), float(rel.max()), rel_tol)


def _interior(lo, hi, k=40):
    return np.geomspace(lo, hi, k)


def check_collapse_reduction():
    out = []
    m = _model(TABLE1["snr_db"], TABLE1["antennas"])
    s = fbl.SeriesParams(20)
    bw = TABLE1["bandwidth"]
    L = TABLE1["fbl_bits"]
    half = fbl.FblConfig(L, bw, 0.5)
    link = ibl.LinkConfig(L, bw)
    t = np.geomspace(1e-4, 2e-2, 60)
    g = np.geomspace(0.05, 1e3, 60)
    rm = ibl.rate_moments_exact(m)
    ibl_mom = ibl.delay_moments(m, link, rm, "theorem2")
    fbl_mom = fbl.fbl_delay_moments(m, half, rm)
    collapse = {
        "cdf": _rel_gap(fbl.fbl_delay_cdf(m, half, s, t), ibl.delay_cdf(m, link, t)),
        "pdf": _rel_gap(fbl.fbl_delay_pdf(m, half, s, t), ibl.delay_pdf(m, link, t)),
        "cdf_highsnr": _rel_gap(fbl.fbl_delay_cdf_highsnr(m, half, t), ibl.delay_cdf(m, link, t)),
        "pdf_highsnr": _rel_gap(fbl.fbl_delay_pdf_highsnr(m, half, t), ibl.delay_pdf(m, link, t)),
        "violation": _rel_gap(fbl.fbl_delay_violation(m, half, t), ibl.delay_violation(m, link, t)),
        "exact_delay": _rel_gap(fbl.exact_delay_sample(g, half), ibl.delay_sample(g, link)),
        "delay_highsnr": _rel_gap(fbl.delay_highsnr(g, half), ibl.delay_sample(g, link)),
        "delay_approx_terms": _rel_gap(fbl.delay_approx_terms(g, half), ibl.delay_sample(g, link)),
        "moments_mean": _rel_gap(fbl_mom.mean_delay, ibl_mom.mean_delay),
        "moments_jitter": _rel_gap(fbl_mom.jitter, ibl_mom.jitter),
    }
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", specfun.DomainWarning)
        collapse["delay_upper"] = _rel_gap(fbl.delay_upper(g, half), ibl.delay_sample(g, link))
    worst = max(collapse.values())
    out.append(CheckResult("8", "FBL at eps=0.5 equals IBL", worst <= 1e-10, worst, 1e-10, collapse))

    # single-antenna closed forms written out directly
    red = {}
    for rho in (1.0, 10.0, 100.0):
        m1 = ChannelModel(1, rho)
        x = np.linspace(0.0, 20.0 * rho, 81)
        y = np.linspace(0.0, 12.0, 81)
        tt = np.geomspace(1e-4, 1e-1, 81)
        a = 2.0 ** (link.bits_per_hz / tt) - 1.0
        red[f"snr_cdf_{rho:g}"] = _rel_gap(snr_cdf(m1, x), -np.expm1(-x / rho))
        red[f"snr_pdf_{rho:g}"] = _rel_gap(snr_pdf(m1, x), np.exp(-x / rho) / rho)
        red[f"rate_cdf_{rho:g}"] = _rel_gap(ibl.rate_cdf(m1, y), -np.expm1(-(2.0 ** y - 1.0) / rho))
        red[f"rate_pdf_{rho:g}"] = _rel_gap(ibl.rate_pdf(m1, y),
                                            math.log(2) / rho * 2.0 ** y * np.exp(-(2.0 ** y - 1.0) / rho))
        red[f"delay_cdf_{rho:g}"] = _rel_gap(ibl.delay_cdf(m1, link, tt), np.exp(-a / rho))
        red[f"delay_pdf_{rho:g}"] = _rel_gap(
            ibl.delay_pdf(m1, link, tt),
            link.bits_per_hz * math.log(2) / rho / tt ** 2 * (a + 1.0) * np.exp(-a / rho))
        fc = fbl.FblConfig(L, bw, 1e-7)
        ut = fbl.u_of_t(fc, s, tt)
        eu = np.exp(ut.u_value)
        red[f"fbl_cdf_{rho:g}"] = _rel_gap(fbl.fbl_delay_cdf(m1, fc, s, tt), np.exp(-(eu - 1.0) / rho))
        red[f"fbl_pdf_{rho:g}"] = _rel_gap(fbl.fbl_delay_pdf(m1, fc, s, tt),
                                           -ut.u_derivative / rho * eu * np.exp(-(eu - 1.0) / rho))
    worst = max(red.values())
    out.append(CheckResult("8", "N=1 formulas equal single-antenna forms", worst <= 1e-12, worst, 1e-12, red))

    fc = fbl.FblConfig(L, bw, TABLE1["bler"])
    big = ibl.LinkConfig(TABLE1["ibl_bits"], bw)
    for n in (1, 8):
        mn = _model(TABLE1["snr_db"], n)
        rho = mn.avg_snr
        out.append(pdf_cdf_consistency(lambda x: snr_pdf(mn, x), lambda x: snr_cdf(mn, x),
                                       np.linspace(0.05 * rho, 3.0 * rho, 30), name=f"SNR pdf (N={n})"))
        ylo, yhi = (0.2, 7.0) if n == 1 else (1.5, 5.0)
        out.append(pdf_cdf_consistency(lambda y: ibl.rate_pdf(mn, y), lambda y: ibl.rate_cdf(mn, y),
                                       np.linspace(ylo, yhi, 30), name=f"rate pdf (N={n})"))
        lo, hi = (6e-4, 2e-2) if n == 1 else (9e-4, 3e-3)
        out.append(pdf_cdf_consistency(lambda x: ibl.delay_pdf(mn, big, x), lambda x: ibl.delay_cdf(mn, big, x),
                                       _interior(lo, hi), name=f"IBL delay pdf (N={n})"))
        lo, hi = (1.5e-4, 5e-3) if n == 1 else (2.5e-4, 7e-4)
        out.append(pdf_cdf_consistency(lambda x: fbl.fbl_delay_pdf(mn, fc, s, x),
                                       lambda x: fbl.fbl_delay_cdf(mn, fc, s, x),
                                       _interior(lo, hi), name=f"FBL Lambert-W delay pdf (N={n})"))
        out.append(pdf_cdf_consistency(lambda x: fbl.fbl_delay_pdf_highsnr(mn, fc, x),
                                       lambda x: fbl.fbl_delay_cdf_highsnr(mn, fc, x),
                                       _interior(lo, hi), name=f"FBL high-SNR delay pdf (N={n})"))

    out.extend(_specfun_residuals())
    return out


def _specfun_residuals():
    rng = np.random.default_rng(12345)
    s = rng.uniform(1e-3, 64.0, 4000)
    x = rng.uniform(0.0, 200.0, 4000)
    lg = np.array([math.gamma(v) for v in s])
    comp = np.max(np.abs(specfun.lower_inc_gamma(s, x) + specfun.upper_inc_gamma(s, x) - lg) / lg)
    res = [CheckResult("8", "incomplete gamma complement identity", comp <= 1e-12, float(comp), 1e-12)]

    # outside this range Q rounds to 1 or underflows, so ties are unavoidable
    xq = np.sort(rng.uniform(-5.0, 37.0, 2000))
    q = specfun.gaussian_q(xq)
    res.append(CheckResult("8", "Q strictly decreasing", bool(np.all(np.diff(q) < 0)), float(np.max(np.diff(q))), 0.0))

    tol = specfun.DEFAULT_TOL.rel_tol
    xw = np.concatenate([[-math.exp(-1) + 1e-9], np.linspace(-math.exp(-1) + 1e-9, 0.0, 500),
                         np.geomspace(1e-12, 1e6, 500)])
    w = specfun.lambert_w0(xw)
    resid = np.abs(w * np.exp(w) - xw) / np.maximum(np.abs(xw), 1e-300)
    res.append(CheckResult("8", "Lambert W residual", bool(np.all(resid <= tol)), float(resid.max()), tol))

    xs = np.linspace(-0.18, 0.18, 181)
    agree = np.max(np.abs(specfun.lambert_w0_series(xs, 30) - specfun.lambert_w0(xs)))
    res.append(CheckResult("8", "Lambert W series vs iteration on |x| <= 0.18", agree <= 1e-8, float(agree), 1e-8))
    return res


# --------------------------------------------------------------------------

def run_all(trials=100_000, violation_trials=None, seed=0):
    """Every check; ``violation_trials`` defaults to ``trials``."""
    vt = trials if violation_trials is None else violation_trials
    results = []
    results += check_ibl_distribution(trials, seed)
    results += check_fbl_distribution(trials, seed)
    results += check_moments(trials, seed)
    results += check_antenna_trend(trials, seed)
    results += check_violation(vt, seed)
    results += check_approx_tightness()
    results += check_threshold_constant()
    results += check_collapse_reduction()
    return results
