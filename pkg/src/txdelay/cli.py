"""
Command-line front end.

Each subcommand evaluates the analytical laws on a grid, pairs them with a
seeded Monte Carlo run and writes one table as CSV or JSON::

    python3 -m txdelay dist --regime fbl --antennas 4
    python3 -m txdelay moments --sweep snr --format json --out fig.json
    python3 -m txdelay violation --sweep tau --bler 1e-5
    python3 -m txdelay approx-report
    python3 -m txdelay validate --seed 42

Delays are written in milliseconds, jitter in ms^2; internal math is in
seconds. Average SNR is given in dB on the command line and converted to
linear exactly once, when the run specification is built. Exit status is 0
on success, 1 when ``validate`` finds a failing check and 2 on bad input.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.stats import gamma as gamma_dist

from . import fbl, ibl, mc, validation
from .channel import ChannelModel, db_to_linear, linear_to_db

SEED_ENV = "TXDELAY_SEED"
MS = 1e3

# Table I defaults
DEFAULTS = dict(snr_db=10.0, antennas=8, ibl_bits=1000.0, fbl_bits=200.0, bandwidth=2e5,
                bler=1e-7, log_b=1000.0, lambert_terms=20, trials=1_000_000, validate_trials=100_000)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunSpec:
    regime: str
    model: ChannelModel
    link: object
    approx: ibl.IblApproxParams
    series: fbl.SeriesParams
    mc: mc.McConfig
    grid: np.ndarray
    output_format: str = "csv"
    # (start, stop, points) overrides; None keeps the command default
    grid_request: tuple = (None, None, None)

    def to_dict(self):
        return {
            "regime": self.regime,
            "antennas": self.model.antennas,
            "avg_snr_db": float(linear_to_db(self.model.avg_snr)),
            "link": asdict(self.link),
            "log_b": self.approx.log_b,
            "lambert_terms": self.series.lambert_terms,
            "trials": self.mc.trials,
            "seed": self.mc.seed,
            "grid": [float(v) for v in self.grid],
        }


# --------------------------------------------------------------------------
# argument handling
# --------------------------------------------------------------------------

def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


def _add_common(p, trials_default):
    p.add_argument("--regime", choices=("ibl", "fbl"), default="ibl")
    p.add_argument("--snr-db", type=float, default=DEFAULTS["snr_db"], help="average SNR (dB)")
    p.add_argument("--antennas", type=int, default=DEFAULTS["antennas"])
    p.add_argument("--bits", type=float, default=None, help="payload L; 1000 for ibl, 200 for fbl")
    p.add_argument("--bandwidth-hz", type=float, default=DEFAULTS["bandwidth"])
    p.add_argument("--bler", type=float, default=DEFAULTS["bler"], help="target block error rate (fbl)")
    p.add_argument("--log-b", type=float, default=DEFAULTS["log_b"], help="surrogate parameter b")
    p.add_argument("--lambert-terms", type=int, default=DEFAULTS["lambert_terms"])
    p.add_argument("--trials", type=int, default=trials_default)
    p.add_argument("--seed", type=int, default=None, help=f"default 0 or ${SEED_ENV}")
    p.add_argument("--streams", type=int, default=1, help="MC worker threads (output unchanged)")
    p.add_argument("--grid-start", type=float, default=None)
    p.add_argument("--grid-stop", type=float, default=None)
    p.add_argument("--grid-points", type=int, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output file (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="txdelay", description="Transmission delay analytics for Rayleigh links.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="delay CDF/PDF, closed form vs Monte Carlo (grid in ms)")
    _add_common(p, DEFAULTS["trials"])

    p = sub.add_parser("moments", help="mean delay and jitter")
    _add_common(p, DEFAULTS["trials"])
    p.add_argument("--sweep", choices=("snr", "antennas"), default=None)

    p = sub.add_parser("violation", help="delay violation probability")
    _add_common(p, DEFAULTS["trials"])
    p.add_argument("--sweep", choices=("tau", "antennas"), default=None)
    p.add_argument("--tau-ms", type=float, default=None, help="threshold for single-point and antenna runs")

    p = sub.add_parser("approx-report", help="tightness of the analytical approximations")
    _add_common(p, DEFAULTS["trials"])
    p.add_argument("--part", choices=("all", "surrogate", "dispersion", "delay"), default="all")

    p = sub.add_parser("validate", help="run the analytical-vs-simulation cross-check suite")
    _add_common(p, DEFAULTS["validate_trials"])
    p.add_argument("--violation-trials", type=int, default=None)
    return parser


def _grid(spec, start, stop, points, integer=False):
    ga, gb, gk = spec.grid_request
    a = start if ga is None else ga
    b = stop if gb is None else gb
    k = points if gk is None else gk
    if k < 1:
        raise UsageError("--grid-points must be >= 1")
    g = np.linspace(a, b, k) if k > 1 else np.array([float(a)])
    if integer:
        g = np.unique(np.round(g)).astype(float)
    if not np.all(np.isfinite(g)) or np.any(np.diff(g) <= 0):
        raise UsageError("grid must be finite and strictly increasing")
    return g


def build_spec(args) -> RunSpec:
    """Validate flags and convert dB inputs to linear once."""
    seed = _default_seed() if args.seed is None else args.seed
    bits = args.bits
    if bits is None:
        bits = DEFAULTS["ibl_bits"] if args.regime == "ibl" else DEFAULTS["fbl_bits"]
    model = ChannelModel(args.antennas, db_to_linear(args.snr_db))
    if args.regime == "ibl":
        link = ibl.LinkConfig(bits, args.bandwidth_hz)
    else:
        link = fbl.FblConfig(bits, args.bandwidth_hz, args.bler)
    approx = ibl.IblApproxParams(args.log_b)
    series = fbl.SeriesParams(args.lambert_terms)
    mcc = mc.McConfig(args.trials, seed, args.streams)
    return RunSpec(args.regime, model, link, approx, series, mcc, np.array([]), args.format,
                   (args.grid_start, args.grid_stop, args.grid_points))


def _with_grid(spec, grid):
    return replace(spec, grid=grid)


def _delay_at_snr(spec, model, gamma):
    if spec.regime == "ibl":
        return ibl.delay_sample(gamma, spec.link)
    return fbl.exact_delay_sample(gamma, spec.link)


def _delay_quantile(spec, model, p):
    """Delay whose CDF is ``p``, via the SNR quantile ``1 - p``."""
    g = gamma_dist.ppf(1.0 - np.asarray(p, dtype=float), model.antennas, scale=model.avg_snr / model.antennas)
    return _delay_at_snr(spec, model, g)


def _simulate(spec, model):
    if spec.regime == "ibl":
        return mc.simulate_ibl(model, spec.link, spec.mc)
    return mc.simulate_fbl(model, spec.link, spec.mc)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_dist(spec: RunSpec):
    m = spec.model
    lo, hi = _delay_quantile(spec, m, [1e-3, 0.999]) * MS
    spec = _with_grid(spec, _grid(spec, lo, hi, 50))
    t = spec.grid / MS
    d = _simulate(spec, m)
    mid = 0.5 * (t[1:] + t[:-1])
    edges = np.concatenate([[t[0] - (mid[0] - t[0]) if len(t) > 1 else t[0] * 0.99], mid,
                            [t[-1] + (t[-1] - mid[-1]) if len(t) > 1 else t[0] * 1.01]])
    edges[0] = max(edges[0], 0.0)
    hist = d.histogram(edges) / MS
    mc_cdf = d.ecdf(t)

    if spec.regime == "ibl":
        cols = {"cdf": ibl.delay_cdf(m, spec.link, t), "pdf_per_ms": ibl.delay_pdf(m, spec.link, t) / MS}
        prov = ["closed-form", "closed-form"]
    else:
        c = spec.link
        cols = {
            "cdf_lambert": fbl.fbl_delay_cdf(m, c, spec.series, t),
            "pdf_lambert_per_ms": fbl.fbl_delay_pdf(m, c, spec.series, t) / MS,
            "cdf_highsnr": fbl.fbl_delay_cdf_highsnr(m, c, t),
            "pdf_highsnr_per_ms": fbl.fbl_delay_pdf_highsnr(m, c, t) / MS,
        }
        prov = ["closed-form", "closed-form", "approx", "approx"]
    cols["mc_ecdf"] = mc_cdf
    cols["mc_pdf_per_ms"] = hist
    prov += ["mc", "mc"]
    header = ["delay_ms"] + list(cols) + ["provenance"]
    rows = [[spec.grid[i]] + [cols[k][i] for k in cols] + [";".join(prov)] for i in range(len(t))]
    diag = {"mc_n_infinite": d.n_infinite, "moment_order_1_finite": ibl.delay_moment_finite(m, 1)}
    return spec, header, rows, diag


def _moment_row(spec, m):
    out = []
    prov = []
    if spec.regime == "ibl":
        rm1 = ibl.rate_moments_exact(m, spec.approx)
        rm2 = ibl.rate_moments_highsnr(m)
        r1 = ibl.delay_moments(m, spec.link, rm1, "theorem1")
        r2 = ibl.delay_moments(m, spec.link, rm2, "theorem2")
        q_mean, q_var = ibl.delay_moments_quadrature(m, spec.link)
        out += [r1.mean_delay * MS, r1.jitter * MS ** 2, r2.mean_delay * MS, r2.jitter * MS ** 2,
                q_mean * MS, q_var * MS ** 2]
        prov += ["approx"] * 4 + ["closed-form"] * 2
    else:
        rm1 = ibl.rate_moments_exact(m, spec.approx)
        r3 = fbl.fbl_delay_moments(m, spec.link, rm1)
        out += [r3.mean_delay * MS, r3.jitter * MS ** 2]
        prov += ["approx"] * 2
    e = mc.empirical_moments(_simulate(spec, m))
    out += [e.mean * MS, e.std_error_mean * MS, e.variance * MS ** 2, e.std_error_variance * MS ** 2,
            int(e.heavy_tail)]
    prov += ["mc"] * 5
    return out, prov


def cmd_moments(spec: RunSpec, sweep=None):
    if spec.regime == "ibl":
        names = ["theorem1_mean_ms", "theorem1_jitter_ms2", "theorem2_mean_ms", "theorem2_jitter_ms2",
                 "exact_mean_ms", "exact_jitter_ms2"]
    else:
        names = ["theorem3_mean_ms", "theorem3_jitter_ms2"]
    names += ["mc_mean_ms", "mc_mean_se_ms", "mc_jitter_ms2", "mc_jitter_se_ms2", "mc_heavy_tail"]
    if sweep == "snr":
        spec = _with_grid(spec, _grid(spec, 0.0, 30.0, 16))
        models = [ChannelModel(spec.model.antennas, db_to_linear(s)) for s in spec.grid]
        abscissa = "snr_db"
    elif sweep == "antennas":
        spec = _with_grid(spec, _grid(spec, 1, 32, 32, integer=True))
        models = [ChannelModel(int(n), spec.model.avg_snr) for n in spec.grid]
        abscissa = "antennas"
    else:
        spec = _with_grid(spec, np.array([float(linear_to_db(spec.model.avg_snr))]))
        models = [spec.model]
        abscissa = "snr_db"
    rows = []
    for x, m in zip(spec.grid, models):
        vals, prov = _moment_row(spec, m)
        x = int(x) if abscissa == "antennas" else x
        rows.append([x] + vals + [";".join(prov)])
    return spec, [abscissa] + names + ["provenance"], rows, {}


def _violation_closed_form(spec, m, tau):
    if spec.regime == "ibl":
        return ibl.delay_violation(m, spec.link, tau)
    return fbl.fbl_delay_violation(m, spec.link, tau)


def _violation_rows(spec, m, taus, d, abscissa_fn):
    pv = np.atleast_1d(_violation_closed_form(spec, m, taus))
    rows = []
    for i, t in enumerate(np.atleast_1d(taus)):
        e = mc.empirical_violation(d, t)
        row = [abscissa_fn(i, t), pv[i]]
        prov = ["closed-form" if spec.regime == "ibl" else "approx"]
        if spec.regime == "fbl":
            row.append(1.0 - fbl.fbl_delay_cdf(m, spec.link, spec.series, t))
            prov.append("closed-form")
        row += [e.p, e.ci_low, e.ci_high, e.exceed]
        prov += ["mc"] * 4
        rows.append(row + [";".join(prov)])
    return rows


def cmd_violation(spec: RunSpec, sweep=None, tau_ms=None):
    cols = ["pv"] + (["pv_lambert"] if spec.regime == "fbl" else []) + ["mc_pv", "mc_ci_low", "mc_ci_high",
                                                                         "mc_exceed"]
    m = spec.model
    if tau_ms is None:
        tau_ms = float(_delay_quantile(spec, m, 1.0 - 1e-3)) * MS
    if not (tau_ms > 0):
        raise UsageError("--tau-ms must be > 0")
    if sweep == "tau":
        lo, hi = _delay_quantile(spec, m, [0.5, 1.0 - 1e-6]) * MS
        spec = _with_grid(spec, _grid(spec, lo, hi, 25))
        d = _simulate(spec, m)
        rows = _violation_rows(spec, m, spec.grid / MS, d, lambda i, t: spec.grid[i])
        header = ["tau_ms"] + cols
    elif sweep == "antennas":
        spec = _with_grid(spec, _grid(spec, 1, 32, 32, integer=True))
        rows = []
        for n in spec.grid:
            mn = ChannelModel(int(n), m.avg_snr)
            rows += _violation_rows(spec, mn, tau_ms / MS, _simulate(spec, mn), lambda i, t, n=n: int(n))
        header = ["antennas"] + cols
    else:
        spec = _with_grid(spec, np.array([tau_ms]))
        rows = _violation_rows(spec, m, tau_ms / MS, _simulate(spec, m), lambda i, t: tau_ms)
        header = ["tau_ms"] + cols
    return spec, header + ["provenance"], rows, {"tau_ms": tau_ms}


def cmd_approx_report(spec: RunSpec, part="all"):
    """Long-format table: ``part, abscissa, series, value, provenance``."""
    rows = []
    if part in ("all", "surrogate"):
        t = np.geomspace(0.1, 10.0, 101)
        for x, v in zip(t, np.log(t)):
            rows.append(["surrogate", x, "ln_t", v, "closed-form"])
        for b in (10.0, 100.0, 1000.0):
            for x, v in zip(t, ibl.log_surrogate(t, b)):
                rows.append(["surrogate", x, f"surrogate_b{b:g}", v, "approx"])
            for x, v in zip(t, np.log(t) ** 2 / (2.0 * b)):
                rows.append(["surrogate", x, f"error_bound_b{b:g}", v, "approx"])
    if part in ("all", "dispersion"):
        xs = np.linspace(0.0, 20.0, 101)
        for x in xs:
            rows.append(["dispersion", x, "sqrt_exact", math.sqrt(1.0 - 1.0 / (1.0 + x) ** 2), "closed-form"])
            rows.append(["dispersion", x, "binomial_approx", 1.0 - 1.0 / (2.0 * (1.0 + x) ** 2), "approx"])
    if part in ("all", "delay"):
        c = spec.link if spec.regime == "fbl" else fbl.FblConfig(DEFAULTS["fbl_bits"], spec.link.bandwidth,
                                                                 DEFAULTS["bler"])
        g_db = _grid(spec, 5.0, 30.0, 26)
        spec = _with_grid(spec, g_db)
        g = db_to_linear(g_db)
        series = {
            "exact_ms": (fbl.exact_delay_sample(g, c), "closed-form"),
            "highsnr_ms": (fbl.delay_highsnr(g, c), "approx"),
            "three_term_ms": (fbl.delay_approx_terms(g, c), "approx"),
            "upper_ms": (fbl.delay_upper(g, c), "approx"),
        }
        for name, (vals, prov) in series.items():
            for x, v in zip(g_db, vals):
                rows.append(["delay", x, name, v * MS, prov])
    return spec, ["part", "abscissa", "series", "value", "provenance"], rows, {
        "abscissa_units": {"surrogate": "t", "dispersion": "x", "delay": "snr_db"}}


def cmd_validate(args):
    seed = _default_seed() if args.seed is None else args.seed
    results = validation.run_all(trials=args.trials, violation_trials=args.violation_trials, seed=seed)
    report = {
        "trials": args.trials,
        "violation_trials": args.trials if args.violation_trials is None else args.violation_trials,
        "seed": seed,
        "passed": all(r.passed for r in results),
        "n_checks": len(results),
        "n_failed": sum(not r.passed for r in results),
        "checks": [r.to_dict() for r in results],
    }
    for r in results:
        print(r.line(), file=sys.stderr)
    return report


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        raise ValueError("NaN reached the output layer")
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def _json_value(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_, int, np.integer)):
        return int(v)
    v = float(v)
    if math.isnan(v):
        raise ValueError("NaN reached the output layer")
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def render(spec_dict, header, rows, diagnostics, fmt):
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()
    doc = {
        "spec": spec_dict,
        "rows": [{h: _json_value(v) for h, v in zip(header, r)} for r in rows],
        "diagnostics": diagnostics,
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as f:
            f.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    caught = []
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if args.command == "validate":
                if args.violation_trials is not None:
                    mc.McConfig(args.violation_trials)
                mc.McConfig(args.trials)
                report = cmd_validate(args)
                _emit(json.dumps(report, indent=2) + "\n", args.out)
                return 0 if report["passed"] else 1
            spec = build_spec(args)
            if args.command == "dist":
                spec, header, rows, diag = cmd_dist(spec)
            elif args.command == "moments":
                spec, header, rows, diag = cmd_moments(spec, args.sweep)
            elif args.command == "violation":
                spec, header, rows, diag = cmd_violation(spec, args.sweep, args.tau_ms)
            else:
                spec, header, rows, diag = cmd_approx_report(spec, args.part)
    except (UsageError, ValueError) as exc:
        print(f"txdelay: error: {exc}", file=sys.stderr)
        return 2
    msgs = sorted({f"{w.category.__name__}: {w.message}" for w in caught})
    for msg in msgs:
        print(f"txdelay: warning: {msg}", file=sys.stderr)
    diag = dict(diag, warnings=msgs)
    try:
        text = render(spec.to_dict(), header, rows, diag, args.format)
    except ValueError as exc:
        print(f"txdelay: error: {exc}", file=sys.stderr)
        return 2
    _emit(text, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
