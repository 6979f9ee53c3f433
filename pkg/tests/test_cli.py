import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from txdelay import cli, fbl, ibl, validation
from txdelay.channel import ChannelModel


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = cli.main(list(argv) + ["--out", str(out)])
    return code, out


def table(path):
    rows = list(csv.reader(io.StringIO(path.read_text())))
    header, body = rows[0], rows[1:]
    cols = {h: [r[i] for r in body] for i, h in enumerate(header)}
    return header, cols


def num(col):
    return np.array([float(v) for v in col])


# ---------------------------------------------------------------- dist

def test_dist_defaults_cdf_matches_mc(tmp_path):
    code, out = run(tmp_path, "dist", "--trials", "200000")
    assert code == 0
    header, c = table(out)
    assert header[0] == "delay_ms" and header[-1] == "provenance"
    f, e = num(c["cdf"]), num(c["mc_ecdf"])
    assert np.all(np.abs(f - e) <= 3 * np.sqrt(f * (1 - f) / 2e5) + 1e-4 + 3 / 2e5)
    assert c["provenance"][0] == "closed-form;closed-form;mc;mc"


def test_dist_single_antenna(tmp_path):
    code, out = run(tmp_path, "dist", "--antennas", "1", "--trials", "20000")
    assert code == 0
    _, c = table(out)
    t = num(c["delay_ms"]) / 1e3
    ref = np.exp(-(2.0 ** (1000 / (2e5 * t)) - 1) / 10.0)
    assert np.allclose(num(c["cdf"]), ref, rtol=1e-12)


def test_dist_fbl_collapse_equals_ibl(tmp_path):
    grid = ["--grid-start", "0.5", "--grid-stop", "5", "--grid-points", "30", "--bits", "200", "--trials", "20000"]
    _, a = run(tmp_path, "dist", "--regime", "fbl", "--bler", "0.5", *grid, name="a")
    _, b = run(tmp_path, "dist", *grid, name="b")
    _, ca = table(a)
    _, cb = table(b)
    assert np.allclose(num(ca["cdf_lambert"]), num(cb["cdf"]), rtol=1e-10, atol=0)
    assert np.allclose(num(ca["pdf_lambert_per_ms"]), num(cb["pdf_per_ms"]), rtol=1e-10, atol=0)
    assert np.allclose(num(ca["cdf_highsnr"]), num(cb["cdf"]), rtol=1e-10, atol=0)
    assert ca["mc_ecdf"] == cb["mc_ecdf"]


# ---------------------------------------------------------------- moments

def test_moments_snr_sweep_decreasing(tmp_path):
    code, out = run(tmp_path, "moments", "--sweep", "snr", "--trials", "100000")
    assert code == 0
    header, c = table(out)
    assert header[0] == "snr_db" and len(c["snr_db"]) == 16
    for k in ("theorem1_mean_ms", "theorem1_jitter_ms2", "theorem2_mean_ms", "theorem2_jitter_ms2",
              "exact_mean_ms", "exact_jitter_ms2", "mc_mean_ms", "mc_jitter_ms2"):
        assert np.all(np.diff(num(c[k])) < 0), k


def test_moments_fbl_snr_sweep_decreasing(tmp_path):
    code, out = run(tmp_path, "moments", "--regime", "fbl", "--sweep", "snr", "--trials", "100000")
    assert code == 0
    _, c = table(out)
    for k in ("theorem3_mean_ms", "theorem3_jitter_ms2", "mc_mean_ms", "mc_jitter_ms2"):
        assert np.all(np.diff(num(c[k])) < 0), k


def test_moments_antenna_sweep_decreasing_then_flat(tmp_path):
    code, out = run(tmp_path, "moments", "--sweep", "antennas", "--trials", "100000")
    assert code == 0
    _, c = table(out)
    n = num(c["antennas"]).astype(int)
    assert list(n) == list(range(1, 33))
    jit = dict(zip(n, num(c["mc_jitter_ms2"])))
    pts = [jit[k] for k in (1, 2, 4, 8, 16, 32)]
    assert all(a > b for a, b in zip(pts, pts[1:]))
    drops = -np.diff(pts)
    assert all(a > b for a, b in zip(drops, drops[1:]))
    # divergent exact moments are written as the literal "inf"
    assert c["exact_mean_ms"][0] == "inf" and c["exact_jitter_ms2"][1] == "inf"
    assert c["mc_heavy_tail"][0] == "1"


def test_moments_single_point(tmp_path):
    code, out = run(tmp_path, "moments", "--trials", "20000")
    assert code == 0
    _, c = table(out)
    assert len(c["snr_db"]) == 1 and float(c["snr_db"][0]) == 10.0


# ---------------------------------------------------------------- violation

def test_violation_complements_dist(tmp_path):
    grid = ["--grid-start", "1.2", "--grid-stop", "4", "--grid-points", "15", "--trials", "20000"]
    _, a = run(tmp_path, "violation", "--sweep", "tau", *grid, name="a")
    _, b = run(tmp_path, "dist", *grid, name="b")
    _, ca = table(a)
    _, cb = table(b)
    assert ca["tau_ms"] == cb["delay_ms"]
    assert np.max(np.abs(num(ca["pv"]) - (1 - num(cb["cdf"])))) <= 1e-12


def test_violation_fbl_complements_highsnr_dist(tmp_path):
    grid = ["--regime", "fbl", "--grid-start", "0.3", "--grid-stop", "1", "--grid-points", "15", "--trials", "20000"]
    _, a = run(tmp_path, "violation", "--sweep", "tau", *grid, name="a")
    _, b = run(tmp_path, "dist", *grid, name="b")
    assert np.max(np.abs(num(table(a)[1]["pv"]) - (1 - num(table(b)[1]["cdf_highsnr"])))) <= 1e-12


def test_violation_tau_trend_and_eps_ordering(tmp_path):
    grid = ["--regime", "fbl", "--sweep", "tau", "--grid-start", "0.3", "--grid-stop", "1.5",
            "--grid-points", "25", "--trials", "20000"]
    _, a = run(tmp_path, "violation", "--bler", "1e-9", *grid, name="a")
    _, b = run(tmp_path, "violation", "--bler", "1e-5", *grid, name="b")
    pa, pb = num(table(a)[1]["pv"]), num(table(b)[1]["pv"])
    assert np.all(np.diff(pa) < 0) and np.all(np.diff(pb) < 0)
    assert np.all(pa > pb)
    # log-scale friendly: deep-tail values are not clamped to zero
    assert np.all(pa > 0)


@pytest.mark.parametrize("regime,tau", [("ibl", "2.5"), ("fbl", "0.6")])
def test_violation_decreasing_in_antennas(tmp_path, regime, tau):
    code, out = run(tmp_path, "violation", "--regime", regime, "--sweep", "antennas", "--tau-ms", tau,
                    "--trials", "20000")
    assert code == 0
    _, c = table(out)
    assert np.all(np.diff(num(c["pv"])) < 0)


def test_violation_ci_brackets_mc(tmp_path):
    _, out = run(tmp_path, "violation", "--trials", "50000")
    _, c = table(out)
    assert num(c["mc_ci_low"])[0] <= num(c["mc_pv"])[0] <= num(c["mc_ci_high"])[0]


# ---------------------------------------------------------------- approx report

def _series(cols, part, name):
    sel = [i for i, (p, s) in enumerate(zip(cols["part"], cols["series"])) if p == part and s == name]
    return num([cols["abscissa"][i] for i in sel]), num([cols["value"][i] for i in sel])


def test_approx_report(tmp_path):
    code, out = run(tmp_path, "approx-report")
    assert code == 0
    _, c = table(out)
    t, ln = _series(c, "surrogate", "ln_t")
    _, s1000 = _series(c, "surrogate", "surrogate_b1000")
    assert t[-1] == pytest.approx(10.0)
    assert abs(s1000[-1] - ln[-1]) <= 2.7e-3
    _, s10 = _series(c, "surrogate", "surrogate_b10")
    assert np.all(np.abs(s10 - ln) >= np.abs(s1000 - ln))

    x, exact = _series(c, "dispersion", "sqrt_exact")
    _, approx = _series(c, "dispersion", "binomial_approx")
    i = int(np.argmin(np.abs(x - 1.0)))
    assert exact[i] == pytest.approx(math.sqrt(3) / 2, abs=1e-12)
    assert approx[i] == pytest.approx(0.875, abs=1e-12)
    gap = np.abs(approx - exact)
    assert np.all(np.diff(gap[x >= 1]) < 0)

    g, ex = _series(c, "delay", "exact_ms")
    _, hs = _series(c, "delay", "highsnr_ms")
    _, up = _series(c, "delay", "upper_ms")
    assert g[0] == 5.0 and g[-1] == 30.0
    assert np.all(ex <= hs) and np.all(hs <= up)


# ---------------------------------------------------------------- validate

def test_validate_report_and_exit_code(tmp_path):
    code, out = run(tmp_path, "validate", "--seed", "42")
    rep = json.loads(out.read_text())
    assert rep["seed"] == 42 and rep["trials"] == 100_000
    assert code == (0 if rep["passed"] else 1)
    assert rep["n_checks"] == len(rep["checks"])
    for chk in rep["checks"]:
        assert {"criterion", "name", "passed", "measured", "tolerance"} <= set(chk)


def test_validate_default_run_passes(tmp_path):
    code, _ = run(tmp_path, "validate")
    assert code == 0


def test_validate_deterministic(tmp_path):
    _, a = run(tmp_path, "validate", "--seed", "42", name="a.json")
    _, b = run(tmp_path, "validate", "--seed", "42", name="b.json")
    assert a.read_bytes() == b.read_bytes()


def test_validate_tolerance_scales_with_trials():
    small = validation.check_ibl_distribution(trials=1000, seed=1)
    large = validation.check_ibl_distribution(trials=100_000, seed=1)
    assert all(s.tolerance > l.tolerance for s, l in zip(small, large))


def test_sign_flipped_pdf_fails_derivative_check(monkeypatch):
    good = [r for r in validation.check_collapse_reduction() if "Lambert-W delay pdf" in r.name]
    assert good and all(r.passed for r in good)
    orig = fbl.fbl_delay_pdf
    monkeypatch.setattr(fbl, "fbl_delay_pdf", lambda *a, **k: -orig(*a, **k))
    bad = [r for r in validation.check_collapse_reduction() if "Lambert-W delay pdf" in r.name]
    assert bad and not any(r.passed for r in bad)


def test_pdf_cdf_consistency_helper():
    m = ChannelModel(8, 10.0)
    c = ibl.LinkConfig(1000, 2e5)
    t = np.geomspace(1e-3, 3e-3, 20)
    ok = validation.pdf_cdf_consistency(lambda x: ibl.delay_pdf(m, c, x), lambda x: ibl.delay_cdf(m, c, x), t)
    assert ok.passed
    bad = validation.pdf_cdf_consistency(lambda x: 1.01 * ibl.delay_pdf(m, c, x), lambda x: ibl.delay_cdf(m, c, x), t)
    assert not bad.passed


# ---------------------------------------------------------------- output contract

def test_rerun_is_byte_identical(tmp_path):
    _, a = run(tmp_path, "dist", "--regime", "fbl", "--trials", "30000", "--seed", "9", name="a")
    _, b = run(tmp_path, "dist", "--regime", "fbl", "--trials", "30000", "--seed", "9", name="b")
    assert a.read_bytes() == b.read_bytes()


def test_streams_do_not_change_output(tmp_path):
    _, a = run(tmp_path, "violation", "--sweep", "tau", "--trials", "200000", name="a")
    _, b = run(tmp_path, "violation", "--sweep", "tau", "--trials", "200000", "--streams", "4", name="b")
    assert a.read_bytes() == b.read_bytes()


def test_csv_format(tmp_path):
    _, out = run(tmp_path, "moments", "--antennas", "1", "--trials", "20000")
    raw = out.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    text = raw.decode()
    cells = [v for line in text.splitlines()[1:] for v in line.split(",")]
    assert not any(v.lower() == "nan" for v in cells)
    header = text.splitlines()[0].split(",")
    assert "theorem1_mean_ms" in header and "mc_jitter_ms2" in header
    assert ",inf," in text


def test_json_format(tmp_path):
    code, out = run(tmp_path, "violation", "--regime", "fbl", "--trials", "20000", "--format", "json")
    assert code == 0
    doc = json.loads(out.read_text())
    assert set(doc) == {"spec", "rows", "diagnostics"}
    assert doc["spec"]["regime"] == "fbl" and doc["spec"]["link"]["payload_bits"] == 200.0
    assert doc["spec"]["avg_snr_db"] == pytest.approx(10.0, abs=1e-12)
    assert len(doc["rows"]) == 1 and "pv" in doc["rows"][0]


def test_json_renders_inf_as_literal(tmp_path):
    _, out = run(tmp_path, "moments", "--antennas", "1", "--trials", "20000", "--format", "json")
    row = json.loads(out.read_text())["rows"][0]
    assert row["exact_mean_ms"] == "inf"


def test_seed_env_override(tmp_path, monkeypatch):
    _, a = run(tmp_path, "dist", "--trials", "20000", name="a")
    monkeypatch.setenv(cli.SEED_ENV, "5")
    _, b = run(tmp_path, "dist", "--trials", "20000", name="b")
    _, c = run(tmp_path, "dist", "--trials", "20000", "--seed", "0", name="c")
    assert a.read_bytes() != b.read_bytes()
    assert a.read_bytes() == c.read_bytes()
    monkeypatch.setenv(cli.SEED_ENV, "abc")
    assert cli.main(["dist", "--trials", "20000", "--out", str(tmp_path / "d")]) == 2


@pytest.mark.parametrize("argv", [
    ["dist", "--antennas", "0"],
    ["dist", "--snr-db", "nan"],
    ["dist", "--regime", "fbl", "--bler", "0.7"],
    ["dist", "--trials", "10"],
    ["dist", "--grid-start", "3", "--grid-stop", "1"],
    ["moments", "--log-b", "10"],
    ["violation", "--tau-ms", "-1"],
])
def test_invalid_spec_exits_2(argv, capsys):
    assert cli.main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["dist", "--no-such-flag"])
    assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    out = tmp_path / "x.csv"
    r = subprocess.run([sys.executable, "-m", "txdelay", "approx-report", "--part", "dispersion", "--out", str(out)],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert out.read_text().startswith("part,abscissa,series,value,provenance\n")
