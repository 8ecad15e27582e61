import csv
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from plienard import cli
from plienard.errors import ConfigError, HypothesisFailure
from plienard.pipeline import (check_hypotheses, corollary_sweep, export, load_config,
                               nonexistence_check, parse_config, run_problem, solve_main, verify_csv)

ROOT = Path(__file__).resolve().parents[1]
BASE = """T = 1
N = {N}
p = "{p}"
f = "{f}"
g = "{g}"
h = "{h}"
tail_asserted = true
positivity_asserted = true
"""


def cfg(p="3 + sin(2*pi*t)", f="0", g="1/x", h="1", N=64, extra=""):
    return parse_config(BASE.format(N=N, p=p, f=f, g=g, h=h) + extra)


def test_minimal_config_defaults():
    c = parse_config('T = 1\nN = 32\np = "2"\nf = "0"\ng = "1/x"\nh = "1"\n')
    assert c.solve_tol == 1e-8 and c.cert_tol == 1e-6 and c.mode == "solve"
    assert c.delta is None and not c.tail_asserted and c.alpha_search == (1e-6, 1e3, 2001)


@pytest.mark.parametrize("text,key", [
    ('T = 1\nN = 32\np = "1"\nf = "0"\ng = "1/x"\nh = "1"\n', "p"),
    ('T = 1\nN = 32\np = "2 + t"\nf = "0"\ng = "1/x"\nh = "1"\n', "p"),
    ('T = 1\nN = 32\np = "2"\nf = "0"\ng = "1/u"\nh = "1"\n', "g"),
    ('T = 1\nN = 8\np = "2"\nf = "0"\ng = "1/x"\nh = "1"\n', "N"),
    ('T = 1\nN = 32\np = "2"\nf = "0"\ng = "1/x"\n', "h"),
    ('T = 1\nN = 32\np = "2"\nf = "0"\ng = "1/x"\nh = "1"\nbogus = 3\n', "bogus"),
    ('T = 1\nT = 2\nN = 32\np = "2"\nf = "0"\ng = "1/x"\nh = "1"\n', "T"),
    ('T = 1\nN = 32\np = 2\nf = "0"\ng = "1/x"\nh = "1"\n', "p"),
])
def test_config_errors_name_the_key(text, key):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key


def test_config_line_numbers():
    with pytest.raises(ConfigError) as info:
        parse_config('# header\nT = 1\nN = 32\np = "2"\nf = "0"\ng = "1/x"\nh = "1"\nbogus = 3\n')
    assert info.value.line == 8


def test_hypothesis_examples():
    ok = check_hypotheses(cfg(extra="delta = 1.01\n"))
    assert ok.passes and ok.hbar == pytest.approx(1.0) and 0.99 < ok.alpha <= 1.0
    neg = check_hypotheses(cfg(h="-1"))
    assert not neg.tail_ok and not neg.passes
    shifted = check_hypotheses(cfg(g="2 + 1/x", extra="delta = 1.01\n"))
    assert not shifted.tail_ok and not shifted.passes


def test_solve_main_fixture():
    c = cfg(f="x", h="1 + 0.1*cos(2*pi*t)", N=256)
    cert = solve_main(c)
    assert cert.status == "exists" and cert.residual <= c.cert_tol
    u = cert.solution.values
    assert u.min() >= cert.alpha - 1e-10 and np.all(u <= cert.beta.values + 1e-8)
    assert cert.recheck()


def test_solve_main_equilibrium():
    cert = solve_main(cfg(N=128))
    assert cert.status == "exists" and cert.residual <= 1e-10
    assert np.all(cert.solution.values == 1.0)


def test_parametrised_power_family():
    c = cfg(g="sigma/x^mu", h="0.5 + 0.1*sin(2*pi*t)", extra="param.sigma = 1\nparam.mu = 2\n")
    cert = run_problem(c)
    assert cert.status == "exists"


def test_strict_hypothesis_failure():
    c = cfg(g="2 + 1/x", extra="delta = 1.01\n")
    assert solve_main(c).status == "not_certified"
    with pytest.raises(HypothesisFailure):
        solve_main(c, strict=True)


def test_nonexistence_examples():
    assert nonexistence_check(cfg(h="-1")).status == "nonexistence"
    cert = nonexistence_check(cfg(h="cos(2*pi*t)"))
    assert cert.status == "nonexistence" and cert.recheck()
    assert nonexistence_check(cfg(g="1/x - 5", h="-1")) is None
    assert nonexistence_check(cfg(h="1")) is None


def test_never_confuse_solver_failure_with_nonexistence():
    c = cfg(h="1 + 0.1*cos(2*pi*t)", extra="solve_tol = 1e-30\n")
    cert = run_problem(c)
    assert cert.status == "not_certified"


def test_sweep_small_cases():
    c = cfg(h="0*t", N=64)
    rows = corollary_sweep(c, [1.0])
    assert rows[0][1].status == "exists"
    np.testing.assert_allclose(rows[0][1].solution.values, 1.0, atol=1e-12)
    assert corollary_sweep(c, []) == []


def test_export_and_verify(tmp_path):
    c = cfg(f="x", h="1 + 0.1*cos(2*pi*t)", N=64)
    cert = run_problem(c)
    paths = export(cert, tmp_path)
    rows = list(csv.reader(paths["csv"].open()))
    assert rows[0] == ["t", "u", "du", "residual"] and len(rows) == 66
    assert all(len(v.split("e")[0].replace("-", "").replace(".", "")) == 17 for v in rows[1][:3])
    text = paths["report"].read_text()
    for sec in ("HYPOTHESES", "BOUNDS", "SOLUTION", "CERTIFICATE"):
        assert f"\n{sec}\n" in "\n" + text
    res = verify_csv(c, paths["csv"])
    assert res.ok and res.residual <= c.cert_tol and res.min_u >= res.alpha - 1e-10


def test_verify_detects_tampering(tmp_path):
    c = cfg(f="x", h="1 + 0.1*cos(2*pi*t)", N=64)
    paths = export(run_problem(c), tmp_path)
    lines = paths["csv"].read_text().splitlines()
    parts = lines[20].split(",")
    parts[1] = f"{float(parts[1]) + 1e-3:.16e}"
    lines[20] = ",".join(parts)
    paths["csv"].write_text("\n".join(lines) + "\n")
    assert not verify_csv(c, paths["csv"]).ok


def test_nonexistence_export_has_no_csv(tmp_path):
    paths = export(run_problem(cfg(h="-1")), tmp_path)
    assert set(paths) == {"report"} and not (tmp_path / "solution.csv").exists()


# -- command line ----------------------------------------------------------------

def _write(tmp_path, text):
    p = tmp_path / "problem.cfg"
    p.write_text(text)
    return str(p)


def test_cli_exit_codes(tmp_path, capsys):
    good = _write(tmp_path, BASE.format(N=64, p="3 + sin(2*pi*t)", f="x", g="1/x",
                                        h="1 + 0.1*cos(2*pi*t)"))
    assert cli.main(["solve", "--config", good, "--out", str(tmp_path / "a")]) == 0
    assert cli.main(["verify", "--config", good, "--out", str(tmp_path / "a")]) == 0
    assert cli.main(["bounds", "--config", good, "--out", str(tmp_path / "b")]) == 0
    assert cli.main(["oracle-check", "--config", good, "--nodes", "512"]) == 0
    neg = _write(tmp_path, BASE.format(N=64, p="2", f="0", g="1/x", h="-1"))
    assert cli.main(["solve", "--config", neg, "--out", str(tmp_path / "c")]) == 0
    shifted = _write(tmp_path, BASE.format(N=64, p="2", f="0", g="2 + 1/x", h="1"))
    assert cli.main(["solve", "--config", shifted, "--out", str(tmp_path / "d")]) == 2
    broken = _write(tmp_path, "T = 1\n")
    assert cli.main(["solve", "--config", broken, "--out", str(tmp_path / "e")]) == 1
    assert cli.main(["solve", "--config", str(tmp_path / "missing.cfg")]) == 1


def test_cli_overrides(tmp_path):
    good = _write(tmp_path, BASE.format(N=64, p="2.5", f="0", g="1/x", h="1 + 0.1*cos(2*pi*t)"))
    assert cli.main(["solve", "--config", good, "--out", str(tmp_path), "--nodes", "48", "--tol", "1e-9"]) == 0
    rows = (tmp_path / "solution.csv").read_text().splitlines()
    assert len(rows) == 50


def test_cli_sweep(tmp_path):
    assert cli.main(["sweep", "--config", str(ROOT / "configs" / "sweep.cfg"), "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader((tmp_path / "sweep.csv").open()))
    assert [r["status"] for r in rows] == ["nonexistence"] * 3 + ["exists"] * 4


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "plienard.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for sub in ("solve", "bounds", "sweep", "verify", "oracle-check"):
        assert sub in out.stdout


def test_load_config_logs_effective_values(caplog):
    import logging
    with caplog.at_level(logging.INFO, logger="plienard"):
        load_config(ROOT / "configs" / "standard.cfg")
    assert "3 + sin(2*pi*t)" in caplog.text
