"""End-to-end runs of the command line, in process via main(argv).

Exit contract: 0 all verdicts pass, 1 any verdict fails, 2 unusable input.
"""

import json
import math

import numpy as np

from bilmult import SampledFunction, build_trigpoly
from bilmult.cli import main
from bilmult.fileio import save_function


def write_indicator(tmp_path):
    f = SampledFunction(np.ones(8, dtype=complex), 0.0, 1.0 / 16.0)
    p = tmp_path / "ind.json"
    save_function(f, str(p))
    return str(p)


def write_poly(tmp_path, coeffs, name="poly.json"):
    p = tmp_path / name
    save_function(build_trigpoly(coeffs), str(p))
    return str(p)


def write_symbol(tmp_path, spec, name="sym.json"):
    p = tmp_path / name
    p.write_text(json.dumps(spec))
    return str(p)


def test_norm_command(tmp_path, capsys):
    path = write_indicator(tmp_path)
    assert main(["norm", "--function", path, "--exponents", "2,2"]) == 0
    out = capsys.readouterr().out.strip()
    assert abs(float(out) - math.sqrt(0.5)) < 1e-12
    # both closed forms through the CLI
    assert main(["norm", "--function", path, "--exponents", "2,2",
                 "--method", "distribution"]) == 0
    out2 = capsys.readouterr().out.strip()
    assert abs(float(out2) - float(out)) < 1e-12


def test_norm_rejects_line_norm_of_poly(tmp_path):
    path = write_poly(tmp_path, {0: 1.0})
    assert main(["norm", "--function", path, "--exponents", "2,2"]) == 2


def test_apply_torus(tmp_path, capsys):
    f = write_poly(tmp_path, {0: 1.0, 1: 2.0}, "f.json")
    g = write_poly(tmp_path, {-1: 1j}, "g.json")
    sym = write_symbol(tmp_path, {"kind": "constant", "value": 1.0})
    out = tmp_path / "out.json"
    rc = main(["apply", "--symbol", sym, "--f", f, "--g", g,
               "--setting", "torus", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["kind"] == "trigpoly"
    got = {int(k): complex(v[0], v[1]) for k, v in doc["coeffs"].items()}
    assert got == {-1: 1j, 0: 2j}


def test_apply_line(tmp_path):
    sym = write_symbol(tmp_path, {"kind": "constant", "value": 1.0})
    fn = tmp_path / "g.json"
    xs = np.linspace(-4, 4, 256, endpoint=False) + 4.0 / 256.0
    save_function(SampledFunction(np.exp(-xs**2), -4.0, 8.0 / 256.0), str(fn))
    out = tmp_path / "out.json"
    rc = main(["apply", "--symbol", sym, "--f", str(fn), "--g", str(fn),
               "--xi-band", "4.0", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    got = np.array(doc["samples"])[:, 0]
    assert np.max(np.abs(got - np.exp(-2 * xs**2))) < 1e-8


def test_lemma_realtoro_cli(tmp_path):
    fn = tmp_path / "f.json"
    xs = np.linspace(-1, 1, 128, endpoint=False) + 1.0 / 128.0
    save_function(SampledFunction(np.exp(-8 * xs**2), -1.0, 2.0 / 128.0), str(fn))
    report = tmp_path / "rep.json"
    rc = main(["lemma", "realtoro", "--function", str(fn), "--exponents", "2,1",
               "--sweep", "0.5,0.25,0.125", "--report", str(report)])
    assert rc == 0
    doc = json.loads(report.read_text())
    assert doc["passed"] is True
    assert doc["experiment"] == "lemma_realtoro"


def test_lemma_sandwich_cli(tmp_path):
    f = write_poly(tmp_path, {0: 1.0, 2: 0.5})
    phi = tmp_path / "phi.json"
    phi.write_text(json.dumps({"kind": "named", "name": "custom_gaussian",
                               "radius": 8.0, "sigma": 1.0}))
    report = tmp_path / "rep.json"
    rc = main(["lemma", "sandwich", "--function", f, "--envelope", str(phi),
               "--exponents", "2,2", "--sweep", "geometric:2^-2..2^-6:5",
               "--report", str(report)])
    assert rc == 0


def test_gcheck_pass_and_fail(tmp_path):
    sym = write_symbol(tmp_path, {"kind": "sign_alpha", "alpha": 2.0})
    report = tmp_path / "rep.json"
    rc = main(["gcheck", "--symbol", sym, "--points", "0.5,0.25;-1.0,0.3",
               "--eps", "geometric:2^-1..2^-6:6", "--report", str(report)])
    assert rc == 0
    # a probe hugging the jump line cannot settle by eps = 2^-6
    rc = main(["gcheck", "--symbol", sym, "--points", "0.01,0.0",
               "--eps", "geometric:2^-1..2^-6:6", "--report", str(report)])
    assert rc == 1
    doc = json.loads(report.read_text())
    assert doc["passed"] is False


def test_parse_errors_exit_2(tmp_path):
    sym = write_symbol(tmp_path, {"kind": "sign_alpha", "alpha": 2.0})
    assert main(["gcheck", "--symbol", sym, "--points", "oops",
                 "--eps", "0.5,0.25"]) == 2
    assert main(["gcheck", "--symbol", str(tmp_path / "missing.json"),
                 "--points", "0.5,0.5", "--eps", "0.5"]) == 2
    assert main(["norm", "--function", str(tmp_path / "missing.json"),
                 "--exponents", "2,2"]) == 2
    assert main(["lemma", "realtoro", "--function", sym, "--exponents", "2,1",
                 "--sweep", "geometric:bad"]) == 2
    # argparse usage errors also map to 2
    assert main(["norm"]) == 2


def test_transfer_cli_reproducible(tmp_path):
    sym = write_symbol(tmp_path, {"kind": "sign_alpha", "alpha": 2.0})
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "exponents": "2,2,2,2,1,1",
        "t_grid": "1,0.5",
        "trials": 2,
        "seed": 77,
        "grid_points": 512,
        "max_degree": 6,
        "line_trials": 1,
    }))
    reports = []
    for name in ("a.json", "b.json"):
        rep = tmp_path / name
        csv = tmp_path / (name + ".csv")
        rc = main(["transfer", "--symbol", sym, "--config", str(cfg),
                   "--report", str(rep), "--csv", str(csv)])
        assert rc == 0
        doc = json.loads(rep.read_text())
        doc.pop("created")
        reports.append(json.dumps(doc, sort_keys=True))
    assert reports[0] == reports[1]
    assert (tmp_path / "a.json.csv").read_text() == (tmp_path / "b.json.csv").read_text()


def test_transfer_cli_flag_overrides_config(tmp_path):
    sym = write_symbol(tmp_path, {"kind": "sign_alpha", "alpha": 2.0})
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"trials": 2, "seed": 5, "t_grid": "1,0.5",
                               "grid_points": 512, "max_degree": 4, "line_trials": 1}))
    rep = tmp_path / "r.json"
    rc = main(["transfer", "--symbol", sym, "--config", str(cfg),
               "--seed", "6", "--report", str(rep)])
    assert rc == 0
    assert json.loads(rep.read_text())["seed"] == 6


def test_transfer_cli_rejects_unknown_config_key(tmp_path):
    sym = write_symbol(tmp_path, {"kind": "sign_alpha", "alpha": 2.0})
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"trils": 2}))
    assert main(["transfer", "--symbol", sym, "--config", str(cfg)]) == 2
