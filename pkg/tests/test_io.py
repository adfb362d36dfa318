import json
import math

import numpy as np
import pytest

from bilmult import SampledFunction, build_trigpoly
from bilmult.fileio import (
    load_function,
    load_symbol,
    parse_exponents,
    parse_sweep,
    save_function,
    write_report_csv,
    write_report_json,
)
from bilmult.transference import SweepPoint


def test_sampled_round_trip(tmp_path):
    f = SampledFunction(np.array([1 + 2j, -0.5, 0.25j]), -1.0, 0.5)
    p = tmp_path / "f.json"
    save_function(f, str(p))
    g = load_function(str(p))
    assert isinstance(g, SampledFunction)
    assert np.array_equal(g.samples, f.samples)
    assert g.x0 == f.x0 and g.dx == f.dx


def test_trigpoly_round_trip(tmp_path):
    f = build_trigpoly({-2: 1j, 0: 3.0, 5: -0.25})
    p = tmp_path / "f.json"
    save_function(f, str(p))
    g = load_function(str(p))
    assert g.coeffs() == f.coeffs()


def test_named_function_file(tmp_path):
    p = tmp_path / "f.json"
    p.write_text(json.dumps({"kind": "named", "name": "box_phi"}))
    f = load_function(str(p))
    assert abs(f.integral() - 1.0) < 1e-12


def test_function_file_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("[1, 2, 3]")
    with pytest.raises(ValueError, match="kind"):
        load_function(str(p))
    p.write_text(json.dumps({"kind": "sampled", "x0": 0.0}))
    with pytest.raises(ValueError, match="sampled"):
        load_function(str(p))
    p.write_text(json.dumps({"kind": "wat"}))
    with pytest.raises(ValueError, match="unknown"):
        load_function(str(p))


def test_symbol_file_with_relative_table(tmp_path):
    csv = tmp_path / "grid.csv"
    csv.write_text(",-1.0,1.0\n-1.0,0.1,0.2\n1.0,0.3,0.4\n")
    spec = tmp_path / "m.json"
    spec.write_text(json.dumps({"kind": "table", "path": "grid.csv"}))
    m = load_symbol(str(spec))
    assert abs(m.evaluate(np.array([-1.0]), np.array([-1.0]))[0] - 0.1) < 1e-12


def test_parse_sweep_geometric():
    g = parse_sweep("geometric:1..2^-4:5")
    assert len(g) == 5
    assert abs(g[0] - 1.0) < 1e-15 and abs(g[-1] - 0.0625) < 1e-15
    ratios = [g[i + 1] / g[i] for i in range(4)]
    assert max(ratios) - min(ratios) < 1e-12


def test_parse_sweep_list_and_errors():
    assert parse_sweep("0.5, 0.25,2^-3") == [0.5, 0.25, 0.125]
    for bad in ("geometric:1..1:4", "geometric:0..2:3", "geometric:1..2:1", "", "geometric:x"):
        with pytest.raises(ValueError):
            parse_sweep(bad)


def test_parse_exponents():
    assert parse_exponents("2,inf") == (2.0, math.inf)
    assert parse_exponents("2,2,2,2,1,1") == (2.0,) * 4 + (1.0, 1.0)
    with pytest.raises(ValueError):
        parse_exponents("1,2,3")


def test_report_json_adds_timestamp(tmp_path):
    p = tmp_path / "r.json"
    write_report_json({"b": 1, "a": [1, 2]}, str(p))
    doc = json.loads(p.read_text())
    assert doc["a"] == [1, 2] and doc["b"] == 1
    assert "created" in doc
    # keys come out sorted for stable diffs
    raw = p.read_text()
    assert raw.index('"a"') < raw.index('"b"') < raw.index('"created"')


def test_report_csv_header_and_rows(tmp_path):
    pts = [SweepPoint(0.5, 1.25, 1.0, 0.01), SweepPoint(0.25, 1.5, 1.1, 0.001)]
    p = tmp_path / "r.csv"
    write_report_csv(pts, str(p))
    lines = p.read_text().strip().splitlines()
    assert lines[0] == "sweep,max_ratio,median_ratio,gap"
    assert len(lines) == 3
    first = lines[1].split(",")
    assert float(first[0]) == 0.5 and float(first[1]) == 1.25
