"""On-disk formats: function and symbol descriptions, sweeps, reports.

Functions travel as JSON with an explicit ``kind``:

* ``{"kind": "sampled", "x0": -1.0, "dx": 0.125, "samples": [[re, im], ...]}``
* ``{"kind": "trigpoly", "coeffs": {"-2": [1.0, 0.0], "3": [0.0, -0.5]}}``
* ``{"kind": "named", "name": "gauss_psi", "cells_per_unit": 64, ...}``

Symbols are JSON objects understood by ``make_symbol`` (a ``kind`` plus its
parameters); a ``table`` symbol carries a ``path`` to its CSV grid, resolved
relative to the JSON file.  Sweep grids use either an explicit comma list or
``geometric:A..B:n`` where the endpoints accept ``2^-4`` style powers.

Reports are JSON (sorted keys, a ``created`` timestamp added at write time)
with an optional flat CSV of the sweep table.
"""

from __future__ import annotations

import csv
import json
import math
import os
from datetime import datetime, timezone

import numpy as np

from .funcspace import SampledFunction, TrigPolynomial, build_trigpoly, named_function
from .operators import Symbol2D, make_symbol

__all__ = [
    "load_function",
    "save_function",
    "load_symbol",
    "parse_sweep",
    "parse_exponents",
    "write_report_json",
    "write_report_csv",
]

CSV_HEADER = ["sweep", "max_ratio", "median_ratio", "gap"]


def _pairs_to_complex(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("complex samples must be a list of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def _complex_to_pairs(values: np.ndarray) -> list:
    return [[float(v.real), float(v.imag)] for v in np.asarray(values)]


def load_function(path: str):
    """Read a function description; returns SampledFunction or TrigPolynomial."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValueError(f"{path}: function file must be a JSON object with a 'kind'")
    kind = doc["kind"]
    if kind == "sampled":
        for key in ("x0", "dx", "samples"):
            if key not in doc:
                raise ValueError(f"{path}: sampled function needs '{key}'")
        return SampledFunction(
            _pairs_to_complex(doc["samples"]), float(doc["x0"]), float(doc["dx"])
        )
    if kind == "trigpoly":
        coeffs = doc.get("coeffs")
        if not isinstance(coeffs, dict) or not coeffs:
            raise ValueError(f"{path}: trigpoly needs a nonempty 'coeffs' object")
        mapping = {}
        for key, val in coeffs.items():
            k = int(key)
            if isinstance(val, (list, tuple)):
                mapping[k] = complex(val[0], val[1])
            else:
                mapping[k] = complex(val)
        return build_trigpoly(mapping)
    if kind == "named":
        params = {k: v for k, v in doc.items() if k not in ("kind", "name")}
        if "name" not in doc:
            raise ValueError(f"{path}: named function needs a 'name'")
        return named_function(doc["name"], **params)
    raise ValueError(f"{path}: unknown function kind {kind!r}")


def save_function(obj, path: str) -> None:
    if isinstance(obj, SampledFunction):
        doc = {
            "kind": "sampled",
            "x0": obj.x0,
            "dx": obj.dx,
            "samples": _complex_to_pairs(obj.samples),
        }
    elif isinstance(obj, TrigPolynomial):
        doc = {
            "kind": "trigpoly",
            "coeffs": {
                str(k): [float(v.real), float(v.imag)] for k, v in obj.coeffs().items()
            },
        }
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_symbol(path: str) -> Symbol2D:
    """Read a symbol spec; table paths resolve relative to the spec file."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValueError(f"{path}: symbol file must be a JSON object with a 'kind'")
    spec = dict(doc)
    if spec["kind"] == "table" and "path" in spec:
        spec["path"] = os.path.join(os.path.dirname(os.path.abspath(path)), spec["path"])
    return make_symbol(spec)


def _parse_endpoint(text: str) -> float:
    text = text.strip()
    if "^" in text:
        base, expo = text.split("^", 1)
        return float(base) ** float(expo)
    return float(text)


def parse_sweep(text: str) -> list:
    """Parse a sweep grid: 'geometric:A..B:n' or a plain comma list.

    Geometric grids place n points from A to B with a constant ratio;
    endpoints accept power notation like 2^-4.
    """
    text = text.strip()
    if text.startswith("geometric:"):
        body = text[len("geometric:") :]
        try:
            span, count = body.rsplit(":", 1)
            a_txt, b_txt = span.split("..", 1)
            a, b = _parse_endpoint(a_txt), _parse_endpoint(b_txt)
            n = int(count)
        except (ValueError, IndexError) as exc:
            raise ValueError(f"bad geometric sweep {text!r}: {exc}") from None
        if n < 2 or a <= 0 or b <= 0 or a == b:
            raise ValueError(f"bad geometric sweep {text!r}")
        return [float(v) for v in np.geomspace(a, b, n)]
    vals = [_parse_endpoint(tok) for tok in text.split(",") if tok.strip()]
    if not vals:
        raise ValueError(f"empty sweep {text!r}")
    return vals


def parse_exponents(text: str):
    """Comma list of 2 or 6 exponents; 'inf' allowed."""
    toks = [tok.strip() for tok in text.split(",") if tok.strip()]
    vals = []
    for tok in toks:
        vals.append(math.inf if tok.lower() in ("inf", "infinity") else float(tok))
    if len(vals) not in (2, 6):
        raise ValueError(f"expected 2 or 6 exponents, got {len(vals)}")
    return tuple(vals)


def write_report_json(report: dict, path: str) -> None:
    doc = dict(report)
    doc["created"] = datetime.now(timezone.utc).isoformat()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_report_csv(points, path: str) -> None:
    """Flat sweep table; one row per point, fixed header."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for pt in points:
            row = pt.to_dict() if hasattr(pt, "to_dict") else dict(pt)
            writer.writerow([repr(float(row[k])) for k in CSV_HEADER])
