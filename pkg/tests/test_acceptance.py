"""Acceptance battery: one criterion per test, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
without ``-s`` pytest still shows the captured line for any failure.  Every
criterion carries its stated tolerance and a wall-clock budget measured on
the whole criterion body.
"""

import json
import math
import time

import numpy as np
from scipy.special import erf

from bilmult import (
    GridSpec,
    LorentzExponents,
    NormMethod,
    SampledFunction,
    apply_Cm,
    apply_Pm,
    build_trigpoly,
    check_g_regulated,
    check_lemma_realtoro,
    check_lemma_sandwich,
    check_lemma_tororealdos,
    dilate,
    estimate_norm_real,
    estimate_norm_torus,
    forward_bridge_gap,
    lorentz_norm,
    make_symbol,
    mollify_symbol,
    named_function,
    periodize,
    periodize_exact,
    reverse_bridge_gap,
    sample_on_torus,
)
from bilmult.cli import main as cli_main
from bilmult.operators import psi_alpha, _psi_alpha_closed

EXP_GRID = [0.5, 1.0, 4.0 / 3.0, 2.0, 3.0]


def _verdict(num, name, ok, detail, elapsed, budget):
    status = "PASS" if ok else "FAIL"
    print(f"[criterion {num:02d}] {status} {name}: {detail} ({elapsed:.1f}s < {budget:.0f}s)")
    assert ok, f"criterion {num}: {detail}"
    assert elapsed < budget, f"criterion {num} exceeded its {budget}s budget: {elapsed:.1f}s"


def _random_step(rng):
    n = int(rng.integers(3, 60))
    vals = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    vals[rng.random(n) < 0.25] = 0.0
    if not np.any(vals):
        vals[0] = 1.0
    return SampledFunction(vals, float(rng.uniform(-3, 0)), float(rng.uniform(0.02, 0.3)))


def _random_poly(rng, deg):
    n = 2 * deg + 1
    return build_trigpoly(
        {k - deg: complex(rng.standard_normal(), rng.standard_normal()) for k in range(n)}
    )


def test_criterion_01_norm_route_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(200):
        f = _random_step(rng)
        for p in EXP_GRID:
            for q in EXP_GRID:
                e = LorentzExponents(p, q)
                a = lorentz_norm(f, e, method=NormMethod.REARRANGEMENT)
                b = lorentz_norm(f, e, method=NormMethod.DISTRIBUTION_INTEGRAL)
                worst = max(worst, abs(a - b) / max(a, 1e-300))
    el = time.perf_counter() - t0
    _verdict(1, "norm route equivalence", worst <= 1e-10,
             f"max rel gap {worst:.2e} over 200 functions x 25 exponent pairs", el, 5)


def test_criterion_02_dilation_scaling():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2025)
    worst = 0.0
    for _ in range(10):
        f = _random_step(rng)
        for t in (0.25, 0.5, 2.0, 4.0):
            d = dilate(f, t)
            for p in EXP_GRID:
                for q in EXP_GRID + [math.inf]:
                    e = LorentzExponents(p, q)
                    base = lorentz_norm(f, e)
                    got = lorentz_norm(d, e)
                    worst = max(worst, abs(got - t ** (1.0 / p) * base) / base)
    el = time.perf_counter() - t0
    _verdict(2, "dilation scaling", worst <= 1e-12,
             f"max rel gap {worst:.2e} incl. q=inf", el, 1)


def test_criterion_03_box_window_equality():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2026)
    pairs = [(p, q) for p in EXP_GRID for q in EXP_GRID] + [(p, math.inf) for p in EXP_GRID]
    worst = 0.0
    for _ in range(20):
        f = _random_poly(rng, int(rng.integers(0, 13)))
        for k in (1, 2, 8):
            for p, q in pairs:
                rep = check_lemma_tororealdos(f, p, q, k, grid_points=256)
                worst = max(worst, rep.points[0].gap)
    el = time.perf_counter() - t0
    _verdict(3, "box window equality", worst <= 1e-10,
             f"max rel gap {worst:.2e} over 20 polys x k in {{1,2,8}} x 30 exponent pairs",
             el, 5)


def test_criterion_04_dilate_periodize_limit():
    t0 = time.perf_counter()
    bump = named_function("bump", radius=1.0, cells_per_unit=64)
    t_seq = [2.0**-k for k in range(1, 7)]
    ok = True
    tail = 0.0
    for p, q in [(2.0, 2.0), (2.0, 1.0), (4.0 / 3.0, 3.0)]:
        rep = check_lemma_realtoro(bump, p, q, t_seq, tail_tol=0.02)
        ok = ok and rep.passed
        tail = max(tail, rep.points[-1].gap)
    ind = SampledFunction(np.ones(12, dtype=complex), -0.375, 1.0 / 16.0)
    exact = 0.0
    for p, q in [(2.0, 2.0), (1.0, 2.0), (3.0, 0.5)]:
        rep = check_lemma_realtoro(ind, p, q, [1.0, 0.5, 0.25], tail_tol=0.02)
        ok = ok and rep.passed and rep.verdicts["exact_regime"]
        exact = max(exact, max(pt.gap for pt in rep.points))
    el = time.perf_counter() - t0
    _verdict(4, "dilate+periodize limit", ok and tail <= 0.02 and exact <= 1e-12,
             f"bump tail gap {tail:.2e} <= 2%, indicator gap {exact:.2e} <= 1e-12", el, 10)


def test_criterion_05_sandwich_bracket():
    t0 = time.perf_counter()
    phi = named_function("custom_gaussian", cells_per_unit=128, radius=10.0, sigma=1.5)
    rng = np.random.default_rng(2027)
    eps = [2.0**-k for k in range(2, 8)]
    ok = True
    worst_corollary = 0.0
    for i in range(10):
        f = _random_poly(rng, int(rng.integers(0, 7)))
        for p, q in [(2.0, 2.0), (2.0, 1.0), (4.0 / 3.0, 2.0), (3.0, 3.0), (1.0, 1.0)]:
            rep = check_lemma_sandwich(f, phi, p, q, eps, slack=0.05, corollary_tol=0.01)
            ok = ok and rep.passed
            if p == q:
                target = rep.constants["phi_norm_pr"] * rep.constants["f_norm"]
                got = rep.points[-1].max_ratio * rep.constants["f_norm"]
                worst_corollary = max(worst_corollary, abs(got - target) / target)
    el = time.perf_counter() - t0
    _verdict(5, "sandwich bracket", ok and worst_corollary <= 0.01,
             f"bounds within 5% slack on 10 polys x 5 exponent pairs; "
             f"p=q limit within {worst_corollary:.2e}", el, 30)


def test_criterion_06_periodization_consistency():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2028)
    worst = 0.0
    for _ in range(50):
        sigma = float(rng.uniform(0.12, 0.25))
        center = float(rng.integers(-8, 9)) / 64.0
        f = named_function("custom_gaussian", cells_per_unit=64, radius=6.0,
                           sigma=sigma, center=center)
        t = float(rng.choice([0.25, 0.5, 1.0, 2.0]))
        d = dilate(f, t)
        exact = periodize_exact(d)
        coeff = periodize(d, tol=1e-11)
        re = sample_on_torus(coeff, exact.n)
        worst = max(worst, float(np.max(np.abs(exact.samples - re.samples))))
    el = time.perf_counter() - t0
    _verdict(6, "periodization consistency", worst <= 1e-9,
             f"max sup gap {worst:.2e} over 50 gaussian dilates", el, 5)


def test_criterion_07_operator_identities():
    t0 = time.perf_counter()
    one = make_symbol({"kind": "constant", "value": 1.0})
    f = named_function("custom_gaussian", cells_per_unit=32, radius=8.0, sigma=1.0)
    g = named_function("custom_gaussian", cells_per_unit=32, radius=8.0, sigma=1.4)
    grid = GridSpec(f.n, f.x0, f.dx)
    gap_prod = float(np.max(np.abs(
        apply_Cm(one, f, g, grid, xi_band=6.0, xi_step=1.0 / 32.0).samples
        - f.samples * g.samples)))

    sh = make_symbol({"kind": "shift", "a": 0.5, "b": -0.25})
    out_grid = GridSpec(192, -3.0, 1.0 / 32.0)
    xs = out_grid.midpoints()
    want = np.exp(-((xs + 0.5) ** 2)) * np.exp(-(((xs - 0.25) / 1.4) ** 2))
    gap_shift = float(np.max(np.abs(
        apply_Cm(sh, f, g, out_grid, xi_band=6.0, xi_step=1.0 / 32.0).samples - want)))

    fp = build_trigpoly({1: 1.0, -2: 0.5j})
    gp = build_trigpoly({0: 1.0, 3: -1.0})
    outp = apply_Pm((sh, 1.0), fp, gp)
    brute = {}
    for k1, a in fp.coeffs().items():
        for k2, b in gp.coeffs().items():
            w = np.exp(2j * np.pi * (0.5 * k1 - 0.25 * k2))
            brute[k1 + k2] = brute.get(k1 + k2, 0.0) + a * b * w
    gap_torus = max(abs(outp.coeff(k) - v) for k, v in brute.items())

    mg = make_symbol({"kind": "gaussian2d", "sigma": 1.0})
    grid2 = GridSpec(128, -2.0, 1.0 / 32.0)
    a_ = apply_Cm(mg, f, g, grid2, xi_band=5.0, xi_step=1.0 / 16.0)
    b_ = apply_Cm(mg, f, g, grid2, xi_band=5.0, xi_step=1.0 / 16.0, force_general=True)
    gap_sep = float(np.max(np.abs(a_.samples - b_.samples)))

    t = 2.0
    lhs = apply_Cm(mg.dilated(t), f, g, grid2, xi_band=6.0, xi_step=1.0 / 32.0)
    inner_grid = GridSpec(128, grid2.x0 / t, grid2.dx / t)
    inner = apply_Cm(mg, dilate(f, 1 / t), dilate(g, 1 / t), inner_grid,
                     xi_band=12.0, xi_step=1.0 / 32.0)
    gap_conj = float(np.max(np.abs(lhs.samples - dilate(inner, t).samples)))

    el = time.perf_counter() - t0
    ok = (gap_prod <= 1e-6 and gap_shift <= 1e-6 and gap_torus <= 1e-13
          and gap_sep <= 1e-8 and gap_conj <= 1e-6)
    _verdict(7, "operator identities", ok,
             f"product {gap_prod:.1e}, shift line {gap_shift:.1e}, shift torus "
             f"{gap_torus:.1e}, separable {gap_sep:.1e}, conjugation {gap_conj:.1e}",
             el, 30)


def test_criterion_08_cauchy_schwarz_sharpness():
    t0 = time.perf_counter()
    one = make_symbol({"kind": "constant", "value": 1.0})
    exps = (2.0, 2.0, 2.0, 2.0, 1.0, 1.0)
    st = estimate_norm_torus(one, exps, trials=64, seed=31)
    sr = estimate_norm_real(one, exps, trials=16, seed=31)
    ok = (1 - 1e-6 <= st.max_ratio <= 1 + 1e-4
          and 1 - 1e-6 <= sr.max_ratio <= 1 + 1e-4
          and "self" in st.argmax_id and "self" in sr.argmax_id)
    el = time.perf_counter() - t0
    _verdict(8, "Cauchy-Schwarz sharpness", ok,
             f"torus max {st.max_ratio:.8f} at {st.argmax_id}, "
             f"line max {sr.max_ratio:.8f} at {sr.argmax_id}", el, 20)


def test_criterion_09_g_regulated_certification():
    t0 = time.perf_counter()
    sgn = make_symbol({"kind": "sign_alpha", "alpha": 2.0})
    rng = np.random.default_rng(2029)
    pts = []
    while len(pts) < 20:
        x, y = rng.uniform(-2, 2, size=2)
        if abs(x + 2.0 * y) >= 0.3:  # settled by eps = 2^-6
            pts.append((float(x), float(y)))
    eps_seq = [2.0**-k for k in range(1, 7)]
    worst_erf = 0.0
    for eps in eps_seq:
        mm = mollify_symbol(sgn, eps)
        xs = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        want = erf((xs + 2.0 * ys) / (eps * math.sqrt(5.0)))
        worst_erf = max(worst_erf, float(np.max(np.abs(mm.evaluate(xs, ys) - want))))
    rep = check_g_regulated(sgn, pts, eps_seq)
    worst_psi = 0.0
    for alpha in (0.5, 2.0, 5.0):
        for t in np.linspace(-3, 3, 13):
            worst_psi = max(worst_psi,
                            abs(psi_alpha(alpha, float(t)) - _psi_alpha_closed(alpha, float(t))))
    el = time.perf_counter() - t0
    ok = worst_erf <= 1e-6 and worst_psi <= 1e-9 and rep.passed
    _verdict(9, "G-regulated certification", ok,
             f"erf gap {worst_erf:.2e} on 20 points x 6 eps, psi_alpha gap {worst_psi:.2e}",
             el, 5)


def test_criterion_10_transference_bridges():
    t0 = time.perf_counter()
    mg = make_symbol({"kind": "gaussian2d", "sigma": 1.0})
    sh = make_symbol({"kind": "shift", "a": 0.5, "b": -0.25})
    f = build_trigpoly({0: 0.4, 1: 0.3, -2: 0.3})
    g = build_trigpoly({0: 0.5, -1: 0.5})
    fwd_tail = forward_bridge_gap(mg, f, g, 1.0, 2.0**-7)["gap"]
    fwd_shift = forward_bridge_gap(sh, f, g, 0.5, 2.0**-5)
    fl = named_function("custom_gaussian", radius=8.0, sigma=1.0)
    gl = named_function("custom_gaussian", radius=8.0, sigma=1.3)
    rev_tail = reverse_bridge_gap(mg, fl, gl, 2.0**-5)["gap"]
    rev_shift = reverse_bridge_gap(
        sh, fl, gl, 2.0**-4,
        closed_f=lambda x: np.exp(-np.asarray(x) ** 2),
        closed_g=lambda x: np.exp(-((np.asarray(x) / 1.3) ** 2)),
    )
    ok = (fwd_tail <= 1e-3 and rev_tail <= 1e-3
          and fwd_shift["gap_pm_closed"] <= 1e-9 and fwd_shift["gap_cm_closed"] <= 1e-9
          and rev_shift["gap"] <= 1e-9 and rev_shift["gap_pm_closed"] <= 1e-9)
    el = time.perf_counter() - t0
    _verdict(10, "transference bridges", ok,
             f"forward tail {fwd_tail:.2e}, reverse tail {rev_tail:.2e}, "
             f"shift closed forms {max(fwd_shift['gap_pm_closed'], rev_shift['gap']):.2e}",
             el, 60)


def test_criterion_11_reproducibility(tmp_path):
    t0 = time.perf_counter()
    sym = tmp_path / "sign.json"
    sym.write_text(json.dumps({"kind": "sign_alpha", "alpha": 2.0}))
    blobs = []
    for name in ("first", "second"):
        rep = tmp_path / f"{name}.json"
        csv = tmp_path / f"{name}.csv"
        rc = cli_main([
            "transfer", "--symbol", str(sym),
            "--exponents", "2,2,2,2,1,1", "--t-grid", "geometric:1..2^-4:5",
            "--trials", "8", "--seed", "424242", "--grid-points", "1024",
            "--max-degree", "8", "--line-trials", "2",
            "--report", str(rep), "--csv", str(csv),
        ])
        assert rc == 0
        doc = json.loads(rep.read_text())
        doc.pop("created")
        blobs.append((json.dumps(doc, sort_keys=True), csv.read_text()))
    el = time.perf_counter() - t0
    ok = blobs[0] == blobs[1]
    _verdict(11, "transfer reproducibility", ok,
             f"two seeded runs byte-identical up to the write timestamp "
             f"({len(blobs[0][0])} bytes of report)", el, 60)
