"""
Acceptance criteria, one test each.

Every test prints a single ``[ACCEPT n] PASS|FAIL ...`` line (shown even
without ``-s``) and then asserts. Run alone with
``pytest tests/test_acceptance.py -v``.
"""
import math
import time
from pathlib import Path

import numpy as np
import pytest

from superlin import fixtures
from superlin.cli import main
from superlin.embedding import (classify, induced_control_system, rank_G, same_system,
                                validate)
from superlin.io import emit_system, parse_system
from superlin.linalg import observability_matrix
from superlin.transform import (PreconditionError, conjugate, expand_rank_visible,
                                merge_dependent_visible, minimal_visible_count,
                                prune_unobservable, realize_minimal_visible, shift,
                                strip_affine_terms)
from superlin.verify import (cosimulate, cosimulate_many, generate_instance,
                             integrate_nonlinear, random_control, _random_P)

from conftest import exact_rank, random_spec

GOLDEN = Path(__file__).parent / "golden"
FIXTURE_NAMES = ["ex1", "ex2a", "ex2b", "ex1_plus", "ex1_prime"]


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[ACCEPT {n}] {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail
    return emit


def test_1_fixture_validity(report):
    t0 = time.perf_counter()
    worst = 0.0
    ok = True
    for name in FIXTURE_NAMES:
        rep = validate(getattr(fixtures, name)())
        ok &= rep.passed
        worst = max(worst, *(rep[c].residual for c in ("PDE-1", "PDE-2")))
    broken = validate(fixtures.ex1_broken())
    res = broken["PDE-1"].residual_poly
    # proportional to y^2: a single y^2 term in the visible row, nothing else
    y2_only = (not broken.passed and [e for e, _ in res[0].items()] == [(0, 2)]
               and res[1].is_zero())
    dt = time.perf_counter() - t0
    ok = ok and worst <= 1e-12 and y2_only and dt < 1.0
    report(1, ok, f"fixtures valid, max PDE residual {worst:.1e}, broken residual "
                  f"{res[0].to_str(['x', 'y'])}, {dt:.2f}s")


def test_2_classification(report):
    want = {"ex1": (1, 0), "ex2a": (2, 0), "ex2b": (1, 2)}
    got = {k: (classify(getattr(fixtures, k)()).m_v, classify(getattr(fixtures, k)()).m_h)
           for k in want}
    report(2, got == want, f"(m_v, m_h) = {got}")


def test_3_minimal_visible_on_fixtures(report):
    counts = {k: minimal_visible_count(getattr(fixtures, k)()) for k in ("ex1", "ex2a", "ex2b")}
    L = fixtures.ex2a()
    real = realize_minimal_visible(L)
    mv = classify(real).m_v
    ok = (counts == {"ex1": 1, "ex2a": 1, "ex2b": 1} and validate(real).passed
          and same_system(L, real) and mv == 1)
    report(3, ok, f"m_v* = {counts}, realized EX2a has {mv} visible")


def variants(spec, seed):
    base = generate_instance(spec, seed)
    scr = generate_instance(type(spec)(**{**spec.__dict__, "scramble": True}), seed)
    rng = np.random.default_rng(seed + 1)
    L = scr.L
    extra = shift(conjugate(L, _random_P(rng, L.m)),
                  rng.uniform(-1, 1, (L.m, L.n)), rng.uniform(-1, 1, L.m))
    return base.true_m_v_star, [base.L, scr.L, extra]


def test_4_minimal_visible_property(report):
    t0 = time.perf_counter()
    bad = []
    for seed in range(100):
        spec = random_spec(seed)
        assert spec.n_x + spec.n_y <= 8 and spec.m <= 6
        truth, Ls = variants(spec, seed)
        got = [minimal_visible_count(L) for L in Ls]
        if any(g != truth for g in got):
            bad.append((seed, truth, got))
    dt = time.perf_counter() - t0
    report(4, not bad and dt < 30, f"100 bases x 3 variants, mismatches {bad[:3]}, {dt:.1f}s")


def transformed(L, rng):
    out = {"conjugate": conjugate(L, _random_P(rng, L.m)) if L.m else L,
           "strip": strip_affine_terms(L),
           "expand": expand_rank_visible(L)}
    try:
        out["merge"] = merge_dependent_visible(L)
        merge_src = L
    except PreconditionError:
        # the merge needs rank G == m_v; expand first when L violates it
        merge_src = out["expand"]
        out["merge"] = merge_dependent_visible(merge_src)
    out["prune"] = prune_unobservable(L)
    return out, merge_src


def test_5_transform_soundness(report):
    systems = [(n, getattr(fixtures, n)()) for n in FIXTURE_NAMES]
    systems += [(f"gen{s}", generate_instance(random_spec(s, s % 2 == 0), s).L)
                for s in range(50)]
    rng = np.random.default_rng(5)
    failures = []
    for name, L in systems:
        outs, merge_src = transformed(L, rng)
        for t, out in outs.items():
            if not (validate(out).passed and same_system(L, out, 1e-9)):
                failures.append((name, t, "unsound"))
        if rank_G(outs["strip"]) != rank_G(L):
            failures.append((name, "strip", "rank"))
        e = outs["expand"]
        if classify(e).m_v != rank_G(e):
            failures.append((name, "expand", "m_v != rank"))
        if rank_G(outs["merge"]) > rank_G(merge_src):
            failures.append((name, "merge", "rank grew"))
    report(5, not failures, f"{len(systems)} systems x 5 transforms, failures {failures[:3]}")


def test_6_cosimulation(report):
    t0 = time.perf_counter()
    L = fixtures.ex1()
    tx = integrate_nonlinear(induced_control_system(L), [1.0, 1.0], None, 1.0, 1e-3)
    err = abs(tx.states[-1, 0] - (2 * math.exp(-1) - math.exp(-2)))
    rng = np.random.default_rng(6)
    worst = 0.0
    for name in FIXTURE_NAMES:
        Lf = getattr(fixtures, name)()
        T = 2.0
        x0s = rng.uniform(-1, 1, (20, Lf.n))
        us = [random_control(rng, T) for _ in range(20)]
        for rep in cosimulate_many(Lf, x0s, us, T=T, h=1e-3):
            worst = max(worst, rep.max_state_gap, rep.max_gp_gap)
    u = random_control(np.random.default_rng(0), 1.0)
    g1 = cosimulate(L, [1.0, 1.0], u, T=1.0, h=1e-2)
    g2 = cosimulate(L, [1.0, 1.0], u, T=1.0, h=5e-3)
    ratio = g1.max_state_gap / g2.max_state_gap
    dt = time.perf_counter() - t0
    ok = err <= 1e-8 and worst <= 1e-6 and 12 <= ratio <= 20 and dt < 10
    report(6, ok, f"x(1) error {err:.1e}, worst gap {worst:.1e}, halving ratio "
                  f"{ratio:.2f}, {dt:.1f}s")


def test_7_pruning(report):
    out = prune_unobservable(fixtures.ex1_plus())
    ok1 = out.m == 1 and validate(out).passed and same_system(out, fixtures.ex1())
    L = fixtures.ex2b()
    kept = prune_unobservable(L).m
    oracle = exact_rank(observability_matrix(L.M, L.G))
    ok = ok1 and kept == 3 == oracle
    report(7, ok, f"EX1+ -> m={out.m}, EX2b keeps m={kept}, exact observability rank {oracle}")


def test_8_cli_golden(report, capsys):
    mismatches = []
    for doc in sorted(GOLDEN.glob("*.json")):
        text = doc.read_text()
        if emit_system(parse_system(text)) != text:
            mismatches.append((doc.stem, "round trip"))
        for cmd in ("min-visible", "classify", "validate"):
            code = main([cmd, str(doc)])
            out = capsys.readouterr().out
            if f"exit {code}\n{out}" != (GOLDEN / f"{doc.stem}.{cmd}.out").read_text():
                mismatches.append((doc.stem, cmd))
    report(8, not mismatches, f"golden mismatches {mismatches}")
