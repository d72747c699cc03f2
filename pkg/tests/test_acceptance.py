"""Acceptance criteria, one test each, every one printing a single PASS/FAIL line."""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from stardmp import gen
from stardmp.additive import lemma21_verify, lemma22_check, lemma31_verify, thm32_verify
from stardmp.blockmat import cor43_check, cor45_check, cor47_check, swap_conjugate
from stardmp.geninv import (
    adjoint_pseudo_core_agrees,
    drazin,
    is_star_dmp,
    moore_penrose,
    pseudo_core,
)
from stardmp.matcore import DEFAULT_TOL, adjoint, norm
from stardmp.registry import check

EQ_TOL = DEFAULT_TOL.eq_tol


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail

    return emit


def cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "stardmp", *map(str, args)], capture_output=True, text=True, timeout=600
    )


def test_penrose_suite(report):
    rng = np.random.default_rng(2024)
    worst = 0.0
    start = time.perf_counter()
    for i in range(1000):
        rows, cols = (int(x) for x in rng.integers(1, 9, size=2))
        if i % 4 == 0:
            cols = rows
        rank = None if i % 3 else int(rng.integers(0, min(rows, cols) + 1))
        a = gen.gen_rectangular(10_000 + i, rows, cols, rank)
        x, _ = moore_penrose(a)
        ax, xa = a @ x, x @ a
        res = max(
            norm(ax @ a - a), norm(xa @ x - x), norm(adjoint(ax) - ax), norm(adjoint(xa) - xa)
        ) / (1 + norm(a) ** 2)
        worst = max(worst, res)
    elapsed = time.perf_counter() - start
    report(1, worst <= EQ_TOL and elapsed < 30, f"1000 MP inverses, worst scaled residual {worst:.2e}, {elapsed:.1f}s")


def _drazin_case(i):
    n = 1 + i % 8
    spec = gen.batch_spec(7, i, n)
    kind = i % 5
    if kind == 0:
        return gen.gen_oblique(gen.GenSpec(n, 0, spec.seed))
    if kind == 1:
        return gen.gen_idempotent(spec)
    if kind == 2:
        return gen.gen_star_dmp(spec)
    return gen.gen_oblique(spec)


def test_drazin_suite(report):
    failed = 0
    indices = set()
    for i in range(500):
        res, cert = drazin(_drazin_case(i))
        failed += not cert.passed
        indices.add(res.index)
    worst = 0.0
    for i in range(200):
        spec = gen.batch_spec(8, i, 2 + i % 7)
        a = gen.gen_star_dmp(spec) if i % 2 else gen.gen_oblique(spec)
        cline, _ = drazin(a, method="cline")
        schur, _ = drazin(a, method="schur")
        worst = max(worst, norm(cline.drazin - schur.drazin))
    ok = failed == 0 and worst <= 1e-7
    report(2, ok, f"500 Drazin certificates, {failed} failed, indices {sorted(indices)}; Cline vs Schur max diff {worst:.2e}")


def test_characterization_consistency(report):
    inconsistent = wrong = adjoint_fail = literal_fail = verdict_true = 0
    for i in range(1500):
        kind = ("stardmp", "ep", "random")[i // 500]
        n = 1 + i % 8
        spec = gen.batch_spec(9, i, n)
        a = {"stardmp": gen.gen_star_dmp, "ep": gen.gen_ep, "random": gen.gen_random}[kind](spec)
        rep = is_star_dmp(a)
        inconsistent += not rep.consistent
        wrong += kind != "random" and not rep.verdict
        if rep.verdict:
            verdict_true += 1
            adjoint_fail += not adjoint_pseudo_core_agrees(a)
            literal_fail += not np.allclose(pseudo_core(adjoint(a))[0], pseudo_core(a)[0], atol=1e-8)
    ok = inconsistent == adjoint_fail == wrong == 0
    report(
        3,
        ok,
        f"1500 matrices, {inconsistent} inconsistent, {wrong} wrong verdicts; "
        f"pcore(a*) = pcore(a)* fails on {adjoint_fail}/{verdict_true} "
        f"(literal pcore(a*) = pcore(a) fails on {literal_fail}, reported only)",
    )


def test_orthogonal_and_commuting_products(report):
    bad21 = bad31 = 0
    for i in range(200):
        v = lemma21_verify(*gen.gen_lemma21_pair(gen.batch_spec(21, i, 2 + i % 7)))
        bad21 += not (v.hypotheses_hold and v.side1 and v.consistent)
        v = lemma31_verify(*gen.gen_lemma31_pair(gen.batch_spec(31, i, 2 + i % 7)))
        bad31 += not (v.hypotheses_hold and v.side1 and v.consistent)
    report(4, bad21 == bad31 == 0, f"L2.1 failures {bad21}/200, L3.1 failures {bad31}/200")


def test_triangular_triples(report):
    bad = mislabeled = disagree = 0
    for i in range(200):
        satisfy = i % 2 == 0
        triple = gen.gen_lemma22_triple(gen.batch_spec(22, i, 1 + i % 4), satisfy=satisfy)
        v = lemma22_check(*triple)
        bad += not v.equivalence_ok
        mislabeled += v.side2 != satisfy
        disagree += "sum_forms_disagree" in v.notes
    report(
        5,
        bad == mislabeled == 0,
        f"200 triples (100 satisfying), {bad} equivalence failures, {mislabeled} mislabeled; "
        f"statement and proof sums disagree on {disagree}",
    )


def test_commuting_sum_formula(report):
    bad = 0
    worst = 0.0
    for i in range(200):
        v = thm32_verify(*gen.gen_thm32_pair(gen.batch_spec(32, i, 2 + i % 7)))
        res = v.residuals.get("sum_formula", np.inf)
        worst = max(worst, res)
        bad += not (v.equivalence_ok and res <= 1e-7)
    report(6, bad == 0, f"200 commuting pairs, {bad} failures, worst formula residual {worst:.2e}")


def test_perturbation_theorems(report):
    counts = {}
    for theorem in ("T2.3", "T3.3", "C2.4", "C3.4"):
        bad = false_sides = 0
        for i in range(100):
            spec = gen.batch_spec(23, i, gen.min_dim(theorem) + i % 6)
            v = check(theorem, gen.generate(theorem, spec))
            bad += not (v.hypotheses_hold and v.equivalence_ok and v.consistent)
            false_sides += not v.side1
        counts[theorem] = (bad, false_sides)
    ok = all(b == 0 for b, _ in counts.values())
    detail = ", ".join(f"{t} {b} failures ({f} false)" for t, (b, f) in counts.items())
    report(7, ok, f"100 pairs each: {detail}")


def test_block_theorems(report):
    swaps = {"T4.2": cor43_check, "T4.4": cor45_check, "T4.6": cor47_check}
    bad = {}
    for theorem in ("L4.1", "T4.2", "T4.4", "T4.6"):
        fails = swap_fails = 0
        for i in range(100):
            spec = gen.batch_spec(41, i, 1 + i % 5)
            inst = gen.generate(theorem, spec)
            v = check(theorem, inst)
            fails += not (v.hypotheses_hold and v.side1 and v.consistent)
            if theorem in swaps:
                w = swaps[theorem](swap_conjugate(inst))
                swap_fails += not (w.hypotheses_hold and w.side1 and not w.notes)
        bad[theorem] = (fails, swap_fails)
    ok = all(f == s == 0 for f, s in bad.values())
    detail = ", ".join(f"{t} {f}" + (f" (swap {s})" if t != "L4.1" else "") for t, (f, s) in bad.items())
    report(8, ok, f"100 instances each, failures: {detail}")


def test_fuzz(report):
    proc = cli("fuzz", "--count", 10000, "--dim", 4)
    out = json.loads(proc.stdout)
    nm = out["near_miss"]
    ok = proc.returncode == 0 and out["inconsistent"] == 0 and nm["missed"] == 0 and nm["exact_rate"] >= 0.95
    report(
        9,
        ok,
        f"fuzz exit {proc.returncode}, {out['inconsistent']} inconsistent of {out['instances']}; "
        f"near-miss exact {nm['exact']}/{nm['instances']} ({nm['exact_rate']:.3f}), missed {nm['missed']}",
    )


def test_determinism(report):
    commands = [("verify", t, "--random", 15, "--dim", 3, "--seed", 11) for t in gen.NEAR_MISS_LABELS]
    commands += [("verify", "L2.2", "--random", 15, "--dim", 2, "--seed", 11), ("fuzz", "--count", 1500, "--dim", 5, "--seed", 3)]
    differ = []
    for argv in commands:
        first, second = cli(*argv), cli(*argv)
        if first.stdout != second.stdout or first.returncode != second.returncode or not first.stdout:
            differ.append(" ".join(map(str, argv[:2])))
    report(10, not differ, f"{len(commands)} commands run twice, {len(differ)} differ {differ or ''}".strip())
