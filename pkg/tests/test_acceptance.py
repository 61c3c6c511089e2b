"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they are also
repeated in the terminal summary.
"""
import csv
import io
import itertools
import json
import math
import random
import time
from fractions import Fraction

import numpy as np

from shotgun_id import (
    CyclicGroup, FreeGroup, Heisenberg, Instance, OverlapFamily, ProbVector, ZLattice, ball,
    certify_nonidentifiable, disjoint_repeat_prob, dsc_greedy, exact_repeat_prob,
    find_repeated_shells, identifiability_lower_bound, oracle_identifiable, repeated_shell_lower_bound, sample,
    set_inverse, set_product, stabilizer, trial_rng, unique_labeling_certificate,
)
from shotgun_id.cli import main as cli_main
from shotgun_id.probability import exceptional_bound_value, identifiability_bound_value, repeated_shell_bound_value
from shotgun_id.shells import iter_repeated_pairs
from shotgun_id.simulate import ScenarioConfig, sweep

from conftest import (
    GROUP_KINDS, brute_repeat_prob, exact_mass, labeling_array, naive_reads, random_element,
    random_shape,
)

LINES = []


def report(n, ok, detail, capsys):
    line = f"ACCEPTANCE {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    LINES.append(line)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def pi(weights, i):
    return sum(Fraction(w) ** i for w in weights)


def _repeat_cases():
    """200 random (group kind, A, g, p) with |A u gA| <= 12 and rational p, 40 per kind."""
    cases = []
    for idx, kind in enumerate(sorted(GROUP_KINDS)):
        ctx = GROUP_KINDS[kind]()
        rng = random.Random(1000 + idx)
        got = 0
        while got < 40:
            A = random_shape(ctx, rng, rng.randint(1, 6), radius=2)
            g = random_element(ctx, rng, radius=2)
            ground = set(A) | {ctx.mul(g, a) for a in A}
            q = rng.randint(2, 3)
            if len(ground) > 12 or q ** len(ground) > 1 << 14:
                continue
            ws = [rng.randint(1, 5) for _ in range(q)]
            p = [Fraction(w, sum(ws)) for w in ws]
            cases.append((ctx, A, g, p))
            got += 1
    return cases


REPEAT_CASES = _repeat_cases()


def test_criterion_01_exact_repeat(capsys):
    start = time.perf_counter()
    mismatches = sum(
        exact_repeat_prob(ctx, A, g, ProbVector(p)) != brute_repeat_prob(ctx, A, g, p)
        for ctx, A, g, p in REPEAT_CASES
    )
    elapsed = time.perf_counter() - start
    report(1, mismatches == 0 and elapsed < 60,
           f"{len(REPEAT_CASES)} cases, {mismatches} mismatches, {elapsed:.1f}s (limit 60s)", capsys)


def test_criterion_02_bound_sandwich(capsys):
    checked = violations = 0
    for ctx, A, g, p in REPEAT_CASES:
        if g == ctx.identity:
            continue
        checked += 1
        value = exact_repeat_prob(ctx, A, g, ProbVector(p))
        pi2 = pi(p, 2)
        # upper side squared to stay in exact arithmetic
        if not (pi2 ** len(A) <= value and value ** 2 <= pi2 ** len(A)):
            violations += 1
    report(2, violations == 0 and checked > 150, f"{checked} cases with g != e, {violations} violations", capsys)


def test_criterion_03_disjoint_repeats(capsys):
    Z, Z2 = ZLattice(1), ZLattice(2)
    rng = random.Random(3)
    mismatches = checked = 0
    for a_size in range(1, 7):
        for n in range(2, 12 // a_size + 1):
            for ctx in (Z, Z2):
                A = ctx.shape([(i,) if ctx is Z else (i, i % 2) for i in range(a_size)])
                gs = [(20 * k,) if ctx is Z else (20 * k, -7 * k) for k in range(1, n)]
                q = 2 if a_size * n > 8 else rng.randint(2, 3)
                ws = [rng.randint(1, 4) for _ in range(q)]
                p = [Fraction(w, sum(ws)) for w in ws]
                rows = labeling_array(a_size * n, q)
                blocks = rows.reshape(len(rows), n, a_size)
                ok = (blocks == blocks[:, :1, :]).all(axis=(1, 2))
                checked += 1
                mismatches += disjoint_repeat_prob(ctx, A, gs, ProbVector(p)) != exact_mass(rows[ok], p)
    # Monte Carlo: 3 disjoint copies of a 2-cell window under p = (1/3, 2/3)
    p = [Fraction(1, 3), Fraction(2, 3)]
    target = disjoint_repeat_prob(Z, Z.shape([0, 1]), [(10,), (20,)], ProbVector(p))
    assert target == pi(p, 3) ** 2
    trials = 10**5
    gen = np.random.Generator(np.random.Philox(20240))
    draws = gen.choice(2, size=(trials, 3, 2), p=[float(x) for x in p])
    freq = float((draws == draws[:, :1, :]).all(axis=(1, 2)).mean())
    sigma = math.sqrt(float(target) * (1 - float(target)) / trials)
    z = abs(freq - float(target)) / sigma
    report(3, mismatches == 0 and z <= 3,
           f"{checked} enumeration cases, {mismatches} mismatches; MC {freq:.5f} vs {float(target):.5f} ({z:.2f} sigma)",
           capsys)


def _criterion4_instances():
    Z, C6 = ZLattice(1), CyclicGroup(6)
    return [
        Instance(Z, [0, 1, 2], [0, 1]),
        Instance(Z, [0, 1], [0, 1, 2]),
        Instance(C6, ball(C6, 2), ball(C6, 1)),
    ]


def test_criterion_04_certificate_soundness(capsys):
    start = time.perf_counter()
    patterns = exceptions = 0
    for inst in _criterion4_instances():
        K = list(inst.K)
        families = [OverlapFamily([inst.ctx.shape(s)]) for n in range(1, len(K) + 1) for s in itertools.combinations(K, n)]
        families.append(OverlapFamily([inst.K]))
        for w in inst.all_patterns():
            patterns += 1
            truth = oracle_identifiable(inst, w).identifiable
            exceptions += any(unique_labeling_certificate(inst, f, w).certified and not truth for f in families)
            exceptions += certify_nonidentifiable(inst, w).certified and truth
    elapsed = time.perf_counter() - start
    report(4, exceptions == 0 and elapsed < 300,
           f"{patterns} patterns over 3 instances, {exceptions} exceptions, {elapsed:.1f}s (limit 300s)", capsys)


def test_criterion_05_swap_read_invariance(capsys):
    Z, F2, H = ZLattice(1), FreeGroup(2), Heisenberg()
    cases = [
        (Instance(Z, range(24), [0, 1, 2]), ProbVector.uniform(2)),
        (Instance(ZLattice(2), [(i, j) for i in range(5) for j in range(5)], [(0, 0), (1, 0), (0, 1)]), ProbVector.uniform(2)),
        (Instance(CyclicGroup(20), range(0, 20, 2), [0, 1, 2]), ProbVector(["2/3", "1/3"])),
        (Instance(F2, ball(F2, 1), ball(F2, 1)), ProbVector(["9/10", "1/10"])),
        (Instance(H, ball(H, 1), ball(H, 1)), ProbVector(["9/10", "1/10"])),
    ]
    pairs = failures = 0
    n_patterns = 10**4
    for t in range(n_patterns):
        inst, p = cases[t % len(cases)]
        w = sample(trial_rng(555, t), inst.CK, p)
        base = naive_reads(inst.ctx, inst.C, inst.K, dict(w.items()))
        for pair in find_repeated_shells(inst, w):
            pairs += 1
            failures += naive_reads(inst.ctx, inst.C, inst.K, dict(pair.swap_witness.items())) != base
    report(5, failures == 0 and pairs > 0, f"{n_patterns} patterns, {pairs} blocking pairs, {failures} read mismatches", capsys)


def _closed_shell(inst, h):
    ctx = inst.ctx
    out = set()
    for c in inst.C:
        foot = {ctx.mul(c, k) for k in inst.K}
        if h in foot:
            out |= foot
    return out


def test_criterion_06_dsc(capsys):
    rng = random.Random(66)
    kinds = sorted(GROUP_KINDS)
    failures = 0
    for i in range(100):
        ctx = GROUP_KINDS[kinds[i % len(kinds)]]()
        inst = Instance(ctx, random_shape(ctx, rng, rng.randint(2, 12), 3), random_shape(ctx, rng, rng.randint(1, 4), 1))
        B = ctx.shape(rng.sample(list(inst.CK), rng.randint(1, len(inst.CK))))
        D = dsc_greedy(inst, B)
        kk = set_product(ctx, set_inverse(ctx, inst.K), inst.K)
        closed = [_closed_shell(inst, d) for d in D]
        disjoint = all(a.isdisjoint(b) for a, b in itertools.combinations(closed, 2))
        big_enough = len(D) * len(set_product(ctx, kk, kk)) >= len(B)
        failures += not (disjoint and big_enough and set(D) <= set(B))
    report(6, failures == 0, f"100 cases, {failures} failures", capsys)


THRESHOLD_RS = [6, 8, 12, 16, 20, 24, 28, 35, 40]


def test_criterion_07_threshold_trend(capsys):
    start = time.perf_counter()
    cfg = ScenarioConfig("ex1", {"d": 1, "ell": 1, "R": 5000, "r": THRESHOLD_RS[0]}, trials=500, seed=2024)
    results = sweep(cfg, "r", THRESHOLD_RS)
    elapsed = time.perf_counter() - start
    r_star = 2 * math.log(5000) / math.log(2)
    frac = {res.resolved["r"]: res.frac_id for res in results}
    nonid = {res.resolved["r"]: res.frac_nonid for res in results}
    with capsys.disabled():
        print(f"\n  threshold r* = {r_star:.2f}; r, cert_id, cert_nonid, unknown")
        for res in results:
            print(f"  {res.resolved['r']:>3} {res.n_cert_id:>4} {res.n_cert_nonid:>4} {res.n_unknown:>4}")
    drops = []
    for a, b in zip(results, results[1:]):
        fa, fb = a.frac_id, b.frac_id
        sigma = math.sqrt((fa * (1 - fa) + fb * (1 - fb)) / 500)
        if fb < fa - 2 * max(sigma, 1 / 500):
            drops.append((a.resolved["r"], b.resolved["r"]))
    ok = frac[35] >= 0.9 and nonid[8] >= 0.9 and not drops
    report(7, ok, f"id@35={frac[35]:.3f} nonid@8={nonid[8]:.3f} drops={drops} ({elapsed:.0f}s)", capsys)


def _cyclic_symmetric_shapes(ctx, rng):
    # unions of subgroup cosets have nontrivial stabilizers
    m = ctx.m
    for step in (d for d in range(1, m + 1) if m % d == 0):
        subgroup = range(0, m, step)
        reps = rng.sample(range(step), rng.randint(1, step))
        yield ctx.shape([(r + s) % m for r in reps for s in subgroup])


def test_criterion_08_stabilizer_bound(capsys):
    violations = mismatches = 0
    total = 0
    kinds = dict(GROUP_KINDS, cyclic12=lambda: CyclicGroup(12))
    for idx, kind in enumerate(sorted(kinds)):
        ctx = kinds[kind]()
        rng = random.Random(800 + idx)
        shapes = []
        if isinstance(ctx, CyclicGroup):
            while len(shapes) < 100:
                shapes.extend(_cyclic_symmetric_shapes(ctx, rng))
        while len(shapes) < 500:
            shapes.append(random_shape(ctx, rng, rng.randint(1, 8), 2))
        for A in shapes[:500]:
            total += 1
            members = set(A)
            cands = {ctx.mul(a, ctx.inv(b)) for a in A for b in A}
            naive = {g for g in cands if {ctx.mul(g, a) for a in A} == members}
            got = set(stabilizer(ctx, A))
            mismatches += got != naive
            violations += len(got) > len(A)
    report(8, violations == 0 and mismatches == 0,
           f"{total} shapes over {len(kinds)} kinds, {violations} violations, {mismatches} mismatches vs search", capsys)


def test_criterion_09_determinism(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "ex1", "params": {"d": 1, "ell": 1, "R": 1500, "r": 22},
                               "trials": 200, "seed": 99}))
    outputs = {}
    for threads in (1, 4, 8):
        out = tmp_path / f"t{threads}.csv"
        assert cli_main(["simulate", "--config", str(cfg), "--threads", str(threads), "--out", str(out)]) == 0
        rows = list(csv.reader(io.StringIO(out.read_text())))
        col = rows[0].index("wall_ms")
        outputs[threads] = "\n".join(",".join(v for i, v in enumerate(row) if i != col) for row in rows)
    same = outputs[1] == outputs[4] == outputs[8]
    report(9, same, "CSV without wall_ms identical across 1, 4, 8 threads" if same else "CSV differs", capsys)


def _rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_10_bound_evaluators(capsys):
    Z = ZLattice(1)
    half = ProbVector.uniform(2)
    # worked examples, hand-evaluated in exact arithmetic
    id_exact = 1 - (Fraction(100**2, 2**40) + Fraction(100 * 79, 2**20))
    inst = Instance(Z, range(60), range(41))
    id_val = identifiability_lower_bound(inst, OverlapFamily([Z.shape(range(40))]), half).value
    id_direct = identifiability_bound_value(100, [(40, 79)], 0.5).value
    s = 10**4 * 2 ** -1.5
    shell_exact = 1 - (8 / s) * (1 / s + 2)
    shell_direct = repeated_shell_bound_value(1, 10**4, 3, 0.5).value
    D = Z.shape(range(3, 3 * 10**4 + 1, 3))
    shell_inst = Instance(Z, range(3 * 10**4 + 2), [0, 1])
    shell_val = repeated_shell_lower_bound(shell_inst, D, half).value
    exc = exceptional_bound_value(100, 0.5).value
    rels = [_rel(id_val, float(id_exact)), _rel(id_direct, float(id_exact)),
            _rel(shell_val, shell_exact), _rel(shell_direct, shell_exact), _rel(exc, 10**6 * 2.0**-49)]
    examples_ok = max(rels) <= 1e-9

    # calibration: bounds stay below Monte Carlo frequencies up to 3 sigma
    q4 = ProbVector.uniform(4)
    cal = Instance(Z, range(3), range(16), alphabet_size=4)
    id_bound = identifiability_lower_bound(cal, OverlapFamily([Z.shape(range(15))]), q4).value
    n = 1000
    id_freq = sum(oracle_identifiable(cal, sample(trial_rng(5, t), cal.CK, q4)).identifiable for t in range(n)) / n
    id_ok = id_freq >= id_bound - 3 * math.sqrt(id_bound * (1 - id_bound) / n)

    shell_cal = Instance(Z, range(3000), [0, 1])
    Dc = dsc_greedy(shell_cal, Z.shape(range(1, 3000)))
    shell_bound = repeated_shell_lower_bound(shell_cal, Dc, half).value
    inside = set(Dc)
    m = 100
    hits = 0
    for t in range(m):
        w = sample(trial_rng(3, t), shell_cal.CK, half)
        hits += any(shell_cal.CK[i] in inside and shell_cal.CK[j] in inside for i, j in iter_repeated_pairs(shell_cal, w))
    shell_freq = hits / m
    shell_ok = shell_freq >= shell_bound - 3 * math.sqrt(max(shell_bound * (1 - shell_bound), 0) / m)
    detail = (f"max rel err {max(rels):.1e}; identifiability {float(id_exact):.7f}, repeated shell {shell_exact:.6f}; "
              f"calibration id {id_bound:.4f} <= {id_freq:.3f}, repeated shell {shell_bound:.4f} <= {shell_freq:.2f}")
    report(10, examples_ok and id_ok and shell_ok, detail, capsys)

