"""Independent brute-force oracles shared by the test modules."""
import itertools
import random
import sys
from fractions import Fraction

import numpy as np
import pytest

from shotgun_id import CyclicGroup, FreeGroup, Heisenberg, ZLattice, ball


def naive_reads(ctx, C, K, labels: dict) -> list:
    """Sorted list of read tuples, built straight from the definition."""
    return sorted(tuple(labels[ctx.mul(c, k)] for k in K) for c in C)


def all_labelings(cells, q):
    cells = list(cells)
    for syms in itertools.product(range(q), repeat=len(cells)):
        yield dict(zip(cells, syms))


def naive_preimage(inst, w) -> set:
    """Every symbol tuple on CK with the same reads as ``w``, by full enumeration."""
    target = naive_reads(inst.ctx, inst.C, inst.K, dict(w.items()))
    out = set()
    for lab in all_labelings(inst.CK, inst.alphabet_size):
        if naive_reads(inst.ctx, inst.C, inst.K, lab) == target:
            out.add(tuple(lab[h] for h in inst.CK))
    return out


def naive_class(inst, w) -> set:
    """Patterns ``x -> w(g x)`` for every ``g`` with ``gC = C``, with the stabilizer found by search."""
    ctx, C = inst.ctx, set(inst.C)
    cands = {ctx.mul(a, ctx.inv(b)) for a in C for b in C}
    stab = [g for g in cands if {ctx.mul(g, c) for c in C} == C]
    lab = dict(w.items())
    return {tuple(lab[ctx.mul(g, h)] for h in inst.CK) for g in stab}


def labeling_array(n_cells, q):
    """All ``q**n_cells`` labelings as rows."""
    return np.indices((q,) * n_cells).reshape(n_cells, -1).T


def exact_mass(rows, weights):
    """Exact total probability of the given labelings under i.i.d. ``weights``."""
    q = len(weights)
    counts = np.stack([(rows == a).sum(axis=1) for a in range(q)], axis=1)
    vecs, mult = np.unique(counts, axis=0, return_counts=True)
    total = Fraction(0)
    for vec, m in zip(vecs, mult):
        term = Fraction(int(m))
        for a, c in enumerate(vec):
            term *= Fraction(weights[a]) ** int(c)
        total += term
    return total


def brute_repeat_prob(ctx, A, g, weights):
    """Mass of labelings of ``A | gA`` with ``x(gu) = x(u)`` on ``A``, by full enumeration."""
    cells = sorted(set(A) | {ctx.mul(g, a) for a in A})
    col = {c: i for i, c in enumerate(cells)}
    rows = labeling_array(len(cells), len(weights))
    ok = np.ones(len(rows), dtype=bool)
    for u in A:
        ok &= rows[:, col[ctx.mul(g, u)]] == rows[:, col[u]]
    return exact_mass(rows[ok], weights)


def random_element(ctx, rng: random.Random, radius=3):
    if isinstance(ctx, ZLattice):
        return tuple(rng.randint(-radius, radius) for _ in range(ctx.d))
    if isinstance(ctx, CyclicGroup):
        return (rng.randrange(ctx.m),)
    if isinstance(ctx, Heisenberg):
        return tuple(rng.randint(-radius, radius) for _ in range(3))
    if isinstance(ctx, FreeGroup):
        letters = [rng.choice([1, -1]) * rng.randint(1, ctx.k) for _ in range(rng.randint(0, radius))]
        return ctx.canonical(letters)
    raise TypeError(ctx)


def random_shape(ctx, rng: random.Random, size, radius=3):
    if isinstance(ctx, CyclicGroup):
        size = min(size, ctx.m)
    elems = set()
    misses = 0
    pool = list(ball(ctx, radius)) if isinstance(ctx, FreeGroup) else None
    while len(elems) < size:
        e = rng.choice(pool) if pool else random_element(ctx, rng, radius)
        if e in elems:
            misses += 1
            if misses > 20 * size:
                # the radius is too small to hold `size` elements
                radius, misses = radius + 1, 0
                pool = list(ball(ctx, radius)) if pool else None
        elems.add(e)
    return ctx.shape(elems)


GROUP_KINDS = {
    "zlattice1": lambda: ZLattice(1),
    "zlattice2": lambda: ZLattice(2),
    "cyclic": lambda: CyclicGroup(7),
    "free": lambda: FreeGroup(2),
    "heisenberg": lambda: Heisenberg(),
}


@pytest.fixture(params=sorted(GROUP_KINDS))
def any_group(request):
    return GROUP_KINDS[request.param]()


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.LINES:
            terminalreporter.write_line(line)
