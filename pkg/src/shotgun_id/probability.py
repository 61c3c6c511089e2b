"""Orbit decompositions, exact repeat probabilities and closed-form bound evaluators."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from scipy.cluster.hierarchy import DisjointSet

from .groups import Element, Group, Shape, translate_set
from .patterns import ProbVector, collision_prob


@dataclass(frozen=True)
class OrbitDecomposition:
    ground: Shape
    orbits: tuple[Shape, ...]

    def sizes(self) -> list[int]:
        return [len(o) for o in self.orbits]


def orbit_decomposition(ctx: Group, A, g: Element) -> OrbitDecomposition:
    """Classes of ``A | gA`` under the closure of ``u ~ g u`` for ``u`` in ``A``."""
    A = A if isinstance(A, Shape) else Shape(A)
    ground = A | translate_set(ctx, g, A)
    ds = DisjointSet(ground)
    for u in A:
        ds.merge(u, ctx._mul(g, u))
    orbits = sorted((Shape(s) for s in ds.subsets()), key=lambda s: s[0])
    return OrbitDecomposition(ground, tuple(orbits))


def _product(factors, exact: bool):
    factors = list(factors)
    if exact:
        out = Fraction(1)
        for f in factors:
            out *= f
        return out
    if any(f == 0 for f in factors):
        return 0.0
    # log-space: threshold runs multiply hundreds of small factors
    return math.exp(math.fsum(math.log(f) for f in factors))


def exact_repeat_prob(ctx: Group, A, g: Element, p: ProbVector):
    """Probability that an i.i.d. pattern agrees with its ``g``-shift on ``A``."""
    dec = orbit_decomposition(ctx, A, g)
    return _product((collision_prob(p, n) for n in dec.sizes()), p.exact)


def disjoint_repeat_prob(ctx: Group, A, gs, p: ProbVector):
    """Probability that the translates ``A, g_1 A, ..., g_k A`` carry one common labeling.

    The translates must be pairwise disjoint; the identity is always included.
    """
    A = A if isinstance(A, Shape) else Shape(A)
    shifts = Shape([ctx.identity, *gs])
    seen: set = set()
    for g in shifts:
        tr = translate_set(ctx, g, A)
        if seen.intersection(tr):
            raise ValueError("translates are not pairwise disjoint")
        seen.update(tr)
    return collision_prob(p, len(shifts)) ** len(A)


class RepeatBounds(NamedTuple):
    lower: float | Fraction
    upper: float


def repeat_prob_bounds(ctx: Group, A, g: Element, p: ProbVector) -> RepeatBounds:
    """``(pi2**|A|, pi2**(|A|/2))``; requires a non-identity shift."""
    if g == ctx.identity:
        raise ValueError("repeat bounds need g != identity")
    pi2 = collision_prob(p, 2)
    n = len(A)
    return RepeatBounds(pi2**n, float(pi2) ** (n / 2))


def within_repeat_bounds(value, size: int, p: ProbVector) -> bool:
    """Exact sandwich test; the upper bound is compared after squaring."""
    pi2 = collision_prob(p, 2)
    if p.exact:
        return pi2**size <= value and value * value <= pi2**size
    tol = 1e-12
    return pi2**size <= value * (1 + tol) and value * value <= pi2**size * (1 + tol)


# -- closed-form bounds -------------------------------------------------------

class Bound(NamedTuple):
    value: float
    raw: float
    vacuous: bool


def _pow_log(log_pi2: float, exponent: float) -> float:
    return math.exp(exponent * log_pi2)


def identifiability_bound_value(ck_size: int, shapes: list[tuple[int, int]], pi2: float) -> Bound:
    """``1 - sum [ |CK|^2 pi2^|F| + |CK| |FF^-1| pi2^(|F|/2) ]``.

    ``shapes`` lists ``(|F|, |FF^-1|)`` per family member.
    """
    lp = math.log(float(pi2))
    lck = math.log(ck_size)
    loss = math.fsum(
        math.exp(2 * lck + f * lp) + math.exp(lck + math.log(ff) + 0.5 * f * lp) for f, ff in shapes
    )
    raw = 1.0 - loss
    return Bound(raw, raw, raw <= 0)


def repeated_shell_bound_value(n_types: int, n_centers: int, kk_size: int, pi2: float) -> Bound:
    """Lower bound on the repeated-shell probability over a disjoint-shell set."""
    pi2 = float(pi2)
    scale = n_centers * _pow_log(math.log(pi2), kk_size / 2)
    root = math.sqrt(n_types)
    raw = 1.0 - (4 * root / (1 - pi2)) / scale * (root / scale + 2)
    return Bound(raw, raw, raw <= 0)


def exceptional_bound_value(ck_size: int, pi2: float) -> Bound:
    """``|CK|^3 pi2^(|CK|/2 - 1)``, capped at one."""
    raw = math.exp(3 * math.log(ck_size) + (ck_size / 2 - 1) * math.log(float(pi2)))
    return Bound(min(1.0, raw), raw, raw >= 1)


def exceptional_upper_bound(inst, p: ProbVector) -> Bound:
    return exceptional_bound_value(len(inst.CK), collision_prob(p, 2))
