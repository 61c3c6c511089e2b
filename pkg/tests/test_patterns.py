import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shotgun_id import Pattern, ProbVector, ZLattice, critical_ratio, collision_prob, renyi2, restrict, sample, translate
from shotgun_id.patterns import splitmix64, trial_rng

from conftest import GROUP_KINDS, random_element, random_shape

Z = ZLattice(1)


def test_pi_examples():
    assert collision_prob(ProbVector(["1/2", "1/2"]), 3) == Fraction(1, 4)
    assert collision_prob(ProbVector([0.2, 0.3, 0.5]), 1) == pytest.approx(1.0)
    assert collision_prob(ProbVector.uniform(3), 2) == Fraction(1, 3)
    with pytest.raises(ValueError):
        collision_prob(ProbVector.uniform(2), 0)


def test_renyi_examples():
    assert renyi2(ProbVector.uniform(2)) == pytest.approx(math.log(2))
    assert renyi2(ProbVector.uniform(4)) == pytest.approx(math.log(4))
    assert renyi2(ProbVector(["3/4", "1/4"])) == pytest.approx(0.470004, abs=1e-6)
    assert critical_ratio(ProbVector.uniform(2)) == pytest.approx(2 / math.log(2))


@pytest.mark.parametrize("weights", [[1], ["1/2", "1/3"], [1.2, -0.2], ["1", "0"], [0.5, 0.5 + 1e-9]])
def test_prob_vector_rejects(weights):
    with pytest.raises(ValueError):
        ProbVector(weights)


def test_prob_vector_modes():
    assert ProbVector(["1/3", "2/3"]).exact
    assert not ProbVector([0.25, 0.75]).exact


weights_st = st.lists(st.integers(0, 20), min_size=2, max_size=6).filter(lambda ws: sum(1 for w in ws if w) >= 2)


@settings(max_examples=300, deadline=None)
@given(weights_st, st.integers(2, 12))
def test_pi_power_sandwich(ws, i):
    total = sum(ws)
    p = ProbVector([Fraction(w, total) for w in ws])
    pi2 = collision_prob(p, 2)
    val = collision_prob(p, i)
    assert val >= pi2 ** (i - 1)
    # upper bound pi2^(i/2), compared exactly after squaring
    assert val * val <= pi2**i


def test_translate_example():
    w = Pattern.from_string(Z.shape([0, 1]), "01")
    t = translate(Z, w, (1,))
    assert list(t.shape) == [(-1,), (0,)]
    assert t[(-1,)] == 0 and t[(0,)] == 1
    assert translate(Z, w, (0,)) == w


@pytest.mark.parametrize("kind", sorted(GROUP_KINDS))
def test_translate_round_trip_and_composition(kind):
    ctx = GROUP_KINDS[kind]()
    rng = random.Random(23)
    for _ in range(100):
        A = random_shape(ctx, rng, rng.randint(1, 6))
        w = Pattern(A, [rng.randrange(3) for _ in A])
        g, h = random_element(ctx, rng), random_element(ctx, rng)
        assert translate(ctx, translate(ctx, w, g), ctx.inv(g)) == w
        assert translate(ctx, translate(ctx, w, g), h) == translate(ctx, w, ctx.mul(g, h))


def test_restrict_examples():
    w = Pattern.from_string(Z.shape(range(4)), "0110")
    assert restrict(w, Z.shape([1, 2])).as_string() == "11"
    assert restrict(w, w.shape) == w
    assert len(restrict(w, []).shape) == 0
    with pytest.raises(ValueError):
        restrict(w, Z.shape([7]))


def test_pattern_validation():
    with pytest.raises(ValueError):
        Pattern(Z.shape([0, 1]), [0])
    with pytest.raises(ValueError):
        Pattern.from_string(Z.shape([0, 1]), "02").check_alphabet(2)


def test_sample_deterministic():
    shape = Z.shape(range(50))
    p = ProbVector.uniform(3)
    assert sample(trial_rng(42, 7), shape, p) == sample(trial_rng(42, 7), shape, p)
    assert sample(trial_rng(42, 7), shape, p) != sample(trial_rng(42, 8), shape, p)


def test_sample_near_degenerate():
    p = ProbVector([1 - 1e-12, 1e-12])
    w = sample(trial_rng(1, 0), Z.shape(range(1000)), p)
    assert not w.symbols.any()


def test_sample_frequencies_within_3_sigma():
    p = ProbVector(["1/2", "1/3", "1/6"])
    n = 100_000
    w = sample(trial_rng(9, 0), Z.shape(range(n)), p)
    counts = np.bincount(w.symbols, minlength=3)
    for c, q in zip(counts, p.as_float()):
        assert abs(c - n * q) <= 3 * math.sqrt(n * q * (1 - q))


def test_splitmix_is_injective_on_sample():
    xs = range(10_000)
    assert len({splitmix64(x) for x in xs}) == len(xs)
