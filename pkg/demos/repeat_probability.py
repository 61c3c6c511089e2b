"""How likely is a pattern to agree with its own shift?

A window A of cells repeats under a shift g when every cell u in A carries the same
symbol as g*u. Chaining u -> g*u splits A | gA into orbits, and each orbit must be
constant, so the probability is a product of collision probabilities, one per orbit.
"""
from fractions import Fraction

from shotgun_id import (
    ProbVector, ZLattice, disjoint_repeat_prob, exact_repeat_prob, orbit_decomposition, collision_prob,
    repeat_prob_bounds,
)

Z = ZLattice(1)
p = ProbVector(["1/4", "3/4"])
print(f"symbol weights {[str(x) for x in p]}, pi_2 = {collision_prob(p, 2)}")

# A shift smaller than the window makes one long orbit.
A = Z.shape(range(6))
for shift in (1, 2, 4, 6):
    dec = orbit_decomposition(Z, A, (shift,))
    exact = exact_repeat_prob(Z, A, (shift,), p)
    lo, hi = repeat_prob_bounds(Z, A, (shift,), p)
    print(f"shift {shift}: orbit sizes {dec.sizes()}, P = {exact} = {float(exact):.3e}, "
          f"sandwich [{float(lo):.3e}, {float(hi):.3e}]")

# Copies of A far apart are independent: n copies agree with probability pi_n^|A|.
for n in (2, 3, 4):
    shifts = [(100 * k,) for k in range(1, n)]
    value = disjoint_repeat_prob(Z, Z.shape(range(3)), shifts, p)
    assert value == collision_prob(p, n) ** 3
    print(f"{n} disjoint copies of a 3-cell window: {value} ({float(value):.3e})")

assert exact_repeat_prob(Z, A, (0,), p) == Fraction(1)
