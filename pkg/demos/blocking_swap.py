"""Two different patterns with the same reads, and one pair that only looks like it.

Cells a and b have the same neighbourhood shape and identical labels around them
but different labels on themselves. Swapping the two labels leaves every read
unchanged, so the pattern cannot be recovered from its reads.
"""
from shotgun_id import (
    CyclicGroup, Instance, Pattern, ZLattice, certify_nonidentifiable, find_repeated_shells,
    identifiability_class, oracle_identifiable, reads,
)

Z = ZLattice(1)
inst = Instance(Z, range(7), [0, 1])
w = Pattern(inst.CK, [0, 1, 0, 1, 1, 1, 1, 0])
print("pattern      ", w.as_string())
for pair in find_repeated_shells(inst, w)[:3]:
    swapped = pair.swap_witness
    print(f"swap {pair.a[0]}<->{pair.b[0]}:", swapped.as_string(), "same reads:", reads(inst, swapped) == reads(inst, w))
cert = certify_nonidentifiable(inst, w)
print("certified non-identifiable:", cert.certified, "| exact oracle agrees:", not oracle_identifiable(inst, w).identifiable)

# On a cycle every rotation preserves the centers, so some swaps are just rotations.
cyc = Instance(CyclicGroup(3), range(3), [0])
u = Pattern.from_string(cyc.CK, "011")
print("\ncycle pattern", u.as_string(), "class:", sorted(x.as_string() for x in identifiability_class(cyc, u)))
cert = certify_nonidentifiable(cyc, u)
print("certificate fires:", cert.certified, f"({cert.reason})", "| oracle says identifiable:", oracle_identifiable(cyc, u).identifiable)
