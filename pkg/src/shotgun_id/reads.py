"""The read operator, identifiability classes and the exact identifiability oracle."""
from __future__ import annotations

import hashlib
import itertools
from collections import Counter
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .groups import Group, Shape, set_product, stabilizer
from .patterns import Pattern

DEFAULT_ORACLE_BUDGET = 1 << 24


class BudgetExceeded(RuntimeError):
    pass


class Instance:
    """A shotgun identification problem ``(G, C, K)`` over an alphabet of size ``q``."""

    def __init__(self, ctx: Group, C, K, alphabet_size: int = 2):
        C = C if isinstance(C, Shape) else ctx.shape(C)
        K = K if isinstance(K, Shape) else ctx.shape(K)
        if not len(C) or not len(K):
            raise ValueError("center set and read shape must be nonempty")
        if alphabet_size < 2:
            raise ValueError("alphabet needs at least two symbols")
        self.ctx = ctx
        self.C = C
        self.K = K
        self.alphabet_size = alphabet_size
        self.CK = set_product(ctx, C, K)
        # memo for pattern-independent tables built by other modules
        self._memo: dict = {}

    def __repr__(self):
        return f"Instance({self.ctx!r}, |C|={len(self.C)}, |K|={len(self.K)}, |CK|={len(self.CK)})"

    @cached_property
    def center_stabilizer(self) -> Shape:
        return stabilizer(self.ctx, self.C)

    @cached_property
    def read_index(self) -> np.ndarray:
        """``read_index[i, j]`` is the CK position of ``C[i] * K[j]``."""
        mul, pos = self.ctx._mul, self.CK.position
        return np.array([[pos(mul(c, k)) for k in self.K] for c in self.C], dtype=np.int64)

    @cached_property
    def class_perms(self) -> tuple:
        """For each ``g`` in ``center_stabilizer`` the index map ``i -> pos(g * CK[i])``."""
        mul, pos = self.ctx._mul, self.CK.position
        return tuple(
            (g, np.array([pos(mul(g, h)) for h in self.CK], dtype=np.int64)) for g in self.center_stabilizer
        )

    def memo(self, key, build):
        try:
            return self._memo[key]
        except KeyError:
            value = self._memo[key] = build()
            return value

    def check_pattern(self, w: Pattern):
        if w.shape != self.CK:
            raise ValueError("pattern shape must equal CK")
        w.check_alphabet(self.alphabet_size)

    def all_patterns(self):
        """Every pattern on CK, in canonical (lexicographic) order."""
        for syms in itertools.product(range(self.alphabet_size), repeat=len(self.CK)):
            yield Pattern(self.CK, syms)


class ReadMultiset:
    """Multiset of K-shaped reads with an order-insensitive 128-bit fingerprint."""

    __slots__ = ("K", "counts", "fingerprint")

    def __init__(self, K: Shape, rows: np.ndarray):
        rows = np.ascontiguousarray(rows, dtype=np.int16)
        self.K = K
        self.counts = Counter(r.tobytes() for r in rows)
        h = hashlib.blake2b(digest_size=16)
        for key in sorted(self.counts):
            h.update(len(key).to_bytes(4, "little"))
            h.update(key)
            h.update(self.counts[key].to_bytes(8, "little"))
        self.fingerprint = h.digest()

    def __len__(self):
        return sum(self.counts.values())

    def __eq__(self, other):
        if not isinstance(other, ReadMultiset):
            return NotImplemented
        return multiset_equal(self, other)

    def __hash__(self):
        return hash(self.fingerprint)

    def patterns(self) -> list[Pattern]:
        out = []
        for key, n in sorted(self.counts.items()):
            p = Pattern(self.K, np.frombuffer(key, dtype=np.int16))
            out.extend([p] * n)
        return out

    def __repr__(self):
        return f"ReadMultiset({[p.as_string() for p in self.patterns()]})"


def reads(inst: Instance, w: Pattern) -> ReadMultiset:
    inst.check_pattern(w)
    return ReadMultiset(inst.K, w.symbols[inst.read_index])


def multiset_equal(r1: ReadMultiset, r2: ReadMultiset) -> bool:
    if r1.K != r2.K:
        raise ValueError("read multisets are over different read shapes")
    if r1.fingerprint != r2.fingerprint:
        return False
    return r1.counts == r2.counts


def class_members(inst: Instance, symbols: np.ndarray) -> list[np.ndarray]:
    """Symbol arrays of ``x -> w(g x)`` for every ``g`` in ``center_stabilizer``."""
    return [symbols[perm] for _, perm in inst.class_perms]


def identifiability_class(inst: Instance, w: Pattern) -> set[Pattern]:
    """All patterns equal to ``w`` after a center-preserving translate."""
    inst.check_pattern(w)
    return {Pattern(inst.CK, s) for s in class_members(inst, w.symbols)}


def in_class(inst: Instance, w: Pattern, v: Pattern) -> bool:
    return any(np.array_equal(v.symbols, s) for s in class_members(inst, w.symbols))


def preimage(inst: Instance, rm: ReadMultiset, budget: int = DEFAULT_ORACLE_BUDGET):
    """Yield the symbol tuple of every pattern on CK whose reads equal ``rm``.

    Centers are visited in canonical order and each is assigned a read still
    available in the multiset, subject to agreement with cells already fixed
    by earlier centers. A pattern determines its center-to-read assignment, so
    every preimage element is produced exactly once.
    """
    if rm.K != inst.K:
        raise ValueError("read multiset is over a different read shape")
    keys = sorted(rm.counts)
    distinct = [tuple(int(x) for x in np.frombuffer(k, dtype=np.int16)) for k in keys]
    remaining = [rm.counts[k] for k in keys]
    if sum(remaining) != len(inst.C):
        return
    index = [list(map(int, row)) for row in inst.read_index]
    cells = [-1] * len(inst.CK)
    n_centers = len(inst.C)
    nodes = 0

    def extend(i):
        nonlocal nodes
        if i == n_centers:
            yield tuple(cells)
            return
        idx = index[i]
        for j, read in enumerate(distinct):
            if not remaining[j]:
                continue
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"oracle search exceeded {budget} nodes")
            ok = True
            for pos, s in zip(idx, read):
                cur = cells[pos]
                if cur != -1 and cur != s:
                    ok = False
                    break
            if not ok:
                continue
            written = [pos for pos, s in zip(idx, read) if cells[pos] == -1]
            for pos, s in zip(idx, read):
                cells[pos] = s
            remaining[j] -= 1
            yield from extend(i + 1)
            remaining[j] += 1
            for pos in written:
                cells[pos] = -1

    yield from extend(0)


@dataclass(frozen=True)
class OracleVerdict:
    identifiable: bool
    witness: Pattern | None = None
    preimage_size: int = 0


def oracle_identifiable(inst: Instance, w: Pattern, budget: int = DEFAULT_ORACLE_BUDGET) -> OracleVerdict:
    """Decide identifiability exactly by enumerating the read preimage.

    The witness, when one exists, is the smallest non-class preimage element
    in lexicographic symbol order.
    """
    rm = reads(inst, w)
    members = {tuple(int(x) for x in s) for s in class_members(inst, w.symbols)}
    witness = None
    n = 0
    for cand in preimage(inst, rm, budget):
        n += 1
        if cand not in members and (witness is None or cand < witness):
            witness = cand
    if witness is None:
        return OracleVerdict(True, None, n)
    return OracleVerdict(False, Pattern(inst.CK, witness), n)
