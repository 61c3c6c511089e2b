"""Shells, repeated-shell blocking pairs and the non-identifiability certificate."""
from __future__ import annotations

import heapq
import math
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .groups import Element, Shape, set_inverse, set_product, translate_set
from .overlap import Certificate, _log_ratio
from .patterns import Pattern, ProbVector, critical_ratio, collision_prob
from .probability import Bound, repeated_shell_bound_value
from .reads import Instance, class_members


@dataclass(frozen=True)
class ShellInfo:
    h: Element
    covering_centers: Shape
    shell: Shape
    closed_shell: Shape
    shell_type: Shape


class _ShellTables:
    """Pattern-independent shell data for every cell of CK."""

    def __init__(self, inst: Instance):
        ctx, CK = inst.ctx, inst.CK
        covering = [[] for _ in CK]
        for i, row in enumerate(inst.read_index):
            for pos in row:
                covering[pos].append(i)
        self.covering = [tuple(c) for c in covering]
        self.types = []
        for pos, h in enumerate(CK):
            h_inv = ctx._inv(h)
            self.types.append(Shape(ctx._mul(h_inv, inst.C[i]) for i in self.covering[pos]))
        groups = defaultdict(list)
        for pos, t in enumerate(self.types):
            groups[t].append(pos)
        self.groups = dict(groups)
        self._inst = inst
        self._shell_cols: dict = {}

    def relative_shell(self, alpha: Shape) -> Shape:
        ctx = self._inst.ctx
        return set_product(ctx, alpha, self._inst.K) - Shape([ctx.identity])

    def shell_matrix(self, alpha: Shape) -> np.ndarray:
        """Rows ``pos(a s)`` for members ``a`` of type ``alpha`` and ``s`` in the relative shell."""
        try:
            return self._shell_cols[alpha]
        except KeyError:
            pass
        inst = self._inst
        ctx, CK = inst.ctx, inst.CK
        rel = self.relative_shell(alpha)
        members = self.groups[alpha]
        mat = np.empty((len(members), len(rel)), dtype=np.int64)
        for r, pos in enumerate(members):
            mat[r] = [CK.position(ctx._mul(CK[pos], s)) for s in rel]
        self._shell_cols[alpha] = mat
        return mat


def _tables(inst: Instance) -> _ShellTables:
    return inst.memo("shell_tables", lambda: _ShellTables(inst))


def shell_info(inst: Instance, h: Element) -> ShellInfo:
    pos = inst.CK.position(h)
    if pos is None:
        raise ValueError(f"{h} is not in CK")
    ctx = inst.ctx
    tab = _tables(inst)
    covering_centers = Shape(inst.C[i] for i in tab.covering[pos])
    closed = set_product(ctx, covering_centers, inst.K)
    return ShellInfo(h, covering_centers, closed - Shape([h]), closed, tab.types[pos])


def shell_type_index(inst: Instance, A) -> dict[Shape, Shape]:
    """Partition of ``A`` by shell type."""
    tab = _tables(inst)
    out = defaultdict(list)
    for a in A:
        pos = inst.CK.position(a)
        if pos is None:
            raise ValueError(f"{a} is not in CK")
        out[tab.types[pos]].append(a)
    return {t: Shape(m) for t, m in sorted(out.items(), key=lambda kv: kv[1][0])}


def swap_labels(w: Pattern, a: Element, b: Element) -> Pattern:
    """Exchange the labels at ``a`` and ``b``."""
    if a == b:
        raise ValueError("swap needs two distinct cells")
    i, j = w.shape.position(a), w.shape.position(b)
    if i is None or j is None:
        raise ValueError("swap cells must lie in the pattern shape")
    syms = w.symbols.copy()
    syms[i], syms[j] = syms[j], syms[i]
    return Pattern(w.shape, syms)


@dataclass(frozen=True)
class BlockingPair:
    a: Element
    b: Element
    source: Pattern

    @cached_property
    def swap_witness(self) -> Pattern:
        return swap_labels(self.source, self.a, self.b)


def _row_groups(rows: np.ndarray) -> list[np.ndarray]:
    """Index groups (size >= 2) of identical rows."""
    rows = np.ascontiguousarray(rows)
    if rows.shape[1] == 0:
        return [np.arange(len(rows))] if len(rows) > 1 else []
    keys = rows.view(np.dtype((np.void, rows.dtype.itemsize * rows.shape[1]))).ravel()
    _, inverse, counts = np.unique(keys, return_inverse=True, return_counts=True)
    if counts.max(initial=0) < 2:
        return []
    order = np.argsort(inverse.ravel(), kind="stable")
    ends = np.cumsum(counts)
    starts = ends - counts
    return [order[a:b] for a, b in zip(starts[counts > 1], ends[counts > 1])]


def iter_repeated_pairs(inst: Instance, w: Pattern):
    """Yield CK position pairs ``(i, j)``, ``i < j``, carrying a repeated shell, in sorted order.

    Cells are bucketed by shell type and shell labels; within a bucket, a cell
    pairs with later cells of a different center label whose covering centers
    are disjoint from its own.
    """
    tab = _tables(inst)
    syms = w.symbols
    partners: dict[int, list] = {}
    for alpha, members in tab.groups.items():
        if len(members) < 2:
            continue
        members = np.asarray(members)
        for grp in _row_groups(syms[tab.shell_matrix(alpha)]):
            cells = np.sort(members[grp])
            labels = syms[cells]
            if (labels == labels[0]).all():
                continue
            by_label = {int(a): cells[labels == a] for a in np.unique(labels)}
            for a, arr in by_label.items():
                others = [o for b, o in by_label.items() if b != a]
                for pos in arr:
                    partners[int(pos)] = others
    for i in sorted(partners):
        cov = set(tab.covering[i])
        later = [arr[np.searchsorted(arr, i, side="right"):] for arr in partners[i]]
        for j in heapq.merge(*later):
            if cov.isdisjoint(tab.covering[j]):
                yield i, int(j)


def find_repeated_shells(inst: Instance, w: Pattern) -> list[BlockingPair]:
    """Every center-disjoint same-type pair with equal shell labels and different center labels."""
    inst.check_pattern(w)
    CK = inst.CK
    return [BlockingPair(CK[i], CK[j], w) for i, j in iter_repeated_pairs(inst, w)]


def certify_nonidentifiable(inst: Instance, w: Pattern) -> Certificate:
    """Exact non-identifiability certificate from the first non-exceptional repeated shell."""
    inst.check_pattern(w)
    members = None
    for i, j in iter_repeated_pairs(inst, w):
        if members is None:
            members = class_members(inst, w.symbols)
        swapped = w.symbols.copy()
        swapped[i], swapped[j] = swapped[j], swapped[i]
        if not any(np.array_equal(swapped, m) for m in members):
            return Certificate(True, pair=BlockingPair(inst.CK[i], inst.CK[j], w))
    return Certificate(False, "no repeated shell" if members is None else "exceptional")


def dsc_greedy(inst: Instance, B) -> Shape:
    """Greedy subset of ``B`` with pairwise disjoint closed shells.

    After choosing ``d`` every element of ``d (K^-1 K)^2`` is discarded.
    """
    ctx = inst.ctx
    B = B if isinstance(B, Shape) else Shape(B)
    if not B.issubset(inst.CK):
        raise ValueError("B must lie inside CK")
    kk = set_product(ctx, set_inverse(ctx, inst.K), inst.K)
    exclusion = set_product(ctx, kk, kk)
    blocked: set = set()
    chosen = []
    for d in B:
        if d in blocked:
            continue
        chosen.append(d)
        blocked.update(translate_set(ctx, d, exclusion))
    return Shape(chosen)


def satisfies_dsc(inst: Instance, D) -> bool:
    seen: set = set()
    for d in D:
        closed = shell_info(inst, d).closed_shell
        if seen.intersection(closed):
            return False
        seen.update(closed)
    return True


def default_blocking_set(inst: Instance) -> Shape:
    """Cells of the most common shell type (ties to the canonically first)."""
    tab = _tables(inst)
    best = max(tab.groups.values(), key=lambda m: (len(m), -m[0]))
    return Shape(inst.CK[pos] for pos in best)


@dataclass(frozen=True)
class BlockingConditions:
    type_log_ratio: float
    blocking_log_ratio: float
    reads_short_enough: bool


def check_blocking_conditions(inst: Instance, B, p: ProbVector, eps: float = 0.1) -> BlockingConditions:
    if eps <= 0:
        raise ValueError("eps must be positive")
    B = B if isinstance(B, Shape) else Shape(B)
    if not B.issubset(inst.CK):
        raise ValueError("B must lie inside CK")
    ctx = inst.ctx
    kk = set_product(ctx, set_inverse(ctx, inst.K), inst.K)
    n_types = len(shell_type_index(inst, B))
    ck = len(inst.CK)
    return BlockingConditions(
        type_log_ratio=_log_ratio(n_types, ck) if n_types else math.nan,
        blocking_log_ratio=_log_ratio(len(B), ck) if len(B) else math.nan,
        reads_short_enough=len(kk) <= (1 - eps) * critical_ratio(p) * math.log(ck),
    )


def repeated_shell_lower_bound(inst: Instance, D, p: ProbVector) -> Bound:
    """Lower bound on the probability of some repeated shell inside ``D``."""
    D = D if isinstance(D, Shape) else Shape(D)
    if not satisfies_dsc(inst, D):
        raise ValueError("D violates the disjoint shell condition")
    index = shell_type_index(inst, D)
    if any(len(m) < 2 for m in index.values()):
        raise ValueError("every shell type in D needs at least two members")
    kk = set_product(inst.ctx, set_inverse(inst.ctx, inst.K), inst.K)
    return repeated_shell_bound_value(len(index), len(D), len(kk), collision_prob(p, 2))
