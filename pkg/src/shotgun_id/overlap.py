"""Overlap graphs and the unique-labeling identifiability certificate."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .groups import Element, Shape, set_inverse, set_product, translate_set
from .patterns import Pattern, ProbVector, critical_ratio, collision_prob
from .probability import Bound, identifiability_bound_value
from .reads import Instance


class OverlapFamily:
    """A list of nonempty overlap shapes, each contained in the read shape."""

    def __init__(self, shapes):
        shapes = tuple(s if isinstance(s, Shape) else Shape(s) for s in shapes)
        if not shapes:
            raise ValueError("overlap family is empty")
        if any(not len(s) for s in shapes):
            raise ValueError("overlap family contains the empty shape")
        self.shapes = shapes

    def __len__(self):
        return len(self.shapes)

    def __iter__(self):
        return iter(self.shapes)

    def __eq__(self, other):
        return isinstance(other, OverlapFamily) and self.shapes == other.shapes

    def __hash__(self):
        return hash(self.shapes)

    def __repr__(self):
        return f"OverlapFamily({[list(s) for s in self.shapes]!r})"

    def validate(self, K: Shape):
        for s in self.shapes:
            if not s.issubset(K):
                raise ValueError(f"overlap shape {list(s)} is not inside the read shape")

    def trimmed(self, size: int) -> "OverlapFamily":
        """Keep the first ``size`` elements of each shape in canonical order.

        Any subset choice is valid; canonical order only makes it reproducible.
        """
        if size < 1:
            raise ValueError("trimmed shapes must stay nonempty")
        return OverlapFamily(Shape(s[:size]) for s in self.shapes)


def _family(fam) -> OverlapFamily:
    return fam if isinstance(fam, OverlapFamily) else OverlapFamily(fam)


@dataclass
class OverlapGraph:
    vertices: Shape
    # canonical pair (c1 < c2) -> (g, index of F)
    edges: dict = field(default_factory=dict)

    def edge_list(self) -> list[tuple]:
        return sorted(self.edges)


def _fit(ctx, region: Shape, F: Shape) -> Element | None:
    """Smallest ``h`` with ``hF`` inside ``region``; candidates are ``region * f0^-1``."""
    f0_inv = ctx._inv(F[0])
    for x in region:
        h = ctx._mul(x, f0_inv)
        if all(ctx._mul(h, f) in region for f in F):
            return h
    return None


def build_overlap_graph(inst: Instance, fam) -> OverlapGraph:
    """Edges between centers whose reads share a translate of some family shape.

    ``c1 K & c2 K = c1 (K & d K)`` with ``d = c1^-1 c2``, so a fitting translate
    is found once per offset ``d`` in ``K K^-1`` and reused for every center.
    """
    fam = _family(fam)
    fam.validate(inst.K)
    return inst.memo(("overlap_graph", fam), lambda: _build_graph(inst, fam))


def _build_graph(inst: Instance, fam: OverlapFamily) -> OverlapGraph:
    ctx, K, C = inst.ctx, inst.K, inst.C
    offsets = {}
    for d in set_product(ctx, K, set_inverse(ctx, K)):
        if d == ctx.identity:
            continue
        region = K & translate_set(ctx, d, K)
        for j, F in enumerate(fam):
            if len(F) > len(region):
                continue
            h = _fit(ctx, region, F)
            if h is not None:
                offsets[d] = (h, j)
                break
    graph = OverlapGraph(C)
    for c1 in C:
        for d, (h, j) in offsets.items():
            c2 = ctx._mul(c1, d)
            if c2 not in C:
                continue
            key = (c1, c2) if c1 < c2 else (c2, c1)
            if key not in graph.edges:
                graph.edges[key] = (ctx._mul(c1, h), j)
    return graph


def is_connected(graph: OverlapGraph) -> bool:
    if len(graph.vertices) <= 1:
        return True
    ds = DisjointSet(graph.vertices)
    for a, b in graph.edges:
        ds.merge(a, b)
    return ds.n_subsets == 1


def translate_positions(inst: Instance, F: Shape) -> np.ndarray:
    """Rows of CK positions of ``gF`` for every ``g`` with ``gF`` inside CK."""

    def build():
        ctx, CK = inst.ctx, inst.CK
        pos = CK.position
        f0_inv = ctx._inv(F[0])
        rows = []
        for x in CK:
            g = ctx._mul(x, f0_inv)
            row = [pos(ctx._mul(g, f)) for f in F]
            if None not in row:
                rows.append(row)
        return np.array(rows, dtype=np.int64) if rows else np.empty((0, len(F)), dtype=np.int64)

    return inst.memo(("translates", F), build)


def has_duplicate_rows(rows: np.ndarray) -> bool:
    """Exact duplicate detection, grouping rows by their byte content."""
    if len(rows) < 2:
        return False
    rows = np.ascontiguousarray(rows)
    keys = rows.view(np.dtype((np.void, rows.dtype.itemsize * rows.shape[1]))).ravel()
    return len(np.unique(keys)) < len(keys)


@dataclass(frozen=True)
class Certificate:
    certified: bool
    reason: str | None = None
    pair: object = None


def unique_labeling_certificate(inst: Instance, fam, w: Pattern) -> Certificate:
    """Sound, incomplete identifiability test: connected overlap graph plus
    pairwise distinct labelings on every translate of every family shape."""
    inst.check_pattern(w)
    fam = _family(fam)
    connected = inst.memo(("connected", fam), lambda: is_connected(build_overlap_graph(inst, fam)))
    if not connected:
        return Certificate(False, "disconnected")
    for F in fam:
        if has_duplicate_rows(w.symbols[translate_positions(inst, F)]):
            return Certificate(False, "duplicate translate")
    return Certificate(True)


def subfamily_connectivity_check(inst: Instance, fam_a, fam_b) -> bool:
    """Shrinking every shape cannot disconnect the overlap graph."""
    fam_a, fam_b = _family(fam_a), _family(fam_b)
    for F in fam_a:
        if not any(G.issubset(F) for G in fam_b):
            raise ValueError(f"no shape of the second family lies inside {list(F)}")
    if not is_connected(build_overlap_graph(inst, fam_a)):
        return True
    return is_connected(build_overlap_graph(inst, fam_b))


@dataclass(frozen=True)
class RecoveryConditions:
    graph_connected: bool
    family_log_ratio: float
    windows_long_enough: bool


def _log_ratio(n: int, ck_size: int) -> float:
    return math.log(n) / math.log(ck_size) if ck_size > 1 else math.nan


def check_recovery_conditions(inst: Instance, fam, p: ProbVector, eps: float = 0.1) -> RecoveryConditions:
    if eps <= 0:
        raise ValueError("eps must be positive")
    fam = _family(fam)
    need = (1 + eps) * critical_ratio(p) * math.log(len(inst.CK))
    return RecoveryConditions(
        graph_connected=is_connected(build_overlap_graph(inst, fam)),
        family_log_ratio=_log_ratio(len(fam), len(inst.CK)),
        windows_long_enough=all(len(F) >= need for F in fam),
    )


def identifiability_lower_bound(inst: Instance, fam, p: ProbVector) -> Bound:
    fam = _family(fam)
    fam.validate(inst.K)
    ctx = inst.ctx
    sizes = [(len(F), len(set_product(ctx, F, set_inverse(ctx, F)))) for F in fam]
    return identifiability_bound_value(len(inst.CK), sizes, collision_prob(p, 2))
