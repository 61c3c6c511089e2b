"""Concrete countable groups and finite-set algebra on them.

Elements are plain tuples of ints in canonical form:

* ``ZLattice(d)``   -- integer vector of length ``d``
* ``CyclicGroup(m)`` -- ``(r,)`` with ``0 <= r < m``
* ``FreeGroup(k)``  -- reduced word; letter ``+i`` is generator ``i`` (1-based),
  ``-i`` its inverse
* ``Heisenberg()``  -- integer triple ``(x, y, z)`` with
  ``(x,y,z)(x',y',z') = (x+x', y+y', z+z'+x*y')``

Canonical order on elements is tuple order, so every ``Shape`` iterates
deterministically.
"""
from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Sequence

Element = tuple

MAX_WORD_LENGTH = 64


class GroupError(ValueError):
    pass


class Shape(Sequence):
    """Finite set of group elements, deduplicated and kept in canonical order."""

    __slots__ = ("_elems", "_index")

    def __init__(self, elements: Iterable[Element] = ()):
        elems = tuple(sorted(set(elements)))
        self._elems = elems
        self._index = {e: i for i, e in enumerate(elems)}

    def __len__(self):
        return len(self._elems)

    def __getitem__(self, i):
        return self._elems[i]

    def __iter__(self) -> Iterator[Element]:
        return iter(self._elems)

    def __contains__(self, e):
        return e in self._index

    def __eq__(self, other):
        if isinstance(other, Shape):
            return self._elems == other._elems
        return NotImplemented

    def __hash__(self):
        return hash(self._elems)

    def __repr__(self):
        return f"Shape({list(self._elems)!r})"

    def index(self, e, *args):
        try:
            return self._index[e]
        except KeyError:
            raise ValueError(f"{e!r} not in shape") from None

    def position(self, e):
        """Index of ``e`` or None."""
        return self._index.get(e)

    @property
    def elements(self) -> tuple:
        return self._elems

    def __or__(self, other):
        return Shape(itertools.chain(self._elems, other))

    def __and__(self, other):
        return Shape(e for e in self._elems if e in other)

    def __sub__(self, other):
        return Shape(e for e in self._elems if e not in other)

    def issubset(self, other) -> bool:
        return all(e in other for e in self._elems)

    def isdisjoint(self, other) -> bool:
        return not any(e in other for e in self._elems)


class Group:
    """Base class; subclasses provide ``identity``, ``_mul``, ``_inv``, ``canonical``."""

    kind = "group"
    identity: Element = ()
    generators: tuple | None = None

    def canonical(self, payload) -> Element:
        raise NotImplementedError

    def _mul(self, g, h):
        raise NotImplementedError

    def _inv(self, g):
        raise NotImplementedError

    def element(self, payload) -> Element:
        return self.canonical(payload)

    def mul(self, g: Element, h: Element) -> Element:
        self._check(g)
        self._check(h)
        return self._mul(g, h)

    def inv(self, g: Element) -> Element:
        self._check(g)
        return self._inv(g)

    def _check(self, g):
        if not isinstance(g, tuple) or self.canonical(g) != g:
            raise GroupError(f"{g!r} is not a canonical element of {self!r}")

    def shape(self, payloads: Iterable) -> Shape:
        return Shape(self.canonical(p) for p in payloads)

    # -- generating set -------------------------------------------------
    def _symmetric(self, gens: Iterable) -> tuple:
        gens = tuple(sorted({self.canonical(t) for t in gens}))
        for t in gens:
            if self._inv(t) not in gens:
                raise GroupError(f"generating set is not symmetric: missing inverse of {t!r}")
        return gens

    def with_generators(self, gens: Iterable) -> "Group":
        clone = object.__new__(type(self))
        clone.__dict__.update(self.__dict__)
        clone.generators = self._symmetric(gens)
        return clone

    def require_generators(self) -> tuple:
        if not self.generators:
            raise GroupError(f"{self!r} has no generating set")
        return self.generators

    def __eq__(self, other):
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self):
        return hash((type(self).__name__, tuple(sorted(self.__dict__.items()))))


class ZLattice(Group):
    kind = "zlattice"

    def __init__(self, d: int, generators: Iterable | None = None):
        if d < 1:
            raise GroupError("dimension must be positive")
        self.d = d
        self.identity = (0,) * d
        if generators is None:
            gens = []
            for i in range(d):
                for s in (1, -1):
                    u = [0] * d
                    u[i] = s
                    gens.append(tuple(u))
            self.generators = tuple(sorted(gens))
        else:
            self.generators = self._symmetric(generators)

    def canonical(self, payload):
        if isinstance(payload, int):
            payload = (payload,)
        payload = tuple(int(x) for x in payload)
        if len(payload) != self.d:
            raise GroupError(f"expected a {self.d}-vector, got {payload!r}")
        return payload

    def _mul(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def _inv(self, g):
        return tuple(-a for a in g)

    def __repr__(self):
        return f"ZLattice({self.d})"


class CyclicGroup(Group):
    kind = "cyclic"

    def __init__(self, m: int, generators: Iterable | None = None):
        if m < 1:
            raise GroupError("modulus must be positive")
        self.m = m
        self.identity = (0,)
        if generators is None:
            self.generators = tuple(sorted({(1 % m,), ((-1) % m,)}))
        else:
            self.generators = self._symmetric(generators)

    def canonical(self, payload):
        if isinstance(payload, int):
            payload = (payload,)
        if len(payload) != 1:
            raise GroupError(f"expected a residue, got {payload!r}")
        return (int(payload[0]) % self.m,)

    def _check(self, g):
        if not (isinstance(g, tuple) and len(g) == 1 and 0 <= g[0] < self.m):
            raise GroupError(f"{g!r} is not a canonical residue mod {self.m}")

    def _mul(self, g, h):
        return ((g[0] + h[0]) % self.m,)

    def _inv(self, g):
        return ((-g[0]) % self.m,)

    def __repr__(self):
        return f"CyclicGroup({self.m})"


def _reduce_word(letters: Iterable[int]) -> tuple:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class FreeGroup(Group):
    kind = "free"

    def __init__(self, k: int, generators: Iterable | None = None):
        if k < 1:
            raise GroupError("rank must be positive")
        self.k = k
        self.identity = ()
        if generators is None:
            self.generators = tuple(sorted((s * i,) for i in range(1, k + 1) for s in (1, -1)))
        else:
            self.generators = self._symmetric(generators)

    def canonical(self, payload):
        if isinstance(payload, str):
            payload = self.parse(payload)
        letters = tuple(int(x) for x in payload)
        for x in letters:
            if x == 0 or abs(x) > self.k:
                raise GroupError(f"letter {x} out of range for rank {self.k}")
        word = _reduce_word(letters)
        if len(word) > MAX_WORD_LENGTH:
            raise GroupError(f"word length {len(word)} exceeds cap {MAX_WORD_LENGTH}")
        return word

    def _check(self, g):
        if not isinstance(g, tuple) or _reduce_word(g) != g or any(x == 0 or abs(x) > self.k for x in g):
            raise GroupError(f"{g!r} is not a reduced word of {self!r}")

    def _mul(self, g, h):
        i = 0
        n = min(len(g), len(h))
        while i < n and g[-1 - i] == -h[i]:
            i += 1
        word = g[: len(g) - i] + h[i:]
        if len(word) > MAX_WORD_LENGTH:
            raise GroupError(f"word length {len(word)} exceeds cap {MAX_WORD_LENGTH}")
        return word

    def _inv(self, g):
        return tuple(-x for x in reversed(g))

    def parse(self, text: str) -> tuple:
        """Parse words like ``"ab"``, ``"aB"`` (capital = inverse) or ``"e"``."""
        letters = []
        for ch in text.strip():
            if ch in "e1 ":
                continue
            idx = ord(ch.lower()) - ord("a") + 1
            letters.append(-idx if ch.isupper() else idx)
        return tuple(letters)

    def format(self, g: Element) -> str:
        if not g:
            return "e"
        return "".join(chr(ord("a") + abs(x) - 1).upper() if x < 0 else chr(ord("a") + x - 1) for x in g)

    def __repr__(self):
        return f"FreeGroup({self.k})"


class Heisenberg(Group):
    kind = "heisenberg"

    def __init__(self, generators: Iterable | None = None):
        self.identity = (0, 0, 0)
        if generators is None:
            self.generators = ((-1, 0, 0), (0, -1, 0), (0, 1, 0), (1, 0, 0))
        else:
            self.generators = self._symmetric(generators)

    def canonical(self, payload):
        payload = tuple(int(x) for x in payload)
        if len(payload) != 3:
            raise GroupError(f"expected an integer triple, got {payload!r}")
        return payload

    def _mul(self, g, h):
        return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])

    def _inv(self, g):
        return (-g[0], -g[1], -g[2] + g[0] * g[1])

    def __repr__(self):
        return "Heisenberg()"


# -- set algebra -----------------------------------------------------------

def set_product(ctx: Group, A: Iterable[Element], B: Iterable[Element]) -> Shape:
    B = tuple(B)
    mul = ctx._mul
    return Shape(mul(a, b) for a in A for b in B)


def set_inverse(ctx: Group, A: Iterable[Element]) -> Shape:
    return Shape(ctx._inv(a) for a in A)


def translate_set(ctx: Group, g: Element, A: Iterable[Element]) -> Shape:
    mul = ctx._mul
    return Shape(mul(g, a) for a in A)


def ball(ctx: Group, r: int) -> Shape:
    """Closed word-metric ball ``T_r`` around the identity (breadth-first)."""
    if r < 0:
        raise GroupError("radius must be nonnegative")
    gens = ctx.require_generators()
    seen = {ctx.identity}
    frontier = [ctx.identity]
    for _ in range(r):
        nxt = []
        for g in frontier:
            for t in gens:
                h = ctx._mul(g, t)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return Shape(seen)


def sphere_sizes(ctx: Group, r: int) -> list[int]:
    sizes = [len(ball(ctx, i)) for i in range(r + 1)]
    return [sizes[0]] + [b - a for a, b in zip(sizes, sizes[1:])]


def stabilizer(ctx: Group, A: Iterable[Element]) -> Shape:
    """All ``g`` with ``gA = A``.

    Any such ``g`` sends the first element ``a0`` into ``A``, so candidates are
    ``A * a0^-1``; each is filtered by a direct set comparison.
    """
    A = A if isinstance(A, Shape) else Shape(A)
    if not len(A):
        raise GroupError("stabilizer of the empty set is the whole group")
    a0_inv = ctx._inv(A[0])
    # probe extremes and a sparse sample first: most candidates fail there
    probes = [A[-1]] + list(A[:: max(1, len(A) // 16)])
    out = []
    for a in A:
        g = ctx._mul(a, a0_inv)
        if all(ctx._mul(g, x) in A for x in probes) and all(ctx._mul(g, x) in A for x in A):
            out.append(g)
    return Shape(out)


def _require_lattice(ctx: Group) -> int:
    if not isinstance(ctx, ZLattice):
        raise GroupError(f"operation requires a ZLattice context, got {ctx!r}")
    return ctx.d


def axis_interior(ctx: Group, A: Iterable[Element]) -> Shape:
    """Cells of ``A`` whose axis neighbours (both directions) all lie in ``A``."""
    d = _require_lattice(ctx)
    A = A if isinstance(A, Shape) else Shape(A)
    out = []
    for a in A:
        ok = True
        for i in range(d):
            for s in (1, -1):
                nb = list(a)
                nb[i] += s
                if tuple(nb) not in A:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(a)
    return Shape(out)


def generator_interior(ctx: Group, A: Iterable[Element]) -> Shape:
    """``A`` intersected with every generator translate ``tA``."""
    gens = ctx.require_generators()
    A = A if isinstance(A, Shape) else Shape(A)
    inv = [ctx._inv(t) for t in gens]
    # a in tA  <=>  t^-1 a in A
    return Shape(a for a in A if all(ctx._mul(ti, a) in A for ti in inv))


def diameter_inf(ctx: Group, A: Iterable[Element]) -> int:
    d = _require_lattice(ctx)
    A = list(A)
    if not A:
        raise GroupError("diameter of the empty set is undefined")
    # max pairwise l-inf distance = max coordinate spread
    return max(max(a[i] for a in A) - min(a[i] for a in A) for i in range(d))


def cube(d: int, lo: int, hi: int, step: int = 1) -> Shape:
    """Lattice box ``[lo, hi]^d`` (inclusive), optionally with spacing ``step``."""
    side = range(lo, hi + 1, step)
    return Shape(itertools.product(side, repeat=d))


def make_group(desc: dict) -> Group:
    """Build a group from a config dict such as ``{"kind": "free", "rank": 2}``."""
    kind = desc.get("kind")
    gens = desc.get("generators")
    if kind == "zlattice":
        return ZLattice(int(desc.get("d", 1)), gens)
    if kind == "cyclic":
        return CyclicGroup(int(desc["modulus"]), gens)
    if kind == "free":
        return FreeGroup(int(desc.get("rank", 2)), gens)
    if kind == "heisenberg":
        return Heisenberg(gens)
    raise GroupError(f"unknown group kind {kind!r}")


def group_spec(ctx: Group) -> dict:
    if isinstance(ctx, ZLattice):
        desc = {"kind": "zlattice", "d": ctx.d}
    elif isinstance(ctx, CyclicGroup):
        desc = {"kind": "cyclic", "modulus": ctx.m}
    elif isinstance(ctx, FreeGroup):
        desc = {"kind": "free", "rank": ctx.k}
    elif isinstance(ctx, Heisenberg):
        desc = {"kind": "heisenberg"}
    else:
        raise GroupError(f"cannot describe {ctx!r}")
    if ctx.generators is not None:
        desc["generators"] = [list(t) for t in ctx.generators]
    return desc
