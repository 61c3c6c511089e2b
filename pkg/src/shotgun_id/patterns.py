"""Alphabets, probability vectors, patterns on group shapes, and sampling."""
from __future__ import annotations

import math
from fractions import Fraction
from collections.abc import Iterable, Mapping

import numpy as np

from .groups import Element, Group, Shape

MASK64 = (1 << 64) - 1


class ProbVector:
    """Symbol probabilities, either exact (``Fraction``) or double precision.

    Weights given as ints, strings or Fractions give exact mode; any float
    switches to double mode.
    """

    __slots__ = ("weights", "exact")

    def __init__(self, weights: Iterable):
        raw = list(weights)
        exact = not any(isinstance(x, float) for x in raw)
        if exact:
            ws = tuple(Fraction(x) for x in raw)
            total_ok = sum(ws) == 1
        else:
            ws = tuple(float(x) for x in raw)
            total_ok = abs(math.fsum(ws) - 1.0) <= 1e-12
        if any(x < 0 for x in ws):
            raise ValueError("probabilities must be nonnegative")
        if not total_ok:
            raise ValueError(f"probabilities sum to {sum(ws)}, not 1")
        if sum(1 for x in ws if x > 0) < 2:
            raise ValueError("need positive probability on at least two symbols")
        self.weights = ws
        self.exact = exact

    @classmethod
    def uniform(cls, q: int, exact: bool = True) -> "ProbVector":
        return cls([Fraction(1, q)] * q if exact else [1.0 / q] * q)

    def __len__(self):
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def __eq__(self, other):
        return isinstance(other, ProbVector) and self.weights == other.weights

    def __hash__(self):
        return hash(self.weights)

    def __repr__(self):
        return f"ProbVector({[str(w) if self.exact else w for w in self.weights]})"

    def as_float(self) -> np.ndarray:
        return np.array([float(x) for x in self.weights])

    def to_json(self) -> list:
        return [str(w) for w in self.weights] if self.exact else list(self.weights)


def collision_prob(p: ProbVector, i: int):
    """Collision probability of ``i`` independent draws: ``sum_a p_a**i``."""
    if i < 1:
        raise ValueError("collision_prob needs i >= 1")
    if p.exact:
        return sum((w**i for w in p.weights), Fraction(0))
    return math.fsum(w**i for w in p.weights)


def renyi2(p: ProbVector) -> float:
    """Second-order Renyi entropy in nats."""
    return -math.log(collision_prob(p, 2))


def critical_ratio(p: ProbVector) -> float:
    """The conjectured threshold 2 / H2(p) for ``|K| / ln|CK|``."""
    return 2.0 / renyi2(p)


class Pattern:
    """A map from a shape to symbol indices, stored aligned to the shape order."""

    __slots__ = ("shape", "symbols")

    def __init__(self, shape: Shape, symbols):
        arr = np.array(symbols, dtype=np.int16).reshape(-1)
        if arr.size != len(shape):
            raise ValueError(f"{arr.size} symbols for a shape of size {len(shape)}")
        if arr.size and arr.min() < 0:
            raise ValueError("symbols must be nonnegative indices")
        arr.setflags(write=False)
        self.shape = shape
        self.symbols = arr

    @classmethod
    def from_string(cls, shape: Shape, text: str) -> "Pattern":
        return cls(shape, [int(ch) for ch in text])

    @classmethod
    def from_mapping(cls, shape: Shape, values: Mapping) -> "Pattern":
        return cls(shape, [values[e] for e in shape])

    def __getitem__(self, e: Element) -> int:
        return int(self.symbols[self.shape.index(e)])

    def items(self):
        return zip(self.shape, (int(s) for s in self.symbols))

    def as_string(self) -> str:
        return "".join(str(int(s)) for s in self.symbols)

    def key(self) -> tuple:
        return tuple(int(s) for s in self.symbols)

    def __eq__(self, other):
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.symbols, other.symbols)

    def __lt__(self, other):
        return self.key() < other.key()

    def __hash__(self):
        return hash((self.shape, self.symbols.tobytes()))

    def __repr__(self):
        if len(self.shape) <= 32:
            return f"Pattern({self.as_string()!r} on {list(self.shape)!r})"
        return f"Pattern(<{len(self.shape)} cells>)"

    def check_alphabet(self, q: int):
        if self.symbols.size and int(self.symbols.max()) >= q:
            raise ValueError(f"symbol {int(self.symbols.max())} outside alphabet of size {q}")


def translate(ctx: Group, w: Pattern, g: Element) -> Pattern:
    """``sigma^g``: the pattern on ``g^-1 * shape`` with ``h -> w(g h)``."""
    g_inv = ctx._inv(g)
    new_shape = Shape(ctx._mul(g_inv, a) for a in w.shape)
    idx = [w.shape.index(ctx._mul(g, h)) for h in new_shape]
    return Pattern(new_shape, w.symbols[idx])


def restrict(w: Pattern, E: Iterable[Element]) -> Pattern:
    E = E if isinstance(E, Shape) else Shape(E)
    try:
        idx = [w.shape.index(e) for e in E]
    except ValueError:
        raise ValueError("restriction target is not a subset of the pattern shape") from None
    return Pattern(E, w.symbols[idx] if idx else [])


# -- randomness ------------------------------------------------------------

def splitmix64(x: int) -> int:
    """The SplitMix64 finalizer: a bijective 64-bit mixing permutation."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def trial_key(seed: int, trial: int) -> int:
    return splitmix64(splitmix64(seed & MASK64) ^ (trial & MASK64))


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent Philox (counter-based) stream for one trial.

    The key depends only on ``(seed, trial)``, so results do not depend on
    which worker runs which trial.
    """
    return np.random.Generator(np.random.Philox(key=trial_key(seed, trial)))


def sample_symbols(rng: np.random.Generator, n: int, p: ProbVector) -> np.ndarray:
    cdf = np.cumsum(p.as_float())
    cdf[-1] = 1.0
    u = rng.random(n)
    return np.searchsorted(cdf, u, side="right").astype(np.int16)


def sample(rng: np.random.Generator, shape: Shape, p: ProbVector) -> Pattern:
    """Draw each cell i.i.d. from ``p``."""
    return Pattern(shape, sample_symbols(rng, len(shape), p))
