# ABOUTME: Sieve-in-the-middle distinguishers deciding whether pair sets fit a keyed middle layer.
# ABOUTME: XOR-difference, reflection, mirror-pair and pointwise (optionally P-twisted) checks.
import logging
from dataclasses import dataclass
from enum import StrEnum
from typing import Callable

import numpy as np

from .cipher import linear_ops
from .errors import ParameterError

logger = logging.getLogger(__name__)

# Rows per vectorised mirror check; the comparison cube is rows * t * t booleans.
_MIRROR_ROWS = 4096


class DistinguisherKind(StrEnum):
    XOR_DIFFERENCE = "xor-difference"
    REFLECTION = "reflection"
    MIRROR_PAIR = "mirror-pair"
    POINTWISE = "pointwise"


@dataclass(frozen=True)
class PairSet:
    """S = {(a_i, b_i)}: guessed inputs and outputs of the middle layer."""

    a: np.ndarray
    b: np.ndarray
    n: int

    def __post_init__(self) -> None:
        a = np.atleast_1d(np.asarray(self.a, dtype=np.uint64))
        b = np.atleast_1d(np.asarray(self.b, dtype=np.uint64))
        if a.shape != b.shape or a.ndim != 1:
            raise ParameterError("pair set needs two equal-length 1-D block sequences")
        if len(a) < 2:
            raise ParameterError(f"pair set needs t >= 2 pairs, got {len(a)}")
        limit = np.uint64(1 << self.n)
        if np.any(a >= limit) or np.any(b >= limit):
            raise ParameterError(f"pair set values exceed {self.n} bits")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def of(cls, pairs, n: int) -> "PairSet":
        pairs = list(pairs)
        return cls(np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]), n)

    @property
    def t(self) -> int:
        return len(self.a)


@dataclass(frozen=True)
class Distinguisher:
    """A key-independent decision procedure A(S) with a declared per-call cost T.

    ``decide_batch`` takes (N, t) arrays of a- and b-values, one candidate key
    per row, and returns N booleans.
    """

    kind: DistinguisherKind
    n: int
    decide_batch: Callable[[np.ndarray, np.ndarray], np.ndarray]
    cost_per_pairs: Callable[[int], int]

    def cost_T(self, t: int) -> int:
        return self.cost_per_pairs(t)

    def decide(self, pairs: PairSet) -> bool:
        if pairs.n != self.n:
            raise ParameterError(f"pair set width {pairs.n} != distinguisher width {self.n}")
        return bool(self.decide_batch(pairs.a[None, :], pairs.b[None, :])[0])


def _constant_rows(values: np.ndarray) -> np.ndarray:
    return np.all(values == values[:, :1], axis=1)


def xor_difference_distinguisher(n: int) -> Distinguisher:
    def decide_batch(a, b):
        return _constant_rows(np.asarray(a, dtype=np.uint64) ^ np.asarray(b, dtype=np.uint64))

    return Distinguisher(DistinguisherKind.XOR_DIFFERENCE, n, decide_batch, lambda t: t - 1)


def reflection_distinguisher(n: int) -> Distinguisher:
    ops = linear_ops(n)

    def decide_batch(a, b):
        a = np.asarray(a, dtype=np.uint64)
        return _constant_rows(np.asarray(b, dtype=np.uint64) ^ ops.reflect(a))

    return Distinguisher(DistinguisherKind.REFLECTION, n, decide_batch, lambda t: t - 1)


def mirror_pairs_mask(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(N, t, t) mask of index pairs i != j with a_i == b_j and a_j == b_i."""
    eq = a[:, :, None] == b[:, None, :]
    mirrored = eq & eq.transpose(0, 2, 1)
    t = a.shape[1]
    mirrored[:, np.arange(t), np.arange(t)] = False
    return mirrored


def mirror_pair_distinguisher(n: int) -> Distinguisher:
    def decide_batch(a, b):
        a = np.asarray(a, dtype=np.uint64)
        b = np.asarray(b, dtype=np.uint64)
        out = np.empty(len(a), dtype=bool)
        for start in range(0, len(a), _MIRROR_ROWS):
            stop = start + _MIRROR_ROWS
            out[start:stop] = mirror_pairs_mask(a[start:stop], b[start:stop]).any(axis=(1, 2))
        return out

    return Distinguisher(DistinguisherKind.MIRROR_PAIR, n, decide_batch, lambda t: t * t)


def pointwise_distinguisher(n: int, p: np.ndarray | None = None) -> Distinguisher:
    """a_i == b_i for every i, or P(a_i) == b_i when a public permutation P is given."""
    if p is not None and len(p) != 1 << n:
        raise ParameterError(f"public permutation must have 2^{n} entries")

    def decide_batch(a, b):
        a = np.asarray(a, dtype=np.uint64)
        b = np.asarray(b, dtype=np.uint64)
        if p is not None:
            a = p[a.astype(np.intp)].astype(np.uint64)
        return np.all(a == b, axis=1)

    return Distinguisher(DistinguisherKind.POINTWISE, n, decide_batch, lambda t: t)


def distinguisher_for(kind: DistinguisherKind | str, n: int, p: np.ndarray | None = None) -> Distinguisher:
    match DistinguisherKind(kind):
        case DistinguisherKind.XOR_DIFFERENCE:
            return xor_difference_distinguisher(n)
        case DistinguisherKind.REFLECTION:
            return reflection_distinguisher(n)
        case DistinguisherKind.MIRROR_PAIR:
            return mirror_pair_distinguisher(n)
        case DistinguisherKind.POINTWISE:
            return pointwise_distinguisher(n, p)
