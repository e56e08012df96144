# ABOUTME: Keyed middle-layer permutation families L_k2 used by ELE-style constructions.
# ABOUTME: XOR, reflection-affine, seeded random involutions and P-twisted involutions.
import functools
import logging
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from .cipher import linear_ops
from .config import MAX_TABLE_FAMILY_BITS
from .errors import ParameterError, ResourceError

logger = logging.getLogger(__name__)


class MiddleKind(StrEnum):
    XOR = "xor"
    REFLECTION_AFFINE = "reflection_affine"
    RANDOM_INVOLUTION = "random_involution"
    P_TWISTED_INVOLUTION = "p_twisted_involution"


def _is_scalar(x) -> bool:
    return np.isscalar(x)


class MiddleLayerFamily:
    """Public family {L_k : k in {0,1}^n}; only the key k2 is secret."""

    kind: MiddleKind

    def __init__(self, n: int, layer_seed: int = 0) -> None:
        self.n = n
        self.layer_seed = layer_seed
        self.mask = (1 << n) - 1

    @property
    def public_p(self) -> np.ndarray | None:
        return None

    def apply(self, k2, x):
        raise NotImplementedError

    def invert(self, k2, x):
        raise NotImplementedError

    def consistent_keys(self, a, b) -> np.ndarray:
        """All k2 with L_k2(a_i) == b_i for every i, ascending."""
        raise NotImplementedError


class XorFamily(MiddleLayerFamily):
    kind = MiddleKind.XOR

    def apply(self, k2, x):
        if _is_scalar(k2) and _is_scalar(x):
            return int(x) ^ int(k2)
        return np.asarray(x, dtype=np.uint64) ^ np.asarray(k2, dtype=np.uint64)

    invert = apply

    def consistent_keys(self, a, b) -> np.ndarray:
        diff = np.atleast_1d(np.asarray(a, dtype=np.uint64) ^ np.asarray(b, dtype=np.uint64))
        if diff.size and np.all(diff == diff[0]):
            return diff[:1].copy()
        return np.empty(0, dtype=np.uint64)


class ReflectionAffineFamily(MiddleLayerFamily):
    """L_k2(x) = R(x xor k2) xor sigma(k2); b xor R(a) = R(k2) xor sigma(k2) for every pair."""

    kind = MiddleKind.REFLECTION_AFFINE

    def __init__(self, n: int, layer_seed: int = 0) -> None:
        super().__init__(n, layer_seed)
        self.ops = linear_ops(n)

    def key_constant(self, k2):
        return self.ops.reflect(k2) ^ self.ops.sigma(k2)

    def apply(self, k2, x):
        if not (_is_scalar(k2) and _is_scalar(x)):
            k2 = np.asarray(k2, dtype=np.uint64)
            x = np.asarray(x, dtype=np.uint64)
        return self.ops.reflect(x ^ k2) ^ self.ops.sigma(k2)

    def invert(self, k2, y):
        if not (_is_scalar(k2) and _is_scalar(y)):
            k2 = np.asarray(k2, dtype=np.uint64)
            y = np.asarray(y, dtype=np.uint64)
        return self.ops.reflect(y ^ self.ops.sigma(k2)) ^ k2

    def consistent_keys(self, a, b) -> np.ndarray:
        a = np.atleast_1d(np.asarray(a, dtype=np.uint64))
        b = np.atleast_1d(np.asarray(b, dtype=np.uint64))
        constant = b ^ self.ops.reflect(a)
        if not constant.size or not np.all(constant == constant[0]):
            return np.empty(0, dtype=np.uint64)
        keys = np.arange(1 << self.n, dtype=np.uint64)
        return keys[self.key_constant(keys) == constant[0]]


class _TabulatedFamily(MiddleLayerFamily):
    """Families given by an explicit permutation table per key."""

    def forward_table(self, k2: int) -> np.ndarray:
        return _forward_table(self.kind, self.n, self.layer_seed, int(k2))

    def inverse_table(self, k2: int) -> np.ndarray:
        fwd = self.forward_table(k2)
        inv = np.empty_like(fwd)
        inv[fwd] = np.arange(fwd.size, dtype=fwd.dtype)
        return inv

    def all_keys_table(self) -> np.ndarray:
        """(2^n, 2^n) matrix whose row k2 is L_k2; budgeted by MAX_TABLE_FAMILY_BITS."""
        if self.n > MAX_TABLE_FAMILY_BITS:
            raise ResourceError(
                f"tabulating {self.kind} over all keys needs n <= {MAX_TABLE_FAMILY_BITS}",
                required=1 << (2 * self.n),
            )
        return _all_keys_table(self.kind, self.n, self.layer_seed)

    def apply(self, k2, x):
        if _is_scalar(k2):
            out = self.forward_table(int(k2))[np.asarray(x, dtype=np.intp)]
        else:
            table = self.all_keys_table()
            out = table[np.asarray(k2, dtype=np.intp), np.asarray(x, dtype=np.intp)]
        return int(out) if _is_scalar(x) and _is_scalar(k2) else out.astype(np.uint64)

    def invert(self, k2, y):
        if not _is_scalar(k2):
            raise ParameterError("inverse of a tabulated middle layer needs a single key")
        out = self.inverse_table(int(k2))[np.asarray(y, dtype=np.intp)]
        return int(out) if _is_scalar(y) else out.astype(np.uint64)

    def consistent_keys(self, a, b) -> np.ndarray:
        a = np.atleast_1d(np.asarray(a, dtype=np.intp))
        b = np.atleast_1d(np.asarray(b, dtype=np.uint64))
        table = self.all_keys_table()
        hits = np.all(table[:, a] == b.astype(table.dtype), axis=1)
        return np.nonzero(hits)[0].astype(np.uint64)


class RandomInvolutionFamily(_TabulatedFamily):
    """Key-dependent fixed-point-free involution from a seeded random pairing."""

    kind = MiddleKind.RANDOM_INVOLUTION


class PTwistedFamily(_TabulatedFamily):
    """L_k2 with L o P o L = Id for a public, key-independent involution P."""

    kind = MiddleKind.P_TWISTED_INVOLUTION

    @property
    def public_p(self) -> np.ndarray:
        return _public_pairing(self.n, self.layer_seed)


def _pairing_to_table(pairs: np.ndarray, size: int) -> np.ndarray:
    table = np.empty(size, dtype=np.uint32)
    table[pairs[:, 0]] = pairs[:, 1]
    table[pairs[:, 1]] = pairs[:, 0]
    return table


@functools.lru_cache(maxsize=64)
def _public_pairing(n: int, layer_seed: int) -> np.ndarray:
    rng = np.random.default_rng([layer_seed, 0, 1])
    pairs = rng.permutation(1 << n).reshape(-1, 2)
    return _pairing_to_table(pairs, 1 << n)


def _random_involution(n: int, layer_seed: int, k2: int) -> np.ndarray:
    rng = np.random.default_rng([layer_seed, k2, 0])
    pairs = rng.permutation(1 << n).reshape(-1, 2)
    return _pairing_to_table(pairs, 1 << n)


def _p_twisted(n: int, layer_seed: int, k2: int) -> np.ndarray:
    # Q groups the pairs of P into 4-cycles a->c->b->d->a, so Q o Q = P and L = P o Q.
    p = _public_pairing(n, layer_seed)
    xs = np.arange(1 << n, dtype=np.uint32)
    lows = xs[xs < p]
    pairs = np.stack([lows, p[lows]], axis=1)
    rng = np.random.default_rng([layer_seed, k2, 2])
    pairs = pairs[rng.permutation(len(pairs))]
    flip = rng.integers(0, 2, size=len(pairs)).astype(bool)
    pairs[flip] = pairs[flip][:, ::-1]
    (a, b), (c, d) = pairs[0::2].T, pairs[1::2].T
    q = np.empty(1 << n, dtype=np.uint32)
    q[a], q[c], q[b], q[d] = c, b, d, a
    return p[q]


@functools.lru_cache(maxsize=1024)
def _forward_table(kind: MiddleKind, n: int, layer_seed: int, k2: int) -> np.ndarray:
    if kind is MiddleKind.RANDOM_INVOLUTION:
        return _random_involution(n, layer_seed, k2)
    return _p_twisted(n, layer_seed, k2)


@functools.lru_cache(maxsize=8)
def _all_keys_table(kind: MiddleKind, n: int, layer_seed: int) -> np.ndarray:
    logger.debug("Tabulating %s family over %d keys", kind, 1 << n)
    return np.stack([_forward_table(kind, n, layer_seed, k2) for k2 in range(1 << n)])


_FAMILIES: dict[MiddleKind, type[MiddleLayerFamily]] = {
    MiddleKind.XOR: XorFamily,
    MiddleKind.REFLECTION_AFFINE: ReflectionAffineFamily,
    MiddleKind.RANDOM_INVOLUTION: RandomInvolutionFamily,
    MiddleKind.P_TWISTED_INVOLUTION: PTwistedFamily,
}


def middle_family(kind: MiddleKind | str, n: int, layer_seed: int = 0) -> MiddleLayerFamily:
    try:
        kind = MiddleKind(kind)
    except ValueError:
        raise ParameterError(
            f"unknown middle layer kind {kind!r}; expected one of {[k.value for k in MiddleKind]}"
        ) from None
    return _FAMILIES[kind](n, layer_seed)


@dataclass(frozen=True)
class MiddleLayer:
    """A family member bound to its key: L_k2 and its inverse."""

    family: MiddleLayerFamily
    k2: int

    def __call__(self, x):
        return self.family.apply(self.k2, x)

    def inverse(self, y):
        return self.family.invert(self.k2, y)

    @property
    def public_p(self) -> np.ndarray | None:
        return self.family.public_p


def middle_layer(kind: MiddleKind | str, k2, layer_seed: int = 0) -> MiddleLayer:
    """L_k2 for the given kind; ``k2`` is a Key of width n."""
    family = middle_family(kind, k2.width, layer_seed)
    return MiddleLayer(family, k2.value)
