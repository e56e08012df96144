# ABOUTME: Keyed key-length-extension schemes (2kTE, EDE, G2kTE, 3XCE, tilde-3XCE, KARC, ELE).
# ABOUTME: Public scheme specs, secret-keyed instances, the 3XCE rewrite and Q1/Q2 oracle handles.
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Callable, Iterator

import numpy as np

from .cipher import Block, CipherParams, ToyCipher, linear_ops, toy_cipher
from .config import KARC_ALPHA
from .engine.ledger import CostLedger
from .errors import OracleAccessError, ParameterError
from .middle_layers import MiddleKind, MiddleLayerFamily, middle_family

logger = logging.getLogger(__name__)


class Scheme(StrEnum):
    TWO_KEY_TRIPLE = "2kte"
    TWO_KEY_TRIPLE_EDE = "2kte-ede"
    GENERALIZED_TWO_KEY_TRIPLE = "g2kte"
    THREE_XOR_CASCADE = "3xce"
    TILDE_THREE_XOR_CASCADE = "3xce-tilde"
    KARC = "karc"
    GENERIC_ELE = "ele"


class AccessModel(StrEnum):
    Q1 = "Q1"
    Q2 = "Q2"


class OuterLayers(StrEnum):
    BOTH = "both"
    NO_E1 = "no-e1"
    NO_E2 = "no-e2"


TWO_KEY_SCHEMES = frozenset(
    {Scheme.TWO_KEY_TRIPLE, Scheme.TWO_KEY_TRIPLE_EDE, Scheme.GENERALIZED_TWO_KEY_TRIPLE}
)
WHITENED_SCHEMES = frozenset(
    {Scheme.THREE_XOR_CASCADE, Scheme.TILDE_THREE_XOR_CASCADE, Scheme.KARC}
)

_CIPHER_COUNT: dict[Scheme, int] = {
    Scheme.TWO_KEY_TRIPLE: 1,
    Scheme.TWO_KEY_TRIPLE_EDE: 1,
    Scheme.GENERALIZED_TWO_KEY_TRIPLE: 3,
    Scheme.THREE_XOR_CASCADE: 2,
    Scheme.TILDE_THREE_XOR_CASCADE: 2,
    Scheme.KARC: 1,
    Scheme.GENERIC_ELE: 2,
}


def _lane(x):
    """Python int for scalars, uint64 array otherwise."""
    if np.isscalar(x):
        return int(x)
    return np.asarray(x, dtype=np.uint64)


@dataclass(frozen=True)
class KeySlot:
    name: str
    width: int


@dataclass(frozen=True)
class EleView:
    """A scheme seen as E^2 o L o E^1 with the outer key z = K1 and middle key k2.

    ``a_of(z, m)`` is the guessed input of L and ``b_of(z, c)`` the guessed
    output; both broadcast a column of z against a row of blocks.
    """

    key_bits: int
    family: MiddleLayerFamily
    a_of: Callable
    b_of: Callable
    assemble: Callable[[int, int], tuple[int, ...]]
    outer_key: Callable[[tuple[int, ...]], int]


@dataclass(frozen=True)
class ConstructionSpec:
    """Everything about a keyed scheme that the attacker is allowed to know."""

    scheme: Scheme
    kappa: int
    n: int
    cipher_ids: tuple[int, ...]
    middle_kind: MiddleKind | None = None
    layer_seed: int = 0
    outer: OuterLayers = OuterLayers.BOTH

    def __post_init__(self) -> None:
        expected = _CIPHER_COUNT[self.scheme]
        if len(self.cipher_ids) != expected:
            raise ParameterError(
                f"scheme {self.scheme} needs {expected} cipher ids, got {len(self.cipher_ids)}"
            )
        needs_middle = self.scheme in (Scheme.TILDE_THREE_XOR_CASCADE, Scheme.GENERIC_ELE)
        if needs_middle and self.middle_kind is None:
            raise ParameterError(f"scheme {self.scheme} needs a middle layer kind")
        if not needs_middle and self.middle_kind is not None:
            raise ParameterError(f"scheme {self.scheme} has a fixed middle layer")
        if self.outer is not OuterLayers.BOTH and self.scheme is not Scheme.GENERIC_ELE:
            raise ParameterError("outer-layer options apply to the ele scheme only")
        for cid in self.cipher_ids:
            CipherParams(self.kappa, self.n, cid)
        if self.scheme is Scheme.KARC and self.alpha == 0:
            raise ParameterError("KARC constant alpha truncates to zero")

    @property
    def ciphers(self) -> tuple[ToyCipher, ...]:
        return tuple(toy_cipher(CipherParams(self.kappa, self.n, cid)) for cid in self.cipher_ids)

    @property
    def alpha(self) -> int:
        return KARC_ALPHA & ((1 << self.kappa) - 1)

    @property
    def key_slots(self) -> tuple[KeySlot, ...]:
        if self.scheme in TWO_KEY_SCHEMES:
            return KeySlot("k1", self.kappa), KeySlot("k2", self.kappa)
        if self.scheme is Scheme.GENERIC_ELE:
            return KeySlot("K1", self.kappa), KeySlot("K2", self.n)
        return KeySlot("k", self.kappa), KeySlot("k1", self.n), KeySlot("k2", self.n)

    @property
    def key_bits(self) -> int:
        return sum(slot.width for slot in self.key_slots)

    @property
    def middle(self) -> MiddleLayerFamily | None:
        if self.scheme is Scheme.THREE_XOR_CASCADE:
            return middle_family(MiddleKind.XOR, self.n, self.layer_seed)
        if self.scheme is Scheme.KARC:
            return middle_family(MiddleKind.REFLECTION_AFFINE, self.n, self.layer_seed)
        if self.middle_kind is not None:
            return middle_family(self.middle_kind, self.n, self.layer_seed)
        return None

    @property
    def label(self) -> str:
        if self.middle_kind is None:
            return self.scheme.value
        return f"{self.scheme.value}[{self.middle_kind.value}]"

    def split_key_index(self, index):
        """Unpack a flat key index (first slot most significant) into per-slot values."""
        index = _lane(index)
        parts = []
        for slot in reversed(self.key_slots):
            parts.append(index & ((1 << slot.width) - 1))
            index = index >> slot.width
        return tuple(reversed(parts))

    def encrypt(self, keys: tuple, m):
        keys = tuple(_lane(k) for k in keys)
        m = _lane(m)
        ciphers = self.ciphers
        match self.scheme:
            case Scheme.TWO_KEY_TRIPLE:
                (e,), (k1, k2) = ciphers, keys
                return e.enc(k1, e.enc(k2, e.enc(k1, m)))
            case Scheme.TWO_KEY_TRIPLE_EDE:
                (e,), (k1, k2) = ciphers, keys
                return e.enc(k1, e.dec(k2, e.enc(k1, m)))
            case Scheme.GENERALIZED_TWO_KEY_TRIPLE:
                (e1, e2, e3), (k1, k2) = ciphers, keys
                return e3.enc(k1, e2.enc(k2, e1.enc(k1, m)))
            case Scheme.THREE_XOR_CASCADE | Scheme.TILDE_THREE_XOR_CASCADE:
                (e1, e2), (k, k1, k2) = ciphers, keys
                return e2.enc(k, self.middle.apply(k2, e1.enc(k, m ^ k1))) ^ k1
            case Scheme.KARC:
                (e,), (k, k1, k2) = ciphers, keys
                ops = linear_ops(self.n)
                inner = self.middle.apply(k2, e.enc(k, m ^ k1))
                return e.dec(k ^ self.alpha, inner) ^ ops.sigma(k1)
            case Scheme.GENERIC_ELE:
                (e1, e2), (k, k2) = ciphers, keys
                a = m if self.outer is OuterLayers.NO_E1 else e1.enc(k, m)
                b = self.middle.apply(k2, a)
                return b if self.outer is OuterLayers.NO_E2 else e2.enc(k, b)

    def decrypt(self, keys: tuple, c):
        keys = tuple(_lane(k) for k in keys)
        c = _lane(c)
        ciphers = self.ciphers
        match self.scheme:
            case Scheme.TWO_KEY_TRIPLE:
                (e,), (k1, k2) = ciphers, keys
                return e.dec(k1, e.dec(k2, e.dec(k1, c)))
            case Scheme.TWO_KEY_TRIPLE_EDE:
                (e,), (k1, k2) = ciphers, keys
                return e.dec(k1, e.enc(k2, e.dec(k1, c)))
            case Scheme.GENERALIZED_TWO_KEY_TRIPLE:
                (e1, e2, e3), (k1, k2) = ciphers, keys
                return e1.dec(k1, e2.dec(k2, e3.dec(k1, c)))
            case Scheme.THREE_XOR_CASCADE | Scheme.TILDE_THREE_XOR_CASCADE:
                (e1, e2), (k, k1, k2) = ciphers, keys
                return e1.dec(k, self.middle.invert(k2, e2.dec(k, c ^ k1))) ^ k1
            case Scheme.KARC:
                (e,), (k, k1, k2) = ciphers, keys
                ops = linear_ops(self.n)
                inner = e.enc(k ^ self.alpha, c ^ ops.sigma(k1))
                return e.dec(k, self.middle.invert(k2, inner)) ^ k1
            case Scheme.GENERIC_ELE:
                (e1, e2), (k, k2) = ciphers, keys
                b = c if self.outer is OuterLayers.NO_E2 else e2.dec(k, c)
                a = self.middle.invert(k2, b)
                return a if self.outer is OuterLayers.NO_E1 else e1.dec(k, a)

    def ele_view(self) -> EleView:
        n = self.n
        low = (1 << n) - 1
        family = self.middle
        match self.scheme:
            case Scheme.THREE_XOR_CASCADE | Scheme.TILDE_THREE_XOR_CASCADE:
                e1, e2 = self.ciphers
                return EleView(
                    key_bits=self.kappa + n,
                    family=family,
                    a_of=lambda z, m: e1.enc(z >> n, m ^ (z & low)),
                    b_of=lambda z, c: e2.dec(z >> n, c ^ (z & low)),
                    assemble=lambda z, k2: (int(z) >> n, int(z) & low, int(k2)),
                    outer_key=lambda keys: (keys[0] << n) | keys[1],
                )
            case Scheme.KARC:
                (e,) = self.ciphers
                ops = linear_ops(n)
                alpha = self.alpha
                return EleView(
                    key_bits=self.kappa + n,
                    family=family,
                    a_of=lambda z, m: e.enc(z >> n, m ^ (z & low)),
                    b_of=lambda z, c: e.enc((z >> n) ^ alpha, c ^ ops.sigma(z & low)),
                    assemble=lambda z, k2: (int(z) >> n, int(z) & low, int(k2)),
                    outer_key=lambda keys: (keys[0] << n) | keys[1],
                )
            case Scheme.GENERIC_ELE:
                e1, e2 = self.ciphers
                no_e1 = self.outer is OuterLayers.NO_E1
                no_e2 = self.outer is OuterLayers.NO_E2
                return EleView(
                    key_bits=self.kappa,
                    family=family,
                    a_of=lambda z, m: (z & 0) ^ m if no_e1 else e1.enc(z, m),
                    b_of=lambda z, c: (z & 0) ^ c if no_e2 else e2.dec(z, c),
                    assemble=lambda z, k2: (int(z), int(k2)),
                    outer_key=lambda keys: keys[0],
                )
        raise ParameterError(f"scheme {self.scheme} is not an ELE-style construction")


@dataclass(frozen=True)
class ConstructionInstance:
    spec: ConstructionSpec
    secret_keys: tuple[int, ...]
    seed: int

    def __post_init__(self) -> None:
        slots = self.spec.key_slots
        if len(self.secret_keys) != len(slots):
            raise ParameterError(f"{self.spec.scheme} expects {len(slots)} keys")
        for slot, value in zip(slots, self.secret_keys):
            if not 0 <= value < (1 << slot.width):
                raise ParameterError(f"key {slot.name}={value:#x} does not fit {slot.width} bits")

    def encrypt(self, m):
        return self.spec.encrypt(self.secret_keys, m)

    def decrypt(self, c):
        return self.spec.decrypt(self.secret_keys, c)

    def named_keys(self) -> dict[str, int]:
        return {slot.name: value for slot, value in zip(self.spec.key_slots, self.secret_keys)}


def _check_block(inst: ConstructionInstance, block: Block) -> None:
    if block.width != inst.spec.n:
        raise ParameterError(f"block width {block.width} != n {inst.spec.n}")


def encrypt_construction(inst: ConstructionInstance, m: Block) -> Block:
    _check_block(inst, m)
    return Block(inst.encrypt(m.value), inst.spec.n)


def decrypt_construction(inst: ConstructionInstance, c: Block) -> Block:
    _check_block(inst, c)
    return Block(inst.decrypt(c.value), inst.spec.n)


def build_instance(
    scheme: Scheme | str,
    kappa: int,
    n: int,
    seed: int,
    *,
    middle_kind: MiddleKind | str | None = None,
    share_ciphers: bool = False,
    outer: OuterLayers | str = OuterLayers.BOTH,
    keys: tuple[int, ...] | None = None,
) -> ConstructionInstance:
    """Draw cipher ids, the middle-layer seed and uniform secret keys from ``seed``."""
    scheme = Scheme(scheme)
    rng = np.random.default_rng(seed)
    count = _CIPHER_COUNT[scheme]
    ids = [int(v) for v in rng.integers(0, 1 << 63, size=count, dtype=np.int64)]
    if share_ciphers:
        ids = [ids[0]] * count
    layer_seed = int(rng.integers(0, 1 << 32))
    spec = ConstructionSpec(
        scheme=scheme,
        kappa=kappa,
        n=n,
        cipher_ids=tuple(ids),
        middle_kind=MiddleKind(middle_kind) if middle_kind is not None else None,
        layer_seed=layer_seed,
        outer=OuterLayers(outer),
    )
    if keys is None:
        keys = tuple(int(rng.integers(0, 1 << slot.width)) for slot in spec.key_slots)
    return ConstructionInstance(spec=spec, secret_keys=tuple(keys), seed=seed)


@dataclass(frozen=True)
class KeyedMap:
    forward: Callable
    inverse: Callable


@dataclass(frozen=True)
class G2kteRewrite:
    """3XCE as E~3_{k,k1} o E~2_{k2} o E~1_{k,k1}; outer maps are keyed by z = (k << n) | k1."""

    e1: KeyedMap
    e2: KeyedMap
    e3: KeyedMap

    def compose(self, z, k2, m):
        return self.e3.forward(z, self.e2.forward(k2, self.e1.forward(z, m)))


def rewrite_3xce_as_g2kte(target: ConstructionInstance | ConstructionSpec) -> G2kteRewrite:
    spec = target.spec if isinstance(target, ConstructionInstance) else target
    if spec.scheme is not Scheme.THREE_XOR_CASCADE:
        raise ParameterError(f"rewrite needs scheme 3xce, got {spec.scheme}")
    n = spec.n
    low = (1 << n) - 1
    e1, e2 = spec.ciphers
    return G2kteRewrite(
        e1=KeyedMap(
            forward=lambda z, m: e1.enc(z >> n, m ^ (z & low)),
            inverse=lambda z, u: e1.dec(z >> n, u) ^ (z & low),
        ),
        e2=KeyedMap(forward=lambda k2, x: x ^ k2, inverse=lambda k2, x: x ^ k2),
        e3=KeyedMap(
            forward=lambda z, u: e2.enc(z >> n, u) ^ (z & low),
            inverse=lambda z, c: e2.dec(z >> n, c ^ (z & low)),
        ),
    )


@dataclass
class OracleHandle:
    """The attacker's only door to a keyed instance.

    Calls outside ``predicate_scope`` are classical queries and are counted
    here. Inside the scope a Q1 handle refuses to answer; a Q2 handle answers
    and leaves the superposition-query charge to the search engine.
    """

    instance: ConstructionInstance = field(repr=False)
    model: AccessModel
    ledger: CostLedger
    _depth: int = field(default=0, repr=False)

    @property
    def spec(self) -> ConstructionSpec:
        return self.instance.spec

    @property
    def in_predicate(self) -> bool:
        return self._depth > 0

    @contextmanager
    def predicate_scope(self) -> Iterator[None]:
        self._depth += 1
        try:
            yield
        finally:
            self._depth -= 1

    def _admit(self, queries) -> None:
        count = int(np.size(queries))
        if self._depth == 0:
            self.ledger.charge(construction_queries_classical=count)
        elif self.model is AccessModel.Q1:
            raise OracleAccessError("Q1 oracle queried inside a search predicate")

    def encrypt(self, m):
        self._admit(m)
        return self.instance.encrypt(m)

    def decrypt(self, c):
        self._admit(c)
        return self.instance.decrypt(c)
