# ABOUTME: Shared attack plumbing: run context, outcomes, fresh-pair key verification and data sampling.
# ABOUTME: Every attack procedure takes an AttackContext and returns an AttackOutcome.
import logging
from dataclasses import dataclass, field

import numpy as np

from ..config import VERIFY_PAIRS
from ..constructions import ConstructionSpec, OracleHandle
from ..distinguishers import DistinguisherKind
from ..engine.cost_model import Prediction
from ..engine.grover import Backend
from ..engine.ledger import CostLedger
from ..errors import ParameterError

logger = logging.getLogger(__name__)


@dataclass
class AttackContext:
    handle: OracleHandle
    ledger: CostLedger
    rng: np.random.Generator
    backend: Backend = Backend.IDEALIZED
    r: int | None = None
    t: int | None = None
    # SITM distinguisher override; None picks the one matching the middle layer.
    distinguisher: DistinguisherKind | None = None
    # Restricts the key search to these packed candidates (SITM only).
    key_space: np.ndarray | None = None
    # Test hook: extra (x, y) claws reported ahead of the real search results.
    injected_claws: tuple[tuple[int, int], ...] = field(default=())

    @property
    def spec(self) -> ConstructionSpec:
        return self.handle.spec


@dataclass(frozen=True)
class AttackOutcome:
    success: bool
    keys: tuple[int, ...] | None
    t: int
    r: int | None
    prediction: Prediction
    failure_reason: str | None = None

    @classmethod
    def failed(cls, reason: str, *, t: int, r: int | None, prediction: Prediction) -> "AttackOutcome":
        logger.info("Attack failed: %s", reason)
        return cls(False, None, t, r, prediction, reason)


def distinct_plaintexts(rng: np.random.Generator, n: int, count: int, exclude=()) -> np.ndarray:
    """``count`` distinct n-bit plaintexts drawn from ``rng``, none of them in ``exclude``."""
    space = 1 << n
    excluded = np.unique(np.asarray(list(exclude), dtype=np.uint64))
    available = space - len(excluded)
    if count > available:
        raise ParameterError(f"cannot draw {count} distinct plaintexts from {available} values")
    picked: list[int] = []
    seen = set(int(v) for v in excluded)
    while len(picked) < count:
        for v in rng.integers(0, space, size=count - len(picked), dtype=np.uint64):
            v = int(v)
            if v not in seen:
                seen.add(v)
                picked.append(v)
    return np.array(picked, dtype=np.uint64)


class KeyVerifier:
    """Checks candidate key tuples against fresh classical queries.

    The verification plaintexts are drawn once, outside the attack data, and
    queried classically; later checks only evaluate the public scheme.
    """

    def __init__(self, handle: OracleHandle, rng: np.random.Generator, exclude=()) -> None:
        self.spec = handle.spec
        self.plaintexts = distinct_plaintexts(rng, self.spec.n, VERIFY_PAIRS, exclude)
        self.ciphertexts = np.asarray(handle.encrypt(self.plaintexts), dtype=np.uint64)

    def check(self, keys: tuple[int, ...]) -> bool:
        for slot, value in zip(self.spec.key_slots, keys):
            if not 0 <= value < (1 << slot.width):
                return False
        got = np.asarray(self.spec.encrypt(tuple(keys), self.plaintexts), dtype=np.uint64)
        ok = bool(np.array_equal(got, self.ciphertexts))
        if not ok:
            logger.debug("Key candidate %s failed verification", tuple(hex(k) for k in keys))
        return ok


def query_data(handle: OracleHandle, plaintexts: np.ndarray) -> np.ndarray:
    """Classical chosen-plaintext queries, one per plaintext."""
    return np.asarray(handle.encrypt(np.asarray(plaintexts, dtype=np.uint64)), dtype=np.uint64)
