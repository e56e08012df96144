# ABOUTME: Claw-finding emulator: a classical sort-merge join charged at quantum claw-finding cost.
# ABOUTME: Finds (x, y) with f(x) == g(y) and records the regime-dependent predicted exponents.
import logging
import math
from contextlib import nullcontext
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from ..config import SCAN_CHUNK
from .cost_model import ClawRegime, claw_regime
from .ledger import CostLedger, PredicateCost

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Claw:
    x: int
    y: int


@dataclass(frozen=True)
class ClawOutcome:
    claw: Claw | None
    regime: ClawRegime


def _evaluate(fn: Callable[[np.ndarray], np.ndarray], bits: int, chunk: int) -> np.ndarray:
    size = 1 << bits
    parts = [
        fn(np.arange(start, min(start + chunk, size), dtype=np.uint64))
        for start in range(0, size, chunk)
    ]
    return np.concatenate(parts)


def iter_claws(
    x_bits: int,
    y_bits: int,
    f: Callable[[np.ndarray], np.ndarray],
    g: Callable[[np.ndarray], np.ndarray],
    *,
    guard=None,
    chunk: int = SCAN_CHUNK,
) -> Iterator[Claw]:
    """Every claw, ordered by x then y, from one pass of evaluations and a sorted join."""
    scope = guard.predicate_scope() if guard is not None else nullcontext()
    with scope:
        f_values = _evaluate(f, x_bits, chunk)
        g_values = _evaluate(g, y_bits, chunk)
    order = np.argsort(g_values, kind="stable")
    g_sorted = g_values[order]
    lo = np.searchsorted(g_sorted, f_values, side="left")
    hi = np.searchsorted(g_sorted, f_values, side="right")
    for x in np.nonzero(hi > lo)[0]:
        for y in np.sort(order[lo[x]:hi[x]]):
            yield Claw(int(x), int(y))


def claw_find(
    x_bits: int,
    y_bits: int,
    f: Callable[[np.ndarray], np.ndarray],
    g: Callable[[np.ndarray], np.ndarray],
    *,
    ledger: CostLedger | None = None,
    f_cost: PredicateCost = PredicateCost(),
    g_cost: PredicateCost = PredicateCost(),
    exclude: frozenset[tuple[int, int]] = frozenset(),
    guard=None,
) -> ClawOutcome:
    """First claw not in ``exclude``, or none.

    The ledger is charged as the quantum claw-finding algorithm would be:
    2^time evaluations of each of f and g and 2^qram QRAM entries.
    """
    regime = claw_regime(x_bits, y_bits)
    if ledger is not None:
        ledger.record_prediction(regime.time_exponent, regime.qram_exponent)
        evaluations = math.ceil(2 ** float(regime.time_exponent))
        f_cost.charge(ledger, evaluations)
        g_cost.charge(ledger, evaluations)
        ledger.peak(qram_entries=math.ceil(2 ** float(regime.qram_exponent)))
    for claw in iter_claws(x_bits, y_bits, f, g, guard=guard):
        if (claw.x, claw.y) in exclude:
            continue
        logger.debug("Claw found at x=%#x y=%#x (%s regime)", claw.x, claw.y, regime.regime)
        return ClawOutcome(claw, regime)
    return ClawOutcome(None, regime)
