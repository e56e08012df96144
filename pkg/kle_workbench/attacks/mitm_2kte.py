# ABOUTME: Quantum MITM attacks on two-key triple encryption (2kTE, EDE shape, G2kTE).
# ABOUTME: Claw-finding and Grover-with-table variants, the latter with an r-way QRAM/time tradeoff.
import logging
from typing import Callable

import numpy as np

from ..engine.claw import claw_find
from ..engine.cost_model import Prediction, default_partition, ledger_predict
from ..engine.grover import SearchSpace, search
from ..oracle_functions import (
    MitmFunctionPair,
    build_fg_2kte,
    build_membership_table,
    predicate_F_table,
)
from .common import AttackContext, AttackOutcome, KeyVerifier

logger = logging.getLogger(__name__)

KeyAssembler = Callable[[int, int], tuple[int, ...]]


def claw_search(
    ctx: AttackContext,
    pair: MitmFunctionPair,
    prediction: Prediction,
    assemble: KeyAssembler,
) -> AttackOutcome:
    """Find a claw of (f, g), verify it on fresh pairs, and keep searching past rejected claws."""
    verifier = KeyVerifier(ctx.handle, ctx.rng)
    rejected: set[tuple[int, int]] = set()
    for x, y in ctx.injected_claws:
        if verifier.check(assemble(x, y)):
            return AttackOutcome(True, assemble(x, y), pair.t, None, prediction)
        logger.warning("Rejected claw x=%#x y=%#x on fresh pairs", x, y)
        ctx.ledger.charge(rejected_candidates=1)
        rejected.add((x, y))
    while True:
        found = claw_find(
            pair.f_bits,
            pair.g_bits,
            pair.f,
            pair.g,
            ledger=ctx.ledger,
            f_cost=pair.f_cost,
            g_cost=pair.g_cost,
            exclude=frozenset(rejected),
            guard=ctx.handle,
        )
        if found.claw is None:
            return AttackOutcome.failed("no claw survived verification", t=pair.t, r=None, prediction=prediction)
        keys = assemble(found.claw.x, found.claw.y)
        if verifier.check(keys):
            return AttackOutcome(True, keys, pair.t, None, prediction)
        logger.warning("Rejected claw x=%#x y=%#x on fresh pairs", found.claw.x, found.claw.y)
        ctx.ledger.charge(rejected_candidates=1)
        rejected.add((found.claw.x, found.claw.y))


def table_search(
    ctx: AttackContext,
    pair: MitmFunctionPair,
    r: int,
    prediction: Prediction,
    assemble: KeyAssembler,
) -> AttackOutcome:
    """Grover for f(x) in L_i^1 over sub-tables i = 0, 1, ... in ascending order.

    A marked x is completed by looking f(x) up in the sub-table and testing
    every stored y on the fresh verification pairs.
    """
    ledger = ctx.ledger
    table = build_membership_table(pair, r, ledger=ledger)
    ledger.peak(classical_memory_entries=len(table.values))
    ledger.record_prediction(prediction.time_exponent, prediction.qram_exponent)
    verifier = KeyVerifier(ctx.handle, ctx.rng)
    recovered: list[tuple[int, ...]] = []

    for i in range(r):
        view = table.view(i)
        ledger.charge(subtable_calls=1)
        ledger.peak(qram_entries=view.size)
        predicate = predicate_F_table(pair, view)

        def verify(x: int) -> bool:
            for y in view.lookup(pair.f(np.array([x], dtype=np.uint64))[0]):
                keys = assemble(x, int(y))
                if verifier.check(keys):
                    recovered.append(keys)
                    return True
            return False

        space = SearchSpace(pair.f_bits, predicate.evaluate, cost=predicate.cost, guard=ctx.handle)
        outcome = search(space, ctx.backend, verify, ledger=ledger, rng=ctx.rng)
        if outcome.result is not None and recovered:
            logger.info("Key found in sub-table %d of %d", i + 1, r)
            return AttackOutcome(True, recovered[0], pair.t, r, prediction)
        logger.debug("Sub-table %d of %d holds no verified key", i + 1, r)
    return AttackOutcome.failed("all sub-tables exhausted", t=pair.t, r=r, prediction=prediction)


def qcf_mitm_2kte(ctx: AttackContext, attack_id: str = "qcf-mitm-2kte") -> AttackOutcome:
    spec = ctx.spec
    pair = build_fg_2kte(ctx.handle, ctx.t)
    prediction = ledger_predict(attack_id, spec.kappa, spec.n)
    return claw_search(ctx, pair, prediction, lambda x, y: (int(x), int(y)))


def grover_mitm_2kte(ctx: AttackContext, attack_id: str = "grover-mitm-2kte") -> AttackOutcome:
    """Grover search against a sorted table of g; r defaults to 1 (or the balanced split for tradeoff)."""
    spec = ctx.spec
    r = ctx.r
    if r is None:
        r = default_partition(attack_id, spec.kappa, spec.n) if attack_id.startswith("tradeoff") else 1
    pair = build_fg_2kte(ctx.handle, ctx.t)
    prediction = ledger_predict(attack_id, spec.kappa, spec.n, r)
    return table_search(ctx, pair, r, prediction, lambda x, y: (int(x), int(y)))
