# ABOUTME: Quantum MITM attacks on the 3XCE cascade through its G2kTE rewrite (Q2) and in Q1.
# ABOUTME: Q2 variants reuse the claw/table searches; Q1 searches (k, k1) with the delta predicate.
import logging

import numpy as np

from ..config import VERIFY_RETRIES
from ..engine.cost_model import default_partition, ledger_predict
from ..engine.grover import SearchSpace, search
from ..oracle_functions import build_fg_3xce, default_t_3xce, predicate_F_delta
from .common import AttackContext, AttackOutcome, KeyVerifier, distinct_plaintexts, query_data
from .mitm_2kte import claw_search, table_search

logger = logging.getLogger(__name__)


def _splitter(n: int):
    low = (1 << n) - 1
    return lambda z, k2: (int(z) >> n, int(z) & low, int(k2))


def mitm_3xce_q2(ctx: AttackContext, variant: str = "qcf") -> AttackOutcome:
    """f over (k, k1) packed as z = (k << n) | k1, g over k2; variant is qcf, grover or tradeoff."""
    spec = ctx.spec
    attack_id = f"3xce-q2-{variant}"
    pair = build_fg_3xce(ctx.handle, ctx.t)
    assemble = _splitter(spec.n)
    if variant == "qcf":
        prediction = ledger_predict(attack_id, spec.kappa, spec.n)
        return claw_search(ctx, pair, prediction, assemble)
    r = ctx.r
    if r is None:
        r = default_partition(attack_id, spec.kappa, spec.n) if variant == "tradeoff" else 1
    prediction = ledger_predict(attack_id, spec.kappa, spec.n, r)
    return table_search(ctx, pair, r, prediction, assemble)


def mitm_3xce_q1(ctx: AttackContext) -> AttackOutcome:
    """Classical data only: Grover over (k, k1) for equal deltas, then k2 = delta_1."""
    spec = ctx.spec
    n = spec.n
    t = ctx.t or default_t_3xce(spec.kappa, n)
    prediction = ledger_predict("3xce-q1-mitm", spec.kappa, n)
    ctx.ledger.record_prediction(prediction.time_exponent)
    assemble = _splitter(n)

    for attempt in range(VERIFY_RETRIES + 1):
        plaintexts = distinct_plaintexts(ctx.rng, n, t)
        ciphertexts = query_data(ctx.handle, plaintexts)
        verifier = KeyVerifier(ctx.handle, ctx.rng, exclude=plaintexts)
        predicate = predicate_F_delta(spec, plaintexts, ciphertexts)
        recovered: list[tuple[int, ...]] = []

        def verify(z: int) -> bool:
            k2 = int(predicate.deltas(np.array([z], dtype=np.uint64))[0, 0])
            keys = assemble(z, k2)
            if verifier.check(keys):
                recovered.append(keys)
                return True
            return False

        space = SearchSpace(spec.kappa + n, predicate.evaluate, cost=predicate.cost, guard=ctx.handle)
        outcome = search(space, ctx.backend, verify, ledger=ctx.ledger, rng=ctx.rng)
        if outcome.result is not None and recovered:
            return AttackOutcome(True, recovered[0], t, None, prediction)
        logger.warning("Q1 MITM attempt %d found no verified key; retrying with fresh pairs", attempt + 1)
    return AttackOutcome.failed(
        f"no verified key after {VERIFY_RETRIES} retries", t=t, r=None, prediction=prediction
    )
