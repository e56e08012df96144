# ABOUTME: Mirror-slide sieve-in-the-middle attacks on tilde-3XCE with an involutive middle layer.
# ABOUTME: Q1 sieves known pairs for a mirror slid pair; Q2 builds slid pairs online (optionally P-twisted).
import logging
import math

import numpy as np

from ..config import VERIFY_RETRIES
from ..distinguishers import mirror_pair_distinguisher, pointwise_distinguisher
from ..engine.cost_model import ledger_predict
from ..engine.grover import SearchSpace, search
from ..engine.ledger import PredicateCost
from ..oracle_functions import default_t_3xce, plaintext_constants
from .common import AttackContext, AttackOutcome, KeyVerifier, distinct_plaintexts, query_data

logger = logging.getLogger(__name__)


def mirror_data_size(n: int) -> int:
    """ceil(2^((n+1)/2)) plaintexts give about one mirror slid pair."""
    return math.ceil(2 ** ((n + 1) / 2))


def mirror_slide_sitm_q1(ctx: AttackContext) -> AttackOutcome:
    spec = ctx.spec
    n = spec.n
    view = spec.ele_view()
    dist = mirror_pair_distinguisher(n)
    t = ctx.t or mirror_data_size(n)
    prediction = ledger_predict("mirror-slide-q1", spec.kappa, n, time_factor=dist.cost_T(t))
    ctx.ledger.record_prediction(prediction.time_exponent)

    plaintexts = distinct_plaintexts(ctx.rng, n, t)
    ciphertexts = query_data(ctx.handle, plaintexts)
    verifier = KeyVerifier(ctx.handle, ctx.rng, exclude=plaintexts)
    ms, cs = plaintexts[None, :], ciphertexts[None, :]

    def inner_states(zs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        z = np.asarray(zs, dtype=np.uint64)[:, None]
        return view.a_of(z, ms), view.b_of(z, cs)

    recovered: list[tuple[int, ...]] = []

    def verify(z: int) -> bool:
        # Under the right outer key every data pair is an input/output pair of L.
        a, b = inner_states(np.array([z], dtype=np.uint64))
        for k2 in view.family.consistent_keys(a[0], b[0]):
            keys = view.assemble(z, int(k2))
            if verifier.check(keys):
                recovered.append(keys)
                return True
        return False

    space = SearchSpace(
        view.key_bits,
        lambda zs: dist.decide_batch(*inner_states(zs)),
        cost=PredicateCost(cipher_evals=2 * t, comparisons=dist.cost_T(t)),
        guard=ctx.handle,
    )
    outcome = search(space, ctx.backend, verify, ledger=ctx.ledger, rng=ctx.rng)
    if outcome.result is None or not recovered:
        return AttackOutcome.failed("no mirror slid pair in the data", t=t, r=None, prediction=prediction)
    return AttackOutcome(True, recovered[0], t, None, prediction)


def mirror_slide_sitm_q2(ctx: AttackContext, twisted: bool = False) -> AttackOutcome:
    """Online slid pairs: a_i = D2_x(Enc(D1_x(i) ^ y) ^ y), b_i = E1_x(Dec(E2_x(i) ^ y) ^ y).

    Under the true (k, k1), a_i = L(i) and b_i = L^-1(i), so a_i == b_i for an
    involution and P(a_i) == b_i when L o P o L = Id.
    """
    spec = ctx.spec
    n = spec.n
    low = (1 << n) - 1
    e1, e2 = spec.ciphers
    family = spec.middle
    p = family.public_p if twisted else None
    dist = pointwise_distinguisher(n, p)
    t = ctx.t or default_t_3xce(spec.kappa, n)
    attack_id = "mirror-slide-q2-p" if twisted else "mirror-slide-q2"
    prediction = ledger_predict(attack_id, spec.kappa, n, time_factor=dist.cost_T(t))
    ctx.ledger.record_prediction(prediction.time_exponent)
    handle = ctx.handle

    for attempt in range(VERIFY_RETRIES + 1):
        offset = 0 if attempt == 0 else int(ctx.rng.integers(0, 1 << n))
        consts = plaintext_constants(t, n, offset)
        verifier = KeyVerifier(handle, ctx.rng)

        def slid_states(zs: np.ndarray, consts=consts) -> tuple[np.ndarray, np.ndarray]:
            z = np.asarray(zs, dtype=np.uint64)[:, None]
            x, y = z >> np.uint64(n), z & np.uint64(low)
            i = consts[None, :]
            a = e2.dec(x, handle.encrypt(e1.dec(x, i) ^ y) ^ y)
            b = e1.enc(x, handle.decrypt(e2.enc(x, i) ^ y) ^ y)
            return a, b

        recovered: list[tuple[int, ...]] = []

        def verify(z: int, consts=consts, slid_states=slid_states) -> bool:
            a, _ = slid_states(np.array([z], dtype=np.uint64))
            for k2 in family.consistent_keys(consts, a[0]):
                keys = (z >> n, z & low, int(k2))
                if verifier.check(keys):
                    recovered.append(keys)
                    return True
            return False

        space = SearchSpace(
            spec.kappa + n,
            lambda zs, slid_states=slid_states: dist.decide_batch(*slid_states(zs)),
            cost=PredicateCost(construction_queries=2 * t, cipher_evals=4 * t, comparisons=dist.cost_T(t)),
            guard=handle,
        )
        outcome = search(space, ctx.backend, verify, ledger=ctx.ledger, rng=ctx.rng)
        if outcome.result is not None and recovered:
            return AttackOutcome(True, recovered[0], t, None, prediction)
        logger.warning("Mirror-slide Q2 attempt %d found no verified key; retrying with new offsets", attempt + 1)
    return AttackOutcome.failed(
        f"no verified key after {VERIFY_RETRIES} retries", t=t, r=None, prediction=prediction
    )
