# ABOUTME: Generic sieve-in-the-middle attack: Grover over the outer key with F(x) = A(S_x).
# ABOUTME: Instantiated for 3XCE (XOR difference), KARC (reflection) and generic ELE schemes.
import logging
import math

import numpy as np

from ..constructions import ConstructionSpec, OuterLayers, Scheme
from ..distinguishers import Distinguisher, DistinguisherKind, distinguisher_for
from ..engine.cost_model import ledger_predict
from ..engine.grover import SearchSpace, search
from ..engine.ledger import PredicateCost
from ..errors import ParameterError
from ..middle_layers import MiddleKind
from .common import AttackContext, AttackOutcome, KeyVerifier, distinct_plaintexts, query_data

logger = logging.getLogger(__name__)


_MIDDLE_DISTINGUISHERS = {
    MiddleKind.XOR: DistinguisherKind.XOR_DIFFERENCE,
    MiddleKind.REFLECTION_AFFINE: DistinguisherKind.REFLECTION,
}


def distinguisher_kind(spec: ConstructionSpec, requested: DistinguisherKind | str | None = None) -> DistinguisherKind:
    """The requested kind, else the one whose property the middle layer guarantees."""
    if requested is not None:
        return DistinguisherKind(requested)
    kind = spec.middle.kind
    try:
        return _MIDDLE_DISTINGUISHERS[kind]
    except KeyError:
        raise ParameterError(f"no SITM distinguisher for middle layer {kind}") from None


def default_distinguisher(ctx: AttackContext) -> Distinguisher:
    return distinguisher_for(distinguisher_kind(ctx.spec, ctx.distinguisher), ctx.spec.n)


def _outer_cipher_evals(ctx: AttackContext, t: int) -> int:
    spec = ctx.spec
    if spec.scheme is Scheme.GENERIC_ELE and spec.outer is not OuterLayers.BOTH:
        return t
    return 2 * t


def sitm_generic(
    ctx: AttackContext,
    distinguisher: Distinguisher | None = None,
    attack_id: str = "sitm-3xce",
) -> AttackOutcome:
    """Sieve the outer key with a distinguisher on S_x = {(a_x(m_i), b_x(c_i))}, then match k2."""
    spec = ctx.spec
    n = spec.n
    view = spec.ele_view()
    dist = distinguisher or default_distinguisher(ctx)
    t = ctx.t or math.ceil((view.key_bits + n) / n) + 1
    prediction = ledger_predict(attack_id, spec.kappa, n, time_factor=dist.cost_T(t))
    ctx.ledger.record_prediction(prediction.time_exponent)

    plaintexts = distinct_plaintexts(ctx.rng, n, t)
    ciphertexts = query_data(ctx.handle, plaintexts)
    verifier = KeyVerifier(ctx.handle, ctx.rng, exclude=plaintexts)
    ms, cs = plaintexts[None, :], ciphertexts[None, :]

    def inner_states(zs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        z = np.asarray(zs, dtype=np.uint64)[:, None]
        return view.a_of(z, ms), view.b_of(z, cs)

    def predicate(zs: np.ndarray) -> np.ndarray:
        return dist.decide_batch(*inner_states(zs))

    recovered: list[tuple[int, ...]] = []

    def verify(z: int) -> bool:
        a, b = inner_states(np.array([z], dtype=np.uint64))
        for k2 in view.family.consistent_keys(a[0], b[0]):
            keys = view.assemble(z, int(k2))
            if verifier.check(keys):
                recovered.append(keys)
                return True
        return False

    cost = PredicateCost(cipher_evals=_outer_cipher_evals(ctx, t), comparisons=dist.cost_T(t))
    space = SearchSpace(view.key_bits, predicate, cost=cost, guard=ctx.handle, domain=ctx.key_space)
    outcome = search(space, ctx.backend, verify, ledger=ctx.ledger, rng=ctx.rng)
    if outcome.result is None or not recovered:
        return AttackOutcome.failed("distinguisher never fired on a verifiable key", t=t, r=None, prediction=prediction)
    return AttackOutcome(True, recovered[0], t, None, prediction)
