# ABOUTME: Aggregates the attack procedures into the single registry the runner and CLI use.
# ABOUTME: Submodules (mitm_2kte, mitm_3xce, sitm, mirror_slide) each own one attack family.
from dataclasses import dataclass
from functools import partial
from typing import Callable

from ..constructions import AccessModel, Scheme
from ..errors import ParameterError
from ..middle_layers import MiddleKind
from . import common, mirror_slide, mitm_2kte, mitm_3xce, sitm
from .common import AttackContext, AttackOutcome


@dataclass(frozen=True)
class AttackSpec:
    attack_id: str
    model: AccessModel
    scheme: Scheme
    run: Callable[[AttackContext], AttackOutcome]
    schemes: frozenset[Scheme]
    middle_kinds: frozenset[MiddleKind] = frozenset()
    default_middle: MiddleKind | None = None
    partitioned: bool = False
    # Sieves the outer key with a distinguisher the config may override.
    sieve: bool = False

    def check_scheme(self, scheme: Scheme, middle_kind: MiddleKind | None) -> None:
        if scheme not in self.schemes:
            raise ParameterError(
                f"attack {self.attack_id} does not apply to scheme {scheme}; "
                f"expected one of {sorted(s.value for s in self.schemes)}"
            )
        if self.middle_kinds and middle_kind not in self.middle_kinds:
            raise ParameterError(
                f"attack {self.attack_id} needs middle layer in "
                f"{sorted(k.value for k in self.middle_kinds)}, got {middle_kind}"
            )


_TWO_KEY = frozenset({Scheme.TWO_KEY_TRIPLE, Scheme.TWO_KEY_TRIPLE_EDE, Scheme.GENERALIZED_TWO_KEY_TRIPLE})
_G2KTE = frozenset({Scheme.GENERALIZED_TWO_KEY_TRIPLE})
_3XCE = frozenset({Scheme.THREE_XOR_CASCADE})
_TILDE = frozenset({Scheme.TILDE_THREE_XOR_CASCADE})
_INVOLUTIONS = frozenset({MiddleKind.RANDOM_INVOLUTION, MiddleKind.XOR})

_SPECS = (
    AttackSpec("qcf-mitm-2kte", AccessModel.Q2, Scheme.TWO_KEY_TRIPLE,
               partial(mitm_2kte.qcf_mitm_2kte, attack_id="qcf-mitm-2kte"), _TWO_KEY),
    AttackSpec("grover-mitm-2kte", AccessModel.Q2, Scheme.TWO_KEY_TRIPLE,
               partial(mitm_2kte.grover_mitm_2kte, attack_id="grover-mitm-2kte"), _TWO_KEY, partitioned=True),
    AttackSpec("tradeoff-mitm-2kte", AccessModel.Q2, Scheme.TWO_KEY_TRIPLE,
               partial(mitm_2kte.grover_mitm_2kte, attack_id="tradeoff-mitm-2kte"), _TWO_KEY, partitioned=True),
    AttackSpec("qcf-mitm-g2kte", AccessModel.Q2, Scheme.GENERALIZED_TWO_KEY_TRIPLE,
               partial(mitm_2kte.qcf_mitm_2kte, attack_id="qcf-mitm-g2kte"), _G2KTE),
    AttackSpec("grover-mitm-g2kte", AccessModel.Q2, Scheme.GENERALIZED_TWO_KEY_TRIPLE,
               partial(mitm_2kte.grover_mitm_2kte, attack_id="grover-mitm-g2kte"), _G2KTE, partitioned=True),
    AttackSpec("3xce-q2-qcf", AccessModel.Q2, Scheme.THREE_XOR_CASCADE,
               partial(mitm_3xce.mitm_3xce_q2, variant="qcf"), _3XCE),
    AttackSpec("3xce-q2-grover", AccessModel.Q2, Scheme.THREE_XOR_CASCADE,
               partial(mitm_3xce.mitm_3xce_q2, variant="grover"), _3XCE, partitioned=True),
    AttackSpec("3xce-q2-tradeoff", AccessModel.Q2, Scheme.THREE_XOR_CASCADE,
               partial(mitm_3xce.mitm_3xce_q2, variant="tradeoff"), _3XCE, partitioned=True),
    AttackSpec("3xce-q1-mitm", AccessModel.Q1, Scheme.THREE_XOR_CASCADE, mitm_3xce.mitm_3xce_q1, _3XCE),
    AttackSpec("sitm-3xce", AccessModel.Q1, Scheme.THREE_XOR_CASCADE,
               partial(sitm.sitm_generic, attack_id="sitm-3xce"), _3XCE, sieve=True),
    AttackSpec("sitm-karc", AccessModel.Q1, Scheme.KARC,
               partial(sitm.sitm_generic, attack_id="sitm-karc"), frozenset({Scheme.KARC}), sieve=True),
    AttackSpec("sitm-ele", AccessModel.Q1, Scheme.GENERIC_ELE,
               partial(sitm.sitm_generic, attack_id="sitm-ele"), frozenset({Scheme.GENERIC_ELE}),
               frozenset({MiddleKind.XOR, MiddleKind.REFLECTION_AFFINE}), MiddleKind.XOR, sieve=True),
    AttackSpec("mirror-slide-q1", AccessModel.Q1, Scheme.TILDE_THREE_XOR_CASCADE,
               mirror_slide.mirror_slide_sitm_q1, _TILDE, _INVOLUTIONS, MiddleKind.RANDOM_INVOLUTION),
    AttackSpec("mirror-slide-q2", AccessModel.Q2, Scheme.TILDE_THREE_XOR_CASCADE,
               mirror_slide.mirror_slide_sitm_q2, _TILDE, _INVOLUTIONS, MiddleKind.RANDOM_INVOLUTION),
    AttackSpec("mirror-slide-q2-p", AccessModel.Q2, Scheme.TILDE_THREE_XOR_CASCADE,
               partial(mirror_slide.mirror_slide_sitm_q2, twisted=True), _TILDE,
               frozenset({MiddleKind.P_TWISTED_INVOLUTION}), MiddleKind.P_TWISTED_INVOLUTION),
)

ATTACKS: dict[str, AttackSpec] = {spec.attack_id: spec for spec in _SPECS}


def get_attack(attack_id: str) -> AttackSpec:
    try:
        return ATTACKS[attack_id]
    except KeyError:
        raise ParameterError(
            f"unknown attack id {attack_id!r}; valid ids: {', '.join(ATTACKS)}"
        ) from None


__all__ = [
    "ATTACKS",
    "AttackContext",
    "AttackOutcome",
    "AttackSpec",
    "get_attack",
    "common",
    "mirror_slide",
    "mitm_2kte",
    "mitm_3xce",
    "sitm",
]
