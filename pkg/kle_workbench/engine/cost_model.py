# ABOUTME: Exact-rational complexity formulas for every attack: claw regimes, Grover and tradeoffs.
# ABOUTME: Also the classical-MITM and Grover brute-force baselines each attack is compared against.
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ParameterError

logger = logging.getLogger(__name__)

BALANCED = "balanced"
LARGE_Y = "large-y"
SWAPPED = "swapped"


@dataclass(frozen=True)
class ClawRegime:
    time_exponent: Fraction
    qram_exponent: Fraction
    regime: str


def claw_regime(log2_x, log2_y) -> ClawRegime:
    """Quantum claw-finding cost for |X| = 2^log2_x, |Y| = 2^log2_y.

    sqrt|X| <= |Y| < |X|^2 costs (|X||Y|)^(1/3), |Y| >= |X|^2 costs |Y|^(1/2),
    time and QRAM alike. |Y| < sqrt|X| is handled by swapping the two sides.
    """
    x, y = Fraction(log2_x), Fraction(log2_y)
    swapped = y < x / 2
    if swapped:
        x, y = y, x
    if y >= 2 * x:
        exponent, regime = y / 2, LARGE_Y
    else:
        exponent, regime = (x + y) / 3, BALANCED
    return ClawRegime(exponent, exponent, SWAPPED if swapped else regime)


@dataclass(frozen=True)
class Prediction:
    attack_id: str
    time_exponent: Fraction
    qram_exponent: Fraction | None
    regime: str | None
    bruteforce_exponent: Fraction
    classical_mitm_exponent: Fraction | None
    time_factor: int | None = None

    @property
    def worse_than_bruteforce(self) -> bool:
        return self.time_exponent >= self.bruteforce_exponent


def log2_exact(r: int) -> Fraction:
    """log2(r) as a Fraction; exact for powers of two."""
    if r < 1:
        raise ParameterError(f"partition arity must be >= 1, got {r}")
    if r & (r - 1) == 0:
        return Fraction(r.bit_length() - 1)
    return Fraction(math.log2(r)).limit_denominator(10**6)


def balanced_log2_r(attack_id: str, kappa: int, n: int) -> Fraction:
    """Partition exponent that equalises time and QRAM for the tradeoff attacks."""
    if attack_id in _TWO_KEY_TABLE_ATTACKS:
        return Fraction(kappa, 4)
    if attack_id in _THREE_XCE_TABLE_ATTACKS:
        return Fraction(n - kappa, 4)
    raise ParameterError(f"attack {attack_id!r} has no partition tradeoff")


def default_partition(attack_id: str, kappa: int, n: int) -> int:
    """Integral r closest below the balanced choice (at least 1)."""
    return 1 << max(0, math.floor(balanced_log2_r(attack_id, kappa, n)))


_TWO_KEY_TABLE_ATTACKS = frozenset({"grover-mitm-2kte", "tradeoff-mitm-2kte", "grover-mitm-g2kte"})
_THREE_XCE_TABLE_ATTACKS = frozenset({"3xce-q2-grover", "3xce-q2-tradeoff"})
_TRADEOFF_DEFAULTS = frozenset({"tradeoff-mitm-2kte", "3xce-q2-tradeoff"})

KNOWN_ATTACKS = (
    "qcf-mitm-2kte",
    "grover-mitm-2kte",
    "tradeoff-mitm-2kte",
    "qcf-mitm-g2kte",
    "grover-mitm-g2kte",
    "3xce-q2-qcf",
    "3xce-q2-grover",
    "3xce-q2-tradeoff",
    "3xce-q1-mitm",
    "sitm-3xce",
    "sitm-karc",
    "sitm-ele",
    "mirror-slide-q1",
    "mirror-slide-q2",
    "mirror-slide-q2-p",
)


def ledger_predict(
    attack_id: str,
    kappa: int,
    n: int,
    r: int | None = None,
    *,
    log2_r: Fraction | int | None = None,
    time_factor: int | None = None,
) -> Prediction:
    """Predicted log2 time and QRAM for ``attack_id`` at (kappa, n).

    Not range-limited, so full-scale figures (kappa=56, n=64) come out too.
    ``log2_r`` takes precedence over ``r`` and may be fractional or negative
    for symbolic checks of the balanced tradeoff.
    """
    if attack_id not in KNOWN_ATTACKS:
        raise ParameterError(f"unknown attack id {attack_id!r}; expected one of {list(KNOWN_ATTACKS)}")
    k, b = Fraction(kappa), Fraction(n)
    if log2_r is not None:
        lr = Fraction(log2_r)
    elif r is not None:
        lr = log2_exact(r)
    elif attack_id in _TRADEOFF_DEFAULTS:
        lr = balanced_log2_r(attack_id, kappa, n)
    else:
        lr = Fraction(0)

    if attack_id in ("qcf-mitm-2kte", "qcf-mitm-g2kte"):
        claw = claw_regime(k, k)
        return Prediction(attack_id, claw.time_exponent, claw.qram_exponent, claw.regime, k, k, time_factor)
    if attack_id in _TWO_KEY_TABLE_ATTACKS:
        return Prediction(attack_id, k / 2 + lr, k - lr, None, k, k, time_factor)

    whitened_bruteforce = (k + 2 * b) / 2
    if attack_id == "3xce-q2-qcf":
        claw = claw_regime(k + b, b)
        return Prediction(
            attack_id, claw.time_exponent, claw.qram_exponent, claw.regime,
            whitened_bruteforce, k + b, time_factor,
        )
    if attack_id in _THREE_XCE_TABLE_ATTACKS:
        return Prediction(
            attack_id, (k + b) / 2 + lr, b - lr, None, whitened_bruteforce, k + b, time_factor
        )
    if attack_id in ("3xce-q1-mitm", "sitm-3xce", "sitm-karc", "mirror-slide-q2", "mirror-slide-q2-p"):
        return Prediction(attack_id, (k + b) / 2, None, None, whitened_bruteforce, k + b, time_factor)
    if attack_id == "mirror-slide-q1":
        return Prediction(attack_id, (k + 3 * b) / 2, None, None, whitened_bruteforce, k + b, time_factor)
    # sitm-ele: the search runs over the outer key only
    return Prediction(attack_id, k / 2, None, None, (k + b) / 2, None, time_factor)
