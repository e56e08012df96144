# ABOUTME: Verification suites checking the MITM propositions, the Grover simulator and mirror slid pairs.
# ABOUTME: Each suite returns per-check results with counts and a pass/fail gate for the CLI.
import logging
import math
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from .config import NORM_TOLERANCE
from .constructions import AccessModel, OracleHandle, Scheme, build_instance
from .engine.grover import SearchSpace, auto_iterations, closed_form_probability, grover_statevector
from .engine.ledger import CostLedger
from .groundtruth import enumerate_claws, enumerate_mirror_pairs
from .middle_layers import MiddleKind
from .oracle_functions import build_fg_2kte

logger = logging.getLogger(__name__)

SPURIOUS_CLAW_GATE = 0.05
GROVER_ERROR_GATE = 1e-6
CLAW_SIZES = ((8, 8), (12, 8))
# Up to this many iterations per case every j is simulated; longer runs are strided.
GROVER_DENSE_ITERATIONS = 128


class Suite(StrEnum):
    PROPOSITIONS = "propositions"
    GROVER = "grover"
    MIRROR = "mirror"
    ALL = "all"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _q2_handle(instance) -> OracleHandle:
    return OracleHandle(instance, AccessModel.Q2, CostLedger())


def check_claw_propositions(
    trials: int,
    seed: int = 0,
    kappa: int = 8,
    n: int = 8,
    claw_sizes: tuple[tuple[int, int], ...] = CLAW_SIZES,
) -> list[CheckResult]:
    """True keys form a claw at every size in ``claw_sizes``; spurious claws stay rare at (kappa, n)."""
    results = []
    for claw_kappa, claw_n in claw_sizes:
        for scheme in (Scheme.TWO_KEY_TRIPLE, Scheme.GENERALIZED_TWO_KEY_TRIPLE):
            hits = 0
            for trial in range(trials):
                instance = build_instance(scheme, claw_kappa, claw_n, seed ^ trial)
                pair = build_fg_2kte(_q2_handle(instance))
                k1, k2 = instance.secret_keys
                hits += int(pair.f([k1])[0] == pair.g([k2])[0])
            name = f"true-key claw ({scheme}, kappa={claw_kappa}, n={claw_n})"
            results.append(CheckResult(name, hits == trials, f"{hits}/{trials}"))

    spurious = 0
    for trial in range(trials):
        instance = build_instance(Scheme.TWO_KEY_TRIPLE, kappa, n, seed ^ trial)
        claws = enumerate_claws(build_fg_2kte(_q2_handle(instance)))
        spurious += int(any(claw != instance.secret_keys for claw in claws))
    rate = spurious / trials if trials else 0.0
    results.append(
        CheckResult(
            "spurious claw rate",
            rate <= SPURIOUS_CLAW_GATE,
            f"{spurious}/{trials} = {rate:.4f} (gate {SPURIOUS_CLAW_GATE})",
        )
    )
    return results


def iteration_grid(size: int, marked: int) -> list[int]:
    """0 .. twice the auto count, strided past GROVER_DENSE_ITERATIONS, always with both ends and the auto count."""
    auto = auto_iterations(size, marked)
    top = 2 * auto
    stride = max(1, top // GROVER_DENSE_ITERATIONS)
    return sorted(set(range(0, top + 1, stride)) | {auto, top})


def check_grover_closed_form(widths=(4, 8, 10, 12, 20), marked=(1, 2, 4, 16)) -> list[CheckResult]:
    """Simulated success probability against sin^2((2j+1) theta) for j up to twice the auto count."""
    worst = 0.0
    drift = 0.0
    cases = 0
    for width in widths:
        size = 1 << width
        for m in marked:
            if m > size:
                continue
            space = SearchSpace(width, lambda xs, m=m: xs < np.uint64(m), expected_marked=m)
            for j in iteration_grid(size, m):
                outcome = grover_statevector(space, j, full_vector=width <= 10)
                expected = closed_form_probability(size, m, j)
                worst = max(worst, abs(outcome.success_probability - expected))
                drift = max(drift, outcome.max_norm_drift)
                cases += 1
    return [
        CheckResult(
            "grover closed form",
            worst <= GROVER_ERROR_GATE,
            f"max |simulated - closed form| = {worst:.3e} over {cases} cases (gate {GROVER_ERROR_GATE})",
        ),
        CheckResult("grover norm drift", drift <= NORM_TOLERANCE, f"max norm drift = {drift:.3e}"),
    ]


def check_mirror_implication(trials: int, seed: int = 0, kappa: int = 8, n: int = 8) -> list[CheckResult]:
    """Every slid pair found in random plus constructed data also satisfies the mirrored relation."""
    violations = 0
    constructed_found = 0
    with_random_pair = 0
    data_size = math.ceil(2 ** ((n + 1) / 2))
    for trial in range(trials):
        instance = build_instance(
            Scheme.TILDE_THREE_XOR_CASCADE, kappa, n, seed ^ trial, middle_kind=MiddleKind.RANDOM_INVOLUTION
        )
        rng = np.random.default_rng([seed, trial])
        k, k1, _ = instance.secret_keys
        e1, e2 = instance.spec.ciphers
        middle_value = int(rng.integers(0, 1 << n))
        m = e1.dec(k, middle_value) ^ k1
        m_star = instance.decrypt(e2.enc(k, middle_value) ^ k1)

        random_part = rng.choice(1 << n, size=data_size, replace=False).astype(np.uint64)
        scan = enumerate_mirror_pairs(instance, random_part)
        violations += scan.violations
        with_random_pair += int(bool(scan.pairs))

        data = np.array([m, m_star], dtype=np.uint64)
        constructed = enumerate_mirror_pairs(instance, data)
        violations += constructed.violations
        constructed_found += int((0, 1) in constructed.pairs)
    return [
        CheckResult("mirror implication violations", violations == 0, f"{violations}"),
        CheckResult("constructed slid pairs found", constructed_found == trials, f"{constructed_found}/{trials}"),
        CheckResult(
            "mirror pair existence",
            True,
            f"{with_random_pair}/{trials} random data sets of {data_size} plaintexts hold a slid pair",
        ),
    ]


def run_suite(suite: Suite | str, trials: int, seed: int = 0) -> list[CheckResult]:
    suite = Suite(suite)
    results: list[CheckResult] = []
    if suite in (Suite.PROPOSITIONS, Suite.ALL):
        results += check_claw_propositions(trials, seed)
    if suite in (Suite.GROVER, Suite.ALL):
        results += check_grover_closed_form()
    if suite in (Suite.MIRROR, Suite.ALL):
        results += check_mirror_implication(trials, seed)
    for result in results:
        logger.info("%s", result.line())
    return results
