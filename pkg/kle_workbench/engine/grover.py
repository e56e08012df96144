# ABOUTME: Grover search backends: amplitude-level statevector simulator and idealized emulator.
# ABOUTME: Both charge the cost ledger per the Grover iteration count; attacks call search().
import logging
import math
from contextlib import nullcontext
from dataclasses import dataclass, replace
from enum import StrEnum
from typing import Callable, Literal

import numpy as np

from ..config import GROVER_REPEATS, MAX_STATEVECTOR_WIDTH, NORM_TOLERANCE, SCAN_CHUNK
from ..errors import NormDriftError, ParameterError, ResourceError
from .ledger import CostLedger, PredicateCost

logger = logging.getLogger(__name__)

AUTO: Literal["auto"] = "auto"


class Backend(StrEnum):
    STATEVECTOR = "statevector"
    IDEALIZED = "idealized"


def auto_iterations(size: int, marked: int = 1) -> int:
    """ceil((pi/4) * sqrt(N/M)), with M floored at 1."""
    return math.ceil(math.pi / 4 * math.sqrt(size / max(marked, 1)))


def closed_form_probability(size: int, marked: int, iterations: int) -> float:
    if marked <= 0:
        return 0.0
    theta = math.asin(math.sqrt(marked / size))
    return math.sin((2 * iterations + 1) * theta) ** 2


class _MarkedCache:
    def __init__(self) -> None:
        self.values: np.ndarray | None = None


class SearchSpace:
    """A search domain plus a batch predicate over it.

    The domain is {0, ..., 2^width - 1} unless an explicit ``domain`` array
    restricts it. ``predicate`` maps a uint64 batch to a boolean mask and is
    evaluated inside ``guard.predicate_scope()`` when a guard is given.
    """

    def __init__(
        self,
        width: int,
        predicate: Callable[[np.ndarray], np.ndarray],
        *,
        expected_marked: int = 1,
        cost: PredicateCost = PredicateCost(),
        guard=None,
        domain: np.ndarray | None = None,
        exclude: frozenset[int] = frozenset(),
        chunk: int = SCAN_CHUNK,
    ) -> None:
        if width < 0:
            raise ParameterError(f"search width must be >= 0, got {width}")
        self.width = width
        self.predicate = predicate
        self.expected_marked = expected_marked
        self.cost = cost
        self.guard = guard
        self.domain = None if domain is None else np.asarray(domain, dtype=np.uint64)
        self.exclude = frozenset(int(v) for v in exclude)
        self.chunk = chunk
        self._cache = _MarkedCache()

    @property
    def size(self) -> int:
        return len(self.domain) if self.domain is not None else 1 << self.width

    def values(self, start: int, stop: int) -> np.ndarray:
        if self.domain is not None:
            return self.domain[start:stop]
        return np.arange(start, stop, dtype=np.uint64)

    def _scan(self) -> np.ndarray:
        hits = []
        scope = self.guard.predicate_scope() if self.guard is not None else nullcontext()
        with scope:
            for start in range(0, self.size, self.chunk):
                batch = self.values(start, min(start + self.chunk, self.size))
                mask = np.asarray(self.predicate(batch), dtype=bool)
                hits.append(batch[mask])
        if not hits:
            return np.empty(0, dtype=np.uint64)
        return np.unique(np.concatenate(hits))

    def marked(self) -> np.ndarray:
        """Marked elements (ascending), minus the excluded ones."""
        if self._cache.values is None:
            self._cache.values = self._scan()
            logger.debug("Scanned %d candidates, %d marked", self.size, len(self._cache.values))
        found = self._cache.values
        if self.exclude:
            found = found[~np.isin(found, np.fromiter(self.exclude, dtype=np.uint64))]
        return found

    def excluding(self, *values: int) -> "SearchSpace":
        clone = SearchSpace(
            self.width,
            self.predicate,
            expected_marked=self.expected_marked,
            cost=self.cost,
            guard=self.guard,
            domain=self.domain,
            exclude=self.exclude | {int(v) for v in values},
            chunk=self.chunk,
        )
        clone._cache = self._cache
        return clone


@dataclass(frozen=True)
class GroverOutcome:
    result: int | None
    iterations: int
    success_probability: float | None
    samples: tuple[int, ...]
    runs: int = 1
    max_norm_drift: float = 0.0


def _charge(ledger: CostLedger | None, space: SearchSpace, iterations: int) -> None:
    if ledger is None:
        return
    ledger.charge(grover_iterations=iterations)
    space.cost.charge(ledger, iterations)


def grover_statevector(
    space: SearchSpace,
    iterations: int | Literal["auto"] = AUTO,
    *,
    rng: np.random.Generator | None = None,
    shots: int = 1,
    full_vector: bool = False,
    ledger: CostLedger | None = None,
) -> GroverOutcome:
    """Simulate uniform preparation, phase oracle and diffusion on real amplitudes.

    The default two-class mode tracks one amplitude for marked and one for
    unmarked elements; ``full_vector`` keeps all N amplitudes instead.
    """
    if space.width > MAX_STATEVECTOR_WIDTH:
        raise ResourceError(
            f"statevector width {space.width} exceeds {MAX_STATEVECTOR_WIDTH}; use the idealized backend",
            required=space.width,
        )
    rng = rng if rng is not None else np.random.default_rng(0)
    size = space.size
    marked = space.marked()
    count = len(marked)
    steps = auto_iterations(size, space.expected_marked) if iterations == AUTO else int(iterations)
    if steps < 0:
        raise ParameterError(f"iterations must be >= 0, got {steps}")

    drift = 0.0
    if full_vector:
        mask = np.isin(space.values(0, size), marked)
        state = np.full(size, 1.0 / math.sqrt(size))
        for _ in range(steps):
            state[mask] = -state[mask]
            state = 2.0 * state.mean() - state
            drift = max(drift, abs(float(np.dot(state, state)) - 1.0))
            if drift > NORM_TOLERANCE:
                raise NormDriftError(f"statevector norm drifted by {drift:.3e}")
        probability = float(np.sum(state[mask] ** 2))
    else:
        amp_marked = amp_rest = 1.0 / math.sqrt(size)
        for _ in range(steps):
            amp_marked = -amp_marked
            mean = (count * amp_marked + (size - count) * amp_rest) / size
            amp_marked, amp_rest = 2.0 * mean - amp_marked, 2.0 * mean - amp_rest
            norm = count * amp_marked**2 + (size - count) * amp_rest**2
            drift = max(drift, abs(norm - 1.0))
            if drift > NORM_TOLERANCE:
                raise NormDriftError(f"statevector norm drifted by {drift:.3e}")
        probability = count * amp_marked**2 if count else 0.0

    samples = _sample(space, marked, probability, shots, rng, state if full_vector else None)
    _charge(ledger, space, steps)
    hits = [s for s in samples if count and np.isin(s, marked)]
    return GroverOutcome(
        result=hits[0] if hits else None,
        iterations=steps,
        success_probability=probability,
        samples=tuple(samples),
        max_norm_drift=drift,
    )


def _sample(space, marked, probability, shots, rng, state) -> list[int]:
    size = space.size
    if state is not None:
        weights = state**2
        positions = rng.choice(size, size=shots, p=weights / weights.sum())
        return [int(space.values(int(p), int(p) + 1)[0]) for p in positions]
    out = []
    for _ in range(shots):
        if len(marked) and rng.random() < probability:
            out.append(int(marked[rng.integers(len(marked))]))
            continue
        if len(marked) == size:
            out.append(int(marked[rng.integers(len(marked))]))
            continue
        while True:
            position = int(rng.integers(size))
            value = int(space.values(position, position + 1)[0])
            if not np.isin(value, marked):
                out.append(value)
                break
    return out


def grover_idealized(
    space: SearchSpace,
    verify: Callable[[int], bool] | None = None,
    *,
    ledger: CostLedger | None = None,
) -> GroverOutcome:
    """Exact answer by deterministic scan, charged at the Grover model cost.

    Every run charges ceil((pi/4) sqrt(N/M_assumed)) iterations. A candidate
    rejected by ``verify`` is excluded and the search is charged again.
    """
    steps = auto_iterations(space.size, space.expected_marked)
    runs = 0
    for candidate in space.marked():
        runs += 1
        _charge(ledger, space, steps)
        if verify is None or verify(int(candidate)):
            return GroverOutcome(int(candidate), steps * runs, None, (int(candidate),), runs)
        logger.debug("Candidate %#x rejected by verification", int(candidate))
        if ledger is not None:
            ledger.charge(rejected_candidates=1)
    runs += 1
    _charge(ledger, space, steps)
    return GroverOutcome(None, steps * runs, None, (), runs)


def search(
    space: SearchSpace,
    backend: Backend,
    verify: Callable[[int], bool] | None = None,
    *,
    ledger: CostLedger | None = None,
    rng: np.random.Generator | None = None,
) -> GroverOutcome:
    """Run the chosen backend until a verified element is found or the search gives up."""
    if Backend(backend) is Backend.IDEALIZED:
        return grover_idealized(space, verify, ledger=ledger)
    rng = rng if rng is not None else np.random.default_rng(0)
    misses = runs = total = 0
    last: GroverOutcome | None = None
    while misses < GROVER_REPEATS:
        last = grover_statevector(space, AUTO, rng=rng, ledger=ledger)
        runs += 1
        total += last.iterations
        if last.result is None:
            misses += 1
            continue
        if verify is None or verify(last.result):
            return replace(last, iterations=total, runs=runs)
        logger.debug("Sampled candidate %#x rejected by verification", last.result)
        if ledger is not None:
            ledger.charge(rejected_candidates=1)
        space = space.excluding(last.result)
    probability = last.success_probability if last is not None else None
    return GroverOutcome(None, total, probability, (), runs)
