# ABOUTME: Thread-safe cost ledger counting oracle queries, cipher calls and Grover iterations.
# ABOUTME: Holds predicted exponents and a separate preprocessing section for reusable tables.
import logging
import threading
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ParameterError

logger = logging.getLogger(__name__)

COUNTERS = (
    "construction_queries_classical",
    "construction_queries_superposition",
    "cipher_evals",
    "grover_iterations",
    "predicate_evals",
    "comparisons",
    "subtable_calls",
    "rejected_candidates",
)
PEAKS = ("qram_entries", "classical_memory_entries")
PREPROCESSING = ("cipher_evals", "comparisons", "classical_memory_entries")


def format_exponent(value: Fraction | None) -> str | None:
    """Exact rational text: "20/3", or "8" when integral."""
    return None if value is None else str(Fraction(value))


@dataclass(frozen=True)
class PredicateCost:
    """Declared cost of one predicate evaluation inside a search."""

    construction_queries: int = 0
    cipher_evals: int = 0
    comparisons: int = 0

    def charge(self, ledger: "CostLedger", evaluations: int) -> None:
        ledger.charge(
            predicate_evals=evaluations,
            construction_queries_superposition=self.construction_queries * evaluations,
            cipher_evals=self.cipher_evals * evaluations,
            comparisons=self.comparisons * evaluations,
        )


class CostLedger:
    """Monotone counters for one attack run.

    All mutations go through a threading.Lock so a ledger can be shared by the
    worker threads of a single trial.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._counters: dict[str, int] = dict.fromkeys(COUNTERS + PEAKS, 0)
        self._preprocessing: dict[str, int] = dict.fromkeys(PREPROCESSING, 0)
        self._time_exponent: Fraction | None = None
        self._qram_exponent: Fraction | None = None

    @staticmethod
    def _validate(section: dict[str, int], values: dict[str, int]) -> None:
        for name, value in values.items():
            if name not in section:
                raise ParameterError(f"unknown ledger counter {name!r}")
            if int(value) < 0:
                raise ParameterError(f"ledger counters are monotone; {name} got {value}")

    def charge(self, **deltas: int) -> None:
        with self._lock:
            self._validate(self._counters, deltas)
            for name, delta in deltas.items():
                if name in PEAKS:
                    raise ParameterError(f"{name} is a peak counter; use peak()")
                self._counters[name] += int(delta)

    def peak(self, **values: int) -> None:
        with self._lock:
            self._validate(self._counters, values)
            for name, value in values.items():
                if name not in PEAKS:
                    raise ParameterError(f"{name} is not a peak counter")
                self._counters[name] = max(self._counters[name], int(value))

    def charge_preprocessing(self, **deltas: int) -> None:
        with self._lock:
            self._validate(self._preprocessing, deltas)
            for name, delta in deltas.items():
                if name == "classical_memory_entries":
                    self._preprocessing[name] = max(self._preprocessing[name], int(delta))
                else:
                    self._preprocessing[name] += int(delta)

    def record_prediction(
        self, time_exponent: Fraction, qram_exponent: Fraction | None = None
    ) -> None:
        with self._lock:
            self._time_exponent = Fraction(time_exponent)
            self._qram_exponent = None if qram_exponent is None else Fraction(qram_exponent)

    def get(self, name: str) -> int:
        with self._lock:
            if name in self._counters:
                return self._counters[name]
            raise ParameterError(f"unknown ledger counter {name!r}")

    @property
    def predicted_time_exponent(self) -> Fraction | None:
        return self._time_exponent

    @property
    def predicted_qram_exponent(self) -> Fraction | None:
        return self._qram_exponent

    def snapshot(self) -> dict:
        with self._lock:
            state: dict = dict(self._counters)
            state["predicted_time_exponent"] = format_exponent(self._time_exponent)
            state["predicted_qram_exponent"] = format_exponent(self._qram_exponent)
            state["preprocessing"] = dict(self._preprocessing)
            return state
