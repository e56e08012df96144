# ABOUTME: Workbench configuration loaded from environment variables with defaults.
# ABOUTME: Caps parallelism, memory budgets and retry counts used across the engine and attacks.
import os


def _int_env(name: str, default: int) -> int:
    return int(os.environ.get(name, default))


def _float_env(name: str, default: float) -> float:
    return float(os.environ.get(name, default))


def _str_env(name: str, default: str) -> str:
    return os.environ.get(name, default)


# Parallelism
THREADS: int = max(1, _int_env("WORKBENCH_THREADS", os.cpu_count() or 1))

# Memory budgets
MAX_TABLE_ENTRIES: int = _int_env("WORKBENCH_MAX_TABLE_ENTRIES", 1 << 24)
MAX_STATEVECTOR_WIDTH: int = _int_env("WORKBENCH_MAX_STATEVECTOR_WIDTH", 22)
MAX_FG_BITS: int = _int_env("WORKBENCH_MAX_FG_BITS", 1024)  # width of one f/g output
BRUTE_FORCE_MAX_BITS: int = _int_env("WORKBENCH_BRUTE_FORCE_MAX_BITS", 24)
MAX_TABLE_FAMILY_BITS: int = 10  # keyed permutation families tabulated over all keys

# Predicate evaluation batch size (candidates per vectorised call)
SCAN_CHUNK: int = _int_env("WORKBENCH_SCAN_CHUNK", 1 << 14)

# Retries
VERIFY_RETRIES: int = _int_env("WORKBENCH_VERIFY_RETRIES", 3)
VERIFY_PAIRS: int = 2
GROVER_REPEATS: int = _int_env("WORKBENCH_GROVER_REPEATS", 3)

# Toy cipher
FEISTEL_ROUNDS: int = max(8, _int_env("WORKBENCH_FEISTEL_ROUNDS", 10))
KARC_ALPHA: int = 0x5A5A5A5A

# Statevector tolerances
NORM_TOLERANCE: float = _float_env("WORKBENCH_NORM_TOLERANCE", 1e-9)

# Logging
LOG_LEVEL: str = _str_env("WORKBENCH_LOG_LEVEL", "INFO").upper()

# Error tracking
SENTRY_DSN: str = _str_env("SENTRY_DSN", "")
