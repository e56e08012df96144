# ABOUTME: Exception hierarchy shared by every workbench module.
# ABOUTME: Separates misuse (parameters, oracle access) from exhausted resource budgets.


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class ParameterError(WorkbenchError, ValueError):
    """Width, range or scheme mismatch in caller-supplied parameters."""


class ResourceError(WorkbenchError):
    """A configured budget (table size, statevector width, brute-force width) is exceeded."""

    def __init__(self, message: str, required: int) -> None:
        super().__init__(f"{message} (required: {required})")
        self.required = required


class OracleAccessError(WorkbenchError, RuntimeError):
    """A Q1 oracle handle was queried from inside a search predicate."""


class NormDriftError(WorkbenchError, ArithmeticError):
    """Statevector norm left the tolerance band during a Grover iteration."""
