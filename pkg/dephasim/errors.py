"""Exception hierarchy for dephasim."""

from typing import Any, Dict, Optional


class DephasimError(Exception):
    """Base class for all dephasim errors"""


class ConfigError(DephasimError):
    """Configuration could not be resolved into a valid RunConfig"""

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)


class ContractViolation(DephasimError, ValueError):
    """A caller broke a documented precondition"""


class NumericalFailure(DephasimError, ArithmeticError):
    """A numerical procedure did not reach its requested accuracy"""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)
