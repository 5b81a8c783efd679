"""
Exception hierarchy for hierpin.

Every error carries the process exit code the CLI maps it to.
"""

from typing import Tuple


class HierpinError(Exception):
    """Base class for all hierpin errors."""

    exit_code: int = 2


class DomainError(HierpinError, ValueError):
    """A moment generating function was evaluated outside its domain."""

    def __init__(self, t: float, domain: Tuple[float, float]) -> None:
        self.t = t
        self.domain = domain
        super().__init__(
            f"t={t!r} is outside the MGF domain [{domain[0]!r}, {domain[1]!r}]"
        )


class ArgumentError(HierpinError, ValueError):
    """A precondition of an operation does not hold."""


class SizeGuardError(ArgumentError):
    """A computation would exceed its size guard."""


class UnsupportedSamplingError(HierpinError, NotImplementedError):
    """The disorder law has no sampler (table MGFs are certificate-only)."""


class ConfigParseError(HierpinError, ValueError):
    """A configuration, CSV or checkpoint file is malformed."""

    def __init__(
        self, message: str, path: str = "", line: int = 0, field: str = ""
    ) -> None:
        self.path = path
        self.line = line
        self.field = field
        where = ", ".join(
            part
            for part in (
                path,
                f"line {line}" if line else "",
                f"field '{field}'" if field else "",
            )
            if part
        )
        super().__init__(f"{where}: {message}" if where else message)


class CapExceededError(HierpinError, RuntimeError):
    """An iteration cap was reached before the stopping condition."""

    exit_code = 3


class BudgetExhaustedError(HierpinError, RuntimeError):
    """A search budget ran out."""

    exit_code = 3


class SoundnessAlarm(HierpinError, RuntimeError):
    """Two certificates contradict each other; indicates a bug."""

    exit_code = 4
