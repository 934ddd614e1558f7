# rscavity/utils/errors.py

from typing import Optional


class RSCavityError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 1


class InputError(RSCavityError, ValueError):
    """Bad arguments: out-of-range variables, complementary literals, bad parameters."""

    exit_code = 2


class ParseError(InputError):
    """DIMACS / edge-list syntax error, rendered as ``line N: message``."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        self.reason = message
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnsatisfiableError(InputError):
    """Marginals were requested on a formula with Z = 0."""


class ResourceCapError(RSCavityError):
    """A component or tree exceeded its configured size cap."""

    exit_code = 3

    def __init__(self, what: str, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"{what} of size {size} exceeds cap {cap}")


class InvariantError(RSCavityError):
    """A checked invariant failed."""

    exit_code = 4
