"""Exception types shared across the package.

Each maps to a CLI exit code (see ``entscale.cli``).
"""


class InvalidArgument(ValueError):
    """Malformed or inconsistent input."""


class InvalidState(ValueError):
    """A state vector that violates normalization or shape."""


class ResourceLimit(RuntimeError):
    """A size guard refused the request before allocating."""


class ConvergenceFailure(RuntimeError):
    """An iterative routine hit its iteration cap."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotCoprime(InvalidArgument):
    """Base and modulus share a factor; ``divisor`` holds gcd(a, N)."""

    def __init__(self, a, N, divisor):
        super().__init__(f"gcd({a}, {N}) = {divisor}")
        self.divisor = divisor
