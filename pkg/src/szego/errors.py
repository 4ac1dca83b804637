"""Exception types shared across the library.

The CLI maps these onto its exit-code contract: invalid input -> 2,
violated mathematical precondition -> 3, tolerance exceeded -> 4.
"""


class InputError(ValueError):
    """Malformed or inadmissible input (bad JSON, pole on the real line, ...)."""


class PreconditionError(ValueError):
    """A mathematical precondition of the requested operation is violated."""


class NumericalError(RuntimeError):
    """An internal numerical postcondition failed (residual too large, ...)."""


class ToleranceExceeded(RuntimeError):
    """A requested validation ran fine but the result exceeds the tolerance."""
