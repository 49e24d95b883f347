"""Exception hierarchy for hyp2col."""


class Hyp2ColError(Exception):
    """Base class for all package errors."""


class ParameterError(Hyp2ColError, ValueError):
    """Invalid model parameters (n < k, negative counts, bad seed, ...)."""


class DimensionError(Hyp2ColError, ValueError):
    """Objects with mismatching vertex counts were combined."""


class InfeasibleError(Hyp2ColError, ValueError):
    """The requested object does not exist (e.g. more distinct edges than k-sets)."""


class RejectionLimitError(Hyp2ColError, RuntimeError):
    """A rejection-sampling loop exceeded its retry cap."""


class ResourceLimitError(Hyp2ColError, RuntimeError):
    """The exact computation would exceed the configured enumeration bounds."""


class DomainError(Hyp2ColError, ValueError):
    """A formula was evaluated outside its mathematical domain."""


class DivergenceError(DomainError):
    """A series evaluation was requested outside its region of convergence."""


class ParseError(Hyp2ColError, ValueError):
    """A serialized hypergraph or colouring file is malformed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
