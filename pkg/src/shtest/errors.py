"""Exception types raised across the package."""


class ShTestError(Exception):
    """Base class for every error raised by shtest."""


class DomainError(ShTestError, ValueError):
    """An argument lies outside the domain of a numerical function."""


class DimensionMismatch(ShTestError, ValueError):
    pass


class InsufficientSamples(ShTestError, ValueError):
    pass


class SingularCovariance(ShTestError, ArithmeticError):
    """Cholesky factorization hit a non-positive (or negligible) pivot."""


class ZeroVariance(ShTestError, ArithmeticError):
    pass


class DegenerateDof(ShTestError, ArithmeticError):
    pass


class ConfigInvalid(ShTestError, ValueError):
    pass


class EmptyInput(ShTestError, ValueError):
    pass


class DegenerateScenario(ShTestError, ValueError):
    """A min-min column has zero maximal power."""


class ParseError(ShTestError, ValueError):
    def __init__(self, message, *, path=None, line=None, column=None):
        loc = []
        if path is not None:
            loc.append(str(path))
        if line is not None:
            loc.append(f"line {line}")
        if column is not None:
            loc.append(f"column {column}")
        super().__init__(f"{': '.join([', '.join(loc), message]) if loc else message}")
        self.path = path
        self.line = line
        self.column = column


class ReplicateFailed(ShTestError, RuntimeError):
    """A Monte Carlo replicate raised; the run is aborted."""

    def __init__(self, replicate, method, cause):
        super().__init__(f"replicate {replicate} failed in {method}: {cause}")
        self.replicate = replicate
        self.method = method
