"""Exception hierarchy shared by all engines.

The CLI maps these onto exit codes: DomainError -> 2, ConvergenceError -> 3.
"""


class LindelofError(Exception):
    pass


class DomainError(LindelofError, ValueError):
    """Input outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation requested at (or numerically on top of) a pole."""


class SectorError(DomainError):
    """z lies outside the sector |arg z| < pi - A of analytic continuation."""


class HypothesisError(DomainError):
    """A structural hypothesis of an expansion result is violated."""


class CatalogIncompleteError(HypothesisError):
    pass


class UnsupportedParameterError(DomainError):
    pass


class UnanchoredExactnessError(DomainError):
    """Rationality matters but only floating-point data was supplied."""


class ConvergenceError(LindelofError, ArithmeticError):
    """A series, quadrature or iteration failed to reach its tolerance."""


class PrecisionCapError(ConvergenceError):
    pass
