class BaltruncError(Exception):
    """Base exception class for balanced-truncation errors"""
    pass


class InvalidMatrix(BaltruncError, ValueError):
    """Raised when a matrix is not 2-D or holds NaN/Inf entries"""
    pass


class DimensionMismatch(BaltruncError, ValueError):
    """Raised when operand shapes are not conformable"""
    pass


class AsymmetricMatrix(BaltruncError, ValueError):
    """Raised when a matrix that must be symmetric is not"""
    pass


class NumericalFailure(BaltruncError):
    """Raised when a numerical kernel fails to converge or overflows"""
    pass


class SingularMatrix(NumericalFailure):
    """Raised when a linear system is singular to working precision"""

    def __init__(self, message, pivot=0.0):
        super().__init__(message)
        self.pivot = pivot


class NotPositiveDefinite(NumericalFailure):
    """Raised when a factorization needs a positive definite matrix"""

    def __init__(self, message, value=0.0):
        super().__init__(message)
        self.value = value


class UnstableSystem(NumericalFailure):
    """Raised when an operation needs a stable model"""

    def __init__(self, message, abscissa=0.0):
        super().__init__(message)
        self.abscissa = abscissa


class Resonance(NumericalFailure):
    """Raised when iw*I - A is singular at the requested frequency"""

    def __init__(self, message, omega=0.0):
        super().__init__(message)
        self.omega = omega


class NoValidGap(NumericalFailure):
    """Raised when no order splits the HSVs at a strict gap"""

    def __init__(self, message, cluster=()):
        super().__init__(message)
        self.cluster = list(cluster)


class ModelParseError(BaltruncError):
    """Raised when a model, report or signal file cannot be parsed"""

    def __init__(self, message, line=None, field=None):
        super().__init__(message)
        self.line = line
        self.field = field


class ModelValidationError(BaltruncError):
    """Raised when a parsed model breaks its type invariants"""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("Invalid model: " + "; ".join(self.violations))


class UnknownExampleKind(BaltruncError, ValueError):
    """Raised when gen_example is asked for an unknown family"""
    pass
