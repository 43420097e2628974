"""Exception hierarchy. Every error carries a short machine-readable ``code``."""


class RuelleKitError(Exception):
    code = "error"

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class MalformedMapError(RuelleKitError):
    code = "malformed-map"


class RootFailureError(RuelleKitError):
    code = "root-failure"


class NonSimpleCriticalError(RuelleKitError):
    code = "non-simple-critical"


class NormalizationError(RuelleKitError):
    code = "normalization"


class BudgetError(RuelleKitError):
    code = "budget-exceeded"


class PreconditionError(RuelleKitError):
    code = "precondition"


class UnsupportedMapError(RuelleKitError):
    code = "unsupported-map"


class NonInvariantSpanError(RuelleKitError):
    code = "non-invariant-span"


class QuadratureError(RuelleKitError):
    code = "quadrature"


class SpectrumError(RuelleKitError):
    code = "spectrum"


class LengthMismatchError(RuelleKitError):
    code = "length-mismatch"
