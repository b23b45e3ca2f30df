"""Exception types shared across the package."""


class PadicError(Exception):
    pass


class PrecisionExhausted(PadicError):
    """No significant digit survives at the working precision."""


class DivisionByIndistinguishableZero(PadicError, ZeroDivisionError):
    pass


class AmbiguousRank(PadicError):
    """A rank or determinant decision depends on digits beyond the safety margin."""


class DepthExhausted(PadicError):
    """Root isolation reached the precision limit without certification."""


class UnsupportedDegree(PadicError, ValueError):
    pass


class MassMismatch(PadicError):
    def __init__(self, lhs, rhs, label=""):
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(f"mass mismatch {label}: catalog sum {lhs} != closed form {rhs}")


class InvalidDistance(PadicError, ValueError):
    pass


class NonPrimeDegree(PadicError, ValueError):
    pass


class NotGenerator(PadicError):
    """x does not generate the extension, so the density vanishes."""


class BudgetExceeded(PadicError):
    pass


class OverlappingBalls(PadicError, ValueError):
    pass


class DegenerateRoot(PadicError):
    """P and P' share a root; the Kac-Rice estimator does not apply."""


class InseparableAtPrecision(PadicError):
    pass


class KacRiceUnresolved(PadicError):
    """Cell subdivision did not terminate within the depth budget."""
