"""Exception types. Each carries a short machine-readable ``code``."""


class TwoVCError(ValueError):
    code = "E_TWOVC"

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code

    def __str__(self):
        return f"{self.code}: {self.args[0]}"


class ModelError(TwoVCError):
    """Invalid model specification or variance point."""


class AssumptionError(TwoVCError):
    """Model violates ``nu_d > 0`` (B V B' must be singular)."""


class DegenerateDataError(TwoVCError):
    """All statistics ``T_i`` for ``i < d`` vanish; the reduction to one variable is invalid."""


class ZeroPolynomialError(TwoVCError):
    """Polynomial is identically zero (non-generic data)."""

    def __init__(self, message: str = "identically zero: non-generic data"):
        super().__init__("E_ZERO_POLY", message)


class NoCriticalPointsError(TwoVCError):
    """Polynomial is a non-zero constant."""

    def __init__(self, message: str = "no critical points"):
        super().__init__("E_CONST_POLY", message)


class DegenerateSpectrumError(TwoVCError):
    """Spectrum makes the (theta, -theta) test denominator vanish."""


class SpuriousPointError(TwoVCError):
    """Evaluation point sits on a pole of the rational expressions."""

    def __init__(self, message: str = "spurious point"):
        super().__init__("E_SPURIOUS", message)
