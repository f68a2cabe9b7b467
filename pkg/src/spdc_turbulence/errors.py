"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A physical parameter is outside its valid domain."""


class UnitParseError(ValueError):
    """A quantity string could not be parsed."""


class ConfigError(ValueError):
    """A run configuration is malformed (unknown key, bad value, missing field)."""


class DegenerateIntegrandError(ValueError):
    """The quadratic form is not integrable: Re(A) is not positive definite."""


class SingularConstantError(ArithmeticError):
    """A printed closed-form constant hits a zero denominator or an infinity."""


class QuadratureConvergenceError(RuntimeError):
    """Adaptive quadrature exhausted its refinement ladder without converging."""

    def __init__(self, message: str, estimate: complex, error_bound: float):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class EvaluationError(RuntimeError):
    """An evaluator produced a result violating a structural invariant."""
