"""Exception types raised by the library."""


class ParameterError(ValueError):
    """Invalid cavity parameters or a configuration/operation mismatch."""


class ManifoldError(ValueError):
    """A kernel was evaluated off the energy-conserving manifold."""


class ConvergenceError(ArithmeticError):
    """A diagram series was requested outside its disc of convergence."""

    def __init__(self, ratio):
        self.ratio = ratio
        super().__init__(
            f"geometric ratio |r| = {abs(ratio):.6g} >= 1: strong-coupling regime, "
            "the perturbative series diverges"
        )


class DivergenceError(ArithmeticError):
    """A normalized observable has a vanishing normalization.

    ``numerator`` holds the unnormalized quantity so callers (the CLI in
    particular) can still report something finite.
    """

    def __init__(self, message, numerator=None):
        self.numerator = numerator
        super().__init__(message)
