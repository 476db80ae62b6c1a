"""Exception types shared across the package."""


class DctcSimError(Exception):
    """Base class for all errors raised by this package."""


class InvariantViolationError(DctcSimError, ValueError):
    """A domain invariant failed: bad dimensions, unknown labels, a matrix
    that is not Hermitian/unitary/normalized within tolerance, and so on."""


class DegenerateAmplitudesError(DctcSimError, ValueError):
    """Amplitude pair with alpha ~ beta where the protocol requires alpha != beta."""


class FixedPointConvergenceError(DctcSimError, RuntimeError):
    """The fixed-point iteration did not reach the requested residual."""

    def __init__(self, best_residual: float, iterations: int, tolerance: float):
        self.best_residual = best_residual
        self.iterations = iterations
        self.tolerance = tolerance
        super().__init__(
            f"no fixed point within tolerance {tolerance:.3e} after "
            f"{iterations} iterations (best residual {best_residual:.3e})"
        )
