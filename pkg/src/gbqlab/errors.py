"""Exception types shared across the package."""


class DomainTooSmallError(ValueError):
    """The periodic box is too short for the requested profile to decay."""


class ConvergenceError(RuntimeError):
    """An iterative solver (Petviashvili, Newton, eigensolver) failed to converge."""


class BlowupError(RuntimeError):
    """The evolved field exceeded the configured sup-norm cap.

    Carries the time at which the cap was crossed; finite-time escape is a
    legitimate outcome for this equation, not a solver bug.
    """

    def __init__(self, time, message=None):
        self.time = time
        super().__init__(message or f"sup-norm cap exceeded at t={time:.6g}")


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""
