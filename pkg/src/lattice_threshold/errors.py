"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the domain where the quantity exists."""


class ConvergenceError(RuntimeError):
    """A numerical procedure failed to reach its tolerance.

    Attributes
    ----------
    estimate : float or None
        The achieved error estimate (relative, unless stated otherwise).
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class NoBoundState(Exception):
    """The coupling is at or below the threshold, so no eigenvalue exists.

    Attributes
    ----------
    mu : float
        The requested coupling.
    mu0 : float
        The coupling-constant threshold for the requested quasimomentum.
    """

    def __init__(self, mu, mu0):
        super().__init__(f"no bound state: mu={mu!r} <= mu0={mu0!r}")
        self.mu = mu
        self.mu0 = mu0
