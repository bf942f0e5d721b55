"""Exception hierarchy shared by all solvers."""


class CrawlerError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(CrawlerError, ValueError):
    """A physical or numerical parameter violates its admissible range."""


class NoZeroCrossingError(InvalidParameterError):
    """The friction sigmoid cannot be shifted to vanish at zero speed (n_f <= 1)."""


class DivergenceError(CrawlerError):
    """Time integration produced a non-finite state."""

    def __init__(self, time: float, message: str | None = None):
        self.time = time
        super().__init__(message or f"state became non-finite at t = {time:.6g}")


class ContractViolationError(CrawlerError):
    """An input violates a documented precondition (e.g. grid mismatch, z2(0) != 0)."""


class OutOfRegimeError(CrawlerError):
    """Speed-bias ratio outside (0, 1]; the crawling describing-function analysis does not apply."""


class FrictionDominatesError(CrawlerError):
    """Harmonic balance admits no positive strain amplitude: friction drowns the actuation."""


class NoPeriodicOrbitError(CrawlerError):
    """Newton shooting failed to close the cycle."""

    def __init__(self, residual: float, iterations: int, message: str | None = None):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            message
            or f"shooting did not converge in {iterations} iterations (last residual {residual:.3e})"
        )


class DegenerateCycleError(CrawlerError):
    """The shooting Jacobian is singular or non-finite; the cycle is not isolated."""


class ResonantAdjointError(CrawlerError):
    """(I - Phi) is singular: the periodic co-state is not unique."""


class StepSizeError(CrawlerError):
    """The ascent step decreased the cost; a smaller update stepsize is required."""


class UndefinedFrequencyError(CrawlerError):
    """Dominant-frequency analysis of a signal with no oscillating component."""


class OpcAbortError(CrawlerError):
    """A periodic solve failed inside the hill climb; carries the iteration context."""

    def __init__(self, iteration: int, message: str):
        self.iteration = iteration
        super().__init__(f"hill-climb iteration {iteration}: {message}")


class ConfigError(CrawlerError):
    """Configuration file problem; carries the offending line when known."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
            if line is not None:
                where += f"{line}:"
            where += " "
        super().__init__(where + message)
