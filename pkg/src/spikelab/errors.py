"""Exception types raised across spikelab."""


class SpikeLabError(Exception):
    """Base class for all spikelab errors."""


class NoBracket(SpikeLabError):
    pass


class Supercritical(SpikeLabError):
    pass


class OutsideDomain(SpikeLabError):
    pass


class NonpositiveCoefficient(SpikeLabError):
    pass


class UnsupportedShape(SpikeLabError):
    pass


class DegenerateBasis(SpikeLabError):
    pass


class NoConvergence(SpikeLabError):
    """Iterative solve failed; ``history`` holds the residual norms seen."""

    def __init__(self, message, history=None, iterate=None):
        super().__init__(message)
        self.history = list(history or [])
        self.iterate = iterate


class BoundaryEscape(SpikeLabError):
    pass


class CollapseToZero(SpikeLabError):
    """Newton landed on the trivial branch. The converged result is attached."""

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class FlatField(SpikeLabError):
    pass


class IterationStall(SpikeLabError):
    pass


class ConfigError(SpikeLabError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


class ResolutionWarning(UserWarning):
    """Spike width is below three grid spacings."""
