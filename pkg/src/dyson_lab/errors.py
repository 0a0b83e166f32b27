"""Exception hierarchy shared by every module."""


class DysonLabError(Exception):
    """Base class for all library errors."""


class NonFiniteInput(DysonLabError, ValueError):
    pass


class InvalidInterval(DysonLabError, ValueError):
    pass


class OutOfWindow(DysonLabError, ValueError):
    pass


class TooLarge(DysonLabError, ValueError):
    pass


class InfiniteDistance(DysonLabError, ValueError):
    pass


class DegenerateInterval(DysonLabError, ValueError):
    pass


class Collision(DysonLabError, ValueError):
    """Two particles share a position, so the log interaction is singular."""


class SubstepExhausted(DysonLabError, RuntimeError):
    """Step halving reached its depth limit without restoring the particle order."""


class NoConvergence(DysonLabError, RuntimeError):
    pass


class NonMonotone(DysonLabError, ValueError):
    pass


class SizeMismatch(DysonLabError, ValueError):
    pass


class EmptySet(DysonLabError, ValueError):
    pass


class DegenerateDiagonal(DysonLabError, ValueError):
    pass


class ConfigError(DysonLabError):
    exit_code = 2


class CheckFailure(DysonLabError):
    exit_code = 1
