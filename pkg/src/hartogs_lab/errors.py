"""Exception types raised across the package."""


class HartogsLabError(Exception):
    pass


class DomainError(HartogsLabError, ValueError):
    """Invalid region, profile, or domain construction."""


class ProfileCrossingError(DomainError):
    pass


class PreconditionError(HartogsLabError, ValueError):
    """An operation was called outside its stated preconditions."""


class IllConditionedGramError(HartogsLabError):
    pass


class ConvergenceError(HartogsLabError):
    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history or [])
