"""Exception hierarchy shared across the package."""


class CurveCountError(Exception):
    """Base class for all curvecount errors."""


class ConfigError(CurveCountError):
    """Invalid user input: malformed words, bad ranks, inconsistent configs."""


class RankMismatchError(ConfigError):
    """Operands live in free groups of different ranks."""


class LetterRangeError(ConfigError):
    """A letter index is outside 1..rank."""


class IdentityClassError(ConfigError):
    """The identity element does not define a conjugacy class of a curve."""


class EmptySetError(ConfigError):
    """A generating set needs at least one nontrivial element."""


class NotGeneratingError(ConfigError):
    """The given elements do not generate the free group within the search budget."""


class BudgetExceededError(CurveCountError):
    """A search exceeded its configured radius/node budget."""


class MemoryBudgetExceededError(BudgetExceededError):
    """A ball enumeration would exceed the configured memory cap."""


class HypothesisViolatedError(ConfigError):
    """Surface signature outside the supported range (needs 3g + r > 3)."""


class ClosedSurfaceUnsupportedError(ConfigError):
    """Closed surfaces (r = 0) have non-free fundamental group; unsupported."""


class UnsupportedSignatureError(ConfigError):
    """No built-in mapping-class generators for this signature."""


class InvalidAutomorphismError(ConfigError):
    """Candidate automorphism is not invertible or does not respect the boundary."""


class InsufficientDataError(CurveCountError):
    """Not enough series rows to fit."""


class ConfigMismatchError(ConfigError):
    """Two series were produced under incompatible configurations."""
