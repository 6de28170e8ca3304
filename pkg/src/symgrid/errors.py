"""Exception hierarchy shared across the engine."""


class SymgridError(Exception):
    """Base class for all engine errors."""


class GridValidationError(SymgridError):
    """A grid violates the palette, shape, or size invariants."""


class TaskFormatError(SymgridError):
    """A task document is malformed; the message names the offending path."""


class MarkdownError(SymgridError):
    """A markdown grid table is malformed; the message carries row/column."""


class PatternContractError(SymgridError):
    """A pattern was built or invoked with a bad kind/parameter combination."""


class PatternApplicationError(SymgridError):
    """A well-formed pattern cannot be applied to this particular grid."""


class BoundsError(PatternApplicationError):
    """Applying the pattern would exceed the 30x30 grid limit."""


class BackendError(SymgridError):
    """Remote proposer/sampler failure; the transport cause is chained."""


class ConfigError(SymgridError):
    """Configuration value out of range or unparseable."""
