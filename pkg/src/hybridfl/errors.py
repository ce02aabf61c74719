"""Exception hierarchy shared across the package.

Every failure mode raised by library code derives from HybridFLError so
callers (and the CLI exit-code mapping) can distinguish our errors from
genuine bugs.
"""


class HybridFLError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(HybridFLError):
    """Array dimensions inconsistent with the operation's contract."""


class NumericError(HybridFLError):
    """Non-finite values where finite ones are required."""


class ConfigError(HybridFLError):
    """Invalid configuration value or combination."""


class IntegrityError(HybridFLError):
    """Referential integrity violation (unresolvable account, bad join)."""


class SchemaError(HybridFLError):
    """CSV header does not match the documented schema."""


class ParseError(HybridFLError):
    """Malformed CSV row; message carries the line number."""


class StratificationError(HybridFLError):
    """A declared split received zero positives while positives exist."""


class DataError(HybridFLError):
    """Missing or inconsistent data at training time (e.g. absent labels)."""


class ProtocolError(HybridFLError):
    """Federation message violates the protocol state machine."""


class ProtocolTimeoutError(ProtocolError):
    """An expected message never arrived (dropped in transport)."""


class OwnershipError(ProtocolError):
    """A bank was asked about an account it does not own."""


class UndefinedMetricError(HybridFLError):
    """Metric undefined for the given inputs (e.g. AUPRC with no positives)."""


class UsageError(HybridFLError):
    """API misuse, e.g. evaluating a hybrid bundle without bank views."""
