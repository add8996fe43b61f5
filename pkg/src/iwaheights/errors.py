"""Exception types shared across the package."""


class IwaheightsError(Exception):
    """Base class for all package errors."""


class PrecisionError(IwaheightsError):
    """An operation needs more T-adic precision than the operand carries."""


class IndeterminateError(PrecisionError):
    """A predicate cannot be decided at the available precision."""


class NotDistinguishedError(IwaheightsError):
    """Division was attempted by an element with no unit coefficient."""


class NotDivisibleError(IwaheightsError):
    """Exact division was requested but the remainder is nonzero."""


class EnumerationCapError(IwaheightsError):
    """A brute-force operation would exceed the configured element cap."""


class InstanceInvalidError(IwaheightsError):
    """An L-function instance failed mechanical validation."""


class SchemaError(IwaheightsError):
    """An instance file violates the strict JSON schema."""
