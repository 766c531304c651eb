"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line driver:
2 for input/validation problems, 3 for numeric or degenerate data.
"""


class RadExplainError(Exception):
    exit_code = 2


class InputError(RadExplainError):
    """Malformed or inconsistent input."""


class NumericError(RadExplainError):
    """Data that is valid in form but degenerate for the requested computation."""

    exit_code = 3


class DimensionMismatch(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class LengthMismatch(InputError):
    pass


class SampleMismatch(InputError):
    pass


class MissingFeature(InputError):
    pass


class UnresolvableName(InputError):
    pass


class EmptyMask(NumericError):
    pass


class TooSmall(NumericError):
    pass


class TooFewSamples(NumericError):
    pass


class SingleClass(NumericError):
    pass


class ClassTooSmall(NumericError):
    pass


class AllColumnsRemoved(NumericError):
    pass
