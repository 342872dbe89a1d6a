"""Exception hierarchy.

``InputError`` subclasses signal bad arguments (the CLI maps them to exit
code 2); ``NumericalError`` subclasses signal a computation that could not
be completed (exit code 1).
"""


class AnyonsimError(Exception):
    pass


class InputError(AnyonsimError, ValueError):
    pass


class NumericalError(AnyonsimError, ArithmeticError):
    pass


class MalformedToken(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NotUnitary(InputError):
    pass


class OddCount(InputError):
    pass


class TooLarge(InputError):
    pass


class WrongSize(InputError):
    pass


class NotNormalized(InputError):
    pass


class NotAMatching(InputError):
    pass


class InvalidWeave(InputError):
    pass


class NotNormalizable(InputError):
    pass


class GapClosed(NumericalError):
    pass


class DegenerateFit(NumericalError):
    pass
