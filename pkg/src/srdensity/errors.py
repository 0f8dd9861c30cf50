"""Exception types. Each carries the CLI exit code it maps to."""


class SRDError(Exception):
    exit_code = 1


class InvalidArgument(SRDError, ValueError):
    exit_code = 2


class OutOfDomain(SRDError, ValueError):
    exit_code = 3


class DataError(SRDError, ValueError):
    exit_code = 3


class DegenerateSupport(InvalidArgument):
    """Raised where a k = 1 partition has no free coordinates to work with."""


class NumericalInstability(SRDError, ArithmeticError):
    exit_code = 4
