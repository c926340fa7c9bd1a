"""Exception hierarchy.  The CLI maps these to exit codes."""


class RwsumError(Exception):
    """Base class."""


class InvalidParameter(RwsumError, ValueError):
    pass


class DomainError(InvalidParameter):
    pass


class UnsupportedModel(RwsumError):
    pass


class UnsupportedStructure(RwsumError):
    pass


class NumericError(RwsumError, ArithmeticError):
    def __init__(self, msg, achieved=None):
        super().__init__(msg)
        self.achieved = achieved


class ResolutionError(NumericError):
    pass


class TruncationError(NumericError):
    pass


class InconsistentCase(RwsumError, ValueError):
    pass


class PreconditionError(RwsumError, ValueError):
    pass


class UndefinedEstimate(RwsumError):
    def __init__(self, msg, count=0):
        super().__init__(msg)
        self.count = count


class MembershipError(RwsumError):
    def __init__(self, msg, x=None):
        super().__init__(msg)
        self.x = x


class ConfigError(RwsumError, ValueError):
    def __init__(self, msg, position=None):
        if position is not None:
            msg = f"{msg} (at {position})"
        super().__init__(msg)
        self.position = position
