"""Exception hierarchy shared by every layer of the package."""


class MoulinError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(MoulinError, ValueError):
    """Code parameters (n, k, d, s) or star configuration are inadmissible."""


class FieldTooSmallError(ParameterError):
    """The field has fewer elements than the construction needs."""


class NoSolutionError(MoulinError, ArithmeticError):
    """A linear system over GF(p) is inconsistent."""


class SignatureError(MoulinError, ValueError):
    """An operator was applied to a tensor living in an unsupported space."""


class ShapeError(MoulinError, ValueError):
    """Vector or factor counts do not match the target space."""


class RepairError(MoulinError):
    """Help messages are missing or inconsistent with each other."""


class DownloadError(MoulinError):
    """Shares are missing or do not describe a valid file."""
