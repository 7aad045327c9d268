"""Exception hierarchy.

Every error raised on purpose by the library derives from TeichcoreError so
callers (and the command line front end) can map classes to exit codes.
"""


class TeichcoreError(Exception):
    exit_code = 4


class InputError(TeichcoreError, ValueError):
    exit_code = 3


class ParseError(InputError):
    exit_code = 2


class NonPermutation(InputError):
    pass


class Disconnected(InputError):
    pass


class ZeroVector(InputError):
    pass


class NonPrimitive(InputError):
    pass


class NonUnimodular(InputError):
    pass


class NotClosed(InputError):
    pass


class NotASubgroup(InputError):
    pass


class SameCusp(InputError):
    pass


class PointInsideHoroball(InputError):
    pass


class BasepointInHoroball(PointInsideHoroball):
    pass


class EmptyGrid(InputError):
    pass


class ElementaryGroup(InputError):
    pass


class NoParabolics(InputError):
    pass


class EmptyParabolics(NoParabolics):
    pass


class EmptyClassList(NoParabolics):
    pass


class CapExceeded(TeichcoreError):
    """A configurable enumeration cap was hit."""


class BoundTooLarge(CapExceeded):
    pass


class OrbitCapExceeded(CapExceeded):
    pass


class BallCapExceeded(CapExceeded):
    pass
