"""Exception hierarchy.

InputError covers everything caused by caller-supplied data (bad files, bad
arguments, infeasible requests); the command-line front end maps it to exit
code 2. InternalError marks broken invariants inside the library itself and
maps to exit code 3.
"""


class BoxmonError(Exception):
    pass


class InputError(BoxmonError):
    pass


class InternalError(BoxmonError):
    pass


class EmptyPointSet(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NotASubBox(InputError):
    pass


class InvalidPartition(InputError):
    pass


class TooManyCells(InputError):
    pass


class KTooLarge(InputError):
    pass


class UnknownClass(InputError):
    pass


class MalformedMonitorFile(InputError):
    pass


class FeatureFileError(InputError):
    pass
