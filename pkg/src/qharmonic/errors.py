"""Exception hierarchy shared by every module."""


class QHAError(Exception):
    """Base class for errors raised by qharmonic."""


class InvalidParameterError(QHAError, ValueError):
    pass


class GridMismatchError(QHAError, ValueError):
    """Two objects that must share a phase-space grid do not."""


class GridAlignmentError(QHAError, ValueError):
    """A snapped shift was requested at an off-grid position."""


class DomainError(QHAError, ValueError):
    """A region (possibly dilated by a margin) does not fit the grid window."""


class HypothesisViolation(QHAError):
    """The symplectic Fourier transform of a symbol leaks outside its region."""


class FileFormatError(QHAError):
    """A QHA binary file is malformed.

    Attributes
    ----------
    offset : int or None
        Byte offset at which the problem was detected.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset
