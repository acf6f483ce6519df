"""Exception hierarchy shared by all diams modules."""


class DiamsError(Exception):
    """Base class for all errors raised by this package."""


class IndexOutOfDomain(DiamsError, IndexError):
    """A vertex, edge or quad index falls outside the grid domain."""


class BoundaryVertex(DiamsError):
    """An operation that needs a full star was asked at a boundary vertex."""


class DegenerateOrientation(DiamsError):
    """A sign predicate evaluated to zero within tolerance, so the
    orientation-based test is meaningless."""


class DegenerateMetric(DiamsError):
    """A quadrangle metric value is too close to zero for sign tests."""


class DegenerateDirection(DiamsError):
    """A projected direction vanished where a nonzero one is required."""


class InadmissibleVertex(DiamsError):
    """A singular vertex violates the admissibility hypothesis."""


class NonGenericCell(DiamsError):
    """A marching-squares cell has a zero corner value."""


class NonGenericChain(DiamsError):
    """The tangency indicator vanishes identically along a singular chain."""


class OutOfRange(DiamsError):
    """A smooth-curve parameter lies outside the declared range."""


class ParameterOutOfRange(DiamsError):
    """A patch or tessellation parameter is outside its valid interval."""


class SharedEdgeMismatch(DiamsError):
    """Two patches do not actually share the claimed edge."""


class ParseError(DiamsError):
    """Input bytes are not a well-formed curve-pair file."""


class ValidationError(DiamsError):
    """Input is well-formed but violates a data invariant."""


class IoFailure(DiamsError):
    """A file could not be read or written."""
