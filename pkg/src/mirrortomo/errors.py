"""Exception hierarchy.

Every error raised by the library derives from :class:`GeometryError`, which
is itself a ``ValueError`` so callers that only care about bad input can
catch the builtin.
"""


class GeometryError(ValueError):
    pass


class DegenerateSpan(GeometryError):
    """A point lies on the line it was supposed to span a plane with."""


class LineNotOnPlane(GeometryError):
    pass


class DegenerateInput(GeometryError):
    """Point set is affinely dependent, collinear, or otherwise too thin."""


class UnboundedProjection(GeometryError):
    pass


class EmptyOperand(GeometryError):
    pass


class PointOutsideBody(GeometryError):
    pass


class DegenerateChord(GeometryError):
    pass


class ConstructionBreakdown(GeometryError):
    pass


class PointOutsideCircle(GeometryError):
    pass


class BadParameters(GeometryError):
    pass


class BadConfiguration(GeometryError):
    pass


class NotOrthogonal(GeometryError):
    pass


class ScenarioError(GeometryError):
    """Malformed scenario or polygon file; message names the offending field."""
