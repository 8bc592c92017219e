"""Exception hierarchy.

Numerical degeneracies are reported by raising, never by guessing a value.
"""


class MinkError(Exception):
    """Base class for all package errors."""


class InputError(MinkError, ValueError):
    """Malformed curve specification, report or argument."""


class LightlikeTangent(MinkError):
    pass


class VanishingCurvature(MinkError):
    pass


class SingularSystem(MinkError):
    pass


class ParallelNormals(MinkError):
    pass


class NotOnCircle(MinkError):
    pass


class Ambiguous(MinkError):
    """Contact order cannot be separated by the gap rule."""


class NoConvergence(MinkError):
    pass


class DegenerateJacobian(MinkError):
    pass


class NonGeneric(MinkError):
    pass


class LightconeCircle(MinkError):
    pass


class CriterionConflict(MinkError):
    pass


class IrregularCurve(MinkError):
    pass
