"""Exception hierarchy.

Geometry failures derive from :class:`GeometryError` so the CLI can map them
to a single exit code.
"""


class GeometryError(ValueError):
    """A geometric precondition does not hold."""


class NullVector(GeometryError):
    pass


class NullInput(GeometryError):
    pass


class OppositeTimeOrientation(GeometryError):
    pass


class DegenerateSpan(GeometryError):
    pass


class NullTangent(GeometryError):
    pass


class CausalCharacterChange(GeometryError):
    pass


class DegenerateCurvature(GeometryError):
    pass


class NullPrincipalNormal(GeometryError):
    pass


class EpsilonChange(GeometryError):
    """The principal normal changes causal character along the curve."""


class DegenerateTangentPlane(GeometryError):
    pass


class MixedCharacter(GeometryError):
    pass


class StripInvariantViolation(GeometryError):
    pass


class ZeroLambda(GeometryError):
    pass


class SingularOffset(GeometryError):
    pass


class NullPartnerTangent(GeometryError):
    pass


class UnsupportedCombination(GeometryError):
    pass


class PreconditionNotMet(GeometryError):
    pass


class ExpressionError(ValueError):
    """Malformed expression string."""


class ConfigError(ValueError):
    """Malformed or inconsistent scene configuration."""
