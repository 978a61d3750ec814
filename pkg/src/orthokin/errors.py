"""Exception types shared across the package."""


class OrthokinError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(OrthokinError, ValueError):
    """A design parameter violates its positivity/normalization bounds."""


class DegenerateQuarticError(OrthokinError):
    """All quartic coefficients vanished: target sits on an infinite-solution point."""


class SurfaceDomainError(OrthokinError):
    """The quaternary-surface radicand went negative beyond tolerance."""


class AspectInstabilityError(OrthokinError):
    """Aspect count changed between the base grid and the doubled grid."""


class CuspVerificationError(OrthokinError):
    """A vanishing-speed point failed the triple-root certificate by a wide margin."""


class TangentialContactError(OrthokinError):
    """A boundary intersection is tangential (non-transversal): nongeneric design."""
