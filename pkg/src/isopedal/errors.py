"""Exception types shared across the package.

Grid pipelines generally *mask* bad points instead of raising; these
exceptions are for the single-point / construction APIs where silently
continuing would hand the caller garbage.
"""


class IsopedalError(Exception):
    """Base class for all package errors."""


class ConfigError(IsopedalError):
    """Malformed or inconsistent configuration input."""


class DegenerateJet(IsopedalError):
    """Jet operation undefined: division by a jet with (near-)zero value,
    or square root of a jet whose value is not a positive real."""


class RankDeficient(IsopedalError):
    """Gram-Schmidt input vectors are linearly dependent at the point."""


class NotImmersion(IsopedalError):
    """The differential fails to have rank 2 at the point."""


class NotRegular(IsopedalError):
    """A higher normal space does not attain its expected dimension."""


class DegenerateEllipse(IsopedalError):
    """Curvature-ellipse data collapses (zero semi-diameters) at the point."""


class IsotropyViolation(IsopedalError):
    """Generated curve fails the exact isotropy identity beyond tolerance."""


class PedalDegenerate(IsopedalError):
    """Pedal decomposition breaks down (position vector tangent/normal
    degeneracy) at the point."""


class PoleProximity(IsopedalError):
    """Inversion evaluated too close to its pole."""
