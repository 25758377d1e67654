"""Exception types shared across the toolkit.

Everything user-facing derives from SotError so the CLI and service can
map problems with the *input* to a clean diagnostic instead of a trace.
"""


class SotError(Exception):
    """Base class for all toolkit errors."""


class InputError(SotError):
    """Malformed instance data (bad JSON shape, negative weights, ...)."""


class ZeroTotalMass(SotError):
    """All weights of a measure tuple vanish; no average measure exists."""


class DivisionByZeroMass(SotError):
    """Derivative profile requested on an untrimmed support column."""


class DimensionMismatch(SotError):
    """The two measure tuples do not share the same number of components."""


class UnbalancedInput(SotError):
    """Operation requires componentwise equal total masses."""


class NonPositiveSigma(SotError):
    """Variance schedule contains a non-positive entry."""


class NotTwoWay(SotError):
    """Derivative laws differ; the two-way decomposition does not apply."""


class NotSubmodular(SotError):
    """Cost fails the submodularity inequality on the support grid."""


class MissingCoords(SotError):
    """Operation needs point coordinates that the support does not carry."""


class NotInjectiveProfile(SotError):
    """Two support points share a derivative profile where injectivity is required."""


class ReferenceNotEquivalent(SotError):
    """Reference measure is not equivalent to the average source measure."""


class TooLarge(SotError):
    """Instance exceeds the deliberate size limits of a brute-force oracle."""


class AmbiguousCluster(SotError):
    """Float-mode profile grouping found atoms within twice the tolerance of two clusters."""
