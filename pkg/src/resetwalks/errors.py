"""Exception types shared across the package."""


class ResetWalksError(Exception):
    """Base class for all resetwalks errors."""


class NonStochastic(ResetWalksError):
    """Step and reset probabilities do not sum to one."""


class DegenerateReset(ResetWalksError):
    """Reset probability is outside the open interval (0, 1)."""


class EmptySupport(ResetWalksError):
    """The step set is empty."""


class ResourceLimit(ResetWalksError):
    """A computation would exceed a configured size cap."""


class NormalizationFailed(ResetWalksError):
    """A step set cannot be brought to the normalized form (gcd 1, 0 excluded, max > 0)."""


class BranchPointProximity(ResetWalksError):
    """Kernel roots cluster too much to separate the divergent branches."""


class DegenerateRoots(ResetWalksError):
    """Two kernel roots coincide; the interpolation closed form divides by their gap."""


class KernelZero(ResetWalksError):
    """Evaluation point lies on the kernel variety 1 - z*P(u) = 0."""


class ClassificationFailed(ResetWalksError):
    """Computed denominator roots violate the expected localization pattern."""


class ResidualTooLarge(ResetWalksError):
    """A rationality certificate residual exceeded its tolerance."""
