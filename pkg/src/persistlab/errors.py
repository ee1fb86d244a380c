"""Exception hierarchy shared by all persistlab modules."""


class PersistLabError(Exception):
    """Base class for all persistlab errors."""


class NonFiniteState(PersistLabError):
    """A state update produced NaN or infinity."""


class NegativeState(PersistLabError):
    """A discrete update left the nonnegative orthant beyond round-off."""


class StepRejected(PersistLabError):
    """An integrator step undershot the orthant beyond the relative tolerance."""


class InconsistentDecomposition(PersistLabError):
    """A focal decomposition does not reproduce the model's own map."""


class NonFiniteMatrix(PersistLabError):
    """A cocycle matrix evaluation produced NaN or infinity."""


class DegenerateProduct(PersistLabError):
    """A fundamental-solution product underflowed to the exact zero matrix."""


class NoConvergence(PersistLabError):
    """An iterative solver hit its iteration cap before reaching tolerance."""


class NotPeriodic(PersistLabError):
    """Points handed in as a periodic orbit fail the cycle residual test."""


class UnboundedBoundaryDynamics(PersistLabError):
    """A boundary trajectory left the configured bounding box."""


class ParamOutOfRange(PersistLabError):
    """A model parameter violates its documented range."""


class NoInteriorPreyEquilibrium(PersistLabError):
    """The prey-only dynamics admit no positive equilibrium."""


class NoBoundaryEquilibrium(PersistLabError):
    """A requested planar boundary equilibrium does not exist."""


class UnknownModel(PersistLabError):
    """A model name is not present in the registry."""


class ConfigError(PersistLabError):
    """A run configuration is missing fields or fails validation."""
