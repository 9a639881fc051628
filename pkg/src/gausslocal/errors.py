"""Exception types shared across the package."""


class GaussLocalError(Exception):
    """Base class for all library errors."""


class BallOutsideDomain(GaussLocalError):
    """A ball (or one of its dilations) does not fit in the truncated domain."""


class PointOutsideBall(GaussLocalError):
    """A point claimed to lie in a ball does not."""


class NonPositiveWeight(GaussLocalError):
    """Weight values must be strictly positive on every grid node."""


class NoEpsilonFound(GaussLocalError):
    """The dyadic epsilon scan was exhausted without meeting all conditions."""


class ExponentMismatch(GaussLocalError):
    """Exponent tuple violates the required Holder/scaling relation."""


class TestingConditionFailed(GaussLocalError):
    """A per-ball testing inequality exceeded its sampled bound."""


class ConfigError(GaussLocalError):
    """Invalid or malformed run configuration."""


class NumericalFailure(GaussLocalError):
    """NaN or overflow detected while assembling a report."""
