"""Exception hierarchy.

Every error raised for bad user input derives from :class:`DesignLDPError`;
the CLI maps these to exit code 2.
"""


class DesignLDPError(ValueError):
    """Base class for all input/precondition failures in this package."""


# set systems
class EmptyBlock(DesignLDPError):
    pass


class FullBlock(DesignLDPError):
    pass


class IndexOutOfRange(DesignLDPError):
    pass


class DuplicateIndexInBlock(DesignLDPError):
    pass


class UncoveredPoint(DesignLDPError):
    pass


class InvalidK(DesignLDPError):
    pass


class WouldCreateEmptyBlock(DesignLDPError):
    pass


class UnknownName(DesignLDPError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


# protocol
class NotPureDesign(DesignLDPError):
    pass


class NotBIBD(DesignLDPError):
    pass


class DegenerateDesign(DesignLDPError):
    pass


class NonPositivePrivacyGap(DesignLDPError):
    pass


class GammaNotGreaterThanOne(DesignLDPError):
    pass


class ThetaOutOfRange(DesignLDPError):
    pass


class ParamMismatch(DesignLDPError):
    pass


class NotColumnStochastic(DesignLDPError):
    pass


class InfiniteRatio(DesignLDPError):
    """A zero entry makes the privacy ratio unbounded."""


class SamePoint(DesignLDPError):
    pass


# estimators / linear algebra
class DegenerateGap(DesignLDPError):
    pass


class SingularC(DesignLDPError):
    pass


class SingularSum(DesignLDPError):
    pass


class RankDeficient(DesignLDPError):
    pass


class DimensionMismatch(DesignLDPError):
    pass


class ZeroInducedProbability(DesignLDPError):
    pass


class InvalidDistribution(DesignLDPError):
    pass


class InvalidCounts(DesignLDPError):
    pass
