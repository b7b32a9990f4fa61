"""Exception hierarchy shared by every extalg module."""


class ExtAlgError(Exception):
    """Base class for all errors raised by extalg."""


class SizeCapExceeded(ExtAlgError):
    pass


class InvalidComponent(ExtAlgError):
    pass


class NotSubring(ExtAlgError):
    pass


class MixedOwners(ExtAlgError):
    pass


class NotMaximal(ExtAlgError):
    pass


class NotPrime(ExtAlgError):
    pass


class NotInvertible(ExtAlgError):
    pass


class NotIntegral(ExtAlgError):
    pass


class InfiniteSupport(ExtAlgError):
    """An integral ideal with a zero slot lies in infinitely many maximal ideals."""


class FactorBoundExceeded(ExtAlgError):
    pass


class PartialAssignment(ExtAlgError):
    pass


class NotComaximal(ExtAlgError):
    pass


class NotInvertibleMember(ExtAlgError):
    pass


class NoRegularSubideal(ExtAlgError):
    pass


class NotAlmostPrufer(ExtAlgError):
    pass


class NotPruferRing(ExtAlgError):
    pass


class EmptyGamma(ExtAlgError):
    pass


class HypothesesFail(ExtAlgError):
    pass


class InvalidPoset(ExtAlgError):
    pass


class BoundTooSmall(ExtAlgError):
    pass


class ConfigInvalid(ExtAlgError):
    pass


class ParseError(ExtAlgError):
    """Malformed input file; the message names the offending field."""
