"""Exception hierarchy shared by all latsieve modules."""


class LatsieveError(Exception):
    pass


class ClosureTooLarge(LatsieveError):
    """A group construction would exceed the configured order cap."""


class LatticeTooLarge(LatsieveError):
    """Subgroup enumeration exceeded the configured node cap."""


class NotAnAutomorphism(LatsieveError):
    pass


class NotAHomomorphism(LatsieveError):
    pass


class ForeignSubgroup(LatsieveError):
    """A subgroup was passed together with a group it does not belong to."""


class NotPrime(LatsieveError):
    pass


class UnknownPattern(LatsieveError):
    pass


class PatternTooLarge(LatsieveError):
    pass


class NotCoprime(LatsieveError):
    pass


class NotInvariant(LatsieveError):
    pass


class HypothesisUnmet(LatsieveError):
    """A CoprimeActionSystem does not satisfy the hypotheses needed for the FL4 model."""


class ParseError(LatsieveError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CacheCorrupt(LatsieveError):
    pass


class OracleDisagreement(LatsieveError):
    """Two independent deciders returned different answers for the same input."""
