"""Contract errors shared across the package."""


class GmcatError(Exception):
    pass


class DomainError(GmcatError):
    """Element fails the domain membership test of a map."""


class RuleError(GmcatError):
    """A structural rule does not apply to the given element."""


class CodomainMismatch(GmcatError):
    """Pullback of maps with different codomains."""


class InfeasibleEnumeration(GmcatError):
    """An exact enumeration was requested where none exists."""


class ChainMismatch(GmcatError):
    """Adjacent spans or matrices in a composite do not share a boundary."""


class PartitionMismatch(GmcatError):
    """Partition does not sum to the chain length."""


class SideMismatch(GmcatError):
    """Scalar action applied on a side it does not type-check against."""


class BoundaryMismatch(GmcatError):
    """Cell legs fail to commute, or pasted cells fail to meet."""


class UnboundedComposite(GmcatError):
    """Matrix composite over a middle set with no usable bound."""


class NotInvertibleNuM(GmcatError):
    """Operation requires an invertible multiplication comparison."""


class NoStarStructure(GmcatError):
    """Operation requires scalar opactions the instance lacks."""


class BoundTooLargeToEnumerate(GmcatError):
    """Candidate enumeration would exceed the stated cap."""


class ParseError(GmcatError):
    """Source file rejected, with line/column context."""

    def __init__(self, msg, line=None, col=None):
        self.line = line
        self.col = col
        where = f" (line {line}" + (f", col {col})" if col is not None else ")") if line else ""
        super().__init__(msg + where)
