"""Exception types raised by the library."""


class NfgError(Exception):
    """Base class for all library errors."""


class InvalidGraph(NfgError):
    """An operation required a valid graph but validation produced diagnostics."""

    def __init__(self, diagnostics):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = list(diagnostics)


class MissingAssignment(NfgError):
    """A configuration does not cover every edge of the graph."""


class EnumerationCapExceeded(NfgError):
    """The configuration space is larger than the configured enumeration cap."""


class HalfEdgePresent(NfgError):
    """Cover construction requires a graph without half edges."""


class MalformedPermutation(NfgError):
    """A cover assignment is missing an edge or is not a bijection."""


class WrongArity(NfgError, ValueError):
    """A factor does not have the arity required by the operation."""


class WrongCardinality(NfgError, ValueError):
    """An edge alphabet has the wrong size for the operation."""


class NotLogSupermodular(NfgError):
    """The operation is only defined for log-supermodular factors."""


class ClassViolation(NfgError):
    """Graph is outside the supported class (degrees 2/3 plus equality nodes)."""


class NotMergedCover(NfgError):
    """The construction map does not describe the given merged-cover graph."""


class NegativePartitionSum(NfgError):
    """A partition sum that must be non-negative came out negative."""


class SignedGraphUnsupported(NfgError):
    """Sum-product requires non-negative local functions."""


class NotConverged(NfgError):
    """Message passing did not reach the residual tolerance."""


class ZeroSupportBelief(NfgError):
    """A belief's support excludes every positive entry of its factor."""


class RejectionBudgetExhausted(NfgError):
    """Random tensor sampling failed to produce an admissible draw in time."""


class UnrealizableTopology(NfgError):
    """The requested generator topology cannot be built with the given counts."""
