"""Exception hierarchy shared by all prefmine modules."""


class PrefmineError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(PrefmineError):
    """A text record (network file, trajectory file, CSV) is malformed."""


class ValidationError(PrefmineError):
    """Structurally parseable input violates a domain invariant."""


class DegenerateCostError(ValidationError):
    """A cost dimension is identically zero and cannot be normalized."""


class ZeroLengthError(ValidationError):
    """A zero-length road segment makes the speed-limit travel time degenerate."""


class EmptyGeometryError(ValidationError):
    """An edge has no geometry points to look up in the crowdedness grid."""


class DimensionMismatchError(ValidationError):
    """A vector's dimension does not match the network's cost dimension."""


class UnknownEdgeError(ValidationError):
    """A path or trajectory references an edge id not present in the network."""


class NoPathError(PrefmineError):
    """The target node is unreachable from the source."""


class NoBreakPointsError(PrefmineError):
    """Break-point metrics are undefined for a trajectory without break points."""


class UnsortedInputError(PrefmineError):
    """Per-vehicle trajectories must be sorted by start time before stitching."""


class UnsegmentableEdgeError(PrefmineError):
    """A single edge fails the segmentation criterion (no unit cost dimension)."""


class UnsegmentableError(PrefmineError):
    """No valid segmentation exists because some single edge fails the criterion."""


class TooLargeError(PrefmineError):
    """Input exceeds the size cap of an exhaustive (brute-force) routine."""


class NumericalFailure(PrefmineError):
    """The LP solver hit its pivot cap or an unbounded/ill-conditioned state."""


class OracleDivergence(PrefmineError):
    """The cutting-plane loop exceeded its round cap without converging."""
