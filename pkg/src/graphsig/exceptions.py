"""Typed error hierarchy for the toolbox.

Every failure mode raised by this package derives from :class:`GraphSigError`,
so callers (including the command line front end) can catch one base class and
map it to a diagnostic message.  The subclasses are deliberately small; the
class name itself is the machine-readable error code.
"""


class GraphSigError(Exception):
    """Base class for all errors raised by graphsig."""


# ---------------------------------------------------------------------------
# Construction / ingestion
# ---------------------------------------------------------------------------

class NonSquareMatrix(GraphSigError):
    """Weight matrix is not square."""


class NegativeWeight(GraphSigError):
    """Weight matrix contains a negative entry."""


class NonFiniteValue(GraphSigError):
    """Input contains NaN or infinity."""


class EmptyGraph(GraphSigError):
    """Graph has no vertices."""


class SizeTooSmall(GraphSigError):
    """Requested vertex count is below the minimum for this family."""


class BadProbability(GraphSigError):
    """Probability parameter outside [0, 1]."""


class BlockSizeMismatch(GraphSigError):
    """Block sizes do not add up to the requested vertex count."""


class KTooLarge(GraphSigError):
    """Asked for more neighbours than there are other points."""


class DegenerateCloud(GraphSigError):
    """Point cloud has zero spread, so no kernel width can be inferred."""


class PatchLargerThanImage(GraphSigError):
    """Patch does not fit inside the image."""


class BadParameter(GraphSigError):
    """A numeric or mode parameter is out of its documented range."""


# ---------------------------------------------------------------------------
# Laplacians and spectral machinery
# ---------------------------------------------------------------------------

class KindMismatch(GraphSigError):
    """Laplacian kind is incompatible with the graph's directedness."""


class ZeroDegreeVertex(GraphSigError):
    """A vertex has zero (in- or out-) degree where a positive one is needed."""


class ZeroOutDegree(GraphSigError):
    """A vertex has no outgoing edges, so no random walk step exists."""


class NotStronglyConnected(GraphSigError):
    """Directed graph is not strongly connected."""


class NotConnected(GraphSigError):
    """Graph is not connected."""


class NotConverged(GraphSigError):
    """An iterative procedure hit its iteration cap before its tolerance."""


class GraphTooLargeForDense(GraphSigError):
    """Dense factorization refused: vertex count exceeds the dense cap."""


class NonSymmetricLaplacian(GraphSigError):
    """Symmetric eigendecomposition requested for an asymmetric operator."""


class MissingFourierBasis(GraphSigError):
    """Operation needs the eigendecomposition, which has not been computed."""


class MissingLmax(GraphSigError):
    """Operation needs a spectral-radius bound, which is not available."""


class MissingCoordinates(GraphSigError):
    """Graph has no vertex coordinates to draw."""


class ShapeMismatch(GraphSigError):
    """Array argument has the wrong shape for this graph or bank."""


class IndexOutOfRange(GraphSigError):
    """Vertex or level index outside the valid range."""


# ---------------------------------------------------------------------------
# Multiresolution
# ---------------------------------------------------------------------------

class EmptyKeptSet(GraphSigError):
    """Reduction would keep no vertices."""


class SingularInteriorBlock(GraphSigError):
    """Eliminated block is singular; reduction has no solution."""


class LevelMismatch(GraphSigError):
    """Pyramid coefficients do not match the multiresolution hierarchy."""


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------

class SolverFailure(GraphSigError):
    """Linear or proximal solver broke down."""


class NotTightFrame(GraphSigError):
    """Filter bank is not tight, but the algorithm requires a tight frame."""
