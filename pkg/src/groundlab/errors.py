"""Exception types shared across the package."""


class GroundlabError(Exception):
    """Base class for all package errors."""


class DimensionTooLarge(GroundlabError):
    pass


class DimensionMismatch(GroundlabError):
    pass


class NotHermitian(GroundlabError):
    pass


class NotUnitary(GroundlabError):
    pass


class NotStochasticGenerator(GroundlabError):
    pass


class IndexOutOfRange(GroundlabError):
    pass


class InvalidSteps(GroundlabError):
    pass


class IncompleteTable(GroundlabError):
    pass


class UnsupportedNode(GroundlabError):
    pass


class DimacsError(GroundlabError):
    pass


class MalformedHeader(DimacsError):
    pass


class VariableOutOfRange(DimacsError):
    pass


class UnterminatedClause(DimacsError):
    pass


class EmptyInstance(DimacsError):
    pass


class InvalidClause(DimacsError):
    pass


class NonpositiveDelta(GroundlabError):
    pass


class KTooSmall(GroundlabError):
    pass


class TooLarge(GroundlabError):
    pass


class ZeroCoupling(GroundlabError):
    pass


class ZNearPole(GroundlabError):
    pass


class SingularProjection(GroundlabError):
    pass


class NoBracket(GroundlabError):
    pass


class NonDiagonalCost(GroundlabError):
    pass


class BadBipartition(GroundlabError):
    pass


class UnsupportedGate(GroundlabError):
    pass


class InvalidWeights(GroundlabError):
    pass


class DenseLimit(GroundlabError):
    pass


class CardinalityBlowup(GroundlabError):
    pass


class DisconnectedGraph(GroundlabError):
    pass


class ZeroDegreeNode(GroundlabError):
    pass


class NotLaplacian(GroundlabError):
    pass


class NotStochastic(GroundlabError):
    pass


class NotEigenvector(GroundlabError):
    pass


class AliasRisk(GroundlabError):
    pass


class TooManyVariables(GroundlabError):
    pass


class DegenerateGround(GroundlabError):
    pass


class EnergyAboveGap(GroundlabError):
    pass
