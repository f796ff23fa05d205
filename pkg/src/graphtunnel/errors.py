"""Exception hierarchy.

Two families: :class:`ValidationError` for inputs that violate a standing
assumption (the CLI maps these to exit code 2) and :class:`NumericalError`
for computations that cannot be completed reliably (exit code 3).
"""


class GraphTunnelError(Exception):
    """Base class for all library errors."""


class ValidationError(GraphTunnelError, ValueError):
    pass


class NumericalError(GraphTunnelError, ArithmeticError):
    pass


# graph construction / lookup
class DuplicateVertex(ValidationError):
    pass


class SelfLoop(ValidationError):
    pass


class UnknownEndpoint(ValidationError):
    pass


class DuplicateEdge(ValidationError):
    pass


class UnknownVertex(ValidationError):
    pass


# potentials and wells
class NegativePotential(ValidationError):
    pass


class AdjacentWells(ValidationError):
    def __init__(self, u, v):
        super().__init__(f"AdjacentWells: edge ({u}, {v}) joins two wells")
        self.edge = (u, v)


class NotAWell(ValidationError):
    pass


class NotSimplePotential(ValidationError):
    pass


class NotConstantDegree(ValidationError):
    pass


class InvalidLandscape(ValidationError):
    pass


class NotSymmetric(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class EmptyInterval(ValidationError):
    pass


# numerical failures
class NoConvergence(NumericalError):
    pass


class Singular(NumericalError):
    pass


class RankDeficientBasis(NumericalError):
    pass


class DegenerateGroundState(NumericalError):
    pass


class VanishingAtWell(NumericalError):
    pass


class PoleAtVertex(NumericalError):
    def __init__(self, vertex, value):
        super().__init__(f"PoleAtVertex: V({vertex}) - lambda = 0 (lambda={value!r})")
        self.vertex = vertex


class SeriesMayDiverge(NumericalError):
    def __init__(self, rho, hbar=None):
        where = "" if hbar is None else f" at hbar={hbar!r}"
        super().__init__(f"SeriesMayDiverge: rho={rho!r} >= 1{where}")
        self.rho = rho
        self.hbar = hbar


class PathLimitExceeded(NumericalError):
    pass


class NoSpectralGap(NumericalError):
    pass


class SigmaNotPD(NumericalError):
    pass


class GapCollision(NumericalError):
    pass
