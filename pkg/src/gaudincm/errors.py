"""Exception types shared across the package."""


class GaudinCMError(Exception):
    """Base class for all package errors."""


class ConstraintViolated(GaudinCMError):
    """Coupling constants break g1*(g1^2 - 2*g2^2 + sqrt(2)*g2*g4) = 0."""

    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"coupling constraint violated, residual {residual!r}")


class CoincidingCoordinates(GaudinCMError):
    """Two coordinates coincide (or are opposite where that is forbidden)."""


class ZeroCoordinate(GaudinCMError):
    """A coordinate sits at the reflection point q = 0."""


class PoleCollision(GaudinCMError):
    """An evaluation point hit a pole of the rational expressions."""


class SingularityApproached(GaudinCMError):
    """A trajectory came too close to a collision or reflection locus."""


class NoSolutionsFound(GaudinCMError):
    """Every Newton seed diverged or converged to an inadmissible point."""

    def __init__(self, attempts, diverged, message="no Bethe solutions found"):
        self.attempts = attempts
        self.diverged = diverged
        super().__init__(f"{message} (attempts={attempts}, diverged={diverged})")


class DegenerateCombination(GaudinCMError):
    """Random linear combinations kept producing unresolvable clusters."""
