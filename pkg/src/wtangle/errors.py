"""Exception hierarchy.

Everything raised on bad input derives from :class:`ValidationError` so the
CLI can map it to a single exit code. Hypothesis failures of the separability
theorem (:class:`CoherencesNotZero`) are kept apart from plain validation.
"""


class WTangleError(Exception):
    """Base class for all package errors."""


class ValidationError(WTangleError, ValueError):
    """Input does not satisfy a documented precondition."""


class NonSquare(ValidationError):
    pass


class NotHermitian(ValidationError):
    def __init__(self, deviation: float, tol: float):
        self.deviation = deviation
        self.tol = tol
        super().__init__(f"matrix not Hermitian: max deviation {deviation:.3e} > tol {tol:.1e}")


class NotDensityLike(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class CapExceeded(ValidationError):
    def __init__(self, n: int, cap: int):
        self.n = n
        self.cap = cap
        super().__init__(f"{n} qubits exceeds the full-space cap of {cap}")


class InvalidQubitCount(ValidationError):
    pass


class WrongQubitCount(ValidationError):
    pass


class NormViolation(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class TraceViolation(ValidationError):
    pass


class NotPositive(ValidationError):
    def __init__(self, min_eigenvalue: float, tol: float):
        self.min_eigenvalue = min_eigenvalue
        self.tol = tol
        super().__init__(
            f"matrix not positive semidefinite: minimum eigenvalue {min_eigenvalue:.3e} < -{tol:.1e}"
        )


class NotPure(ValidationError):
    pass


class InvalidZ(ValidationError):
    pass


class EmptySequence(ValidationError):
    pass


class InvalidConfig(ValidationError):
    pass


class StrengthOutOfRange(ValidationError):
    pass


class SylvesterViolation(ValidationError):
    def __init__(self, index: int, population: float, coherence: float):
        self.index = index
        self.population = population
        self.coherence = coherence
        super().__init__(
            f"excitation {index}: population {population:.3e} is zero but vacuum coherence "
            f"|X| = {coherence:.3e} is not"
        )


class NegativeWeight(ValidationError):
    def __init__(self, weight: float):
        self.weight = weight
        super().__init__(f"vacuum weight p0 = {weight:.3e} is negative; input is not a density matrix")


class NumericalInstability(WTangleError, ArithmeticError):
    pass


class CoherencesNotZero(WTangleError):
    """The zero-coherence hypothesis fails; ``s``, ``r`` index the largest offender."""

    def __init__(self, s: int, r: int, magnitude: float, tol: float):
        self.s = s
        self.r = r
        self.magnitude = magnitude
        self.tol = tol
        super().__init__(
            f"excitation coherence B[{s},{r}] has magnitude {magnitude:.6g} > tol {tol:.1e}"
        )
