"""Diagnostic exceptions raised by the library.

Every error that reflects a mathematical inconsistency (rather than bad
user input) carries enough context in its message to locate the stage
that produced it.
"""


class StrongWeilError(Exception):
    """Base class for all library diagnostics."""


class SingularCurve(StrongWeilError):
    """Discriminant zero: not an elliptic curve."""


class PrecisionTooLow(StrongWeilError):
    """A numeric routine failed to stabilise within its iteration budget."""


class NoConvergent(StrongWeilError):
    """No continued-fraction convergent matched within the tolerance.

    Signals insufficient working precision; callers retry higher.
    """


class NotAKernel(StrongWeilError):
    """A candidate kernel polynomial failed the isogeny verification."""


class NoUniqueSource(StrongWeilError):
    """The oriented isogeny graph has no unique source vertex."""


class DimensionNotTwo(StrongWeilError):
    """Hecke eigenvalue cutting did not stabilise at a 2-dimensional space."""


class ZeroEigenEvaluation(StrongWeilError):
    """The eigen-symbol vanished on the twisted chain; pick another character."""


class SearchExhausted(StrongWeilError):
    """The character search hit its conductor bound without success."""


class Undetermined(StrongWeilError):
    """Both functional-equation signs fit within tolerance."""


class NoStrongCurve(StrongWeilError):
    """No curve in the class has its lattice homothetic to the eigenform lattice."""


class MultipleStrongCurves(StrongWeilError):
    """More than one curve passed the homothety criterion."""


class ManinConstantNotOne(StrongWeilError):
    """Homothety holds but exact lattice equality fails for the strong curve."""


class PathInconsistency(StrongWeilError):
    """Two shortest paths in the isogeny graph disagree on (degree, constant)."""


class NonIntegerDegree(StrongWeilError):
    """Intersection pairing produced an inconsistent modular degree."""


class RankDeficient(StrongWeilError):
    """A lattice argument did not have the expected rank."""


class UnknownFormat(StrongWeilError):
    """Unsupported report output format."""
