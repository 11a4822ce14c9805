"""Strong Weil curves, Manin constants and modular degrees over Q.

Exact-arithmetic toolkit: isogeny classes of elliptic curves, oriented
graphs of admissible prime-degree isogenies, modular symbol spaces with
their integral structure, and the lattice comparisons that identify the
strong Weil curve and compute each curve's Manin constant and modular
degree.
"""

__version__ = "0.1.0"

__all__ = ["Curve", "classify_curve", "emit"]


def __getattr__(name):
    if name == "Curve":
        from .curves import Curve

        return Curve
    if name in ("classify_curve", "emit"):
        from . import pipeline

        return getattr(pipeline, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
