"""String diagrams for basis structures with dualisers.

Build diagrams (:mod:`basisdiag.diagram`), check the structure laws
(:mod:`basisdiag.structures`), evaluate to tensors (:mod:`basisdiag.hilb`),
rewrite and prove equalities (:mod:`basisdiag.rules`) and verify the
teleportation and state-transfer protocols (:mod:`basisdiag.protocols`).
"""
from .errors import BasisDiagError

__version__ = "0.1.0"

__all__ = ["BasisDiagError", "__version__"]
