"""Two-dimensional evolution algebras: classification, isomorphism, chains."""
from .algebra import BasisChange, StructMatrix, is_natural, rank, transform
from .classify import CanonicalClass, CanonicalRecord, canonical_matrix, classify
from .iso import IsoResult, iso

__all__ = [
    "BasisChange",
    "CanonicalClass",
    "CanonicalRecord",
    "IsoResult",
    "StructMatrix",
    "canonical_matrix",
    "classify",
    "is_natural",
    "iso",
    "rank",
    "transform",
]
