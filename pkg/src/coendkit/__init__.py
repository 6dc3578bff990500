"""Exact coends, ends and Day convolution for finite Vect-enriched categories."""

from .linalg import FieldSpec, Mat, QQ
from .vcat import PairingIso, VCategory, delta_pairing, validate_category, validate_pairing
from .functors import Functor, hom_bifunctor, validate_functor
from .coend import coend, end, interchange, lemma_alpha
from .convolution import closure_witness, day_dual, day_hom, day_tensor, star_from_antipode

__all__ = [
    "FieldSpec", "Mat", "QQ", "PairingIso", "VCategory", "delta_pairing", "validate_category", "validate_pairing",
    "Functor", "hom_bifunctor", "validate_functor", "coend", "end", "interchange", "lemma_alpha",
    "closure_witness", "day_dual", "day_hom", "day_tensor", "star_from_antipode",
]
__version__ = "0.1.0"
