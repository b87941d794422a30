"""Generalized minors of Jordan pairs and the singular value bound they satisfy."""

from .pairs import (
    EndoOp,
    Kind,
    PairDescriptor,
    PairElement,
    Side,
    bergman,
    d_operator,
    element,
    involution,
    pair_determinant,
    quadratic_map,
    quasi_inverse,
    structure_constant,
    trace_form,
    triple_product,
)

__version__ = "0.1.0"
