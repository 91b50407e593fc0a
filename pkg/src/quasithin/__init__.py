"""Exact computation and certification of Terwilliger algebras of quasi-thin association schemes."""

from .linalg import AlgebraBasis, ExactMatrix, FieldSpec, VectorSpaceBasis, product_closure, rank, rref
from .scheme import (IntersectionTensor, Scheme, SchemeFormatError, classify, complex_product,
                     count_nonzero_intersections, intersection_tensor, load_scheme, parse_scheme,
                     serialize, two_element_pairs, validate)
from .algebra import (BlockCertificate, certify_radical_sandwich, is_two_sided_ideal, nilpotency_index,
                      radical_char0, structure_constants, verify_matrix_units)
from .terwilliger import (NotQuasiThinError, bad_pairs, build_context, canonical_basis, decompose,
                          equivalence_classes, generate_T, pair_sets, theorem_a_dimension,
                          triple_product, triply_regular_quasithin, vertex_invariance)

__version__ = "0.1.0"

__all__ = [
    "AlgebraBasis", "ExactMatrix", "FieldSpec", "VectorSpaceBasis", "product_closure", "rank", "rref",
    "IntersectionTensor", "Scheme", "SchemeFormatError", "classify", "complex_product",
    "count_nonzero_intersections", "intersection_tensor", "load_scheme", "parse_scheme", "serialize",
    "two_element_pairs", "validate",
    "BlockCertificate", "certify_radical_sandwich", "is_two_sided_ideal", "nilpotency_index",
    "radical_char0", "structure_constants", "verify_matrix_units",
    "NotQuasiThinError", "bad_pairs", "build_context", "canonical_basis", "decompose",
    "equivalence_classes", "generate_T", "pair_sets", "theorem_a_dimension", "triple_product",
    "triply_regular_quasithin", "vertex_invariance",
]
