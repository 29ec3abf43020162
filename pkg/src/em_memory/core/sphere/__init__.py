# em_memory/src/em_memory/core/sphere/__init__.py
"""
Géométrie de la sphère unité: grille, harmoniques, transformées et opérateurs.
"""

from .fields import (
    FIELD_TYPES,
    FieldKind,
    Parity,
    ScalarCoeffs,
    ScalarField,
    STFTensorField,
    TangentVectorField,
    TensorCoeffs,
    VectorCoeffs,
)
from .grid import SphereGrid, make_grid
from .operators import (
    divergence,
    gradient,
    laplacian,
    solve_poisson,
    solve_poisson_report,
    stf_hessian,
)
from .transforms import (
    sample_direction,
    sht_analyze,
    sht_evaluate,
    sht_synthesize,
    tensor_analyze,
    tensor_basis,
    tensor_evaluate,
    tensor_synthesize,
    vector_analyze,
    vector_basis,
    vector_evaluate,
    vector_synthesize,
)

__all__ = [
    "FIELD_TYPES",
    "FieldKind",
    "Parity",
    "ScalarCoeffs",
    "ScalarField",
    "STFTensorField",
    "SphereGrid",
    "TangentVectorField",
    "TensorCoeffs",
    "VectorCoeffs",
    "divergence",
    "gradient",
    "laplacian",
    "make_grid",
    "sample_direction",
    "sht_analyze",
    "sht_evaluate",
    "sht_synthesize",
    "solve_poisson",
    "solve_poisson_report",
    "stf_hessian",
    "tensor_analyze",
    "tensor_basis",
    "tensor_evaluate",
    "tensor_synthesize",
    "vector_analyze",
    "vector_basis",
    "vector_evaluate",
    "vector_synthesize",
]
