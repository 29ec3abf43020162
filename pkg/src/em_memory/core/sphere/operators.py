# em_memory/src/em_memory/core/sphere/operators.py
"""
Opérateurs différentiels sur la sphère unité, calculés dans l'espace spectral.

    Δ̊ Y_lm        = -l(l+1) Y_lm
    ∇̊ Y_lm        = √(l(l+1)) Ê_lm         (Ê vectorielle unitaire)
    div̊ T̂^E_lm    = g_l Ê_lm, div̊ T̂^B_lm = g_l B̂_lm   (voir harmonics.divergence_factors)
"""

import logging

import numpy as np

from ...config import POISSON_RESIDUAL_TOL
from ..exceptions import ResidualError
from .fields import (
    ScalarCoeffs,
    ScalarField,
    STFTensorField,
    TangentVectorField,
    TensorCoeffs,
    VectorCoeffs,
)
from .harmonics import divergence_factors, tensor_norms
from .transforms import (
    sht_analyze,
    sht_synthesize,
    tensor_analyze,
    tensor_synthesize,
    vector_synthesize,
)

logger = logging.getLogger(__name__)


def _eigenvalues(l_max: int) -> np.ndarray:
    ell = np.arange(l_max + 1, dtype=np.float64)
    return (ell * (ell + 1.0))[:, None]


# ---------- Niveau coefficients ----------


def laplacian_coeffs(coeffs: ScalarCoeffs) -> ScalarCoeffs:
    return ScalarCoeffs(coeffs.l_max, -_eigenvalues(coeffs.l_max) * coeffs.values)


def gradient_coeffs(coeffs: ScalarCoeffs) -> VectorCoeffs:
    electric = np.sqrt(_eigenvalues(coeffs.l_max)) * coeffs.values
    return VectorCoeffs(coeffs.l_max, electric, np.zeros_like(electric))


def poisson_coeffs(rhs: ScalarCoeffs) -> ScalarCoeffs:
    """a_00 = 0, a_lm = -rhs_lm / (l(l+1)) pour l >= 1."""
    lam = _eigenvalues(rhs.l_max)
    values = np.zeros_like(rhs.values)
    values[1:] = -rhs.values[1:] / lam[1:]
    return ScalarCoeffs(rhs.l_max, values)


def divergence_coeffs(coeffs: TensorCoeffs) -> VectorCoeffs:
    g = divergence_factors(coeffs.l_max)[:, None]
    return VectorCoeffs(coeffs.l_max, g * coeffs.electric, g * coeffs.magnetic)


def hessian_coeffs(coeffs: ScalarCoeffs) -> TensorCoeffs:
    """Coefficients électriques de la partie sans trace de ∇∇f (l < 2 n'y contribue pas)."""
    norms = tensor_norms(coeffs.l_max)
    scale = np.zeros_like(norms)
    scale[2:] = 1.0 / norms[2:]
    electric = scale[:, None] * coeffs.values
    electric[:2] = 0.0
    return TensorCoeffs(coeffs.l_max, electric, np.zeros_like(electric))


# ---------- Niveau champs ----------


def laplacian(f: ScalarField) -> ScalarField:
    return sht_synthesize(laplacian_coeffs(sht_analyze(f)), f.grid)


def gradient(f: ScalarField) -> TangentVectorField:
    """Composantes (∂θ f, ∂φ f / sinθ) dans le repère orthonormé."""
    return vector_synthesize(gradient_coeffs(sht_analyze(f)), f.grid)


def stf_hessian(f: ScalarField) -> STFTensorField:
    """Partie symétrique sans trace de ∇̊∇̊f."""
    return tensor_synthesize(hessian_coeffs(sht_analyze(f)), f.grid)


def divergence(t: STFTensorField) -> TangentVectorField:
    """Divergence covariante div̊ T d'un tenseur STF de bande limite."""
    return vector_synthesize(divergence_coeffs(tensor_analyze(t)), t.grid)


def solve_poisson(rhs: ScalarField) -> ScalarField:
    """
    Résout Δ̊Φ = rhs - moyenne(rhs) avec Φ̄ = 0.

    La moyenne retirée est journalisée en DEBUG; utiliser solve_poisson_report
    pour la récupérer.
    """
    return solve_poisson_report(rhs)[0]


def solve_poisson_report(rhs: ScalarField, tolerance: float = POISSON_RESIDUAL_TOL):
    """
    Comme solve_poisson, retourne (Φ, moyenne retirée).

    Le résidu est mesuré contre la projection de bande limite de rhs - moyenne.

    Raises:
        ResidualError: si ‖Δ̊Φ - (rhs - moyenne)‖ / ‖rhs - moyenne‖ >= tolerance
    """
    coeffs = sht_analyze(rhs)
    removed_mean = coeffs.values[0, coeffs.l_max] / np.sqrt(4.0 * np.pi)
    logger.debug("Poisson solve removed mean %.6e from right-hand side", removed_mean)
    phi = sht_synthesize(poisson_coeffs(coeffs), rhs.grid)

    centered = coeffs.values.copy()
    centered[0] = 0.0
    target = sht_synthesize(ScalarCoeffs(coeffs.l_max, centered), rhs.grid)
    error = (laplacian(phi) - target).l2_norm()
    scale = target.l2_norm()
    residual = error / scale if scale > 0.0 else error
    logger.debug("Poisson residual %.3e", residual)
    if residual >= tolerance:
        raise ResidualError(
            f"Poisson residual {residual:.3e} exceeds {tolerance:.1e}",
            residual=residual,
            tolerance=tolerance,
        )
    return phi, float(removed_mean)

