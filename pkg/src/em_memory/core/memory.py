# em_memory/src/em_memory/core/memory.py
"""
Effet mémoire: noyau F, équation de Poisson, reconstruction de Σ⁺ - Σ⁻ et
perte de masse de Bondi.

    F = ∫ (|Ξ|² + ½|A_F|²) du
    Δ̊Φ = F - F̄,   Φ̄ = 0
    div̊(Σ⁺ - Σ⁻) = ∇̊Φ
    ∂M/∂u = (1/8π) ∮ (|Ξ|² + ½|A_F|²) dμ      (signe tel qu'imprimé: M croît)

Unités géométriques (G = c = 1), longueurs en cm.
"""

import logging
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from ..config import D0_OVER_R_WARN, MEMORY_RESIDUAL_TOL, NEGATIVE_KERNEL_TOL
from .exceptions import ConfigError, GridMismatchError, ResidualError
from .models import MassHistory, MemoryResult, VacuumComparison
from .sphere import (
    ScalarCoeffs,
    ScalarField,
    STFTensorField,
    TangentVectorField,
    TensorCoeffs,
    divergence,
    gradient,
    sht_analyze,
    sht_synthesize,
    tensor_synthesize,
)
from .sphere.harmonics import tensor_norms
from .sphere.operators import poisson_coeffs
from .waveform import TrainKind, WaveTrain

logger = logging.getLogger(__name__)

_EM_WEIGHT = 0.5


def _check_pair(xi: WaveTrain, af: Optional[WaveTrain]) -> None:
    if xi.kind is not TrainKind.XI:
        raise ConfigError(f"Expected a XI train, got {xi.kind.name}")
    if af is None:
        return
    if af.kind is not TrainKind.AF:
        raise ConfigError(f"Expected an AF train, got {af.kind.name}")
    xi.check_compatible(af)


def compute_kernel(xi: WaveTrain, af: Optional[WaveTrain] = None) -> ScalarField:
    """
    Noyau mémoire F(ξ) = ∫ (|Ξ|² + ½|A_F|²) du par trapèzes.

    Sans A_F on retrouve exactement le noyau du vide ∫|Ξ|² du.
    """
    _check_pair(xi, af)
    kernel = trapezoid(xi.pointwise_norm_sq(), dx=xi.times.du, axis=0)
    if af is not None:
        kernel = kernel + _EM_WEIGHT * trapezoid(af.pointwise_norm_sq(), dx=af.times.du, axis=0)
    return ScalarField(xi.grid, kernel)


def _memory_coeffs(phi: ScalarCoeffs) -> TensorCoeffs:
    """c^E_lm = Φ_lm / (n_l (1 - l(l+1)/2)) en base normalisée, l >= 2; c^B = 0."""
    ell = np.arange(phi.l_max + 1, dtype=np.float64)
    denom = tensor_norms(phi.l_max) * (1.0 - 0.5 * ell * (ell + 1.0))
    scale = np.zeros_like(denom)
    scale[2:] = 1.0 / denom[2:]
    electric = scale[:, None] * phi.values
    return TensorCoeffs(phi.l_max, electric, np.zeros_like(electric))


def _relative_l2(diff: TangentVectorField, reference: TangentVectorField) -> float:
    ref = reference.l2_norm()
    err = diff.l2_norm()
    return err / ref if ref > 0.0 else err


def solve_memory(kernel: ScalarField, tolerance: float = MEMORY_RESIDUAL_TOL) -> MemoryResult:
    """
    Reconstruit Σ⁺ - Σ⁻ (parité électrique pure) à partir du noyau F.

    Les parties l = 0 et l = 1 de F ne peuvent pas engendrer de tenseur STF:
    l = 0 donne F̄, l = 1 est renvoyé dans dropped_l1.

    Raises:
        ResidualError: si ‖div̊(Σ⁺-Σ⁻) - ∇̊Φ_{l>=2}‖ / ‖∇̊Φ_{l>=2}‖ >= tolerance
    """
    grid = kernel.grid
    values = kernel.values
    peak = float(np.max(np.abs(values)))
    if peak > 0.0 and float(np.min(values)) < -NEGATIVE_KERNEL_TOL * peak:
        logger.warning("Memory kernel has negative samples (min %.3e)", float(np.min(values)))

    coeffs = sht_analyze(kernel)
    f_bar = coeffs[0, 0] / np.sqrt(4.0 * np.pi)
    dropped_l1 = (coeffs[1, -1], coeffs[1, 0], coeffs[1, 1])
    logger.debug("Dropped l=1 kernel content %s", dropped_l1)

    phi_coeffs = poisson_coeffs(coeffs)
    phi = sht_synthesize(phi_coeffs, grid)
    sigma_coeffs = _memory_coeffs(phi_coeffs)
    delta_sigma = tensor_synthesize(sigma_coeffs, grid)

    grad_phi = gradient(sht_synthesize(phi_coeffs.band(2), grid))
    residual = _relative_l2(divergence(delta_sigma) - grad_phi, grad_phi)
    logger.debug("Memory reconstruction residual %.3e", residual)
    if residual >= tolerance:
        raise ResidualError(
            f"Memory reconstruction residual {residual:.3e} exceeds {tolerance:.1e}",
            residual=residual,
            tolerance=tolerance,
        )

    result = MemoryResult(
        kernel=kernel,
        f_bar=float(f_bar),
        phi=phi,
        delta_sigma=delta_sigma,
        delta_sigma_coeffs=sigma_coeffs,
        dropped_l1=dropped_l1,
        energy_radiated=0.5 * float(f_bar),
        residual=residual,
    )
    logger.info(
        "Memory solved: F_bar=%.6e, |delta_sigma|=%.6e, residual=%.2e",
        result.f_bar,
        delta_sigma.l2_norm(),
        residual,
    )
    return result


# ======================================================================
# --- Perte de masse de Bondi ---
# ======================================================================


def mass_loss_rate(
    xi_sample: STFTensorField, af_sample: Optional[TangentVectorField] = None
) -> float:
    """∂M/∂u = (1/8π) ∮ (|Ξ|² + ½|A_F|²) dμ, positif (signe imprimé)."""
    density = xi_sample.pointwise_norm_sq()
    if af_sample is not None:
        if af_sample.grid != xi_sample.grid:
            raise GridMismatchError(f"Grid mismatch: {xi_sample.grid} vs {af_sample.grid}")
        density = density + _EM_WEIGHT * af_sample.pointwise_norm_sq()
    return float(xi_sample.grid.integrate(density)) / (8.0 * np.pi)


def mass_loss_rates(xi: WaveTrain, af: Optional[WaveTrain] = None) -> np.ndarray:
    """mass_loss_rate à chaque pas du train."""
    _check_pair(xi, af)
    density = xi.pointwise_norm_sq()
    if af is not None:
        density = density + _EM_WEIGHT * af.pointwise_norm_sq()
    return xi.grid.integrate(density) / (8.0 * np.pi)


def total_mass_change(xi: WaveTrain, af: Optional[WaveTrain] = None) -> float:
    """∫ ∂M/∂u du; égal à F̄/2 (quadrature en ordre inverse)."""
    return float(trapezoid(mass_loss_rates(xi, af), dx=xi.times.du))


def mass_history(
    xi: WaveTrain, af: Optional[WaveTrain] = None, m_initial: float = 0.0
) -> MassHistory:
    """Masse de Bondi cumulée M(u) = M(u0) + ∫_{u0}^u ∂M/∂u du'."""
    rates = mass_loss_rates(xi, af)
    masses = m_initial + cumulative_trapezoid(rates, dx=xi.times.du, initial=0.0)
    return MassHistory(times=xi.times.times, rates=rates, masses=masses)


# ======================================================================
# --- Déplacements et comparaison au vide ---
# ======================================================================


def displacement_map(delta_sigma: STFTensorField, d0: float, r: float) -> STFTensorField:
    """
    Δx^A_(B) = -(d0/r)(Σ⁺ - Σ⁻)_AB en chaque direction.

    Raises:
        ConfigError: si d0 <= 0 ou r <= 0
    """
    if not d0 > 0.0 or not r > 0.0:
        raise ConfigError(f"d0 and r must be positive, got d0={d0!r}, r={r!r}")
    ratio = d0 / r
    if ratio > D0_OVER_R_WARN:
        logger.warning(
            "d0/r = %.3e exceeds %.0e: far-field expansion is doubtful", ratio, D0_OVER_R_WARN
        )
    return delta_sigma * (-ratio)


def vacuum_comparison(xi: WaveTrain, af: WaveTrain) -> VacuumComparison:
    """Mémoire avec et sans le terme électromagnétique."""
    with_em = solve_memory(compute_kernel(xi, af))
    vacuum = solve_memory(compute_kernel(xi))
    total = with_em.delta_sigma.l2_norm()
    em_part = (with_em.delta_sigma - vacuum.delta_sigma).l2_norm()
    fraction = em_part / total if total > 0.0 else 0.0
    logger.info("Electromagnetic share of memory: %.4f", fraction)
    return VacuumComparison(
        with_em=with_em,
        vacuum=vacuum,
        kernel_shift=with_em.kernel - vacuum.kernel,
        em_fraction=fraction,
    )
