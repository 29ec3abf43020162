# em_memory/src/em_memory/core/validation.py
"""
Suite d'invariants exécutée par la sous-commande `validate`.

Chaque vérification produit un CheckResult (valeur mesurée, limite, statut).
Les générateurs aléatoires prennent un numpy.random.Generator explicite pour
que deux exécutions au même seed donnent les mêmes résultats.
"""

import logging
from dataclasses import asdict, dataclass
from typing import List, Tuple

import numpy as np
from scipy.integrate import trapezoid

from ..config import (
    MEMORY_RESIDUAL_TOL,
    NEGATIVE_KERNEL_TOL,
    PUBLISHED_KAPPA,
    POISSON_RESIDUAL_TOL,
    RETURN_TO_REST_TOL,
    ROUND_TRIP_TOL,
)
from . import bns, detector, memory, waveform
from .models import BnsScenario, DetectorConfig, NullFieldAmplitudes, PulseSpec
from .sphere import (
    Parity,
    ScalarCoeffs,
    ScalarField,
    SphereGrid,
    TensorCoeffs,
    divergence,
    gradient,
    laplacian,
    make_grid,
    sht_analyze,
    sht_synthesize,
    solve_poisson,
    stf_hessian,
    tensor_analyze,
    tensor_evaluate,
    tensor_synthesize,
    vector_analyze,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    limit: float
    passed: bool
    at_least: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _check(name: str, value: float, limit: float, at_least: bool = False) -> CheckResult:
    value = float(value)
    passed = value >= limit if at_least else value < limit
    log = logger.debug if passed else logger.warning
    log("Check %s: %.3e (%s %.1e) %s", name, value, ">=" if at_least else "<", limit,
        "ok" if passed else "FAILED")
    return CheckResult(name=name, value=value, limit=limit, passed=bool(passed), at_least=at_least)


def _relative(err: float, ref: float) -> float:
    return err / ref if ref > 0.0 else err


# ======================================================================
# --- Générateurs aléatoires ---
# ======================================================================


def _triangle_mask(l_max: int, l_min: int) -> np.ndarray:
    ell = np.arange(l_max + 1)[:, None]
    m = np.arange(-l_max, l_max + 1)[None, :]
    return (np.abs(m) <= ell) & (ell >= l_min)


def random_scalar_coeffs(l_max: int, rng: np.random.Generator, l_min: int = 0) -> ScalarCoeffs:
    values = rng.standard_normal((l_max + 1, 2 * l_max + 1)) * _triangle_mask(l_max, l_min)
    return ScalarCoeffs(l_max, values)


def random_tensor_coeffs(l_max: int, rng: np.random.Generator) -> TensorCoeffs:
    mask = _triangle_mask(l_max, 2)
    shape = (l_max + 1, 2 * l_max + 1)
    return TensorCoeffs(
        l_max, rng.standard_normal(shape) * mask, rng.standard_normal(shape) * mask
    )


def random_pulses(
    rng: np.random.Generator, l_max: int, count: int, l_min: int
) -> List[PulseSpec]:
    """Impulsions de centre dans [-1, 1] et largeur dans [0.4, 0.8] (support dans [-6, 6])."""
    specs = []
    for _ in range(count):
        l = int(rng.integers(l_min, min(l_max, 4) + 1))
        specs.append(
            PulseSpec(
                amplitude=float(rng.uniform(-1.0, 1.0)),
                center=float(rng.uniform(-1.0, 1.0)),
                width=float(rng.uniform(0.4, 0.8)),
                l=l,
                m=int(rng.integers(-l, l + 1)),
                parity=Parity.ELECTRIC if rng.integers(2) == 0 else Parity.MAGNETIC,
            )
        )
    return specs


def random_train_pair(
    grid: SphereGrid, rng: np.random.Generator, n_pulses: int = 2
) -> Tuple[waveform.WaveTrain, waveform.WaveTrain]:
    """Paire (Ξ, A_F) de superpositions aléatoires sur u ∈ [-6, 6]."""
    times = waveform.RetardedTimeGrid(-6.0, 0.05, 241)
    xi = waveform.gen_xi_train(random_pulses(rng, grid.l_max, n_pulses, 2), grid, times)
    af = waveform.gen_af_train(random_pulses(rng, grid.l_max, n_pulses, 1), grid, times)
    return xi, af


# ======================================================================
# --- Vérifications par module ---
# ======================================================================


def sphere_checks(grid: SphereGrid, rng: np.random.Generator) -> List[CheckResult]:
    results = [
        _check("grid_weight_sum", abs(np.sum(grid.weights) - 2.0), 1e-12),
        _check("grid_area", abs(grid.integrate(np.ones(grid.shape)) - 4.0 * np.pi), 1e-10),
    ]

    coeffs = random_scalar_coeffs(grid.l_max, rng)
    f = sht_synthesize(coeffs, grid)
    back = sht_synthesize(sht_analyze(f), grid)
    results.append(_check("scalar_round_trip", (back - f).max_norm(), ROUND_TRIP_TOL))
    parseval = _relative(abs(f.l2_norm() ** 2 - coeffs.norm_sq()), coeffs.norm_sq())
    results.append(_check("scalar_parseval", parseval, ROUND_TRIP_TOL))

    tcoeffs = random_tensor_coeffs(grid.l_max, rng)
    t = tensor_synthesize(tcoeffs, grid)
    t_back = tensor_synthesize(tensor_analyze(t), grid)
    results.append(_check("tensor_round_trip", (t_back - t).max_norm(), ROUND_TRIP_TOL))
    t_parseval = _relative(abs(t.l2_norm() ** 2 - tcoeffs.norm_sq()), tcoeffs.norm_sq())
    results.append(_check("tensor_parseval", t_parseval, ROUND_TRIP_TOL))

    phi = solve_poisson(f)
    rhs = f - ScalarField(grid, np.full(grid.shape, f.mean()))
    poisson = _relative((laplacian(phi) - rhs).l2_norm(), rhs.l2_norm())
    results.append(_check("poisson_residual", poisson, POISSON_RESIDUAL_TOL))

    ell = np.arange(grid.l_max + 1, dtype=np.float64)[:, None]
    expected = -ell * (ell + 1.0) * coeffs.values
    measured = sht_analyze(laplacian(f)).values
    eig = _relative(np.max(np.abs(measured - expected)), np.max(np.abs(expected)))
    results.append(_check("laplacian_eigenvalues", eig, 1e-10))

    g = sht_synthesize(random_scalar_coeffs(grid.l_max, rng), grid)
    lhs = laplacian(2.5 * f - 1.5 * g)
    rhs_lin = 2.5 * laplacian(f) - 1.5 * laplacian(g)
    results.append(
        _check("operator_linearity", _relative((lhs - rhs_lin).l2_norm(), rhs_lin.l2_norm()), 1e-10)
    )

    electric_only = TensorCoeffs(grid.l_max, tcoeffs.electric, np.zeros_like(tcoeffs.electric))
    div_coeffs = vector_analyze(divergence(tensor_synthesize(electric_only, grid)))
    leak = _relative(
        np.max(np.abs(div_coeffs.magnetic)), np.max(np.abs(div_coeffs.electric))
    )
    results.append(_check("divergence_parity", leak, 1e-8))

    # div̊ STF(∇̊∇̊h) = ∇̊(½Δ̊h + h) pour h sans l < 2
    h = sht_synthesize(random_scalar_coeffs(grid.l_max, rng, l_min=2), grid)
    grad = gradient(0.5 * laplacian(h) + h)
    hess = _relative((divergence(stf_hessian(h)) - grad).l2_norm(), grad.l2_norm())
    results.append(_check("divergence_of_hessian", hess, 1e-10))
    return results


def memory_checks(
    grid: SphereGrid, rng: np.random.Generator, n_kernels: int = 20, n_pairs: int = 20
) -> List[CheckResult]:
    residuals, phi_means = [], []
    for _ in range(n_kernels):
        kernel = sht_synthesize(random_scalar_coeffs(grid.l_max, rng), grid)
        result = memory.solve_memory(kernel, tolerance=np.inf)
        residuals.append(result.residual)
        phi_means.append(abs(result.phi.mean()))
    results = [
        _check("memory_residual", max(residuals), MEMORY_RESIDUAL_TOL),
        _check("phi_mean", max(phi_means), 1e-12),
    ]

    shifts, identities, negatives = [], [], []
    for _ in range(n_pairs):
        xi, af = random_train_pair(grid, rng)
        full = memory.compute_kernel(xi, af)
        vacuum = memory.compute_kernel(xi)
        em_only = 0.5 * trapezoid(af.pointwise_norm_sq(), dx=af.times.du, axis=0)
        shifts.append(
            _relative(np.max(np.abs(full.values - vacuum.values - em_only)), np.max(em_only))
        )
        change = memory.total_mass_change(xi, af)
        identities.append(_relative(abs(change - full.mean() / 2.0), abs(full.mean() / 2.0)))
        negatives.append(max(0.0, -float(np.min(full.values))))
    results.append(_check("em_kernel_shift", max(shifts), 1e-12))
    results.append(_check("mass_identity", max(identities), 1e-8))
    results.append(_check("kernel_nonnegative", max(negatives), NEGATIVE_KERNEL_TOL))

    kernel = sht_synthesize(random_scalar_coeffs(grid.l_max, rng), grid)
    base = memory.solve_memory(kernel, tolerance=np.inf)
    shifted = memory.solve_memory(kernel.rolled(1), tolerance=np.inf)
    rotation = _relative(
        (shifted.delta_sigma - base.delta_sigma.rolled(1)).max_norm(),
        base.delta_sigma.max_norm(),
    )
    results.append(_check("rotation_equivariance", rotation, 1e-9))
    return results


def waveform_checks(grid: SphereGrid, rng: np.random.Generator) -> List[CheckResult]:
    xi, _ = random_train_pair(grid, rng)
    other, _ = random_train_pair(grid, rng)
    sigma_minus = tensor_synthesize(random_tensor_coeffs(grid.l_max, rng), grid)

    _, plus_zero = waveform.integrate_sigma(xi)
    _, plus_offset = waveform.integrate_sigma(xi, sigma_minus)
    jump_zero = plus_zero
    jump_offset = plus_offset - sigma_minus
    independence = _relative((jump_offset - jump_zero).max_norm(), jump_zero.max_norm())

    combo = xi.scaled(2.0) + other.scaled(-3.0)
    _, plus_combo = waveform.integrate_sigma(combo)
    _, plus_other = waveform.integrate_sigma(other)
    expected = 2.0 * plus_zero - 3.0 * plus_other
    linearity = _relative((plus_combo - expected).max_norm(), expected.max_norm())
    return [
        _check("sigma_jump_independent_of_sigma_minus", independence, 1e-10),
        _check("integration_linearity", linearity, 1e-10),
    ]


def detector_chain_errors(
    amplitude: float = 1.0, du: float = 0.002, d0: float = 1.0, r: float = 1.0e4
) -> dict:
    """
    Compare la chaîne Jacobi aux intégrales analytiques pour une impulsion gaussienne
    (τ = 1, mode (2, 1, E)) sur une petite grille.
    """
    grid = make_grid(2)
    spec = PulseSpec(amplitude=amplitude, center=0.0, width=1.0, l=2, m=1)
    times = waveform.RetardedTimeGrid.spanning(-6.0, 6.0, du)
    cfg = DetectorConfig(d0=d0, r=r, theta=1.1, phi=0.7)

    xi = waveform.gen_xi_pulse(spec, grid, times)
    aw = waveform.gen_aw_pulse(spec, grid, times)
    trajectory = detector.integrate_train(aw, cfg)

    xi_oracle = waveform.integrate_xi(aw).at_direction(*cfg.direction)
    velocity_oracle = cfg.ratio * detector.stf_matrix(xi_oracle)
    velocity_error = _relative(
        np.max(np.abs(trajectory.velocities - velocity_oracle)), np.max(np.abs(velocity_oracle))
    )

    history, sigma_plus = waveform.integrate_sigma(xi)
    shift_oracle = -cfg.ratio * detector.stf_matrix(history.at_direction(*cfg.direction))
    position_error = _relative(
        np.max(np.abs(trajectory.displacements - shift_oracle)), np.max(np.abs(shift_oracle))
    )

    displacement = detector.permanent_displacement(trajectory)
    mapped = memory.displacement_map(sigma_plus, d0, r)
    at_direction = detector.stf_matrix(tensor_evaluate(tensor_analyze(mapped), *cfg.direction))
    cross_error = _relative(
        np.max(np.abs(displacement - at_direction)), np.max(np.abs(at_direction))
    )

    sample_time = spec.center - spec.width
    coarse = waveform.RetardedTimeGrid.spanning(-6.0, 6.0, 0.1)
    runs = [
        detector.integrate_train(waveform.gen_aw_pulse(spec, grid, coarse.refined(f)), cfg)
        for f in (1, 2, 4)
    ]
    return {
        "velocity_error": velocity_error,
        "position_error": position_error,
        "cross_module_error": cross_error,
        "return_to_rest": detector.return_to_rest_residual(trajectory),
        "order": detector.convergence_order(runs, sample_time),
    }


def detector_checks() -> List[CheckResult]:
    errors = detector_chain_errors()
    amplitudes = NullFieldAmplitudes(
        aw=(1.0, 0.5), af=(0.8, -0.3), rho=1e-3, sigma=1e-3, alpha=1e-3
    )
    report = detector.em_subleading_report(amplitudes, [1.0e20, 1.0e21, 1.0e22])
    return [
        _check("detector_velocity", errors["velocity_error"], 1e-6),
        _check("detector_position", errors["position_error"], 1e-6),
        _check("detector_cross_module", errors["cross_module_error"], 1e-6),
        _check("detector_return_to_rest", errors["return_to_rest"], RETURN_TO_REST_TOL),
        _check("detector_order", errors["order"], 3.5, at_least=True),
        _check("em_subleading_slope", abs(report.slope + 1.0), 0.05),
    ]


def bns_checks() -> List[CheckResult]:
    base = BnsScenario(total_mass=2.0, radiated_fraction=0.01)
    low = BnsScenario(b0=1e13, dbdt=1e13, merge_time_ms=1000.0, kappa="published")
    high = BnsScenario(b0=1e15, dbdt=1e15, merge_time_ms=1000.0, kappa="published")
    quarter = BnsScenario(b0=1e13, dbdt=1e13, merge_time_ms=1000.0, kappa="quarter")

    radius_cm = quarter.ns_radius_km * 1.0e5
    b_final = bns.final_surface_field(quarter)
    quadrature = bns.exterior_energy_quadrature(b_final, radius_cm, 2.5)
    closed_forms = [
        abs(
            bns.exterior_energy_quadrature(b_final, radius_cm, p)
            - bns.analytic_kappa(p) * b_final**2 * radius_cm**3
        )
        / (bns.analytic_kappa(p) * b_final**2 * radius_cm**3)
        for p in (2.0, 2.5, 3.0)
    ]
    return [
        _check("bns_grav_energy", abs(bns.grav_energy(base) / 3.56e52 - 1.0), 5e-3),
        _check("bns_low_field", abs(bns.mag_energy(low) / 4.78e49 - 1.0), 5e-3),
        _check("bns_high_field", abs(bns.mag_energy(high) / 4.78e53 - 1.0), 5e-3),
        _check(
            "bns_field_ratio",
            abs(bns.mag_energy(high) / bns.mag_energy(low) / 1e4 - 1.0),
            1e-9,
        ),
        _check("bns_quarter_vs_quadrature", abs(bns.mag_energy(quarter) / quadrature - 1.0), 1e-3),
        _check("bns_closed_form", max(closed_forms), 1e-8),
        _check("bns_published_kappa", abs(PUBLISHED_KAPPA - 0.478) / 0.478, 5e-3),
    ]


def run_invariant_suite(l_max: int, seed: int = 0) -> List[CheckResult]:
    """Exécute toutes les vérifications pour une grille l_max et un seed."""
    grid = make_grid(l_max)
    rng = np.random.default_rng(seed)
    logger.info("Running invariant suite l_max=%d seed=%d", l_max, seed)
    results = []
    results += sphere_checks(grid, rng)
    results += waveform_checks(grid, rng)
    results += memory_checks(grid, rng)
    results += detector_checks()
    results += bns_checks()
    failed = [r.name for r in results if not r.passed]
    logger.info("Invariant suite: %d checks, %d failed %s", len(results), len(failed), failed)
    return results
