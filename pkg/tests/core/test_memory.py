# tests/core/test_memory.py
"""
Tests pour core.memory.
"""

import logging

import numpy as np
import pytest

from em_memory.core.exceptions import ConfigError, GridMismatchError, ResidualError
from em_memory.core.memory import (
    compute_kernel,
    displacement_map,
    mass_history,
    mass_loss_rate,
    mass_loss_rates,
    solve_memory,
    total_mass_change,
    vacuum_comparison,
)
from em_memory.core.models import PulseSpec
from em_memory.core.sphere import (
    ScalarCoeffs,
    ScalarField,
    divergence,
    gradient,
    make_grid,
    sht_analyze,
    sht_synthesize,
)
from em_memory.core.validation import random_scalar_coeffs, random_train_pair
from em_memory.core.waveform import (
    RetardedTimeGrid,
    TrainKind,
    WaveTrain,
    gen_af_pulse,
    gen_xi_pulse,
)


def _kernel(grid, modes):
    return sht_synthesize(ScalarCoeffs.from_modes(grid.l_max, modes), grid)


class TestSolveMemory:
    """Tests pour solve_memory."""

    def test_y20_kernel(self, grid8):
        """Test F = Y_20: Φ = -Y_20/6 et c^E_20 = √12/12."""
        result = solve_memory(_kernel(grid8, {(2, 0): 1.0}))
        assert sht_analyze(result.phi)[2, 0] == pytest.approx(-1.0 / 6.0, rel=1e-12)
        expected = np.sqrt(12.0) / 12.0
        assert result.delta_sigma_coeffs[2, 0, "E"] == pytest.approx(expected, rel=1e-12)
        assert np.all(result.delta_sigma_coeffs.magnetic == 0.0)
        assert result.f_bar == pytest.approx(0.0, abs=1e-14)

    def test_zero_kernel(self, grid4):
        """Test noyau nul: Σ⁺ - Σ⁻ nul, résidu nul."""
        result = solve_memory(ScalarField.zeros(grid4))
        assert result.delta_sigma.max_norm() == 0.0
        assert result.residual == 0.0
        assert result.energy_radiated == 0.0

    def test_constant_kernel(self, grid4):
        """Test noyau constant: pas de mémoire, F̄ = c et énergie F̄/2."""
        result = solve_memory(ScalarField(grid4, np.full(grid4.shape, 2.5)))
        assert result.delta_sigma.max_norm() < 1e-13
        assert result.f_bar == pytest.approx(2.5, rel=1e-12)
        assert result.energy_radiated == pytest.approx(1.25, rel=1e-12)

    def test_l1_content_dropped(self, grid4):
        """Test partie l = 1 rapportée dans dropped_l1 et absente de la reconstruction."""
        result = solve_memory(_kernel(grid4, {(0, 0): 1.0, (1, 0): 0.3, (1, 1): -0.2}))
        np.testing.assert_allclose(result.dropped_l1, (0.0, 0.3, -0.2), atol=1e-13)
        assert result.delta_sigma.max_norm() < 1e-13

    def test_divergence_equals_gradient(self, grid8, rng):
        """Test div̊(Σ⁺ - Σ⁻) = ∇̊Φ_{l>=2} sur 20 noyaux aléatoires."""
        for _ in range(20):
            kernel = sht_synthesize(random_scalar_coeffs(8, rng), grid8)
            result = solve_memory(kernel)
            phi_high = sht_synthesize(sht_analyze(result.phi).band(2), grid8)
            target = gradient(phi_high)
            assert result.residual < 1e-6
            assert (divergence(result.delta_sigma) - target).l2_norm() < 1e-6 * target.l2_norm()
            assert abs(result.phi.mean()) < 1e-12

    def test_residual_error(self, grid4):
        """Test dépassement de tolérance."""
        with pytest.raises(ResidualError) as exc_info:
            solve_memory(_kernel(grid4, {(2, 1): 1.0}), tolerance=0.0)
        assert exc_info.value.exit_code == 5

    def test_negative_kernel_warns(self, grid4, caplog):
        """Test avertissement pour un noyau négatif."""
        with caplog.at_level(logging.WARNING, logger="em_memory"):
            solve_memory(_kernel(grid4, {(0, 0): -1.0}))
        assert "negative" in caplog.text

    def test_rotation_equivariance(self, grid8, rng):
        """Test rotation en φ du noyau: Σ⁺ - Σ⁻ tourne de même."""
        kernel = sht_synthesize(random_scalar_coeffs(8, rng), grid8)
        base = solve_memory(kernel)
        rotated = solve_memory(kernel.rolled(3))
        diff = rotated.delta_sigma - base.delta_sigma.rolled(3)
        assert diff.max_norm() < 1e-9 * base.delta_sigma.max_norm()

    def test_summary_keys(self, grid4):
        """Test clés du résumé JSON."""
        summary = solve_memory(_kernel(grid4, {(0, 0): 1.0})).summary()
        assert set(summary) == {
            "F_bar",
            "energy_radiated",
            "energy_radiated_erg",
            "dropped_l1",
            "residual",
        }


class TestKernel:
    """Tests pour compute_kernel."""

    def test_vacuum_kernel(self, grid4, u_grid):
        """Test F = ∫|Ξ|² du = a²τ√π |base|² pour une gaussienne."""
        spec = PulseSpec(2.0, 0.0, 0.5, 2, 0)
        xi = gen_xi_pulse(spec, grid4, u_grid)
        kernel = compute_kernel(xi)
        basis_sq = xi.pointwise_norm_sq()[120] / 4.0
        np.testing.assert_allclose(kernel.values, 4.0 * 0.5 * np.sqrt(np.pi) * basis_sq, rtol=1e-10)
        assert np.all(kernel.values >= 0.0)

    def test_em_shift(self, grid4, rng):
        """Test le terme EM décale F de ½∫|A_F|² du exactement."""
        xi, af = random_train_pair(grid4, rng)
        shift = compute_kernel(xi, af).values - compute_kernel(xi).values
        em_only = compute_kernel(xi.scaled(0.0), af).values
        np.testing.assert_allclose(shift, em_only, rtol=1e-12, atol=1e-15)

    def test_kind_checked(self, grid4, rng):
        """Test types de trains vérifiés."""
        xi, af = random_train_pair(grid4, rng)
        with pytest.raises(ConfigError):
            compute_kernel(af)
        with pytest.raises(ConfigError):
            compute_kernel(xi, xi)

    def test_grid_mismatch(self, grid4, u_grid):
        """Test trains sur des grilles différentes."""
        xi = gen_xi_pulse(PulseSpec(1.0, 0.0, 0.5), grid4, u_grid)
        af = gen_af_pulse(PulseSpec(1.0, 0.0, 0.5, 1, 0), make_grid(6), u_grid)
        with pytest.raises(GridMismatchError):
            compute_kernel(xi, af)


class TestMassLoss:
    """Tests pour la perte de masse de Bondi."""

    def test_identity_with_kernel_mean(self, grid4, rng):
        """Test ∫∂M/∂u du = F̄/2 sur 20 paires aléatoires."""
        for _ in range(20):
            xi, af = random_train_pair(grid4, rng)
            expected = compute_kernel(xi, af).mean() / 2.0
            assert total_mass_change(xi, af) == pytest.approx(expected, rel=1e-8)

    def test_history_monotone(self, grid4, rng):
        """Test M(u) croissante (signe imprimé) partant de m_initial."""
        xi, af = random_train_pair(grid4, rng)
        history = mass_history(xi, af, m_initial=1.5)
        assert history.masses[0] == 1.5
        assert np.all(np.diff(history.masses) >= 0.0)
        assert history.total_change == pytest.approx(total_mass_change(xi, af), rel=1e-12)

    def test_single_sample_rate(self, grid4, rng):
        """Test taux d'un échantillon identique au taux vectorisé."""
        xi, af = random_train_pair(grid4, rng)
        rates = mass_loss_rates(xi, af)
        k = int(np.argmax(rates))
        assert mass_loss_rate(xi.sample(k), af.sample(k)) == pytest.approx(rates[k], rel=1e-12)

    def test_zero_train(self, grid4):
        """Test train nul: masse constante."""
        xi = WaveTrain.zeros(TrainKind.XI, grid4, RetardedTimeGrid(0.0, 0.1, 11))
        assert total_mass_change(xi) == 0.0


class TestDisplacementMap:
    """Tests pour displacement_map."""

    def test_scaling(self, grid4):
        """Test Δx = -(d0/r)(Σ⁺ - Σ⁻)."""
        result = solve_memory(_kernel(grid4, {(2, 0): 1.0}))
        shift = displacement_map(result.delta_sigma, 4.0e5, 1.23e26)
        expected = result.delta_sigma * (-4.0e5 / 1.23e26)
        np.testing.assert_allclose(shift.data, expected.data)

    @pytest.mark.parametrize("d0, r", [(0.0, 1.0), (1.0, -1.0)])
    def test_invalid(self, grid4, d0, r):
        """Test d0 ou r non positifs."""
        with pytest.raises(ConfigError):
            displacement_map(solve_memory(ScalarField.zeros(grid4)).delta_sigma, d0, r)

    def test_near_field_warning(self, grid4, caplog):
        """Test avertissement quand d0/r > 1e-3."""
        sigma = solve_memory(_kernel(grid4, {(2, 0): 1.0})).delta_sigma
        with caplog.at_level(logging.WARNING, logger="em_memory"):
            displacement_map(sigma, 1.0, 10.0)
        assert "d0/r" in caplog.text


class TestVacuumComparison:
    """Tests pour vacuum_comparison."""

    def test_shift_and_fraction(self, grid4, rng):
        """Test décalage du noyau et part électromagnétique."""
        xi, af = random_train_pair(grid4, rng)
        comparison = vacuum_comparison(xi, af)
        em_only = compute_kernel(xi.scaled(0.0), af)
        np.testing.assert_allclose(comparison.kernel_shift.values, em_only.values, atol=1e-14)
        assert comparison.em_fraction >= 0.0
        assert comparison.vacuum.f_bar <= comparison.with_em.f_bar
