# tests/core/test_sphere_operators.py
"""
Tests pour core.sphere.operators.
"""

import numpy as np
import pytest

from em_memory.core.exceptions import ResidualError
from em_memory.core.sphere import operators
from em_memory.core.sphere import (
    ScalarCoeffs,
    ScalarField,
    TensorCoeffs,
    divergence,
    gradient,
    laplacian,
    make_grid,
    sht_analyze,
    sht_evaluate,
    sht_synthesize,
    solve_poisson,
    solve_poisson_report,
    stf_hessian,
    tensor_evaluate,
    tensor_synthesize,
    vector_analyze,
    vector_evaluate,
)
from em_memory.core.validation import random_scalar_coeffs, random_tensor_coeffs


class TestLaplacian:
    """Tests pour laplacian."""

    @pytest.mark.parametrize("l_max", [4, 8, 16])
    def test_eigenvalues(self, l_max, rng):
        """Test Δ̊Y_lm = -l(l+1)Y_lm pour tout l <= l_max."""
        grid = make_grid(l_max)
        coeffs = random_scalar_coeffs(l_max, rng)
        measured = sht_analyze(laplacian(sht_synthesize(coeffs, grid))).values
        ell = np.arange(l_max + 1)[:, None]
        expected = -ell * (ell + 1) * coeffs.values
        assert np.max(np.abs(measured - expected)) < 1e-10 * np.max(np.abs(expected))

    def test_matches_finite_differences(self, grid8, rng):
        """Test contre (1/s)∂θ(s∂θf) + (1/s²)∂φ²f en des points intérieurs."""
        coeffs = random_scalar_coeffs(8, rng)
        lap = sht_analyze(laplacian(sht_synthesize(coeffs, grid8)))
        theta = rng.uniform(0.3, 2.8, size=5)
        phi = rng.uniform(0.0, 2.0 * np.pi, size=5)
        h = 1e-4

        def f(t, p):
            return sht_evaluate(coeffs, t, p)

        s = np.sin(theta)
        d_theta = (
            np.sin(theta + h / 2) * (f(theta + h, phi) - f(theta, phi))
            - np.sin(theta - h / 2) * (f(theta, phi) - f(theta - h, phi))
        ) / (h * h * s)
        d_phi = (f(theta, phi + h) - 2 * f(theta, phi) + f(theta, phi - h)) / (h * h * s * s)
        np.testing.assert_allclose(sht_evaluate(lap, theta, phi), d_theta + d_phi, atol=1e-3)

    def test_linearity(self, grid8, rng):
        """Test linéarité."""
        f = sht_synthesize(random_scalar_coeffs(8, rng), grid8)
        g = sht_synthesize(random_scalar_coeffs(8, rng), grid8)
        lhs = laplacian(2.0 * f - 0.5 * g)
        rhs = 2.0 * laplacian(f) - 0.5 * laplacian(g)
        assert (lhs - rhs).l2_norm() < 1e-10 * rhs.l2_norm()


class TestGradientAndHessian:
    """Tests pour gradient et stf_hessian."""

    def test_gradient_of_y10(self, grid4):
        """Test ∇Y_10 = (-√(3/4π) sinθ, 0)."""
        y10 = sht_synthesize(ScalarCoeffs.from_modes(4, {(1, 0): 1.0}), grid4)
        grad = gradient(y10).components
        amplitude = -np.sqrt(3.0 / (4.0 * np.pi))
        expected = amplitude * np.sin(grid4.theta)[:, None] * np.ones(grid4.shape)
        np.testing.assert_allclose(grad[0], expected, atol=1e-13)
        np.testing.assert_allclose(grad[1], 0.0, atol=1e-13)

    def test_gradient_of_azimuthal_mode(self, grid8):
        """Test composante φ de ∇Y_11 = -√(3/4π) sinφ."""
        y11 = sht_synthesize(ScalarCoeffs.from_modes(8, {(1, 1): 1.0}), grid8)
        grad = gradient(y11).components
        amplitude = -np.sqrt(3.0 / (4.0 * np.pi))
        expected = amplitude * np.sin(grid8.phi)[None, :] * np.ones(grid8.shape)
        np.testing.assert_allclose(grad[1], expected, atol=1e-13)

    def test_hessian_of_y20(self, grid8):
        """Test STF(∇∇Y_20) = ((3/2)√(5/4π) sin²θ, 0)."""
        y20 = sht_synthesize(ScalarCoeffs.from_modes(8, {(2, 0): 1.0}), grid8)
        hess = stf_hessian(y20).components
        expected = 1.5 * np.sqrt(5.0 / (4.0 * np.pi)) * np.sin(grid8.theta)[:, None] ** 2
        np.testing.assert_allclose(hess[0], expected * np.ones(grid8.shape), atol=1e-13)
        np.testing.assert_allclose(hess[1], 0.0, atol=1e-13)

    def test_hessian_drops_low_degrees(self, grid4):
        """Test aucune partie STF pour l < 2."""
        f = sht_synthesize(ScalarCoeffs.from_modes(4, {(0, 0): 2.0, (1, -1): 1.0}), grid4)
        assert stf_hessian(f).max_norm() < 1e-13

    def test_energy_identity(self, grid8, rng):
        """Test ‖∇f‖² = Σ l(l+1) a_lm²."""
        coeffs = random_scalar_coeffs(8, rng)
        grad = gradient(sht_synthesize(coeffs, grid8))
        ell = np.arange(9)[:, None]
        expected = float(np.sum(ell * (ell + 1) * coeffs.values**2))
        assert grad.inner(grad) == pytest.approx(expected, rel=1e-8)


class TestDivergence:
    """Tests pour divergence."""

    def test_divergence_of_hessian(self, grid8, rng):
        """Test div̊ STF(∇∇f) = ∇(½Δ̊f + f) pour f de bande limite l >= 2."""
        f = sht_synthesize(random_scalar_coeffs(8, rng, l_min=2), grid8)
        lhs = divergence(stf_hessian(f))
        rhs = gradient(0.5 * laplacian(f) + f)
        assert (lhs - rhs).l2_norm() < 1e-10 * rhs.l2_norm()

    def test_y20_factor(self, grid8):
        """Test div̊ STF(∇∇Y_20) = -2∇Y_20."""
        y20 = sht_synthesize(ScalarCoeffs.from_modes(8, {(2, 0): 1.0}), grid8)
        diff = divergence(stf_hessian(y20)) + 2.0 * gradient(y20)
        assert diff.max_norm() < 1e-12

    @pytest.mark.parametrize("keep", ["electric", "magnetic"])
    def test_preserves_parity(self, grid8, rng, keep):
        """Test un tenseur E (resp. B) a une divergence purement E (resp. B)."""
        full = random_tensor_coeffs(8, rng)
        zero = np.zeros_like(full.electric)
        if keep == "electric":
            coeffs = TensorCoeffs(8, full.electric, zero)
        else:
            coeffs = TensorCoeffs(8, zero, full.magnetic)
        div = vector_analyze(divergence(tensor_synthesize(coeffs, grid8)))
        other = div.magnetic if keep == "electric" else div.electric
        same = div.electric if keep == "electric" else div.magnetic
        assert np.max(np.abs(other)) < 1e-8 * np.max(np.abs(same))

    def test_matches_finite_differences(self, grid8, rng):
        """Test contre ∂θT + (1/s)∂φ(εT) + 2cotθ·T en des points intérieurs."""
        coeffs = random_tensor_coeffs(8, rng)
        div = vector_analyze(divergence(tensor_synthesize(coeffs, grid8)))
        theta = rng.uniform(0.3, 2.8, size=6)
        phi = rng.uniform(0.0, 2.0 * np.pi, size=6)
        h = 1e-4

        def t(th, ph):
            return tensor_evaluate(coeffs, th, ph)

        d_theta = (t(theta + h, phi) - t(theta - h, phi)) / (2 * h)
        d_phi = (t(theta, phi + h) - t(theta, phi - h)) / (2 * h)
        at = t(theta, phi)
        s = np.sin(theta)
        cot = np.cos(theta) / s
        expected = np.stack(
            [
                d_theta[0] + d_phi[1] / s + 2.0 * cot * at[0],
                d_theta[1] - d_phi[0] / s + 2.0 * cot * at[1],
            ]
        )
        measured = vector_evaluate(div, theta, phi)
        np.testing.assert_allclose(measured, expected, atol=1e-6 * np.max(np.abs(expected)))


class TestPoisson:
    """Tests pour solve_poisson."""

    @pytest.mark.parametrize("l_max", [4, 8, 16])
    def test_residual(self, l_max, rng):
        """Test ‖Δ̊Φ - (rhs - moyenne)‖ < 1e-8 ‖rhs - moyenne‖ et Φ̄ = 0."""
        grid = make_grid(l_max)
        rhs = sht_synthesize(random_scalar_coeffs(l_max, rng), grid)
        phi = solve_poisson(rhs)
        centered = rhs - ScalarField(grid, np.full(grid.shape, rhs.mean()))
        assert (laplacian(phi) - centered).l2_norm() < 1e-8 * centered.l2_norm()
        assert abs(phi.mean()) < 1e-12

    def test_constant_rhs(self, grid4):
        """Test second membre constant: Φ = 0 et moyenne retirée rapportée."""
        phi, removed = solve_poisson_report(ScalarField(grid4, np.full(grid4.shape, 3.0)))
        assert phi.max_norm() < 1e-12
        assert removed == pytest.approx(3.0, rel=1e-12)

    def test_y20_solution(self, grid4):
        """Test Δ̊Φ = Y_20 donne Φ = -Y_20/6."""
        y20 = sht_synthesize(ScalarCoeffs.from_modes(4, {(2, 0): 1.0}), grid4)
        phi = sht_analyze(solve_poisson(y20))
        assert phi[2, 0] == pytest.approx(-1.0 / 6.0, rel=1e-12)

    def test_residual_breach_raises(self, grid8, rng, monkeypatch):
        """Test ResidualError si les coefficients de Φ sont faux."""
        original = operators.poisson_coeffs

        def halved(coeffs):
            good = original(coeffs)
            return ScalarCoeffs(good.l_max, 0.5 * good.values)

        monkeypatch.setattr(operators, "poisson_coeffs", halved)
        rhs = sht_synthesize(random_scalar_coeffs(8, rng), grid8)
        with pytest.raises(ResidualError, match="Poisson residual") as excinfo:
            solve_poisson(rhs)
        assert excinfo.value.exit_code == 5
        assert excinfo.value.residual == pytest.approx(0.5, rel=1e-6)

    def test_residual_ignores_aliased_content(self, grid4):
        """Test un second membre hors bande (l = 6 sur l_max = 4) reste accepté."""
        theta = grid4.theta[:, None] * np.ones(grid4.shape)
        rhs = ScalarField(grid4, np.cos(theta) ** 6)
        phi, removed = solve_poisson_report(rhs)
        assert np.isfinite(removed)
        assert phi.max_norm() > 0.0
