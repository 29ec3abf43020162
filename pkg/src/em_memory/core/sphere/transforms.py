# em_memory/src/em_memory/core/sphere/transforms.py
"""
Transformées harmoniques scalaires, vectorielles et tensorielles (STF).

Analyse par quadrature directe: projection de Fourier en φ puis somme de
Gauss-Legendre en θ contre les tables de harmonics.py. Les coefficients sont
stockés [l, m + l_max]; m >= 0 désigne la partie cos(mφ), m < 0 la partie
sin(|m|φ).

Les fonctions *_array travaillent sur des tableaux bruts avec des axes de lot en
tête (un train entier en un seul appel).
"""

import logging

import numpy as np

from ..exceptions import GridMismatchError
from .fields import (
    FieldKind,
    Parity,
    ScalarCoeffs,
    ScalarField,
    STFTensorField,
    TangentVectorField,
    TensorCoeffs,
    VectorCoeffs,
)
from .grid import SphereGrid
from .harmonics import build_tables, scalar_table, tensor_norms, vector_norms

logger = logging.getLogger(__name__)


# ======================================================================
# --- Outils internes ---
# ======================================================================


def _split(values: np.ndarray, l_max: int):
    """[..., l, m + l_max] -> (cos[..., l, μ], sin[..., l, μ])."""
    cos = np.array(values[..., l_max:])
    sin = np.zeros_like(cos)
    sin[..., 1:] = np.flip(values[..., :l_max], axis=-1)
    return cos, sin


def _merge(cos: np.ndarray, sin: np.ndarray, l_max: int) -> np.ndarray:
    out = np.zeros((*cos.shape[:-1], 2 * l_max + 1))
    out[..., l_max:] = cos
    out[..., :l_max] = np.flip(sin[..., 1:], axis=-1)
    return out


def _fourier(grid: SphereGrid, data: np.ndarray):
    """Projections pondérées [..., μ, i] sur cos(μφ) et sin(μφ)."""
    scale = (2.0 * np.pi / grid.n_phi) * grid.weights
    fc = np.einsum("...ij,mj->...mi", data, grid.trig_cos) * scale
    fs = np.einsum("...ij,mj->...mi", data, grid.trig_sin) * scale
    return fc, fs


def _project(table: np.ndarray, part: np.ndarray) -> np.ndarray:
    return np.einsum("lmi,...mi->...lm", table, part)


def _back(table: np.ndarray, coef: np.ndarray) -> np.ndarray:
    return np.einsum("lmi,...lm->...mi", table, coef)


def _to_grid(grid: SphereGrid, cos_part: np.ndarray, sin_part: np.ndarray) -> np.ndarray:
    return np.einsum("...mi,mj->...ij", cos_part, grid.trig_cos) + np.einsum(
        "...mi,mj->...ij", sin_part, grid.trig_sin
    )


def _check_band(l_max: int, grid: SphereGrid) -> None:
    if l_max > grid.l_max:
        raise GridMismatchError(
            f"Coefficients band limit l_max={l_max} exceeds grid l_max={grid.l_max}"
        )


def _parity_tables(kind: FieldKind, grid_tables):
    if kind == FieldKind.VECTOR:
        return grid_tables.grad_a, grid_tables.grad_b, vector_norms, 1.0
    return grid_tables.tensor_a, grid_tables.tensor_b, tensor_norms, 2.0


def _direction_points(theta, phi):
    theta, phi = np.broadcast_arrays(
        np.asarray(theta, dtype=np.float64), np.asarray(phi, dtype=np.float64)
    )
    return theta.shape, theta.ravel(), phi.ravel()


def _mode_trig(l_max: int, phi: np.ndarray):
    mphi = np.outer(np.arange(l_max + 1), phi)
    return np.cos(mphi), np.sin(mphi)


def _point_sum(table, coef, trig):
    return np.einsum("lmk,...lm,mk->...k", table, coef, trig)


# ======================================================================
# --- Scalaires ---
# ======================================================================


def scalar_analyze_array(grid: SphereGrid, values: np.ndarray) -> np.ndarray:
    """Coefficients [..., l, m + l_max] de valeurs [..., n_theta, n_phi]."""
    fc, fs = _fourier(grid, values)
    table = grid.tables.scalar
    return _merge(_project(table, fc), _project(table, fs), grid.l_max)


def scalar_synthesize_array(grid: SphereGrid, coeffs: np.ndarray) -> np.ndarray:
    a_cos, a_sin = _split(coeffs, grid.l_max)
    table = grid.tables.scalar
    return _to_grid(grid, _back(table, a_cos), _back(table, a_sin))


def sht_analyze(f: ScalarField) -> ScalarCoeffs:
    """a_lm = ∮ f Y_lm dμ par quadrature (exacte pour f de bande limite l_max)."""
    return ScalarCoeffs(f.grid.l_max, scalar_analyze_array(f.grid, f.values))


def sht_synthesize(coeffs: ScalarCoeffs, grid: SphereGrid) -> ScalarField:
    """Somme Σ a_lm Y_lm aux nœuds de la grille."""
    _check_band(coeffs.l_max, grid)
    padded = coeffs.padded(grid.l_max).values
    return ScalarField(grid, scalar_synthesize_array(grid, padded))


def sht_evaluate(coeffs: ScalarCoeffs, theta, phi) -> np.ndarray:
    """Évalue Σ a_lm Y_lm en des directions arbitraires (pôles compris)."""
    shape, th, ph = _direction_points(theta, phi)
    table = scalar_table(coeffs.l_max, th)
    cos_mphi, sin_mphi = _mode_trig(coeffs.l_max, ph)
    a_cos, a_sin = _split(coeffs.values, coeffs.l_max)
    out = _point_sum(table, a_cos, cos_mphi) + _point_sum(table, a_sin, sin_mphi)
    return out.reshape(shape)


# ======================================================================
# --- Champs à parité (vecteurs et tenseurs STF) ---
# ======================================================================


def parity_analyze_array(kind: FieldKind, grid: SphereGrid, data: np.ndarray):
    """
    Coefficients (électrique, magnétique) de composantes [..., 2, n_theta, n_phi].

    kind vaut FieldKind.VECTOR ou FieldKind.STF.
    """
    table_a, table_b, norm_fn, factor = _parity_tables(kind, grid.tables)
    norms = factor * norm_fn(grid.l_max)[:, None]
    c1c, c1s = _fourier(grid, data[..., 0, :, :])
    c2c, c2s = _fourier(grid, data[..., 1, :, :])

    e_cos = norms * (_project(table_a, c1c) - _project(table_b, c2s))
    e_sin = norms * (_project(table_a, c1s) + _project(table_b, c2c))
    b_cos = norms * (-_project(table_b, c1s) - _project(table_a, c2c))
    b_sin = norms * (_project(table_b, c1c) - _project(table_a, c2s))
    return _merge(e_cos, e_sin, grid.l_max), _merge(b_cos, b_sin, grid.l_max)


def parity_synthesize_array(
    kind: FieldKind, grid: SphereGrid, electric: np.ndarray, magnetic: np.ndarray
) -> np.ndarray:
    table_a, table_b, norm_fn, _ = _parity_tables(kind, grid.tables)
    norms = norm_fn(grid.l_max)[:, None]
    e_cos, e_sin = _split(electric, grid.l_max)
    b_cos, b_sin = _split(magnetic, grid.l_max)
    e_cos, e_sin, b_cos, b_sin = (norms * c for c in (e_cos, e_sin, b_cos, b_sin))

    first = _to_grid(
        grid,
        _back(table_a, e_cos) + _back(table_b, b_sin),
        _back(table_a, e_sin) - _back(table_b, b_cos),
    )
    second = _to_grid(
        grid,
        _back(table_b, e_sin) - _back(table_a, b_cos),
        -_back(table_b, e_cos) - _back(table_a, b_sin),
    )
    return np.stack([first, second], axis=-3)


def parity_evaluate_array(
    kind: FieldKind, l_max: int, electric: np.ndarray, magnetic: np.ndarray, theta, phi
) -> np.ndarray:
    """Composantes de repère [..., 2, *forme(θ)] en des directions 0 < θ < π."""
    shape, th, ph = _direction_points(theta, phi)
    tables = build_tables(l_max, th)
    table_a, table_b, norm_fn, _ = _parity_tables(kind, tables)
    norms = norm_fn(l_max)[:, None]
    cos_mphi, sin_mphi = _mode_trig(l_max, ph)
    e_cos, e_sin = _split(electric, l_max)
    b_cos, b_sin = _split(magnetic, l_max)
    e_cos, e_sin, b_cos, b_sin = (norms * c for c in (e_cos, e_sin, b_cos, b_sin))

    first = (
        _point_sum(table_a, e_cos, cos_mphi)
        + _point_sum(table_a, e_sin, sin_mphi)
        + _point_sum(table_b, b_sin, cos_mphi)
        - _point_sum(table_b, b_cos, sin_mphi)
    )
    second = (
        _point_sum(table_b, e_sin, cos_mphi)
        - _point_sum(table_b, e_cos, sin_mphi)
        - _point_sum(table_a, b_cos, cos_mphi)
        - _point_sum(table_a, b_sin, sin_mphi)
    )
    out = np.stack([first, second], axis=-2)
    return out.reshape(*out.shape[:-1], *shape)


def sample_direction(kind: FieldKind, grid: SphereGrid, data: np.ndarray, theta, phi):
    """
    Valeurs en une direction de champs échantillonnés empilés (axes de lot en tête).

    Retourne [...] pour un scalaire, [..., 2] pour un champ à parité.
    """
    theta = float(theta)
    phi = float(phi)
    if kind == FieldKind.SCALAR:
        coeffs = scalar_analyze_array(grid, data)
        table = scalar_table(grid.l_max, np.array([theta]))
        cos_mphi, sin_mphi = _mode_trig(grid.l_max, np.array([phi]))
        a_cos, a_sin = _split(coeffs, grid.l_max)
        out = _point_sum(table, a_cos, cos_mphi) + _point_sum(table, a_sin, sin_mphi)
        return out[..., 0]
    electric, magnetic = parity_analyze_array(kind, grid, data)
    return parity_evaluate_array(kind, grid.l_max, electric, magnetic, theta, phi)


# ======================================================================
# --- API typée ---
# ======================================================================


def vector_analyze(v: TangentVectorField) -> VectorCoeffs:
    electric, magnetic = parity_analyze_array(FieldKind.VECTOR, v.grid, v.components)
    return VectorCoeffs(v.grid.l_max, electric, magnetic)


def vector_synthesize(coeffs: VectorCoeffs, grid: SphereGrid) -> TangentVectorField:
    _check_band(coeffs.l_max, grid)
    padded = coeffs.padded(grid.l_max)
    data = parity_synthesize_array(FieldKind.VECTOR, grid, padded.electric, padded.magnetic)
    return TangentVectorField(grid, data)


def vector_evaluate(coeffs: VectorCoeffs, theta, phi) -> np.ndarray:
    return parity_evaluate_array(
        FieldKind.VECTOR, coeffs.l_max, coeffs.electric, coeffs.magnetic, theta, phi
    )


def vector_basis(l: int, m: int, parity, grid: SphereGrid) -> TangentVectorField:
    """Harmonique vectorielle unitaire: ∇Y_lm/√(l(l+1)) (E) ou sa rotation (B), l >= 1."""
    coeffs = VectorCoeffs.from_modes(grid.l_max, {(l, m, Parity.parse(parity)): 1.0})
    return vector_synthesize(coeffs, grid)


def tensor_analyze(t: STFTensorField) -> TensorCoeffs:
    """Coefficients c^E_lm, c^B_lm = <T, basis> (produit T_AB S^AB)."""
    electric, magnetic = parity_analyze_array(FieldKind.STF, t.grid, t.components)
    return TensorCoeffs(t.grid.l_max, electric, magnetic)


def tensor_synthesize(coeffs: TensorCoeffs, grid: SphereGrid) -> STFTensorField:
    _check_band(coeffs.l_max, grid)
    padded = coeffs.padded(grid.l_max)
    data = parity_synthesize_array(FieldKind.STF, grid, padded.electric, padded.magnetic)
    return STFTensorField(grid, data)


def tensor_evaluate(coeffs: TensorCoeffs, theta, phi) -> np.ndarray:
    return parity_evaluate_array(
        FieldKind.STF, coeffs.l_max, coeffs.electric, coeffs.magnetic, theta, phi
    )


def tensor_basis(l: int, m: int, parity, grid: SphereGrid) -> STFTensorField:
    """
    Harmonique tensorielle STF unitaire.

    Électrique: partie sans trace de ∇∇Y_lm normalisée; magnétique: sa rotation
    par la forme d'aire.

    Raises:
        ConfigError: si l < 2 (aucune harmonique STF) ou (l, m) hors bande
    """
    coeffs = TensorCoeffs.from_modes(grid.l_max, {(l, m, Parity.parse(parity)): 1.0})
    return tensor_synthesize(coeffs, grid)
