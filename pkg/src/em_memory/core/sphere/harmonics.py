# em_memory/src/em_memory/core/sphere/harmonics.py
"""
Tables des fonctions en θ des harmoniques réelles scalaires, vectorielles et
tensorielles (STF) sur la sphère unité.

Base scalaire réelle orthonormée (sans Condon-Shortley):
    Y_l0 = p̄_l^0,  Y_lm = √2 p̄_l^m cos(mφ),  Y_l,-m = √2 p̄_l^m sin(mφ)   (m > 0)

Dans le repère orthonormé (e_θ, e_φ), pour Y = c p̄ cos(μφ) (resp. sin):
    ∇Y           = (V cos, -U sin)        (resp. (V sin, U cos))
    STF(∇∇Y)     = (W cos, -X sin)        (resp. (W sin, X cos))   composantes (T11, T12)
avec V = c ∂θp̄, U = c μ p̄/sinθ,
     W = c(-½l(l+1)p̄ - cotθ ∂θp̄ + μ² p̄/sin²θ), X = c μ(∂θp̄ - cotθ p̄)/sinθ.
La parité magnétique est la rotation par la forme d'aire: (εv) = (v₂, -v₁) et
(εT)₁₁ = T₁₂, (εT)₁₂ = -T₁₁.
"""

from dataclasses import dataclass

import numpy as np

from .legendre import legendre_dtheta, normalized_legendre


@dataclass(frozen=True)
class HarmonicTables:
    """Fonctions en θ évaluées sur un ensemble de colatitudes, indexées [l, μ, i]."""

    l_max: int
    scalar: np.ndarray
    grad_a: np.ndarray
    grad_b: np.ndarray
    tensor_a: np.ndarray
    tensor_b: np.ndarray


def _mode_weights(l_max: int) -> np.ndarray:
    mu = np.arange(l_max + 1)
    return np.where(mu == 0, 1.0, np.sqrt(2.0))[None, :, None]


def scalar_table(l_max: int, theta: np.ndarray) -> np.ndarray:
    """Table c_μ p̄_l^μ(θ) seule; accepte les pôles."""
    return _mode_weights(l_max) * normalized_legendre(l_max, theta)


def build_tables(l_max: int, theta: np.ndarray) -> HarmonicTables:
    """Construit toutes les tables; les colatitudes doivent éviter les pôles."""
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    p = normalized_legendre(l_max, theta)
    dp = legendre_dtheta(p, theta)

    c = _mode_weights(l_max)
    ell = np.arange(l_max + 1, dtype=np.float64)[:, None, None]
    mu = np.arange(l_max + 1, dtype=np.float64)[None, :, None]
    lam = ell * (ell + 1.0)
    s = np.sin(theta)[None, None, :]
    cot = (np.cos(theta) / np.sin(theta))[None, None, :]

    return HarmonicTables(
        l_max=l_max,
        scalar=c * p,
        grad_a=c * dp,
        grad_b=c * mu * p / s,
        tensor_a=c * (-0.5 * lam * p - cot * dp + mu**2 * p / s**2),
        tensor_b=c * mu * (dp - cot * p) / s,
    )


def vector_norms(l_max: int) -> np.ndarray:
    """Facteurs 1/‖∇Y_lm‖ = 1/sqrt(l(l+1)); nuls pour l = 0."""
    ell = np.arange(l_max + 1, dtype=np.float64)
    lam = ell * (ell + 1.0)
    out = np.zeros(l_max + 1)
    out[1:] = 1.0 / np.sqrt(lam[1:])
    return out


def tensor_norms(l_max: int) -> np.ndarray:
    """Facteurs 1/‖STF(∇∇Y_lm)‖ = 1/sqrt(½(l-1)l(l+1)(l+2)); nuls pour l < 2."""
    ell = np.arange(l_max + 1, dtype=np.float64)
    out = np.zeros(l_max + 1)
    big = ell[2:]
    out[2:] = 1.0 / np.sqrt(0.5 * (big - 1.0) * big * (big + 1.0) * (big + 2.0))
    return out


def divergence_factors(l_max: int) -> np.ndarray:
    """
    Facteur g_l tel que div(Ê_lm) = g_l ∇Ŷ_lm (bases normalisées), l >= 2.

    Pour la base non normalisée: div STF(∇∇Y) = (1 - l(l+1)/2) ∇Y.
    """
    ell = np.arange(l_max + 1, dtype=np.float64)
    lam = ell * (ell + 1.0)
    return tensor_norms(l_max) * (1.0 - 0.5 * lam) * np.sqrt(lam)
