# em_memory/src/em_memory/core/sphere/legendre.py
"""
Fonctions de Legendre associées entièrement normalisées.

Convention: p̄_l^m(cosθ) = sqrt((2l+1)/(4π) (l-m)!/(l+m)!) P_l^m(cosθ), sans
phase de Condon-Shortley, de sorte que ∫ p̄_l^m(x)² dx = 1/(2π).
"""

import numpy as np


def normalized_legendre(l_max: int, theta: np.ndarray) -> np.ndarray:
    """
    Calcule p̄_l^m(cosθ) pour 0 <= m <= l <= l_max.

    Récurrence diagonale puis récurrence à trois termes en l, normalisée au fil de
    l'eau (pas de factorielles, pas de débordement au-delà de l ~ 30).

    Args:
        l_max: degré maximal
        theta: colatitudes (radians), tableau 1D

    Returns:
        Tableau (l_max+1, l_max+1, n) indexé [l, m, i]; nul pour m > l
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    x = np.cos(theta)
    s = np.sin(theta)
    p = np.zeros((l_max + 1, l_max + 1, theta.size))

    p[0, 0] = 1.0 / np.sqrt(4.0 * np.pi)
    for m in range(1, l_max + 1):
        p[m, m] = np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * p[m - 1, m - 1]

    for m in range(0, l_max):
        p[m + 1, m] = np.sqrt(2.0 * m + 3.0) * x * p[m, m]
        for l in range(m + 2, l_max + 1):
            a_lm = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            inv_a_prev = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            p[l, m] = a_lm * (x * p[l - 1, m] - inv_a_prev * p[l - 2, m])
    return p


def legendre_dtheta(p: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """
    Dérivée ∂θ p̄_l^m à partir du tableau de normalized_legendre.

    Utilise sinθ ∂θ p̄_l^m = l cosθ p̄_l^m - sqrt((2l+1)(l²-m²)/(2l-1)) p̄_{l-1}^m.
    Les colatitudes doivent être strictement intérieures (0 < θ < π).
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    s = np.sin(theta)
    if np.any(s <= 0.0):
        raise ValueError("theta derivative requested at a pole")
    x = np.cos(theta)
    l_max = p.shape[0] - 1
    dp = np.zeros_like(p)
    m = np.arange(l_max + 1, dtype=np.float64)[:, None]
    for l in range(1, l_max + 1):
        f_lm = np.sqrt(np.clip((2.0 * l + 1.0) * (l * l - m * m) / (2.0 * l - 1.0), 0.0, None))
        dp[l] = (l * x * p[l] - f_lm * p[l - 1]) / s
    return dp
