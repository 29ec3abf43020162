# em_memory/src/em_memory/core/sphere/grid.py
"""
Grille de quadrature sur S²: nœuds de Gauss-Legendre en cosθ × longitudes uniformes.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from ...config import L_MAX_MAX, L_MAX_MIN
from ..exceptions import ConfigError
from .harmonics import HarmonicTables, build_tables

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SphereGrid:
    """
    Grille de Gauss-Legendre (colatitude) × uniforme (longitude).

    Exacte pour tout produit de deux champs de bande limite l_max. Aucun nœud
    aux pôles. Les tableaux dérivés sont calculés à la demande puis mis en cache;
    deux grilles sont égales si et seulement si (l_max, n_theta, n_phi) le sont.
    """

    l_max: int
    n_theta: int
    n_phi: int

    def __post_init__(self):
        if self.n_theta < self.l_max + 1:
            raise ConfigError(f"n_theta={self.n_theta} < l_max+1={self.l_max + 1}")
        if self.n_phi < 2 * self.l_max + 1:
            raise ConfigError(f"n_phi={self.n_phi} < 2*l_max+1={2 * self.l_max + 1}")

    @property
    def shape(self) -> tuple:
        return (self.n_theta, self.n_phi)

    @cached_property
    def _gauss(self):
        x, w = np.polynomial.legendre.leggauss(self.n_theta)
        # θ croissant, donc cosθ décroissant
        return x[::-1].copy(), w[::-1].copy()

    @property
    def cos_theta(self) -> np.ndarray:
        return self._gauss[0]

    @property
    def weights(self) -> np.ndarray:
        return self._gauss[1]

    @cached_property
    def theta(self) -> np.ndarray:
        return np.arccos(self.cos_theta)

    @cached_property
    def phi(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi

    @cached_property
    def area_weights(self) -> np.ndarray:
        """Poids dμ de chaque nœud, forme (n_theta, n_phi); somme = 4π."""
        return np.outer(self.weights, np.full(self.n_phi, 2.0 * np.pi / self.n_phi))

    @cached_property
    def trig_cos(self) -> np.ndarray:
        return np.cos(np.outer(np.arange(self.l_max + 1), self.phi))

    @cached_property
    def trig_sin(self) -> np.ndarray:
        return np.sin(np.outer(np.arange(self.l_max + 1), self.phi))

    @cached_property
    def tables(self) -> HarmonicTables:
        logger.debug("Building harmonic tables for l_max=%d (%s)", self.l_max, self.shape)
        return build_tables(self.l_max, self.theta)

    def integrate(self, values: np.ndarray):
        """Quadrature ∮ f dμ sur les deux derniers axes (accepte des axes de lot)."""
        return np.sum(np.asarray(values) * self.area_weights, axis=(-2, -1))


def make_grid(
    l_max: int, n_theta: Optional[int] = None, n_phi: Optional[int] = None
) -> SphereGrid:
    """
    Construit une grille pour la bande limite l_max.

    Par défaut n_theta = l_max+1 et n_phi = 2·l_max+2.

    Raises:
        ConfigError: si l_max sort de [2, 256]
    """
    try:
        valid = not isinstance(l_max, bool) and int(l_max) == l_max
    except (TypeError, ValueError):
        valid = False
    if not valid:
        raise ConfigError(f"l_max must be an integer, got {l_max!r}")
    l_max = int(l_max)
    if not L_MAX_MIN <= l_max <= L_MAX_MAX:
        raise ConfigError(f"l_max={l_max} outside [{L_MAX_MIN}, {L_MAX_MAX}]")
    grid = SphereGrid(
        l_max=l_max,
        n_theta=l_max + 1 if n_theta is None else int(n_theta),
        n_phi=2 * l_max + 2 if n_phi is None else int(n_phi),
    )
    logger.debug("Created sphere grid l_max=%d n_theta=%d n_phi=%d", l_max, *grid.shape)
    return grid
