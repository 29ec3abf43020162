# em_memory/src/em_memory/core/waveform.py
"""
Trains d'ondes à l'infini nul et relations d'évolution en temps retardé:

    ∂Ξ/∂u = -¼ A_W,      ∂Σ/∂u = -Ξ

Toutes les intégrales en u utilisent la règle des trapèzes (scipy), les dérivées
des différences centrées avec schémas d'ordre 2 aux extrémités (numpy.gradient).
"""

import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from ..config import TRAIN_TAIL_TOL
from .exceptions import ConfigError, GridMismatchError, InvariantError
from .models import PulseSpec
from .sphere import (
    FIELD_TYPES,
    FieldKind,
    SphereGrid,
    STFTensorField,
    sample_direction,
    tensor_basis,
    vector_basis,
)

logger = logging.getLogger(__name__)


class TrainKind(IntEnum):
    XI = 0
    AW = 1
    AF = 2
    SIGMA = 3

    @property
    def field_kind(self) -> FieldKind:
        return FieldKind.VECTOR if self is TrainKind.AF else FieldKind.STF


@dataclass(frozen=True)
class RetardedTimeGrid:
    """Grille uniforme u_k = u0 + k·du, k = 0..n_u-1."""

    u0: float
    du: float
    n_u: int

    def __post_init__(self):
        if not np.isfinite(self.u0):
            raise ConfigError("u0 must be finite")
        if not np.isfinite(self.du) or self.du <= 0.0:
            raise ConfigError(f"du must be positive, got {self.du!r}")
        if int(self.n_u) != self.n_u or self.n_u < 1:
            raise ConfigError(f"n_u must be a positive integer, got {self.n_u!r}")
        object.__setattr__(self, "n_u", int(self.n_u))

    @property
    def times(self) -> np.ndarray:
        return self.u0 + self.du * np.arange(self.n_u)

    @property
    def end(self) -> float:
        return self.u0 + self.du * (self.n_u - 1)

    def covers(self, lo: float, hi: float) -> bool:
        slack = 1e-9 * self.du
        return self.u0 <= lo + slack and self.end >= hi - slack

    def refined(self, factor: int) -> "RetardedTimeGrid":
        """Même intervalle, pas divisé par factor."""
        return RetardedTimeGrid(self.u0, self.du / factor, (self.n_u - 1) * factor + 1)

    @classmethod
    def spanning(cls, lo: float, hi: float, du: float) -> "RetardedTimeGrid":
        """Plus petite grille de pas du partant de lo et atteignant hi."""
        n_steps = int(np.ceil((hi - lo) / du - 1e-9))
        return cls(lo, du, n_steps + 1)


@dataclass(frozen=True, eq=False)
class WaveTrain:
    """
    Échantillons d'un champ sur la sphère à chaque pas de temps retardé.

    data est indexé [k, composante, i, j]; tous les échantillons partagent grid.
    """

    kind: TrainKind
    grid: SphereGrid
    times: RetardedTimeGrid
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "kind", TrainKind(self.kind))
        arr = np.array(self.data, dtype=np.float64)
        expected = (self.times.n_u, 2, *self.grid.shape)
        if arr.shape != expected:
            raise GridMismatchError(f"{self.kind.name} train expects {expected}, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvariantError(f"{self.kind.name} train contains non-finite samples")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def zeros(cls, kind: TrainKind, grid: SphereGrid, times: RetardedTimeGrid) -> "WaveTrain":
        return cls(kind, grid, times, np.zeros((times.n_u, 2, *grid.shape)))

    @classmethod
    def from_samples(cls, kind: TrainKind, times: RetardedTimeGrid, samples: Sequence):
        if not samples:
            raise ConfigError("A train needs at least one sample")
        grid = samples[0].grid
        for sample in samples:
            if sample.grid != grid:
                raise GridMismatchError("All train samples must share one grid")
        return cls(kind, grid, times, np.stack([s.components for s in samples]))

    @property
    def n_u(self) -> int:
        return self.times.n_u

    @property
    def norm_factor(self) -> float:
        return FIELD_TYPES[self.kind.field_kind].norm_factor

    def __len__(self) -> int:
        return self.n_u

    def sample(self, k: int):
        """Échantillon k comme champ typé (STFTensorField ou TangentVectorField)."""
        return FIELD_TYPES[self.kind.field_kind](self.grid, self.data[k])

    def check_compatible(self, other: "WaveTrain") -> None:
        if other.grid != self.grid:
            raise GridMismatchError(f"Train grids differ: {self.grid} vs {other.grid}")
        if other.times != self.times:
            raise GridMismatchError(f"Train u-grids differ: {self.times} vs {other.times}")

    def with_data(self, data: np.ndarray, kind: Optional[TrainKind] = None) -> "WaveTrain":
        return WaveTrain(self.kind if kind is None else kind, self.grid, self.times, data)

    def __add__(self, other: "WaveTrain") -> "WaveTrain":
        self.check_compatible(other)
        if other.kind != self.kind:
            raise ConfigError(f"Cannot add {other.kind.name} train to {self.kind.name} train")
        return self.with_data(self.data + other.data)

    def scaled(self, factor: float) -> "WaveTrain":
        return self.with_data(float(factor) * self.data)

    def pointwise_norm_sq(self) -> np.ndarray:
        """|f|² par pas et par nœud, [k, i, j]."""
        return self.norm_factor * np.sum(self.data**2, axis=1)

    def sample_max_norms(self) -> np.ndarray:
        return np.sqrt(np.max(self.pointwise_norm_sq(), axis=(1, 2)))

    def peak_max_norm(self) -> float:
        return float(np.max(self.sample_max_norms()))

    def tail_ratio(self) -> float:
        """max(|f(u0)|, |f(u_end)|) / pic; 0 pour un train nul."""
        norms = self.sample_max_norms()
        peak = float(np.max(norms))
        if peak == 0.0:
            return 0.0
        return float(max(norms[0], norms[-1]) / peak)

    def check_tails(self, tolerance: float = TRAIN_TAIL_TOL) -> None:
        """Ξ doit s'annuler aux deux extrémités (masses test revenant au repos)."""
        ratio = self.tail_ratio()
        if ratio >= tolerance:
            raise InvariantError(
                f"{self.kind.name} train endpoints at {ratio:.3e} of peak (limit {tolerance:.1e})"
            )

    def integrate_u(self) -> np.ndarray:
        """∫ f du sur tout le train, composantes [c, i, j]."""
        return trapezoid(self.data, dx=self.times.du, axis=0)

    def at_direction(self, theta: float, phi: float) -> np.ndarray:
        """Composantes de repère [k, 2] dans la direction (θ, φ), 0 < θ < π."""
        return sample_direction(self.kind.field_kind, self.grid, self.data, theta, phi)


def _require_kind(train: WaveTrain, *kinds: TrainKind) -> None:
    if train.kind not in kinds:
        names = "/".join(k.name for k in kinds)
        raise ConfigError(f"Expected a {names} train, got {train.kind.name}")


# ======================================================================
# --- Génération de trains synthétiques ---
# ======================================================================


def _check_support(spec: PulseSpec, times: RetardedTimeGrid) -> None:
    lo, hi = spec.support
    if not times.covers(lo, hi):
        raise ConfigError(
            f"u-grid [{times.u0}, {times.end}] does not cover pulse support [{lo}, {hi}]"
        )


def _pulse(spec: PulseSpec, basis, times: RetardedTimeGrid) -> np.ndarray:
    _check_support(spec, times)
    return np.einsum("k,cij->kcij", spec.profile(times.times), basis.components)


def gen_xi_pulse(spec: PulseSpec, grid: SphereGrid, times: RetardedTimeGrid) -> WaveTrain:
    """
    Ξ(u, ξ) = amplitude·exp(-(u-u_c)²/2τ²)·tensor_basis(l, m, parité)(ξ).

    Raises:
        ConfigError: si la grille en u ne couvre pas u_c ± 6τ ou si l < 2
    """
    basis = tensor_basis(spec.l, spec.m, spec.parity, grid)
    train = WaveTrain(TrainKind.XI, grid, times, _pulse(spec, basis, times))
    train.check_tails()
    logger.debug(
        "Generated XI pulse a=%g uc=%g tau=%g mode=(%d,%d,%s)",
        spec.amplitude,
        spec.center,
        spec.width,
        spec.l,
        spec.m,
        spec.parity.value,
    )
    return train


def gen_aw_pulse(spec: PulseSpec, grid: SphereGrid, times: RetardedTimeGrid) -> WaveTrain:
    """A_W analytique d'une impulsion Ξ gaussienne: 4(u-u_c)/τ² · Ξ."""
    basis = tensor_basis(spec.l, spec.m, spec.parity, grid)
    u = times.times
    factor = 4.0 * (u - spec.center) / spec.width**2
    data = factor[:, None, None, None] * _pulse(spec, basis, times)
    return WaveTrain(TrainKind.AW, grid, times, data)


def gen_af_pulse(spec: PulseSpec, grid: SphereGrid, times: RetardedTimeGrid) -> WaveTrain:
    """A_F(u, ξ) = amplitude·exp(-(u-u_c)²/2τ²)·vector_basis(l, m, parité)(ξ), l >= 1."""
    basis = vector_basis(spec.l, spec.m, spec.parity, grid)
    train = WaveTrain(TrainKind.AF, grid, times, _pulse(spec, basis, times))
    logger.debug("Generated AF pulse a=%g uc=%g tau=%g", spec.amplitude, spec.center, spec.width)
    return train


def gen_xi_train(
    specs: Iterable[PulseSpec], grid: SphereGrid, times: RetardedTimeGrid
) -> WaveTrain:
    """Superposition d'impulsions Ξ; train nul si la liste est vide."""
    train = WaveTrain.zeros(TrainKind.XI, grid, times)
    for spec in specs:
        train = train + gen_xi_pulse(spec, grid, times)
    train.check_tails()
    return train


def gen_af_train(
    specs: Iterable[PulseSpec], grid: SphereGrid, times: RetardedTimeGrid
) -> WaveTrain:
    train = WaveTrain.zeros(TrainKind.AF, grid, times)
    for spec in specs:
        train = train + gen_af_pulse(spec, grid, times)
    return train


# ======================================================================
# --- Relations d'évolution ---
# ======================================================================


def aw_from_xi(xi: WaveTrain) -> WaveTrain:
    """
    A_W = -4 ∂Ξ/∂u.

    Raises:
        ConfigError: si n_u < 3 ou si le train n'est pas de type XI
    """
    _require_kind(xi, TrainKind.XI)
    if xi.n_u < 3:
        raise ConfigError(f"aw_from_xi needs at least 3 samples, got {xi.n_u}")
    derivative = np.gradient(xi.data, xi.times.du, axis=0, edge_order=2)
    return xi.with_data(-4.0 * derivative, TrainKind.AW)


def integrate_xi(aw: WaveTrain) -> WaveTrain:
    """Ξ(u) = -¼ ∫_{u0}^u A_W du', avec Ξ(u0) = 0."""
    _require_kind(aw, TrainKind.AW)
    cumulative = cumulative_trapezoid(aw.data, dx=aw.times.du, axis=0, initial=0.0)
    return aw.with_data(-0.25 * cumulative, TrainKind.XI)


def integrate_sigma(xi: WaveTrain, sigma_minus: Optional[STFTensorField] = None):
    """
    Σ(u) = Σ⁻ - ∫_{u0}^u Ξ du'.

    Returns:
        (historique de Σ comme train SIGMA, Σ⁺)

    Raises:
        InvariantError: si Ξ ne s'annule pas aux deux extrémités
    """
    _require_kind(xi, TrainKind.XI)
    xi.check_tails()
    if sigma_minus is None:
        sigma_minus = STFTensorField.zeros(xi.grid)
    elif sigma_minus.grid != xi.grid:
        raise GridMismatchError(f"Sigma grid {sigma_minus.grid} differs from train grid")
    cumulative = cumulative_trapezoid(xi.data, dx=xi.times.du, axis=0, initial=0.0)
    history = xi.with_data(sigma_minus.components[None] - cumulative, TrainKind.SIGMA)
    return history, history.sample(-1)
