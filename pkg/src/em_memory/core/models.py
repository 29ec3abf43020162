# em_memory/src/em_memory/core/models.py
"""
Modèles de données partagés par les modules de calcul.

Unités: géométriques (cm) pour waveform/memory/detector, cgs pour bns.
"""

from dataclasses import asdict, dataclass, field
from typing import List, Tuple

import numpy as np

from ..config import (
    BH_REFERENCE_FRACTION,
    CM_TO_ERG,
    DEFAULT_DECAY_EXPONENT,
    DEFAULT_NS_RADIUS_KM,
    DEFAULT_RADIATED_FRACTION,
    DEFAULT_TOTAL_MASS,
    PULSE_SUPPORT_WIDTHS,
)
from .exceptions import ConfigError, InvariantError
from .sphere import Parity, ScalarField, STFTensorField, TensorCoeffs


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise ConfigError(f"{name} must be a positive finite number, got {value!r}")
    return value


def _nonnegative(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value) or value < 0.0:
        raise ConfigError(f"{name} must be a nonnegative finite number, got {value!r}")
    return value


# ---------- Trains d'ondes ----------


@dataclass(frozen=True)
class PulseSpec:
    """Impulsion gaussienne amplitude·exp(-(u-u_c)²/2τ²) portée par un mode (l, m, parité)."""

    amplitude: float
    center: float
    width: float
    l: int = 2
    m: int = 0
    parity: Parity = Parity.ELECTRIC

    def __post_init__(self):
        if not np.isfinite(self.amplitude) or not np.isfinite(self.center):
            raise ConfigError("Pulse amplitude and center must be finite")
        _positive("Pulse width", self.width)
        object.__setattr__(self, "parity", Parity.parse(self.parity))

    @property
    def support(self) -> Tuple[float, float]:
        half = PULSE_SUPPORT_WIDTHS * self.width
        return self.center - half, self.center + half

    def profile(self, u: np.ndarray) -> np.ndarray:
        return self.amplitude * np.exp(-((u - self.center) ** 2) / (2.0 * self.width**2))


# ---------- Mémoire ----------


@dataclass(frozen=True, eq=False)
class MemoryResult:
    """
    Résultat de la reconstruction de Σ⁺ - Σ⁻.

    kernel est F, f_bar sa moyenne, phi la solution de Δ̊Φ = F - F̄ à moyenne nulle,
    dropped_l1 les coefficients (m = -1, 0, 1) de F en l = 1, exclus de la
    reconstruction. energy_radiated = F̄/2 (cm).
    """

    kernel: ScalarField
    f_bar: float
    phi: ScalarField
    delta_sigma: STFTensorField
    delta_sigma_coeffs: TensorCoeffs
    dropped_l1: Tuple[float, float, float]
    energy_radiated: float
    residual: float

    @property
    def energy_radiated_erg(self) -> float:
        return self.energy_radiated * CM_TO_ERG

    def summary(self) -> dict:
        return {
            "F_bar": self.f_bar,
            "energy_radiated": self.energy_radiated,
            "energy_radiated_erg": self.energy_radiated_erg,
            "dropped_l1": list(self.dropped_l1),
            "residual": self.residual,
        }


@dataclass(frozen=True, eq=False)
class MassHistory:
    """M(u) cumulée avec le signe de la formule de perte de masse telle qu'imprimée."""

    times: np.ndarray
    rates: np.ndarray
    masses: np.ndarray

    @property
    def total_change(self) -> float:
        return float(self.masses[-1] - self.masses[0])


@dataclass(frozen=True, eq=False)
class VacuumComparison:
    with_em: MemoryResult
    vacuum: MemoryResult
    kernel_shift: ScalarField
    em_fraction: float


# ---------- Détecteur ----------


@dataclass(frozen=True)
class DetectorConfig:
    """
    Interféromètre à trois masses: bras de longueur d0 le long de E₁ et E₂,
    à la distance r de la source, dans la direction (θ, φ) du ciel de la source.
    """

    d0: float
    r: float
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        _positive("d0", self.d0)
        _positive("r", self.r)
        if not 0.0 < float(self.theta) < np.pi:
            raise ConfigError(f"theta must lie strictly inside (0, pi), got {self.theta!r}")
        if not np.isfinite(self.phi):
            raise ConfigError("phi must be finite")

    @property
    def direction(self) -> Tuple[float, float]:
        return float(self.theta), float(self.phi)

    @property
    def ratio(self) -> float:
        return self.d0 / self.r

    def initial_positions(self) -> np.ndarray:
        """x^B_(A) = d0·δ^B_A, indexé [A, B]."""
        return self.d0 * np.eye(2)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Historique [n, A, B] aligné sur la grille en u.

    Les écarts à la position initiale sont intégrés séparément: (d0/r)Σ est
    bien plus petit que d0 et serait perdu dans x = d0 + δx.
    """

    times: np.ndarray
    initial: np.ndarray
    displacements: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        if not (
            np.all(np.isfinite(self.displacements)) and np.all(np.isfinite(self.velocities))
        ):
            raise InvariantError("Trajectory contains non-finite values")

    @property
    def positions(self) -> np.ndarray:
        return self.initial[None] + self.displacements

    @property
    def vertical(self) -> np.ndarray:
        """x³_(A): aucune accélération verticale à l'ordre dominant."""
        return np.zeros((len(self.times), 2))

    def peak_velocity(self) -> float:
        return float(np.max(np.abs(self.velocities)))


@dataclass(frozen=True)
class NullFieldAmplitudes:
    """
    Amplitudes à l'infini nul en une direction.

    aw: composantes (T11, T12) de A_W (cm⁻¹); af: composantes de A_F.
    rho, sigma, alpha: valeurs au rayon de référence, décroissant en r⁻², r⁻², r⁻³.
    """

    aw: Tuple[float, float] = (0.0, 0.0)
    af: Tuple[float, float] = (0.0, 0.0)
    rho: float = 0.0
    sigma: float = 0.0
    alpha: float = 0.0
    reference_radius: float = 1.0

    RHO_EXPONENT = 2
    SIGMA_EXPONENT = 2
    ALPHA_EXPONENT = 3

    def __post_init__(self):
        _positive("reference_radius", self.reference_radius)
        object.__setattr__(self, "aw", tuple(float(x) for x in self.aw))
        object.__setattr__(self, "af", tuple(float(x) for x in self.af))
        if len(self.aw) != 2 or len(self.af) != 2:
            raise ConfigError("aw and af need exactly two frame components")

    def at_radius(self, r: float) -> Tuple[float, float, float]:
        """(ρ, σ, α) propagés de reference_radius à r."""
        scale = self.reference_radius / r
        return (
            self.rho * scale**self.RHO_EXPONENT,
            self.sigma * scale**self.SIGMA_EXPONENT,
            self.alpha * scale**self.ALPHA_EXPONENT,
        )


@dataclass(frozen=True, eq=False)
class TidalAcceleration:
    weyl: np.ndarray
    em: float

    @property
    def weyl_norm(self) -> float:
        return float(np.sqrt(np.sum(self.weyl**2)))


@dataclass
class SubleadingReport:
    radii: List[float] = field(default_factory=list)
    weyl_norms: List[float] = field(default_factory=list)
    em_values: List[float] = field(default_factory=list)
    ratios: List[float] = field(default_factory=list)
    slope: float = float("nan")

    def rows(self) -> List[dict]:
        return [
            {"r": r, "weyl_norm": w, "em": e, "ratio": q}
            for r, w, e, q in zip(self.radii, self.weyl_norms, self.em_values, self.ratios)
        ]


# ---------- Fusions d'étoiles à neutrons ----------


@dataclass(frozen=True)
class BnsScenario:
    """Scénario de fusion: masses en M☉, rayon en km, champ en G, taux en G/ms, durée en ms."""

    total_mass: float = DEFAULT_TOTAL_MASS
    radiated_fraction: float = DEFAULT_RADIATED_FRACTION
    ns_radius_km: float = DEFAULT_NS_RADIUS_KM
    b0: float = 0.0
    dbdt: float = 0.0
    merge_time_ms: float = 0.0
    decay_exponent: float = DEFAULT_DECAY_EXPONENT
    kappa: float | str = "quarter"

    def __post_init__(self):
        _positive("total_mass", self.total_mass)
        _positive("ns_radius_km", self.ns_radius_km)
        fraction = _nonnegative("radiated_fraction", self.radiated_fraction)
        if fraction >= 1.0:
            raise ConfigError(f"radiated_fraction must be < 1, got {fraction}")
        for name in ("b0", "dbdt", "merge_time_ms"):
            _nonnegative(name, getattr(self, name))
        if not np.isfinite(self.decay_exponent):
            raise ConfigError("decay_exponent must be finite")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class EnergyReport:
    grav_erg: float
    mag_erg: float
    ratio_mag_over_grav: float
    b_final: float
    kappa: float
    bh_reference_erg: float
    bh_reference_fraction: float = BH_REFERENCE_FRACTION

    def to_dict(self) -> dict:
        return asdict(self)


# ---------- Exécutions ----------


@dataclass
class RunResult:
    """Bilan d'une sous-commande: fichiers produits, manifeste et résumé affichable."""

    command: str
    outputs: List[str] = field(default_factory=list)
    manifest: str | None = None
    summary: dict = field(default_factory=dict)
