# em_memory/src/em_memory/core/bns.py
"""
Bilans d'énergie de fusions d'étoiles à neutrons (cgs).

Champ de surface B(t) = B0 + (dB/dt)·t, décroissance extérieure B(r) = B_f (R/r)^p,
énergie magnétique hors de la boule de rayon R:

    E = ∫_R^∞ B(r)²/8π · 4πr² dr = B_f² R³ / (2(2p - 3))

soit κ = ¼ pour p = 5/2. La constante PUBLISHED_KAPPA (≈ 0.477) reproduit les
valeurs publiées 4.78e49 / 4.78e53 erg; elle n'est pas dérivée du modèle.
"""

import logging
from dataclasses import replace
from typing import Iterable, List

import numpy as np
from scipy.integrate import quad

from ..config import (
    BH_REFERENCE_FRACTION,
    KM_TO_CM,
    PUBLISHED_KAPPA,
    QUARTER_KAPPA,
    SOLAR_MASS_ERG,
)
from .exceptions import ConfigError
from .models import BnsScenario, EnergyReport

logger = logging.getLogger(__name__)

KAPPA_MODES = ("quarter", "paper", "published", "analytic")


def _check_exponent(p: float) -> None:
    if not p > 1.5:
        raise ConfigError(f"decay exponent must exceed 3/2 for a finite exterior energy, got {p}")


def grav_energy(s: BnsScenario) -> float:
    """Énergie gravitationnelle rayonnée: fraction × masse × 1.78e54 erg/M☉."""
    return s.radiated_fraction * s.total_mass * SOLAR_MASS_ERG


def final_surface_field(s: BnsScenario) -> float:
    return s.b0 + s.dbdt * s.merge_time_ms


def analytic_kappa(p: float) -> float:
    """Préfacteur 1/(2(2p - 3)) de l'intégrale extérieure; ¼ pour p = 5/2."""
    _check_exponent(p)
    return 1.0 / (2.0 * (2.0 * p - 3.0))


def resolve_kappa(kappa, p: float) -> float:
    """
    Convertit un mode de κ en valeur.

    "quarter" -> ¼, "paper" ou "published" -> PUBLISHED_KAPPA,
    "analytic" -> analytic_kappa(p), sinon un nombre positif.

    Raises:
        ConfigError: mode inconnu, nombre non fini ou <= 0
    """
    if isinstance(kappa, str):
        key = kappa.strip().lower()
        if key == "quarter":
            return QUARTER_KAPPA
        if key in ("paper", "published"):
            return PUBLISHED_KAPPA
        if key == "analytic":
            return analytic_kappa(p)
        try:
            kappa = float(key)
        except ValueError:
            raise ConfigError(
                f"kappa must be one of {KAPPA_MODES} or a number, got {kappa!r}"
            ) from None
    if isinstance(kappa, bool) or not isinstance(kappa, (int, float)):
        raise ConfigError(f"kappa must be one of {KAPPA_MODES} or a number, got {kappa!r}")
    value = float(kappa)
    if not np.isfinite(value) or value <= 0.0:
        raise ConfigError(f"kappa must be positive, got {value!r}")
    return value


def exterior_energy_quadrature(b_final: float, radius_cm: float, p: float) -> float:
    """Intégrale radiale ∫_R^∞ B²/8π·4πr² dr évaluée numériquement (s = r/R)."""
    _check_exponent(p)
    integral, _ = quad(lambda s: s ** (2.0 - 2.0 * p), 1.0, np.inf, epsabs=0.0, epsrel=1e-12)
    return 0.5 * b_final**2 * radius_cm**3 * integral


def mag_energy(s: BnsScenario) -> float:
    """
    κ · B_f² · R³ (erg).

    Raises:
        ConfigError: si decay_exponent <= 3/2
    """
    _check_exponent(s.decay_exponent)
    kappa = resolve_kappa(s.kappa, s.decay_exponent)
    radius_cm = s.ns_radius_km * KM_TO_CM
    return kappa * final_surface_field(s) ** 2 * radius_cm**3


def compare(s: BnsScenario) -> EnergyReport:
    grav = grav_energy(s)
    mag = mag_energy(s)
    if grav > 0.0:
        ratio = mag / grav
    else:
        ratio = 0.0 if mag == 0.0 else float("inf")
    report = EnergyReport(
        grav_erg=grav,
        mag_erg=mag,
        ratio_mag_over_grav=ratio,
        b_final=final_surface_field(s),
        kappa=resolve_kappa(s.kappa, s.decay_exponent),
        bh_reference_erg=BH_REFERENCE_FRACTION * s.total_mass * SOLAR_MASS_ERG,
    )
    logger.info("BNS energy: grav=%.4e erg, mag=%.4e erg, ratio=%.4e", grav, mag, ratio)
    return report


def sweep_b0(s: BnsScenario, values: Iterable[float]) -> List[dict]:
    """Balayage du champ initial B0 (dB/dt et durée inchangés)."""
    rows = []
    for b0 in values:
        report = compare(replace(s, b0=float(b0)))
        rows.append({"b0": float(b0), **report.to_dict()})
    return rows


def sweep_decay(s: BnsScenario, exponents: Iterable[float]) -> List[dict]:
    """
    Balayage de l'exposant de décroissance avec κ analytique: une décroissance
    un peu différente ne change pas l'ordre de grandeur.
    """
    rows = []
    grav = grav_energy(s)
    for p in exponents:
        scenario = replace(s, decay_exponent=float(p), kappa="analytic")
        mag = mag_energy(scenario)
        rows.append(
            {
                "decay_exponent": float(p),
                "analytic_kappa": analytic_kappa(float(p)),
                "mag_erg": mag,
                "ratio_mag_over_grav": mag / grav if grav > 0.0 else float("nan"),
            }
        )
    return rows
