# em_memory/src/em_memory/core/detector.py
"""
Interféromètre à trois masses test soumis à l'équation de Jacobi.

À l'ordre dominant en 1/r, l'écart géodésique se réduit à

    ẍ^A_(B) = -¼ (d0/r) A_AB(t)

avec les bras le long de E₁, E₂ et aucune accélération verticale. La partie
électromagnétique de R₀₀ n'est calculée que pour le rapport d'ordres
(em_subleading_report); l'intégrateur ne consomme que le terme de Weyl.
"""

import logging
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from ..config import RETURN_TO_REST_TOL
from .exceptions import ConfigError, GridMismatchError, InvariantError
from .models import (
    DetectorConfig,
    NullFieldAmplitudes,
    SubleadingReport,
    TidalAcceleration,
    Trajectory,
)
from .waveform import RetardedTimeGrid, TrainKind, WaveTrain

logger = logging.getLogger(__name__)


def stf_matrix(components) -> np.ndarray:
    """(T11, T12) -> [[T11, T12], [T12, -T11]]; accepte des axes de lot en tête."""
    comp = np.asarray(components, dtype=np.float64)
    t11 = comp[..., 0]
    t12 = comp[..., 1]
    return np.stack([np.stack([t11, t12], axis=-1), np.stack([t12, -t11], axis=-1)], axis=-2)


def tidal_acceleration(amplitudes: NullFieldAmplitudes, r: float) -> TidalAcceleration:
    """
    Partie Weyl -¼ A_W / r et partie électromagnétique
    R₀₀ = ½(|A_F|²/r² + α²) + ρ² + σ².
    """
    if not r > 0.0:
        raise ConfigError(f"r must be positive, got {r!r}")
    rho, sigma, alpha = amplitudes.at_radius(r)
    af_sq = float(np.sum(np.square(amplitudes.af)))
    em = 0.5 * (af_sq / r**2 + alpha**2) + rho**2 + sigma**2
    weyl = -0.25 * stf_matrix(amplitudes.aw) / r
    return TidalAcceleration(weyl=weyl, em=float(em))


# ---------- Intégration de Jacobi ----------


def _half_step_accelerations(series: np.ndarray, times: RetardedTimeGrid, ratio: float):
    """Accélérations aux instants t0, t0 + h/2, t0 + h, ... (indice 2k = nœud k)."""
    n = series.shape[0]
    nodes = -0.25 * ratio * stf_matrix(series)
    out = np.empty((2 * n - 1, 2, 2))
    out[0::2] = nodes
    if n > 1:
        t = times.times
        spline = CubicSpline(t, series, axis=0)
        out[1::2] = -0.25 * ratio * stf_matrix(spline(t[:-1] + 0.5 * times.du))
    return out


def _rk4_step(y: np.ndarray, index: int, dt: float, rhs) -> np.ndarray:
    k1 = rhs(index, y)
    k2 = rhs(index + 1, y + 0.5 * dt * k1)
    k3 = rhs(index + 1, y + 0.5 * dt * k2)
    k4 = rhs(index + 2, y + dt * k3)
    return y + (k1 + 2.0 * k2 + 2.0 * k3 + k4) * dt / 6.0


def integrate_jacobi(aw_series, times: RetardedTimeGrid, cfg: DetectorConfig) -> Trajectory:
    """
    Intègre ẍ = -¼(d0/r)A_W par Runge-Kutta classique d'ordre 4.

    aw_series: composantes (T11, T12) de A_W dans la direction de cfg, [n_u, 2].
    Les valeurs aux demi-pas viennent d'une spline cubique (erreur O(du⁴)).

    Raises:
        ConfigError: série vide
        GridMismatchError: longueur de série différente de n_u
    """
    series = np.asarray(aw_series, dtype=np.float64)
    if series.size == 0:
        raise ConfigError("Cannot integrate an empty A_W series")
    if series.shape != (times.n_u, 2):
        raise GridMismatchError(f"A_W series shape {series.shape} != ({times.n_u}, 2)")

    accelerations = _half_step_accelerations(series, times, cfg.ratio)

    def rhs(index, state):
        return np.stack([state[1], accelerations[index]])

    states = np.empty((times.n_u, 2, 2, 2))
    states[0] = 0.0  # (δx, v) au repos, x = d0·δ
    for k in range(times.n_u - 1):
        states[k + 1] = _rk4_step(states[k], 2 * k, times.du, rhs)

    trajectory = Trajectory(
        times=times.times,
        initial=cfg.initial_positions(),
        displacements=states[:, 0],
        velocities=states[:, 1],
    )
    logger.debug(
        "Jacobi integration: %d steps, return-to-rest residual %.3e",
        times.n_u,
        return_to_rest_residual(trajectory),
    )
    return trajectory


def integrate_train(aw: WaveTrain, cfg: DetectorConfig) -> Trajectory:
    """Échantillonne un train A_W dans la direction de cfg puis l'intègre."""
    if aw.kind is not TrainKind.AW:
        raise ConfigError(f"Expected an AW train, got {aw.kind.name}")
    return integrate_jacobi(aw.at_direction(*cfg.direction), aw.times, cfg)


def return_to_rest_residual(trajectory: Trajectory) -> float:
    """max|v(t_final)| / max|v|; 0 pour une trajectoire immobile."""
    peak = trajectory.peak_velocity()
    if peak == 0.0:
        return 0.0
    return float(np.max(np.abs(trajectory.velocities[-1])) / peak)


def permanent_displacement(
    trajectory: Trajectory, tolerance: float = RETURN_TO_REST_TOL
) -> np.ndarray:
    """
    Déplacement final - initial, matrice [A, B].

    Raises:
        InvariantError: si les masses ne reviennent pas au repos
    """
    residual = return_to_rest_residual(trajectory)
    if residual >= tolerance:
        raise InvariantError(
            f"Test masses did not return to rest: residual {residual:.3e} >= {tolerance:.1e}"
        )
    return trajectory.displacements[-1] - trajectory.displacements[0]


def convergence_order(trajectories: Sequence[Trajectory], sample_time: float) -> float:
    """
    Ordre observé à partir de trois intégrations au pas divisé par deux,
    comparées sur la position à sample_time.
    """
    if len(trajectories) < 3:
        raise ConfigError("Convergence order needs three successively halved steps")
    samples = []
    for traj in trajectories[-3:]:
        index = int(np.argmin(np.abs(traj.times - sample_time)))
        if not np.isclose(traj.times[index], sample_time, rtol=0.0, atol=1e-9):
            raise GridMismatchError(f"Sample time {sample_time} is not a grid node")
        samples.append(traj.displacements[index])
    coarse = np.max(np.abs(samples[0] - samples[1]))
    fine = np.max(np.abs(samples[1] - samples[2]))
    if fine == 0.0:
        return float("inf")
    return float(np.log2(coarse / fine))


# ---------- Rapport d'ordres ----------


def em_subleading_report(
    amplitudes: NullFieldAmplitudes, radii: Sequence[float]
) -> SubleadingReport:
    """
    Rapport em/‖weyl‖ en fonction de r et pente log-log ajustée (attendue -1).

    La pente vaut NaN si un rapport est nul ou infini.
    """
    radii = [float(r) for r in radii]
    if len(radii) < 2:
        raise ConfigError("em_subleading_report needs at least two radii")
    report = SubleadingReport()
    for r in radii:
        tidal = tidal_acceleration(amplitudes, r)
        norm = tidal.weyl_norm
        if norm > 0.0:
            ratio = tidal.em / norm
        else:
            ratio = 0.0 if tidal.em == 0.0 else float("inf")
        report.radii.append(r)
        report.weyl_norms.append(norm)
        report.em_values.append(tidal.em)
        report.ratios.append(ratio)

    ratios = np.asarray(report.ratios)
    if np.all(np.isfinite(ratios)) and np.all(ratios > 0.0):
        report.slope = float(np.polyfit(np.log(radii), np.log(ratios), 1)[0])
    logger.info("Subleading report over %d radii: slope %.4f", len(radii), report.slope)
    return report
