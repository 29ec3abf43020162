# em_memory/src/em_memory/core/pipeline_service.py
"""
Service de calcul em-memory.

Orchestre les modules purs (waveform, memory, detector, bns, validation) pour
chaque sous-commande et écrit les artefacts: champs binaires, CSV, JSON et un
manifeste par exécution. La CLI ne fait que construire la configuration et
appeler ce service.
"""

import logging
import os
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..config import CM_TO_ERG, FIELD_SUFFIX, TRAIN_SUFFIX
from . import bns, detector, memory, validation, waveform
from .exceptions import ConfigError, FieldIOError, InvariantError
from .file_utils import (
    read_train,
    write_csv,
    write_dict_csv,
    write_field,
    write_json,
    write_manifest,
    write_train,
)
from .models import BnsScenario, DetectorConfig, NullFieldAmplitudes, PulseSpec, RunResult
from .sphere import make_grid

logger = logging.getLogger(__name__)

_PAIR = Tuple[waveform.WaveTrain, Optional[waveform.WaveTrain]]


def _matrix(m: np.ndarray) -> List[List[float]]:
    return [[float(v) for v in row] for row in m]


class PipelineService:
    """
    Service em-memory.

    Une instance écrit dans un seul dossier de sortie; echo est la configuration
    résolue recopiée dans chaque manifeste.
    """

    def __init__(self, output_dir: str, echo: Optional[dict] = None):
        self.output_dir = output_dir
        self.echo = echo or {}
        try:
            os.makedirs(output_dir, exist_ok=True)
        except OSError as e:
            raise FieldIOError(f"Cannot create output directory {output_dir}: {e}") from e
        logger.debug("PipelineService initialized in %s", output_dir)

    def _path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def _finish(
        self, command: str, outputs: List[str], summary: dict, inputs: Sequence[str] = ()
    ) -> RunResult:
        manifest = write_manifest(
            self.output_dir, command, self.echo, inputs=inputs, outputs=outputs
        )
        logger.info("%s finished: %d files in %s", command, len(outputs), self.output_dir)
        return RunResult(command=command, outputs=outputs, manifest=manifest, summary=summary)

    def _load_pair(self, xi_path: str, af_path: Optional[str]) -> _PAIR:
        xi = read_train(xi_path)
        if xi.kind is not waveform.TrainKind.XI:
            raise ConfigError(f"{xi_path} holds a {xi.kind.name} train, expected XI")
        xi.check_tails()
        af = None
        if af_path:
            af = read_train(af_path)
            if af.kind is not waveform.TrainKind.AF:
                raise ConfigError(f"{af_path} holds a {af.kind.name} train, expected AF")
            xi.check_compatible(af)
        logger.info("Loaded XI train %s (%d samples, l_max=%d)", xi_path, xi.n_u, xi.grid.l_max)
        return xi, af

    @staticmethod
    def _inputs(*paths: Optional[str]) -> List[str]:
        return [p for p in paths if p]

    # ---------- generate ----------

    def generate(
        self,
        l_max: int,
        times: waveform.RetardedTimeGrid,
        pulses: Iterable[PulseSpec],
        af_pulses: Iterable[PulseSpec] = (),
    ) -> RunResult:
        """Écrit xi.emt, aw.emt (A_W = -4∂Ξ/∂u) et af.emt pour une superposition d'impulsions."""
        grid = make_grid(l_max)
        pulses = list(pulses)
        af_pulses = list(af_pulses)
        xi = waveform.gen_xi_train(pulses, grid, times)
        af = waveform.gen_af_train(af_pulses, grid, times)
        outputs = [
            write_train(self._path("xi" + TRAIN_SUFFIX), xi),
            write_train(self._path("aw" + TRAIN_SUFFIX), waveform.aw_from_xi(xi)),
            write_train(self._path("af" + TRAIN_SUFFIX), af),
        ]
        summary = {
            "l_max": grid.l_max,
            "n_theta": grid.n_theta,
            "n_phi": grid.n_phi,
            "n_u": times.n_u,
            "xi_pulses": len(pulses),
            "af_pulses": len(af_pulses),
            "xi_peak": xi.peak_max_norm(),
            "xi_tail_ratio": xi.tail_ratio(),
        }
        outputs.append(write_json(self._path("generate.json"), summary))
        return self._finish("generate", outputs, summary)

    # ---------- memory ----------

    def memory(self, xi_path: str, af_path: Optional[str], d0: float, r: float) -> RunResult:
        """Noyau, Φ, Σ⁺ - Σ⁻ et carte des déplacements pour des trains sur disque."""
        xi, af = self._load_pair(xi_path, af_path)
        if af is not None:
            comparison = memory.vacuum_comparison(xi, af)
            result = comparison.with_em
        else:
            comparison = None
            result = memory.solve_memory(memory.compute_kernel(xi))
        displacement = memory.displacement_map(result.delta_sigma, d0, r)

        outputs = [
            write_field(self._path("kernel" + FIELD_SUFFIX), result.kernel),
            write_field(self._path("phi" + FIELD_SUFFIX), result.phi),
            write_field(self._path("delta_sigma" + FIELD_SUFFIX), result.delta_sigma),
            write_field(self._path("displacement" + FIELD_SUFFIX), displacement),
        ]

        grid = xi.grid
        sigma = result.delta_sigma.components
        shift = displacement.components
        rows = (
            (float(t), float(p), sigma[0, i, j], sigma[1, i, j], shift[0, i, j], shift[1, i, j])
            for i, t in enumerate(grid.theta)
            for j, p in enumerate(grid.phi)
        )
        outputs.append(
            write_csv(
                self._path("displacement_map.csv"),
                ["theta", "phi", "sigma_11", "sigma_12", "dx_11", "dx_12"],
                rows,
            )
        )

        summary = result.summary()
        summary.update({"d0": d0, "r": r, "displacement_max": displacement.max_norm()})
        if comparison is not None:
            summary["em_fraction"] = comparison.em_fraction
            summary["kernel_shift_max"] = comparison.kernel_shift.max_norm()
        outputs.append(write_json(self._path("memory.json"), summary))
        return self._finish("memory", outputs, summary, inputs=self._inputs(xi_path, af_path))

    # ---------- detector ----------

    def detector(self, xi_path: str, af_path: Optional[str], cfg: DetectorConfig) -> RunResult:
        """Trajectoires des masses test pour A_W = -4∂Ξ/∂u dans la direction de cfg."""
        xi, af = self._load_pair(xi_path, af_path)
        aw = waveform.aw_from_xi(xi)
        trajectory = detector.integrate_train(aw, cfg)
        residual = detector.return_to_rest_residual(trajectory)
        displacement = detector.permanent_displacement(trajectory)

        positions = trajectory.positions.reshape(-1, 4)
        shifts = trajectory.displacements.reshape(-1, 4)
        velocities = trajectory.velocities.reshape(-1, 4)
        labels = ("11", "12", "21", "22")
        header = (
            ["t"]
            + [f"x_{k}" for k in labels]
            + [f"dx_{k}" for k in labels]
            + [f"v_{k}" for k in labels]
        )
        rows = (
            [float(t), *positions[k], *shifts[k], *velocities[k]]
            for k, t in enumerate(trajectory.times)
        )
        outputs = [write_csv(self._path("detector.csv"), header, rows)]

        summary = {
            "theta": cfg.theta,
            "phi": cfg.phi,
            "d0": cfg.d0,
            "r": cfg.r,
            "permanent_displacement": _matrix(displacement),
            "return_to_rest_residual": residual,
            "peak_velocity": trajectory.peak_velocity(),
        }
        if af is not None:
            summary["em_to_weyl_peak_ratio"] = self._em_peak_ratio(aw, af, cfg)
        outputs.append(write_json(self._path("detector.json"), summary))
        return self._finish("detector", outputs, summary, inputs=self._inputs(xi_path, af_path))

    @staticmethod
    def _em_peak_ratio(aw: waveform.WaveTrain, af: waveform.WaveTrain, cfg: DetectorConfig):
        """Pic de la partie électromagnétique de R₀₀ rapporté au pic du terme de Weyl."""
        aw_dir = aw.at_direction(*cfg.direction)
        af_dir = af.at_direction(*cfg.direction)
        weyl_peak = em_peak = 0.0
        for aw_k, af_k in zip(aw_dir, af_dir):
            tidal = detector.tidal_acceleration(NullFieldAmplitudes(aw=aw_k, af=af_k), cfg.r)
            weyl_peak = max(weyl_peak, tidal.weyl_norm)
            em_peak = max(em_peak, tidal.em)
        return em_peak / weyl_peak if weyl_peak > 0.0 else 0.0

    # ---------- order-check ----------

    def order_check(self, amplitudes: NullFieldAmplitudes, radii: Sequence[float]) -> RunResult:
        report = detector.em_subleading_report(amplitudes, radii)
        outputs = [write_dict_csv(self._path("order_check.csv"), report.rows())]
        slope = report.slope if np.isfinite(report.slope) else None
        summary = {"slope": slope, "radii": list(report.radii)}
        outputs.append(write_json(self._path("order_check.json"), summary))
        return self._finish("order-check", outputs, summary)

    # ---------- massloss ----------

    def massloss(self, xi_path: str, af_path: Optional[str], m_initial: float = 0.0) -> RunResult:
        """Historique de la masse de Bondi M(u) et vérification F̄/2."""
        xi, af = self._load_pair(xi_path, af_path)
        history = memory.mass_history(xi, af, m_initial)
        outputs = [
            write_csv(
                self._path("massloss.csv"),
                ["u", "dM_du", "M"],
                zip(history.times, history.rates, history.masses),
            )
        ]
        kernel_mean = memory.compute_kernel(xi, af).mean()
        summary = {
            "m_initial": m_initial,
            "total_change": history.total_change,
            "total_change_erg": history.total_change * CM_TO_ERG,
            "kernel_mean_half": 0.5 * kernel_mean,
        }
        outputs.append(write_json(self._path("massloss.json"), summary))
        return self._finish("massloss", outputs, summary, inputs=self._inputs(xi_path, af_path))

    # ---------- bns-energy ----------

    def bns_energy(
        self,
        scenario: BnsScenario,
        sweep_b0: Sequence[float] = (),
        sweep_decay: Sequence[float] = (),
    ) -> RunResult:
        report = bns.compare(scenario)
        summary = {"scenario": scenario.to_dict(), **report.to_dict()}
        outputs = [write_json(self._path("bns_energy.json"), summary)]
        if sweep_b0:
            outputs.append(
                write_dict_csv(self._path("bns_sweep_b0.csv"), bns.sweep_b0(scenario, sweep_b0))
            )
        if sweep_decay:
            outputs.append(
                write_dict_csv(
                    self._path("bns_sweep_decay.csv"), bns.sweep_decay(scenario, sweep_decay)
                )
            )
        return self._finish("bns-energy", outputs, summary)

    # ---------- validate ----------

    def validate(self, l_max: int, seed: int = 0) -> RunResult:
        """
        Exécute la suite d'invariants et écrit validation.json / validation.csv.

        Raises:
            InvariantError: si au moins une vérification échoue (après écriture)
        """
        checks = validation.run_invariant_suite(l_max, seed)
        rows = [c.to_dict() for c in checks]
        failed = [c.name for c in checks if not c.passed]
        summary = {"l_max": l_max, "seed": seed, "checks": rows, "failed": failed}
        outputs = [
            write_json(self._path("validation.json"), summary),
            write_dict_csv(self._path("validation.csv"), rows),
        ]
        result = self._finish("validate", outputs, summary)
        if failed:
            raise InvariantError(f"{len(failed)} invariant checks failed: {', '.join(failed)}")
        return result
