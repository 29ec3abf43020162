# em_memory/src/em_memory/cli.py
"""
Logique pour le mode ligne de commande.

Utilise PipelineService pour exécuter chaque sous-commande et convertit les
exceptions du projet en codes de sortie.
"""

import logging

from .config import EXIT_OK, EXIT_UNEXPECTED
from .core.exceptions import EmMemoryError
from .core.models import RunResult
from .core.pipeline_service import PipelineService
from .settings import RunConfig

logger = logging.getLogger(__name__)


def dispatch(config: RunConfig) -> RunResult:
    """Appelle la méthode du service correspondant à config.command."""
    service = PipelineService(config.output_dir, echo=config.to_manifest())
    command = config.command
    if command == "generate":
        return service.generate(config.l_max, config.times, config.pulses, config.af_pulses)
    if command == "memory":
        return service.memory(config.xi_path, config.af_path, config.d0, config.r)
    if command == "detector":
        return service.detector(config.xi_path, config.af_path, config.detector)
    if command == "order-check":
        return service.order_check(config.amplitudes, config.radii)
    if command == "massloss":
        return service.massloss(config.xi_path, config.af_path, config.m_initial)
    if command == "bns-energy":
        return service.bns_energy(config.scenario, config.sweep_b0, config.sweep_decay)
    if command == "validate":
        return service.validate(config.l_max, config.seed)
    raise ValueError(f"Unknown command {command!r}")


def print_run_summary(result: RunResult):
    """Affiche un résumé de l'exécution."""
    print(f"\n=== em-memory {result.command} ===")
    for key, value in result.summary.items():
        if key == "checks":
            continue
        print(f"  {key}: {value}")
    print(f"Fichiers écrits: {len(result.outputs)}")
    if result.manifest:
        print(f"Manifeste: {result.manifest}")


def run(config: RunConfig) -> int:
    """Exécute une sous-commande; retourne le code de sortie."""
    logger.info("CLI mode - command %s, output %s", config.command, config.output_dir)
    try:
        result = dispatch(config)
    except EmMemoryError as e:
        logger.exception("%s failed: %s", config.command, e)
        return e.exit_code
    except Exception:
        logger.exception("Unexpected error in %s", config.command)
        return EXIT_UNEXPECTED
    print_run_summary(result)
    return EXIT_OK
