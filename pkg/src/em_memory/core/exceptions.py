# em_memory/src/em_memory/core/exceptions.py
"""
Hiérarchie d'exceptions de em-memory.

Chaque classe porte le code de sortie que la CLI renvoie lorsqu'elle remonte
jusqu'au point d'entrée.
"""

from ..config import EXIT_CONFIG, EXIT_INVARIANT, EXIT_IO, EXIT_RESIDUAL, EXIT_UNEXPECTED


class EmMemoryError(Exception):
    """Erreur de base du projet."""

    exit_code = EXIT_UNEXPECTED


class ConfigError(EmMemoryError, ValueError):
    """Configuration ou argument invalide (bornes, clés inconnues, JSON mal formé)."""

    exit_code = EXIT_CONFIG


class FieldIOError(EmMemoryError, OSError):
    """Lecture/écriture impossible d'un fichier de champ, de train ou de manifeste."""

    exit_code = EXIT_IO


class InvariantError(EmMemoryError):
    """Une donnée viole un invariant (train non admissible, retour au repos manqué...)."""

    exit_code = EXIT_INVARIANT


class GridMismatchError(InvariantError, ValueError):
    """Champs ou trains définis sur des grilles incompatibles."""


class ResidualError(EmMemoryError):
    """Un résidu numérique dépasse sa tolérance."""

    exit_code = EXIT_RESIDUAL

    def __init__(self, message: str, residual: float = float("nan"), tolerance: float = 0.0):
        super().__init__(message)
        self.residual = residual
        self.tolerance = tolerance
