# tests/conftest.py
"""
Configuration globale pour pytest.

Fournit des fixtures réutilisables pour tous les tests.
"""

import numpy as np
import pytest

from em_memory.core.models import PulseSpec
from em_memory.core.sphere import make_grid
from em_memory.core.waveform import RetardedTimeGrid


@pytest.fixture
def grid4():
    """Grille de bande limite 4."""
    return make_grid(4)


@pytest.fixture
def grid8():
    """Grille de bande limite 8."""
    return make_grid(8)


@pytest.fixture
def rng():
    """Générateur aléatoire à seed fixe."""
    return np.random.default_rng(20240607)


@pytest.fixture
def u_grid():
    """Grille en temps retardé u ∈ [-6, 6], du = 0.05."""
    return RetardedTimeGrid(-6.0, 0.05, 241)


@pytest.fixture
def quadrupole_pulse():
    """Impulsion Ξ électrique (2, 0) centrée, τ = 0.5."""
    return PulseSpec(amplitude=1.0, center=0.0, width=0.5, l=2, m=0)


@pytest.fixture
def output_dir(tmp_path):
    """Dossier de sortie temporaire."""
    return str(tmp_path / "out")


@pytest.fixture
def train_files(tmp_path):
    """Fichiers xi.emt / af.emt produits par `generate` sur une petite grille."""
    from em_memory.core.pipeline_service import PipelineService

    folder = str(tmp_path / "trains")
    service = PipelineService(folder)
    service.generate(
        l_max=4,
        times=RetardedTimeGrid(-6.0, 0.05, 241),
        pulses=[PulseSpec(1.0, 0.0, 0.5, 2, 1), PulseSpec(0.3, 0.5, 0.6, 3, -2, "B")],
        af_pulses=[PulseSpec(0.5, -0.2, 0.5, 1, 0)],
    )
    return {
        "xi": str(tmp_path / "trains" / "xi.emt"),
        "af": str(tmp_path / "trains" / "af.emt"),
        "aw": str(tmp_path / "trains" / "aw.emt"),
    }
