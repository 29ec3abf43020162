# em_memory/src/em_memory/config.py
"""
Configuration et constantes pour em-memory
"""

import os

# ---------- Sphère ----------
L_MAX_MIN = 2
L_MAX_MAX = 256
DEFAULT_L_MAX = 8

# ---------- Tolérances ----------
ROUND_TRIP_TOL = 1e-9
POISSON_RESIDUAL_TOL = 1e-8
MEMORY_RESIDUAL_TOL = 1e-6
RETURN_TO_REST_TOL = 1e-6
TRAIN_TAIL_TOL = 1e-6  # |Ξ| aux extrémités / pic
PULSE_SUPPORT_WIDTHS = 6.0  # u_c ± 6τ
D0_OVER_R_WARN = 1e-3
NEGATIVE_KERNEL_TOL = 1e-12

# ---------- Constantes physiques (cgs) ----------
SOLAR_MASS_ERG = 1.78e54
KM_TO_CM = 1.0e5
SPEED_OF_LIGHT_CGS = 2.99792458e10
GRAVITATIONAL_CONSTANT_CGS = 6.674e-8
# masse géométrique (cm) -> énergie (erg)
CM_TO_ERG = SPEED_OF_LIGHT_CGS**4 / GRAVITATIONAL_CONSTANT_CGS

# ---------- Fusions d'étoiles à neutrons ----------
DEFAULT_TOTAL_MASS = 2.0  # masses solaires
DEFAULT_RADIATED_FRACTION = 0.01
DEFAULT_NS_RADIUS_KM = 10.0
DEFAULT_DECAY_EXPONENT = 2.5
QUARTER_KAPPA = 0.25
# Calibré sur 4.78e49 erg pour B0 = 1e13 G, dB/dt = 1e13 G/ms, T = 1000 ms, R = 10 km
PUBLISHED_KAPPA = 4.78e49 / (
    (1.0e13 + 1.0e13 * 1000.0) ** 2 * (DEFAULT_NS_RADIUS_KM * KM_TO_CM) ** 3
)
BH_REFERENCE_FRACTION = 0.04

# ---------- Détecteur ----------
DEFAULT_ARM_LENGTH_CM = 4.0e5
DEFAULT_SOURCE_DISTANCE_CM = 1.23e26  # ~40 Mpc
DEFAULT_ORDER_CHECK_RADII = (1.0e20, 1.0e21, 1.0e22)

# ---------- Grille en temps retardé par défaut ----------
DEFAULT_U0 = -6.0
DEFAULT_DU = 0.01
DEFAULT_N_U = 1201

# ---------- Formats de fichiers ----------
FIELD_MAGIC = b"EMM1"
TRAIN_MAGIC = b"EMT1"
FIELD_SUFFIX = ".emm"
TRAIN_SUFFIX = ".emt"
MANIFEST_NAME = "manifest.json"

# ---------- Configuration logging ----------
LOG_SUBDIR = "logs"
LOG_FILENAME = "em_memory.log"
LOG_MAX_BYTES = 5 * 1024 * 1024  # 5MB
LOG_BACKUP_COUNT = 5
LOG_ENCODING = "utf-8"

# ---------- Variables d'environnement ----------
OUTPUT_DIR_ENV_VAR = "EMM_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "emm_output"

# ---------- Codes de sortie ----------
EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_INVARIANT = 4
EXIT_RESIDUAL = 5


def default_output_dir() -> str:
    """Dossier de sortie par défaut (surchargé par EMM_OUTPUT_DIR)."""
    return os.getenv(OUTPUT_DIR_ENV_VAR) or DEFAULT_OUTPUT_DIR


# ---------- Initialisation des dossiers ----------
def ensure_directories(output_dir: str) -> str:
    """Crée le dossier de sortie et son sous-dossier de logs s'ils n'existent pas."""
    os.makedirs(output_dir, exist_ok=True)
    log_dir = os.path.join(output_dir, LOG_SUBDIR)
    os.makedirs(log_dir, exist_ok=True)
    return log_dir
