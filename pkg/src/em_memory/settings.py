# em_memory/src/em_memory/settings.py
"""
Configuration d'exécution: fichier JSON (--config) et/ou options de ligne de commande.

Les options l'emportent sur le fichier, le fichier sur les valeurs par défaut.
Chaque valeur résolue est recopiée dans le manifeste avec sa provenance; un
conflit option/fichier garde les deux valeurs. Les clés inconnues sont refusées
à tous les niveaux (racine, scenario, pulses[], af_pulses[], amplitudes).
"""

import argparse
import json
import logging
import math
import os
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .config import (
    DEFAULT_ARM_LENGTH_CM,
    DEFAULT_DU,
    DEFAULT_L_MAX,
    DEFAULT_N_U,
    DEFAULT_ORDER_CHECK_RADII,
    DEFAULT_SOURCE_DISTANCE_CM,
    DEFAULT_U0,
    L_MAX_MAX,
    L_MAX_MIN,
    default_output_dir,
)
from .core.bns import KAPPA_MODES, resolve_kappa
from .core.exceptions import ConfigError
from .core.models import BnsScenario, DetectorConfig, NullFieldAmplitudes, PulseSpec
from .core.waveform import RetardedTimeGrid

logger = logging.getLogger(__name__)

COMMANDS = ("generate", "memory", "detector", "order-check", "massloss", "bns-energy", "validate")

_SCENARIO_KEYS = tuple(f.name for f in fields(BnsScenario))
_AMPLITUDE_KEYS = tuple(f.name for f in fields(NullFieldAmplitudes))
_PULSE_KEYS = tuple(f.name for f in fields(PulseSpec))
_PULSE_REQUIRED = ("amplitude", "center", "width")
_NESTED = {"scenario": _SCENARIO_KEYS, "amplitudes": _AMPLITUDE_KEYS}

# Impulsion par défaut de `generate`: quadrupôle électrique centré, τ = 0.5
DEFAULT_PULSE = {"amplitude": 1.0, "center": 0.0, "width": 0.5, "l": 2, "m": 0, "parity": "E"}
DEFAULT_AMPLITUDES = {
    "aw": [1.0, 0.5],
    "af": [0.8, -0.3],
    "rho": 1e-3,
    "sigma": 1e-3,
    "alpha": 1e-3,
}

# Valeurs par défaut, clés pointées pour les sections imbriquées.
DEFAULTS: Dict[str, Any] = {
    "output_dir": None,
    "l_max": DEFAULT_L_MAX,
    "seed": 0,
    "u0": DEFAULT_U0,
    "du": DEFAULT_DU,
    "n_u": DEFAULT_N_U,
    "pulses": [DEFAULT_PULSE],
    "af_pulses": [],
    "xi": None,
    "af": None,
    "d0": DEFAULT_ARM_LENGTH_CM,
    "r": DEFAULT_SOURCE_DISTANCE_CM,
    "theta": math.pi / 2.0,
    "phi": 0.0,
    "m_initial": 0.0,
    "radii": list(DEFAULT_ORDER_CHECK_RADII),
    "sweep_b0": [],
    "sweep_decay": [],
    **{f"scenario.{f.name}": f.default for f in fields(BnsScenario)},
    **{
        f"amplitudes.{f.name}": DEFAULT_AMPLITUDES.get(f.name, f.default)
        for f in fields(NullFieldAmplitudes)
    },
}

_INT_KEYS = ("l_max", "seed", "n_u")
_LIST_KEYS = ("radii", "sweep_b0", "sweep_decay")


@dataclass
class RunConfig:
    """Configuration entièrement résolue d'une sous-commande."""

    command: str
    output_dir: str
    l_max: int = DEFAULT_L_MAX
    seed: int = 0
    times: RetardedTimeGrid = field(
        default_factory=lambda: RetardedTimeGrid(DEFAULT_U0, DEFAULT_DU, DEFAULT_N_U)
    )
    pulses: List[PulseSpec] = field(default_factory=list)
    af_pulses: List[PulseSpec] = field(default_factory=list)
    xi_path: Optional[str] = None
    af_path: Optional[str] = None
    d0: float = DEFAULT_ARM_LENGTH_CM
    r: float = DEFAULT_SOURCE_DISTANCE_CM
    detector: Optional[DetectorConfig] = None
    m_initial: float = 0.0
    amplitudes: NullFieldAmplitudes = field(default_factory=NullFieldAmplitudes)
    radii: List[float] = field(default_factory=lambda: list(DEFAULT_ORDER_CHECK_RADII))
    scenario: BnsScenario = field(default_factory=BnsScenario)
    sweep_b0: List[float] = field(default_factory=list)
    sweep_decay: List[float] = field(default_factory=list)
    values: Dict[str, Any] = field(default_factory=dict)
    sources: Dict[str, str] = field(default_factory=dict)
    conflicts: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    def to_manifest(self) -> dict:
        """Valeurs résolues, provenance et conflits, tels qu'écrits dans le manifeste."""
        return {
            "command": self.command,
            "values": self.values,
            "sources": self.sources,
            "conflicts": self.conflicts,
        }


# ---------- Analyse des arguments ----------


class _Parser(argparse.ArgumentParser):
    """ArgumentParser qui lève ConfigError au lieu de quitter."""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _pulse_arg(text: str) -> dict:
    """AMP,CENTER,WIDTH[,L,M,PARITY] -> dict d'impulsion."""
    parts = [p.strip() for p in text.split(",")]
    if not 3 <= len(parts) <= 6:
        raise argparse.ArgumentTypeError(
            f"pulse must be AMP,CENTER,WIDTH[,L,M,PARITY], got {text!r}"
        )
    keys = ("amplitude", "center", "width", "l", "m", "parity")
    casts = (float, float, float, int, int, str)
    try:
        return {k: cast(v) for k, cast, v in zip(keys, casts, parts)}
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid pulse {text!r}: {e}") from None


def _kappa_arg(text: str):
    """Mode de κ (quarter, paper, published, analytic) ou nombre positif fini."""
    key = text.strip().lower()
    if key in KAPPA_MODES:
        return key
    try:
        value = float(key)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"kappa must be one of {KAPPA_MODES} or a number, got {text!r}"
        ) from None
    if not math.isfinite(value) or value <= 0.0:
        raise argparse.ArgumentTypeError(f"kappa must be positive and finite, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS: une option absente n'apparaît pas dans le Namespace
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="Fichier JSON de configuration")
    common.add_argument("--output-dir", dest="output_dir", help="Dossier de sortie")

    parser = _Parser(prog="em-memory", description="Electromagnetic memory toolkit")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, help_text):
        return sub.add_parser(
            name, parents=[common], help=help_text, argument_default=argparse.SUPPRESS
        )

    def add_trains(p):
        p.add_argument("--xi", help="Train Ξ (.emt)")
        p.add_argument("--af", help="Train A_F (.emt)")

    gen = add("generate", "Synthetic Gaussian pulse trains")
    gen.add_argument("--l-max", dest="l_max", type=int)
    gen.add_argument("--u0", type=float)
    gen.add_argument("--du", type=float)
    gen.add_argument("--n-u", dest="n_u", type=int)
    gen.add_argument("--pulse", dest="pulses", type=_pulse_arg, action="append")
    gen.add_argument("--af-pulse", dest="af_pulses", type=_pulse_arg, action="append")

    mem = add("memory", "Memory shear jump and displacement map")
    add_trains(mem)
    mem.add_argument("--d0", type=float)
    mem.add_argument("--r", type=float)

    det = add("detector", "Three-mass interferometer response")
    add_trains(det)
    det.add_argument("--theta", type=float)
    det.add_argument("--phi", type=float)
    det.add_argument("--d0", type=float)
    det.add_argument("--r", type=float)

    order = add("order-check", "EM versus Weyl tidal acceleration ratio")
    order.add_argument("--radii", type=float, nargs="+")

    mass = add("massloss", "Bondi mass history")
    add_trains(mass)
    mass.add_argument("--m-initial", dest="m_initial", type=float)

    energy = add("bns-energy", "Binary neutron star energy budget")
    energy.add_argument("--mass", dest="scenario.total_mass", type=float)
    energy.add_argument("--fraction", dest="scenario.radiated_fraction", type=float)
    energy.add_argument("--radius-km", dest="scenario.ns_radius_km", type=float)
    energy.add_argument("--b0", dest="scenario.b0", type=float)
    energy.add_argument("--dbdt", dest="scenario.dbdt", type=float)
    energy.add_argument("--merge-ms", dest="scenario.merge_time_ms", type=float)
    energy.add_argument("--kappa", dest="scenario.kappa", type=_kappa_arg)
    energy.add_argument("--decay", dest="scenario.decay_exponent", type=float)
    energy.add_argument("--sweep-b0", dest="sweep_b0", type=float, nargs="+")
    energy.add_argument("--sweep-decay", dest="sweep_decay", type=float, nargs="+")

    val = add("validate", "Run the invariant suite")
    val.add_argument("--l-max", dest="l_max", type=int)
    val.add_argument("--seed", type=int)
    return parser


# ---------- Fichier JSON ----------


def _reject_constant(path: str, name: str):
    raise ConfigError(f"{path}: non-finite number {name} is not allowed")


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Lit un fichier JSON et l'aplatit en clés pointées.

    Raises:
        ConfigError: fichier illisible, JSON mal formé (avec position en octets),
            NaN/Infinity ou clé inconnue
    """
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    try:
        text = raw.decode("utf-8")
        data = json.loads(text, parse_constant=lambda name: _reject_constant(path, name))
    except UnicodeDecodeError as e:
        raise ConfigError(f"{path}: invalid UTF-8 at byte {e.start}") from e
    except json.JSONDecodeError as e:
        offset = len(text[: e.pos].encode("utf-8"))
        raise ConfigError(f"{path}: malformed JSON at byte {offset}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top-level JSON value must be an object")
    return flatten_config(data, path)


def _reject_unknown(keys, allowed, where: str) -> None:
    unknown = sorted(set(keys) - set(allowed))
    if unknown:
        raise ConfigError(f"Unknown key(s) in {where}: {', '.join(unknown)}")


def _check_pulses(value, where: str) -> list:
    if not isinstance(value, list):
        raise ConfigError(f"{where} must be a list of pulse objects")
    for i, item in enumerate(value):
        if not isinstance(item, dict):
            raise ConfigError(f"{where}[{i}] must be an object")
        _reject_unknown(item, _PULSE_KEYS, f"{where}[{i}]")
        missing = [k for k in _PULSE_REQUIRED if k not in item]
        if missing:
            raise ConfigError(f"{where}[{i}] is missing {', '.join(missing)}")
    return value


def flatten_config(data: Dict[str, Any], source: str = "config") -> Dict[str, Any]:
    top_level = set(k for k in DEFAULTS if "." not in k) | set(_NESTED)
    _reject_unknown(data, top_level, source)
    flat: Dict[str, Any] = {}
    for key, value in data.items():
        if key in _NESTED:
            if not isinstance(value, dict):
                raise ConfigError(f"{source}: '{key}' must be an object")
            _reject_unknown(value, _NESTED[key], f"{source}:{key}")
            flat.update({f"{key}.{k}": v for k, v in value.items()})
        elif key in ("pulses", "af_pulses"):
            flat[key] = _check_pulses(value, f"{source}:{key}")
        else:
            flat[key] = value
    return flat


# ---------- Résolution ----------


def _as_int(key: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    if not math.isfinite(value) or int(value) != value:
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return int(value)


def _as_float(key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite, got {value!r}")
    return float(value)


def _float_list(key: str, value) -> List[float]:
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{key} must be a list of numbers")
    return [_as_float(key, v) for v in value]


def _pulse(entry: dict) -> PulseSpec:
    try:
        return PulseSpec(
            amplitude=_as_float("amplitude", entry["amplitude"]),
            center=_as_float("center", entry["center"]),
            width=_as_float("width", entry["width"]),
            l=_as_int("l", entry.get("l", 2)),
            m=_as_int("m", entry.get("m", 0)),
            parity=entry.get("parity", "E"),
        )
    except KeyError as e:
        raise ConfigError(f"Pulse is missing {e.args[0]}") from None


def resolve(
    file_values: Dict[str, Any], flag_values: Dict[str, Any]
) -> Tuple[Dict[str, Any], Dict[str, str], Dict[str, Dict[str, Any]]]:
    """Fusionne défauts, fichier et options; retourne (valeurs, provenances, conflits)."""
    values, sources, conflicts = {}, {}, {}
    for key, default in DEFAULTS.items():
        if key in flag_values:
            values[key], sources[key] = flag_values[key], "flag"
            if key in file_values and file_values[key] != flag_values[key]:
                conflicts[key] = {"file": file_values[key], "flag": flag_values[key]}
        elif key in file_values:
            values[key], sources[key] = file_values[key], "file"
        else:
            values[key], sources[key] = default, "default"
    if values["output_dir"] is None:
        values["output_dir"] = default_output_dir()
    return values, sources, conflicts


def _check_l_max(l_max: int) -> int:
    if not L_MAX_MIN <= l_max <= L_MAX_MAX:
        raise ConfigError(f"l_max must lie in [{L_MAX_MIN}, {L_MAX_MAX}], got {l_max}")
    return l_max


def _require_file(key: str, path: Optional[str], command: str, required: bool) -> Optional[str]:
    if path is None:
        if required:
            raise ConfigError(f"{command} needs --{key}")
        return None
    if not isinstance(path, str):
        raise ConfigError(f"{key} must be a path string, got {path!r}")
    if not os.path.isfile(path):
        raise ConfigError(f"{key} file not found: {path}")
    return path


def build_run_config(command: str, values: Dict[str, Any], sources, conflicts) -> RunConfig:
    if command not in COMMANDS:
        raise ConfigError(f"Unknown command {command!r}")
    for key in _INT_KEYS:
        values[key] = _as_int(key, values[key])
    for key in _LIST_KEYS:
        values[key] = _float_list(key, values[key])
    if not isinstance(values["output_dir"], str):
        raise ConfigError(f"output_dir must be a path string, got {values['output_dir']!r}")

    needs_trains = command in ("memory", "detector", "massloss")
    scenario_args = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("scenario.")}
    amplitude_args = {
        k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("amplitudes.")
    }
    try:
        scenario = BnsScenario(**scenario_args)
        amplitudes = NullFieldAmplitudes(**amplitude_args)
        resolve_kappa(scenario.kappa, scenario.decay_exponent)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid scenario or amplitudes: {e}") from e

    d0 = _as_float("d0", values["d0"])
    r = _as_float("r", values["r"])
    cfg = RunConfig(
        command=command,
        output_dir=values["output_dir"],
        l_max=_check_l_max(values["l_max"]),
        seed=values["seed"],
        times=RetardedTimeGrid(
            _as_float("u0", values["u0"]), _as_float("du", values["du"]), values["n_u"]
        ),
        pulses=[_pulse(p) for p in _check_pulses(values["pulses"], "pulses")],
        af_pulses=[_pulse(p) for p in _check_pulses(values["af_pulses"], "af_pulses")],
        xi_path=_require_file("xi", values["xi"], command, needs_trains),
        af_path=_require_file("af", values["af"], command, False),
        d0=d0,
        r=r,
        m_initial=_as_float("m_initial", values["m_initial"]),
        amplitudes=amplitudes,
        radii=values["radii"],
        scenario=scenario,
        sweep_b0=values["sweep_b0"],
        sweep_decay=values["sweep_decay"],
        values=values,
        sources=sources,
        conflicts=conflicts,
    )
    if command == "detector":
        cfg.detector = DetectorConfig(
            d0=d0,
            r=r,
            theta=_as_float("theta", values["theta"]),
            phi=_as_float("phi", values["phi"]),
        )
    return cfg


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """
    Construit la RunConfig d'une ligne de commande.

    Raises:
        ConfigError: option invalide, JSON mal formé, clé inconnue ou valeur hors bornes
    """
    namespace = vars(build_parser().parse_args(argv))
    command = namespace.pop("command")
    config_path = namespace.pop("config", None)
    file_values = load_config_file(config_path) if config_path else {}
    values, sources, conflicts = resolve(file_values, namespace)
    for key, both in conflicts.items():
        logger.info("Flag overrides config file for %s: %r -> %r", key, both["file"], both["flag"])
    return build_run_config(command, values, sources, conflicts)
