# em_memory/src/em_memory/core/file_utils.py
"""
Opérations sur le système de fichiers: formats binaires des champs et des trains,
JSON, CSV et manifestes de reproductibilité.

Champ (little-endian):  b"EMM1" | kind, l_max, n_theta, n_phi (int32) | float64 ligne par ligne
Train (little-endian):  b"EMT1" | kind (int64), u0, du (float64), n_u (int64) | n_u champs

La grille n'est jamais stockée: elle est régénérée depuis l'en-tête.
"""

import csv
import hashlib
import json
import logging
import os
import platform
import struct
from typing import Dict, Iterable, List, Sequence

import numpy as np
import scipy

from ..config import FIELD_MAGIC, MANIFEST_NAME, TRAIN_MAGIC
from .exceptions import FieldIOError
from .sphere import FIELD_TYPES, FieldKind, make_grid
from .waveform import RetardedTimeGrid, TrainKind, WaveTrain

logger = logging.getLogger(__name__)

_FIELD_HEADER = struct.Struct("<iiii")
_TRAIN_HEADER = struct.Struct("<qddq")
_FLOAT = np.dtype("<f8")
_CSV_FORMAT = ".17g"


# ---------- Champs ----------


def _field_record(kind: FieldKind, grid, data: np.ndarray) -> bytes:
    header = _FIELD_HEADER.pack(int(kind), grid.l_max, grid.n_theta, grid.n_phi)
    return FIELD_MAGIC + header + np.ascontiguousarray(data, dtype=_FLOAT).tobytes()


def _parse_field_record(buffer: bytes, offset: int, source: str):
    """Lit un enregistrement champ à offset; retourne (champ, offset suivant)."""
    end_magic = offset + len(FIELD_MAGIC)
    if buffer[offset:end_magic] != FIELD_MAGIC:
        raise FieldIOError(f"{source}: bad field magic at byte {offset}")
    try:
        kind_tag, l_max, n_theta, n_phi = _FIELD_HEADER.unpack_from(buffer, end_magic)
        kind = FieldKind(kind_tag)
        grid = make_grid(l_max, n_theta, n_phi)
    except (struct.error, ValueError) as e:
        raise FieldIOError(f"{source}: invalid field header at byte {offset}: {e}") from e
    cls = FIELD_TYPES[kind]
    shape = ((cls.n_components,) if cls.n_components else ()) + grid.shape
    start = end_magic + _FIELD_HEADER.size
    stop = start + int(np.prod(shape)) * _FLOAT.itemsize
    if stop > len(buffer):
        raise FieldIOError(f"{source}: truncated field payload at byte {start}")
    data = np.frombuffer(buffer, dtype=_FLOAT, count=int(np.prod(shape)), offset=start)
    return cls(grid, data.reshape(shape)), stop


def _read_bytes(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as e:
        raise FieldIOError(f"Cannot read {path}: {e}") from e


def _write_bytes(path: str, payload: bytes) -> None:
    try:
        folder = os.path.dirname(path)
        if folder:
            os.makedirs(folder, exist_ok=True)
        with open(path, "wb") as fh:
            fh.write(payload)
    except OSError as e:
        raise FieldIOError(f"Cannot write {path}: {e}") from e


def write_field(path: str, field) -> str:
    """Écrit un ScalarField, TangentVectorField ou STFTensorField."""
    _write_bytes(path, _field_record(field.kind, field.grid, field.data))
    logger.debug("Wrote %s field to %s", field.kind.name, path)
    return path


def read_field(path: str):
    buffer = _read_bytes(path)
    field, stop = _parse_field_record(buffer, 0, path)
    if stop != len(buffer):
        raise FieldIOError(f"{path}: {len(buffer) - stop} trailing bytes after field record")
    return field


# ---------- Trains ----------


def write_train(path: str, train: WaveTrain) -> str:
    field_kind = train.kind.field_kind
    parts = [
        TRAIN_MAGIC,
        _TRAIN_HEADER.pack(int(train.kind), train.times.u0, train.times.du, train.times.n_u),
    ]
    parts.extend(_field_record(field_kind, train.grid, sample) for sample in train.data)
    _write_bytes(path, b"".join(parts))
    logger.debug("Wrote %s train (%d samples) to %s", train.kind.name, train.n_u, path)
    return path


def read_train(path: str) -> WaveTrain:
    """
    Relit un train.

    Raises:
        FieldIOError: fichier illisible, en-tête invalide ou enregistrements incohérents
    """
    buffer = _read_bytes(path)
    if buffer[: len(TRAIN_MAGIC)] != TRAIN_MAGIC:
        raise FieldIOError(f"{path}: not a wave train file (bad magic)")
    try:
        kind_tag, u0, du, n_u = _TRAIN_HEADER.unpack_from(buffer, len(TRAIN_MAGIC))
        kind = TrainKind(kind_tag)
        times = RetardedTimeGrid(u0, du, n_u)
    except (struct.error, ValueError) as e:
        raise FieldIOError(f"{path}: invalid train header: {e}") from e

    offset = len(TRAIN_MAGIC) + _TRAIN_HEADER.size
    samples = []
    for _ in range(times.n_u):
        field, offset = _parse_field_record(buffer, offset, path)
        if field.kind != kind.field_kind:
            raise FieldIOError(f"{path}: {field.kind.name} record inside {kind.name} train")
        samples.append(field)
    if offset != len(buffer):
        raise FieldIOError(f"{path}: {len(buffer) - offset} trailing bytes after train")
    try:
        return WaveTrain.from_samples(kind, times, samples)
    except ValueError as e:
        raise FieldIOError(f"{path}: inconsistent train records: {e}") from e


# ---------- JSON / CSV ----------


def _finite_or_null(value):
    """Remplace récursivement NaN et ±inf par None (JSON strict)."""
    if isinstance(value, dict):
        return {key: _finite_or_null(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite_or_null(item) for item in value]
    if isinstance(value, (float, np.floating)) and not np.isfinite(value):
        return None
    return value


def write_json(path: str, payload) -> str:
    """
    JSON trié et indenté: deux écritures du même contenu sont identiques octet à octet.

    Les nombres non finis sont écrits null.
    """
    text = json.dumps(_finite_or_null(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"
    _write_bytes(path, text.encode("utf-8"))
    return path


def _format_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), _CSV_FORMAT)
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    try:
        folder = os.path.dirname(path)
        if folder:
            os.makedirs(folder, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_format_cell(v) for v in row])
    except OSError as e:
        raise FieldIOError(f"Cannot write {path}: {e}") from e
    logger.debug("Wrote CSV %s", path)
    return path


def write_dict_csv(path: str, rows: List[dict]) -> str:
    header = list(rows[0].keys()) if rows else []
    return write_csv(path, header, ([row[k] for k in header] for row in rows))


# ---------- Manifestes ----------


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 20), b""):
                digest.update(chunk)
    except OSError as e:
        raise FieldIOError(f"Cannot checksum {path}: {e}") from e
    return digest.hexdigest()


def _relative(path: str, root: str) -> str:
    return os.path.relpath(path, root).replace(os.sep, "/")


def library_versions() -> Dict[str, str]:
    from .. import __version__

    return {
        "em_memory": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
        "scipy": scipy.__version__,
    }


def write_manifest(
    output_dir: str,
    command: str,
    config: dict,
    inputs: Sequence[str] = (),
    outputs: Sequence[str] = (),
) -> str:
    """
    Écrit output_dir/manifest.json: configuration résolue, sommes SHA-256 des
    entrées et sorties (chemins relatifs) et versions. Pas d'horodatage.
    """
    manifest = {
        "command": command,
        "config": config,
        "inputs": {_relative(p, output_dir): sha256_file(p) for p in inputs},
        "outputs": {_relative(p, output_dir): sha256_file(p) for p in outputs},
        "versions": library_versions(),
    }
    path = os.path.join(output_dir, MANIFEST_NAME)
    write_json(path, manifest)
    logger.info("Manifest written to %s (%d outputs)", path, len(outputs))
    return path
