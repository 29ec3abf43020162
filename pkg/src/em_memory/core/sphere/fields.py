# em_memory/src/em_memory/core/sphere/fields.py
"""
Champs échantillonnés sur une SphereGrid et leurs coefficients spectraux.

Les tableaux sont copiés puis figés (lecture seule) à la construction: un champ
ou un jeu de coefficients est immuable.
"""

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import ClassVar, Mapping, Tuple

import numpy as np

from ..exceptions import ConfigError, GridMismatchError, InvariantError
from .grid import SphereGrid


class FieldKind(IntEnum):
    """Étiquette de type utilisée par le format binaire."""

    SCALAR = 0
    VECTOR = 1
    STF = 2


class Parity(str, Enum):
    """Parité des harmoniques vectorielles/tensorielles."""

    ELECTRIC = "E"
    MAGNETIC = "B"

    @classmethod
    def parse(cls, value) -> "Parity":
        if isinstance(value, Parity):
            return value
        key = str(value).strip().upper()
        if key in ("E", "ELECTRIC"):
            return cls.ELECTRIC
        if key in ("B", "MAGNETIC"):
            return cls.MAGNETIC
        raise ConfigError(f"Unknown parity {value!r} (expected E or B)")


def _frozen(array) -> np.ndarray:
    arr = np.array(array, dtype=np.float64)
    arr.setflags(write=False)
    return arr


# ======================================================================
# --- Champs échantillonnés ---
# ======================================================================


@dataclass(frozen=True, eq=False)
class _SampledField:
    grid: SphereGrid
    data: np.ndarray

    kind: ClassVar[FieldKind]
    n_components: ClassVar[int] = 0
    norm_factor: ClassVar[float] = 1.0

    def __post_init__(self):
        arr = _frozen(self.data)
        leading = (self.n_components,) if self.n_components else ()
        expected = (*leading, *self.grid.shape)
        if arr.shape != expected:
            raise GridMismatchError(
                f"{type(self).__name__} expects shape {expected}, got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise InvariantError(f"{type(self).__name__} contains non-finite samples")
        object.__setattr__(self, "data", arr)

    @classmethod
    def zeros(cls, grid: SphereGrid):
        leading = (cls.n_components,) if cls.n_components else ()
        return cls(grid, np.zeros((*leading, *grid.shape)))

    def _check_compatible(self, other) -> None:
        if type(other) is not type(self):
            raise GridMismatchError(
                f"Cannot combine {type(self).__name__} with {type(other).__name__}"
            )
        if other.grid != self.grid:
            raise GridMismatchError(f"Grid mismatch: {self.grid} vs {other.grid}")

    def __add__(self, other):
        self._check_compatible(other)
        return type(self)(self.grid, self.data + other.data)

    def __sub__(self, other):
        self._check_compatible(other)
        return type(self)(self.grid, self.data - other.data)

    def __neg__(self):
        return type(self)(self.grid, -self.data)

    def __mul__(self, factor: float):
        return type(self)(self.grid, float(factor) * self.data)

    __rmul__ = __mul__

    def __truediv__(self, factor: float):
        return type(self)(self.grid, self.data / float(factor))

    def pointwise_norm_sq(self) -> np.ndarray:
        """|f|² en chaque nœud (avec la contraction complète pour les tenseurs)."""
        if self.n_components:
            return self.norm_factor * np.sum(self.data**2, axis=0)
        return self.data**2

    def inner(self, other) -> float:
        """Produit scalaire L² par quadrature."""
        self._check_compatible(other)
        prod = self.data * other.data
        if self.n_components:
            prod = self.norm_factor * np.sum(prod, axis=0)
        return float(self.grid.integrate(prod))

    def l2_norm(self) -> float:
        return float(np.sqrt(self.grid.integrate(self.pointwise_norm_sq())))

    def max_norm(self) -> float:
        return float(np.sqrt(np.max(self.pointwise_norm_sq())))

    def rolled(self, shift: int):
        """Rotation φ -> φ + 2π·shift/n_phi (les composantes de repère sont invariantes)."""
        return type(self)(self.grid, np.roll(self.data, shift, axis=-1))


@dataclass(frozen=True, eq=False)
class ScalarField(_SampledField):
    """Champ scalaire réel, valeurs [n_theta, n_phi]."""

    kind: ClassVar[FieldKind] = FieldKind.SCALAR

    @property
    def values(self) -> np.ndarray:
        return self.data

    def mean(self) -> float:
        return float(self.grid.integrate(self.data)) / (4.0 * np.pi)


@dataclass(frozen=True, eq=False)
class TangentVectorField(_SampledField):
    """Champ vectoriel tangent, composantes (v_θ, v_φ) dans le repère orthonormé."""

    kind: ClassVar[FieldKind] = FieldKind.VECTOR
    n_components: ClassVar[int] = 2

    @property
    def components(self) -> np.ndarray:
        return self.data


@dataclass(frozen=True, eq=False)
class STFTensorField(_SampledField):
    """
    Tenseur symétrique sans trace, composantes (T11, T12) dans le repère orthonormé.

    T22 = -T11 et T21 = T12 sont implicites; |T|² = T_AB T^AB = 2(T11² + T12²).
    """

    kind: ClassVar[FieldKind] = FieldKind.STF
    n_components: ClassVar[int] = 2
    norm_factor: ClassVar[float] = 2.0

    @property
    def components(self) -> np.ndarray:
        return self.data


FIELD_TYPES = {cls.kind: cls for cls in (ScalarField, TangentVectorField, STFTensorField)}


# ======================================================================
# --- Coefficients spectraux ---
# ======================================================================


def _check_triangle(l_max: int, array: np.ndarray, l_min: int, name: str) -> np.ndarray:
    arr = _frozen(array)
    expected = (l_max + 1, 2 * l_max + 1)
    if arr.shape != expected:
        raise ConfigError(f"{name} expects shape {expected}, got {arr.shape}")
    ell = np.arange(l_max + 1)[:, None]
    m = np.arange(-l_max, l_max + 1)[None, :]
    outside = (np.abs(m) > ell) | (ell < l_min)
    if np.any(arr[outside] != 0.0):
        raise ConfigError(f"{name} has non-zero entries outside l >= {l_min}, |m| <= l")
    if not np.all(np.isfinite(arr)):
        raise InvariantError(f"{name} contains non-finite coefficients")
    return arr


def _check_mode(l_max: int, l: int, m: int, l_min: int) -> None:
    if not (l_min <= l <= l_max and -l <= m <= l):
        raise ConfigError(f"Mode (l={l}, m={m}) outside {l_min} <= l <= {l_max}, |m| <= l")


def _pad(array: np.ndarray, l_max: int, new_l_max: int) -> np.ndarray:
    if new_l_max < l_max:
        raise ConfigError(f"Cannot pad coefficients from l_max={l_max} down to {new_l_max}")
    out = np.zeros((new_l_max + 1, 2 * new_l_max + 1))
    shift = new_l_max - l_max
    out[: l_max + 1, shift : shift + 2 * l_max + 1] = array
    return out


@dataclass(frozen=True, eq=False)
class ScalarCoeffs:
    """Coefficients a_lm dans la base réelle orthonormée; values[l, m + l_max]."""

    l_max: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _check_triangle(self.l_max, self.values, 0, "a_lm"))

    @classmethod
    def zeros(cls, l_max: int) -> "ScalarCoeffs":
        return cls(l_max, np.zeros((l_max + 1, 2 * l_max + 1)))

    @classmethod
    def from_modes(cls, l_max: int, modes: Mapping[Tuple[int, int], float]) -> "ScalarCoeffs":
        values = np.zeros((l_max + 1, 2 * l_max + 1))
        for (l, m), value in modes.items():
            _check_mode(l_max, l, m, 0)
            values[l, m + l_max] = value
        return cls(l_max, values)

    def __getitem__(self, lm: Tuple[int, int]) -> float:
        l, m = lm
        _check_mode(self.l_max, l, m, 0)
        return float(self.values[l, m + self.l_max])

    def norm_sq(self) -> float:
        return float(np.sum(self.values**2))

    def padded(self, l_max: int) -> "ScalarCoeffs":
        return ScalarCoeffs(l_max, _pad(self.values, self.l_max, l_max))

    def band(self, l_min: int = 0, l_top: int = None) -> "ScalarCoeffs":
        """Copie ne gardant que l_min <= l <= l_top."""
        l_top = self.l_max if l_top is None else l_top
        values = np.array(self.values)
        values[:l_min] = 0.0
        values[l_top + 1 :] = 0.0
        return ScalarCoeffs(self.l_max, values)


@dataclass(frozen=True, eq=False)
class _ParityCoeffs:
    l_max: int
    electric: np.ndarray
    magnetic: np.ndarray

    l_min: ClassVar[int] = 1

    def __post_init__(self):
        for name in ("electric", "magnetic"):
            arr = _check_triangle(self.l_max, getattr(self, name), self.l_min, name)
            object.__setattr__(self, name, arr)

    @classmethod
    def zeros(cls, l_max: int):
        empty = np.zeros((l_max + 1, 2 * l_max + 1))
        return cls(l_max, empty, empty)

    @classmethod
    def from_modes(cls, l_max: int, modes: Mapping[Tuple[int, int, object], float]):
        arrays = {
            Parity.ELECTRIC: np.zeros((l_max + 1, 2 * l_max + 1)),
            Parity.MAGNETIC: np.zeros((l_max + 1, 2 * l_max + 1)),
        }
        for (l, m, parity), value in modes.items():
            _check_mode(l_max, l, m, cls.l_min)
            arrays[Parity.parse(parity)][l, m + l_max] = value
        return cls(l_max, arrays[Parity.ELECTRIC], arrays[Parity.MAGNETIC])

    def coefficient(self, l: int, m: int, parity) -> float:
        _check_mode(self.l_max, l, m, self.l_min)
        source = self.electric if Parity.parse(parity) is Parity.ELECTRIC else self.magnetic
        return float(source[l, m + self.l_max])

    def __getitem__(self, key) -> float:
        return self.coefficient(*key)

    def norm_sq(self) -> float:
        return float(np.sum(self.electric**2) + np.sum(self.magnetic**2))

    def padded(self, l_max: int):
        return type(self)(
            l_max,
            _pad(self.electric, self.l_max, l_max),
            _pad(self.magnetic, self.l_max, l_max),
        )


@dataclass(frozen=True, eq=False)
class VectorCoeffs(_ParityCoeffs):
    """Coefficients des harmoniques vectorielles unitaires ∇Y/‖∇Y‖ (E) et ε∇Y/‖∇Y‖ (B), l >= 1."""

    l_min: ClassVar[int] = 1


@dataclass(frozen=True, eq=False)
class TensorCoeffs(_ParityCoeffs):
    """Coefficients c^E_lm, c^B_lm des harmoniques tensorielles STF unitaires, l >= 2."""

    l_min: ClassVar[int] = 2
