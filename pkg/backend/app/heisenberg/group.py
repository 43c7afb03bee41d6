# Heisenberg Group Arithmetic
# File: group.py
# Author: Transport Toolkit Team
# Date: 2026-10-02
# Purpose: Points of the Heisenberg group, group law, inverse and dilations

"""
Heisenberg group arithmetic.

A point [zeta, t] of H^n is stored in real coordinates
(xi_1..xi_n, eta_1..eta_n, t) with zeta_j = xi_j + i eta_j. The array forms
work on stacks of shape (k, 2n+1) and are what the solvers use; the scalar
forms wrap them for single points.
"""

import math
from typing import Iterable, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_serializer, model_validator

from app.core.exceptions import InvalidInputError

ArrayLike = Union[np.ndarray, Sequence[float]]


class Point(BaseModel):
    """Element of H^n in real coordinates (xi..., eta..., t)"""

    model_config = ConfigDict(frozen=True)

    coords: Tuple[float, ...]

    @model_validator(mode="before")
    @classmethod
    def _from_sequence(cls, data):
        if isinstance(data, np.ndarray):
            data = data.tolist()
        if isinstance(data, (list, tuple)):
            return {"coords": tuple(float(c) for c in data)}
        return data

    @field_validator("coords")
    @classmethod
    def _check_coords(cls, coords: Tuple[float, ...]) -> Tuple[float, ...]:
        if len(coords) < 3 or len(coords) % 2 == 0:
            raise ValueError(f"expected 2n+1 coordinates with n >= 1, got {len(coords)}")
        if not all(math.isfinite(c) for c in coords):
            raise ValueError("point coordinates must be finite")
        return coords

    @model_serializer
    def _as_list(self) -> list:
        return list(self.coords)

    @property
    def n(self) -> int:
        return (len(self.coords) - 1) // 2

    @property
    def zeta(self) -> np.ndarray:
        n = self.n
        return np.asarray(self.coords[:n]) + 1j * np.asarray(self.coords[n:2 * n])

    @property
    def t(self) -> float:
        return self.coords[-1]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    @classmethod
    def from_complex(cls, zeta: Union[complex, Iterable[complex]], t: float) -> "Point":
        z = np.atleast_1d(np.asarray(zeta, dtype=complex))
        return cls(coords=tuple(np.concatenate([z.real, z.imag, [float(t)]]).tolist()))

    @classmethod
    def from_array(cls, values: ArrayLike) -> "Point":
        return cls(coords=tuple(float(v) for v in np.asarray(values, dtype=float).ravel()))

    @classmethod
    def origin(cls, n: int = 1) -> "Point":
        return cls(coords=(0.0,) * (2 * n + 1))


def dimension_of(size: int) -> int:
    """Group index n from a coordinate count 2n+1"""
    if size < 3 or size % 2 == 0:
        raise InvalidInputError(f"coordinate count must be 2n+1 with n >= 1, got {size}")
    return (size - 1) // 2


def as_stack(points: Union[np.ndarray, Sequence[Point], Point]) -> np.ndarray:
    """Coordinates of one or many points as a float array of shape (k, 2n+1)"""
    if isinstance(points, Point):
        return points.as_array()[None, :]
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=float)
    else:
        arr = np.asarray([p.coords if isinstance(p, Point) else p for p in points], dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    dimension_of(arr.shape[-1])
    return arr


def split(coords: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Split a stack into complex zeta of shape (k, n) and t of shape (k,)"""
    n = (coords.shape[-1] - 1) // 2
    zeta = coords[..., :n] + 1j * coords[..., n:2 * n]
    return zeta, coords[..., -1]


def join(zeta: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Inverse of split"""
    return np.concatenate([zeta.real, zeta.imag, np.asarray(t)[..., None]], axis=-1)


def twist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    2 * sum_j Im(za_j * conj(zb_j)), the vertical term of the group law.

    Works on real coordinates so that twist(-a, a) is exactly zero.
    """
    n = (a.shape[-1] - 1) // 2
    xi_a, eta_a = a[..., :n], a[..., n:2 * n]
    xi_b, eta_b = b[..., :n], b[..., n:2 * n]
    return 2.0 * np.sum(eta_a * xi_b - xi_a * eta_b, axis=-1)


def mul_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Group product of broadcastable stacks"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    za, ta = split(a)
    zb, tb = split(b)
    return join(za + zb, ta + tb + twist(a, b))


def inv_arrays(a: np.ndarray) -> np.ndarray:
    return -np.asarray(a, dtype=float)


def dilate_arrays(r: Union[float, np.ndarray], a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise InvalidInputError("dilation factor must be positive")
    zeta, t = split(a)
    scale = r[..., None] if r.ndim else r
    return join(zeta * scale, t * r ** 2)


def _check_same_group(x: Point, y: Point) -> None:
    if x.n != y.n:
        raise InvalidInputError(f"points live in different groups: H^{x.n} and H^{y.n}")


def mul(x: Point, y: Point) -> Point:
    """Group product [zeta,t].[zeta',t'] = [zeta+zeta', t+t'+2 sum Im zeta_j conj(zeta'_j)]"""
    _check_same_group(x, y)
    return Point.from_array(mul_arrays(x.as_array(), y.as_array()))


def inv(x: Point) -> Point:
    return Point.from_array(-x.as_array())


def dilate(r: float, x: Point) -> Point:
    """delta_r([zeta, t]) = [r zeta, r^2 t]"""
    if not r > 0:
        raise InvalidInputError(f"dilation factor must be positive, got {r}")
    coords = x.as_array() * r
    coords[-1] = x.t * r * r
    return Point.from_array(coords)


def identity(n: int = 1) -> Point:
    return Point.origin(n)


def left_difference(x: Point, y: Point) -> Point:
    """x^{-1} . y"""
    _check_same_group(x, y)
    return Point.from_array(mul_arrays(-x.as_array(), y.as_array()))
