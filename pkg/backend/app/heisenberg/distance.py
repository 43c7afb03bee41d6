# Carnot-Caratheodory Distance
# File: distance.py
# Author: Transport Toolkit Team
# Date: 2026-10-03
# Purpose: CC distance, Omega membership, distance gradients and horizontal derivatives

import math
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.config import settings
from app.core.exceptions import CenterLineError
from app.heisenberg.geodesics import chi_modulus, log_geodesic, solve_twist, solve_twist_arrays
from app.heisenberg.group import Point, as_stack, left_difference, mul, mul_arrays, split

# Pairs per vectorised block in distance_matrix
_BLOCK = 500_000


def cc_norm_arrays(coords: np.ndarray) -> np.ndarray:
    """d(0, z) for every row z of a stack"""
    zeta, t = split(as_stack(coords))
    a = np.linalg.norm(zeta, axis=-1)
    center = a <= settings.OMEGA_TOLERANCE
    safe_a = np.where(center, 1.0, a)
    phi = solve_twist_arrays(np.where(center, 0.0, t / safe_a ** 2))
    return np.where(center, np.sqrt(math.pi * np.abs(t)), chi_modulus(a, t, phi))


def cc_distance(x: Point, y: Point) -> float:
    """
    Carnot-Caratheodory distance d(x, y).

    Equals |chi| of the curve from x to y on Omega and sqrt(pi |t|) when
    x^{-1} y = [0, t].
    """
    rel = left_difference(x, y)
    if not np.any(rel.as_array()):
        return 0.0
    a = float(np.linalg.norm(rel.zeta))
    if a <= settings.OMEGA_TOLERANCE:
        return math.sqrt(math.pi * abs(rel.t))
    phi = solve_twist(rel.t / (a * a))
    return float(chi_modulus(np.array(a), np.array(rel.t), np.array(phi)))


def distances_from(x: Union[Point, np.ndarray], ys: Union[np.ndarray, Sequence[Point]]) -> np.ndarray:
    """d(x, y_k) for every row y_k"""
    base = as_stack(x)[0]
    return cc_norm_arrays(mul_arrays(-base, as_stack(ys)))


def distance_matrix(xs: Union[np.ndarray, Sequence[Point]], ys: Union[np.ndarray, Sequence[Point]]) -> np.ndarray:
    """Matrix D[i, j] = d(x_i, y_j)"""
    xs = as_stack(xs)
    ys = as_stack(ys)
    out = np.empty((xs.shape[0], ys.shape[0]))
    rows = max(1, _BLOCK // max(1, ys.shape[0]))
    for start in range(0, xs.shape[0], rows):
        block = xs[start:start + rows]
        rel = mul_arrays(-block[:, None, :], ys[None, :, :])
        out[start:start + rows] = cc_norm_arrays(rel.reshape(-1, xs.shape[1])).reshape(block.shape[0], ys.shape[0])
    return out


def is_in_omega(x: Point, y: Point) -> bool:
    """True iff the zeta-part of x^{-1} y is nonzero beyond OMEGA_TOLERANCE"""
    return float(np.linalg.norm(left_difference(x, y).zeta)) > settings.OMEGA_TOLERANCE


def grad_distance(x: Point, y: Point) -> Tuple[np.ndarray, float]:
    """
    Horizontal gradient and vertical derivative of d_y = d(., y) at x.

    Args:
        x: Evaluation point, off the center line through y
        y: Base point of the distance function

    Returns:
        (grad_H d_y(x) as a complex vector of length n, d/dt d_y(x))

    Raises:
        CenterLineError: if x lies on L_y
    """
    if not is_in_omega(y, x):
        raise CenterLineError("d_y is not differentiable on the center line through y")
    params = log_geodesic(left_difference(y, x))
    length = params.length
    horizontal = params.chi / length * np.exp(-1j * params.phi)
    return horizontal, params.phi / (4.0 * length)


def horizontal_derivatives(
    func: Callable[[Point], float],
    x: Point,
    step: Optional[float] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Central differences of func along the left-invariant fields X_j, Y_j at x.

    X_j f(x) ~ (f(x.[h e_j, 0]) - f(x.[-h e_j, 0])) / 2h, and Y_j uses i h e_j.
    """
    h = settings.FD_STEP if step is None else step
    n = x.n
    xs = np.empty(n)
    ys = np.empty(n)
    for j in range(n):
        e = np.zeros(n, dtype=complex)
        e[j] = h
        xs[j] = (func(mul(x, Point.from_complex(e, 0.0))) - func(mul(x, Point.from_complex(-e, 0.0)))) / (2.0 * h)
        e[j] = 1j * h
        ys[j] = (func(mul(x, Point.from_complex(e, 0.0))) - func(mul(x, Point.from_complex(-e, 0.0)))) / (2.0 * h)
    return xs, ys
