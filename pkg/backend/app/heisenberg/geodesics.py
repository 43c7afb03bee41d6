# Minimal Curves
# File: geodesics.py
# Author: Transport Toolkit Team
# Date: 2026-10-03
# Purpose: Exponential and logarithm maps of minimal curves, curve selection and evaluation

"""
Minimal curves of H^n.

Curves from the origin are parameterised by (chi, phi) with chi in C^n \\ {0}
and phi in [-2pi, 2pi]:

    sigma(s) = [ i (e^{-i phi s} - 1) chi / phi,  2 |chi|^2 (phi s - sin(phi s)) / phi^2 ]

The endpoint map is inverted through the scalar equation

    t / |zeta|^2 = (phi - sin phi) / (1 - cos phi) =: g(phi)

whose right-hand side is odd and strictly increasing on (-2pi, 2pi). The scalar
path uses scipy's Brent solver; the array path runs a bracketed Newton
iteration that falls back to bisection whenever a step leaves the bracket.
"""

import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy.optimize import brentq

from app.core.config import settings
from app.core.exceptions import CenterLineError, InvalidInputError, SolverError
from app.heisenberg.group import Point, as_stack, join, left_difference, mul, mul_arrays, split

TWO_PI = 2.0 * math.pi


class GeodesicParam(BaseModel):
    """Parameters (chi, phi) of a minimal curve leaving the origin"""

    model_config = ConfigDict(frozen=True)

    chi_re: Tuple[float, ...]
    chi_im: Tuple[float, ...]
    phi: float

    @field_validator("phi")
    @classmethod
    def _check_phi(cls, phi: float) -> float:
        if not math.isfinite(phi) or abs(phi) > TWO_PI + 1e-12:
            raise ValueError(f"phi must lie in [-2pi, 2pi], got {phi}")
        return phi

    @model_validator(mode="after")
    def _check_chi(self) -> "GeodesicParam":
        if len(self.chi_re) != len(self.chi_im) or not self.chi_re:
            raise ValueError("chi real and imaginary parts must have the same positive length")
        if not self.length > 0:
            raise ValueError("chi must be nonzero for a non-trivial curve")
        return self

    @property
    def n(self) -> int:
        return len(self.chi_re)

    @property
    def chi(self) -> np.ndarray:
        return np.asarray(self.chi_re) + 1j * np.asarray(self.chi_im)

    @property
    def length(self) -> float:
        return float(math.hypot(*self.chi_re, *self.chi_im))

    @classmethod
    def from_complex(cls, chi: Union[complex, Sequence[complex], np.ndarray], phi: float) -> "GeodesicParam":
        c = np.atleast_1d(np.asarray(chi, dtype=complex))
        return cls(chi_re=tuple(c.real.tolist()), chi_im=tuple(c.imag.tolist()), phi=float(phi))


class MinimalCurve(BaseModel):
    """Minimal curve from base to end, left-translated from the origin"""

    model_config = ConfigDict(frozen=True)

    base: Point
    end: Point
    params: Optional[GeodesicParam] = None
    degenerate: bool = False
    canonical_selection: bool = False

    @model_validator(mode="after")
    def _check_consistency(self) -> "MinimalCurve":
        if self.degenerate != (self.params is None):
            raise ValueError("a curve is degenerate exactly when it has no parameters")
        return self

    @property
    def length(self) -> float:
        return 0.0 if self.params is None else self.params.length


# ---------------------------------------------------------------------------
# Forward map
# ---------------------------------------------------------------------------

def _horizontal_factor(phi: np.ndarray, s: np.ndarray) -> np.ndarray:
    """i (e^{-i phi s} - 1) / phi, with its Taylor polynomial near phi = 0"""
    u = phi * s
    small = np.abs(phi) < settings.SMALL_PHI_THRESHOLD
    safe_phi = np.where(small, 1.0, phi)
    closed = 1j * (np.exp(-1j * u) - 1.0) / safe_phi
    series = s * (1.0 - 0.5j * u - u ** 2 / 6.0 + 1j * u ** 3 / 24.0 + u ** 4 / 120.0)
    return np.where(small, series, closed)


def _vertical_factor(phi: np.ndarray, s: np.ndarray) -> np.ndarray:
    """(phi s - sin(phi s)) / phi^2, with its Taylor polynomial near phi = 0"""
    u = phi * s
    small = np.abs(phi) < settings.SMALL_PHI_THRESHOLD
    safe_phi = np.where(small, 1.0, phi)
    closed = (u - np.sin(u)) / safe_phi ** 2
    series = s ** 2 * (u / 6.0 - u ** 3 / 120.0)
    return np.where(small, series, closed)


def exp_geodesic_arrays(chi: np.ndarray, phi: np.ndarray, s: Union[float, np.ndarray]) -> np.ndarray:
    """
    Evaluate sigma_{chi,phi}(s) for stacks of parameters.

    Args:
        chi: Complex array of shape (k, n)
        phi: Real array of shape (k,)
        s: Scalar or array of shape (k,) with values in [0, 1]

    Returns:
        Coordinates of shape (k, 2n+1)
    """
    chi = np.atleast_2d(np.asarray(chi, dtype=complex))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    s = np.broadcast_to(np.asarray(s, dtype=float), phi.shape)
    zeta = chi * _horizontal_factor(phi, s)[:, None]
    t = 2.0 * np.sum(np.abs(chi) ** 2, axis=-1) * _vertical_factor(phi, s)
    return join(zeta, t)


def exp_geodesic(param: GeodesicParam, s: float) -> Point:
    """Point sigma_{chi,phi}(s) of the minimal curve leaving the origin"""
    if not 0.0 <= s <= 1.0:
        raise InvalidInputError(f"curve parameter must lie in [0, 1], got {s}")
    coords = exp_geodesic_arrays(param.chi[None, :], np.array([param.phi]), s)
    return Point.from_array(coords[0])


# ---------------------------------------------------------------------------
# Twist ratio g(phi) = (phi - sin phi) / (1 - cos phi)
# ---------------------------------------------------------------------------

def twist_ratio(phi: float) -> float:
    """g(phi), odd and strictly increasing on (-2pi, 2pi)"""
    if abs(phi) < settings.RATIO_SERIES_THRESHOLD:
        return phi / 3.0 + phi ** 3 / 90.0 + phi ** 5 / 2520.0
    half = math.sin(0.5 * phi)
    return (phi - math.sin(phi)) / (2.0 * half * half)


def _twist_ratio_with_slope(phi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """g and g' for phi in [0, 2pi); g' = 1 - g cot(phi/2)"""
    small = phi < settings.RATIO_SERIES_THRESHOLD
    safe = np.where(small, 1.0, phi)
    half = np.sin(0.5 * safe)
    g_closed = (safe - np.sin(safe)) / (2.0 * half * half)
    dg_closed = 1.0 - g_closed * np.cos(0.5 * safe) / half
    g_series = phi / 3.0 + phi ** 3 / 90.0 + phi ** 5 / 2520.0
    dg_series = 1.0 / 3.0 + phi ** 2 / 30.0 + phi ** 4 / 504.0
    return np.where(small, g_series, g_closed), np.where(small, dg_series, dg_closed)


def _upper_bracket() -> float:
    return TWO_PI - settings.PHI_BRACKET_MARGIN


def solve_twist(ratio: float) -> float:
    """
    Solve g(phi) = ratio for phi in (-2pi, 2pi) with Brent's method.

    Ratios beyond g at the bracket edge saturate to the edge.
    """
    if not math.isfinite(ratio):
        raise InvalidInputError(f"twist ratio must be finite, got {ratio}")
    if ratio == 0.0:
        return 0.0
    target = abs(ratio)
    upper = _upper_bracket()
    if twist_ratio(upper) <= target:
        return math.copysign(upper, ratio)
    try:
        phi = brentq(
            lambda p: twist_ratio(p) - target,
            0.0,
            upper,
            xtol=settings.ROOT_XTOL,
            maxiter=settings.NEWTON_MAX_ITER * 2,
        )
    except (RuntimeError, ValueError) as e:
        raise SolverError(f"twist equation did not converge for ratio {ratio}: {e}", stage="log_geodesic")
    return math.copysign(phi, ratio)


def solve_twist_arrays(ratio: np.ndarray) -> np.ndarray:
    """Vectorised solve_twist: bracketed Newton with bisection fallback"""
    ratio = np.asarray(ratio, dtype=float)
    target = np.abs(ratio)
    upper = _upper_bracket()
    g_upper = twist_ratio(upper)

    lo = np.zeros_like(target)
    hi = np.full_like(target, upper)
    # g(phi) ~ phi/3 near 0 and ~ 4pi/(2pi - phi)^2 near 2pi
    far = TWO_PI - np.sqrt(4.0 * math.pi / np.maximum(target, 1e-300))
    phi = np.clip(np.minimum(3.0 * target, np.maximum(far, 0.0)), 0.0, upper)

    converged = np.zeros(target.shape, dtype=bool)
    for _ in range(settings.NEWTON_MAX_ITER):
        g, dg = _twist_ratio_with_slope(phi)
        f = g - target
        lo = np.where(f < 0.0, phi, lo)
        hi = np.where(f > 0.0, phi, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            candidate = phi - f / dg
        outside = ~np.isfinite(candidate) | (candidate <= lo) | (candidate >= hi)
        candidate = np.where(outside, 0.5 * (lo + hi), candidate)
        converged = (np.abs(candidate - phi) <= settings.ROOT_XTOL) | (hi - lo <= settings.ROOT_XTOL) | (f == 0.0)
        phi = np.where(f == 0.0, phi, candidate)
        if np.all(converged):
            break

    if not np.all(converged):
        # plain bisection on the remaining brackets
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            g_mid, _ = _twist_ratio_with_slope(mid)
            lo = np.where(g_mid < target, mid, lo)
            hi = np.where(g_mid >= target, mid, hi)
        phi = np.where(converged, phi, 0.5 * (lo + hi))

    phi = np.where(target >= g_upper, upper, phi)
    phi = np.where(target == 0.0, 0.0, phi)
    return np.copysign(phi, ratio)


def chi_modulus(zeta_abs: np.ndarray, t: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """
    |chi| of the curve with endpoint [zeta, t] and twist phi.

    Uses |zeta| phi / (2 sin(phi/2)) up to |phi| = pi and
    sqrt(t phi^2 / (2 (phi - sin phi))) beyond, where each form is well conditioned.
    """
    zeta_abs = np.asarray(zeta_abs, dtype=float)
    t = np.asarray(t, dtype=float)
    phi = np.abs(np.asarray(phi, dtype=float))
    near = phi <= math.pi
    tiny = phi < settings.SMALL_PHI_THRESHOLD
    safe_near = np.where(tiny | ~near, 1.0, phi)
    horizontal = zeta_abs * np.where(tiny, 1.0 + phi ** 2 / 24.0, safe_near / (2.0 * np.sin(0.5 * safe_near)))
    safe_far = np.where(near, math.pi * 1.5, phi)
    vertical = np.sqrt(np.abs(t) * safe_far ** 2 / (2.0 * (safe_far - np.sin(safe_far))))
    return np.where(near, horizontal, vertical)


# ---------------------------------------------------------------------------
# Inverse map
# ---------------------------------------------------------------------------

def log_geodesic_arrays(coords: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Curve parameters for a stack of endpoints.

    Rows on the center line get the canonical selection chi = sqrt(pi|t|) e_1,
    phi = 2pi sign(t); the origin maps to chi = 0, phi = 0.

    Returns:
        (chi of shape (k, n), phi of shape (k,), boolean center mask)
    """
    coords = as_stack(coords)
    zeta, t = split(coords)
    a = np.linalg.norm(zeta, axis=-1)
    center = a <= settings.OMEGA_TOLERANCE
    safe_a = np.where(center, 1.0, a)
    ratio = np.where(center, 0.0, t / safe_a ** 2)
    phi = solve_twist_arrays(ratio)
    modulus = chi_modulus(a, t, phi)
    chi = (zeta / safe_a[:, None]) * np.exp(0.5j * phi)[:, None] * modulus[:, None]

    if np.any(center):
        center_chi = np.zeros_like(chi[center])
        center_chi[:, 0] = np.sqrt(math.pi * np.abs(t[center]))
        chi[center] = center_chi
        phi[center] = TWO_PI * np.sign(t[center])
    return chi, phi, center


def log_geodesic(z: Point) -> GeodesicParam:
    """
    The unique (chi, phi) with sigma_{chi,phi}(1) = z.

    Raises:
        CenterLineError: if z lies on the center line (including z = 0)
    """
    zeta = z.zeta
    a = float(np.linalg.norm(zeta))
    if a <= settings.OMEGA_TOLERANCE:
        if z.t == 0.0:
            raise CenterLineError("the origin has no curve parameters")
        raise CenterLineError(f"point {list(z.coords)} lies on the center line; minimal curves are not unique")
    phi = solve_twist(z.t / (a * a))
    modulus = float(chi_modulus(np.array(a), np.array(z.t), np.array(phi)))
    chi = (zeta / a) * np.exp(0.5j * phi) * modulus
    return GeodesicParam.from_complex(chi, phi)


# ---------------------------------------------------------------------------
# Curves between two points
# ---------------------------------------------------------------------------

def minimal_curve(x: Point, y: Point) -> MinimalCurve:
    """Unique minimal curve on Omega, canonical selection on the center line, degenerate for x = y"""
    rel = left_difference(x, y)
    a = float(np.linalg.norm(rel.zeta))
    if a > settings.OMEGA_TOLERANCE:
        return MinimalCurve(base=x, end=y, params=log_geodesic(rel))
    if rel.t == 0.0:
        return MinimalCurve(base=x, end=y, degenerate=True)
    chi = np.zeros(x.n, dtype=complex)
    chi[0] = math.sqrt(math.pi * abs(rel.t))
    params = GeodesicParam.from_complex(chi, math.copysign(TWO_PI, rel.t))
    return MinimalCurve(base=x, end=y, params=params, canonical_selection=True)


def curve_point(curve: MinimalCurve, s: float) -> Point:
    """Point at parameter s of a selected curve"""
    if not 0.0 <= s <= 1.0:
        raise InvalidInputError(f"curve parameter must lie in [0, 1], got {s}")
    if curve.degenerate:
        return curve.base
    return mul(curve.base, exp_geodesic(curve.params, s))


def eval_curve(x: Point, y: Point, s: float) -> Point:
    """(e_s o S)(x, y); endpoints are returned exactly"""
    if not 0.0 <= s <= 1.0:
        raise InvalidInputError(f"curve parameter must lie in [0, 1], got {s}")
    if s == 0.0:
        return x
    if s == 1.0:
        return y
    return curve_point(minimal_curve(x, y), s)


def eval_curve_arrays(xs: np.ndarray, ys: np.ndarray, s: Union[float, np.ndarray]) -> np.ndarray:
    """Vectorised eval_curve over paired stacks (broadcast along rows)"""
    xs = as_stack(xs)
    ys = as_stack(ys)
    xs, ys = np.broadcast_arrays(xs, ys)
    s_arr = np.broadcast_to(np.asarray(s, dtype=float), xs.shape[:1])
    if np.any((s_arr < 0.0) | (s_arr > 1.0)):
        raise InvalidInputError("curve parameters must lie in [0, 1]")
    chi, phi, _ = log_geodesic_arrays(mul_arrays(-xs, ys))
    out = mul_arrays(xs, exp_geodesic_arrays(chi, phi, s_arr))
    out = np.where((s_arr == 0.0)[:, None], xs, out)
    return np.where((s_arr == 1.0)[:, None], ys, out)


def curve_rows(x: Point, y: Point, steps: int) -> Tuple[List[List[float]], bool]:
    """
    Sample a curve at s = k/steps for CSV export.

    Returns:
        (rows [s, coords...], flag set when the canonical center selection was used)
    """
    if steps < 2:
        raise InvalidInputError(f"steps must be at least 2, got {steps}")
    curve = minimal_curve(x, y)
    rows = []
    for k in range(steps + 1):
        s = k / steps
        if k == 0:
            point = x
        elif k == steps:
            point = y
        else:
            point = curve_point(curve, s)
        rows.append([s, *point.coords])
    return rows, curve.canonical_selection
