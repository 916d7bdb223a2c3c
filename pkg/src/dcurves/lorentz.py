"""Lorentzian linear algebra in E^3_1 with signature (-, +, +).

The helpers :func:`inner` and :func:`cross` are written against the three
components only, so they accept :class:`MVec3`, plain sequences, numpy arrays
with a trailing axis of length 3, and tuples of :class:`~dcurves.jets.Jet`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .errors import DegenerateSpan, NullInput, NullVector, OppositeTimeOrientation

TOL_NULL = 1e-12


@dataclass(frozen=True)
class MVec3:
    x1: float
    x2: float
    x3: float

    def __iter__(self):
        yield self.x1
        yield self.x2
        yield self.x3

    def __getitem__(self, i):
        return (self.x1, self.x2, self.x3)[i]

    def __len__(self):
        return 3

    def __add__(self, other):
        return MVec3(self.x1 + other[0], self.x2 + other[1], self.x3 + other[2])

    def __sub__(self, other):
        return MVec3(self.x1 - other[0], self.x2 - other[1], self.x3 - other[2])

    def __neg__(self):
        return MVec3(-self.x1, -self.x2, -self.x3)

    def __mul__(self, k):
        return MVec3(k * self.x1, k * self.x2, k * self.x3)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return MVec3(self.x1 / k, self.x2 / k, self.x3 / k)

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x1, self.x2, self.x3], dtype=dtype)

    def euclidean_norm(self) -> float:
        return math.sqrt(self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3)


E1 = MVec3(1.0, 0.0, 0.0)
E2 = MVec3(0.0, 1.0, 0.0)
E3 = MVec3(0.0, 0.0, 1.0)


def _components(v: Any):
    if isinstance(v, np.ndarray):
        return v[..., 0], v[..., 1], v[..., 2]
    return v[0], v[1], v[2]


def _pack(like: Any, a, b, c):
    if isinstance(like, MVec3):
        return MVec3(float(a), float(b), float(c))
    if isinstance(like, np.ndarray):
        return np.stack([a, b, c], axis=-1)
    return (a, b, c)


def inner(x: Any, y: Any):
    """Minkowski product ``-x1*y1 + x2*y2 + x3*y3``."""
    x1, x2, x3 = _components(x)
    y1, y2, y3 = _components(y)
    return -x1 * y1 + x2 * y2 + x3 * y3


def cross(x: Any, y: Any):
    """Lorentz vector product, component formula
    ``(x2 y3 - x3 y2, x1 y3 - x3 y1, x2 y1 - x1 y2)``.

    With this convention ``<x * y, z> = -det(x, y, z)`` and
    ``e1 x e2 = -e3``, ``e2 x e3 = e1``, ``e3 x e1 = -e2``.
    """
    x1, x2, x3 = _components(x)
    y1, y2, y3 = _components(y)
    return _pack(x, x2 * y3 - x3 * y2, x1 * y3 - x3 * y1, x2 * y1 - x1 * y2)


def euclidean_sq(v: Any):
    v1, v2, v3 = _components(v)
    return v1 * v1 + v2 * v2 + v3 * v3


class Character(enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    NULL = "null"


class TimeOrientation(enum.Enum):
    FUTURE = "future"
    PAST = "past"


@dataclass(frozen=True)
class CausalCharacter:
    kind: Character
    orientation: Optional[TimeOrientation] = None
    degenerate: bool = False

    @property
    def sign(self) -> int:
        """+1 spacelike, -1 timelike, 0 null."""
        return {Character.SPACELIKE: 1, Character.TIMELIKE: -1, Character.NULL: 0}[self.kind]


def causal_character(v: Any, tol_null: float = TOL_NULL) -> CausalCharacter:
    q = float(inner(v, v))
    e2 = float(euclidean_sq(v))
    if e2 == 0.0:
        return CausalCharacter(Character.SPACELIKE, degenerate=True)
    if q > tol_null * e2:
        return CausalCharacter(Character.SPACELIKE)
    if q < -tol_null * e2:
        first = float(_components(v)[0])
        orient = TimeOrientation.FUTURE if first > 0 else TimeOrientation.PAST
        return CausalCharacter(Character.TIMELIKE, orient)
    return CausalCharacter(Character.NULL)


def character_sign(q, e2, tol_null: float = TOL_NULL):
    """Vectorised causal sign from ``q = <v,v>`` and Euclidean ``|v|^2``."""
    q = np.asarray(q, dtype=float)
    out = np.where(q > tol_null * e2, 1, np.where(q < -tol_null * e2, -1, 0))
    return np.where(np.asarray(e2) == 0.0, 1, out)


def norm(v: Any):
    """Lorentzian length ``sqrt(|<v,v>|)``."""
    q = inner(v, v)
    if isinstance(q, np.ndarray):
        return np.sqrt(np.abs(q))
    return math.sqrt(abs(q))


def normalize(v: Any, tol_null: float = TOL_NULL):
    q = inner(v, v)
    e2 = euclidean_sq(v)
    if np.any(np.abs(q) <= tol_null * e2) or np.any(e2 == 0):
        raise NullVector(f"cannot normalize null vector {tuple(np.asarray(v).tolist())}")
    n = np.sqrt(np.abs(q))
    if isinstance(v, MVec3):
        return v / float(n)
    if isinstance(v, np.ndarray):
        return v / n[..., None]
    return tuple(c / n for c in v)


class AngleKind(enum.Enum):
    HYPERBOLIC = "hyperbolic"
    CENTRAL = "central"
    SPACELIKE = "spacelike"
    LORENTZIAN_TIMELIKE = "lorentzian-timelike"


@dataclass(frozen=True)
class LorentzAngle:
    theta: float
    kind: AngleKind
    sign: int = 1  # sign of <x, y>; only informative for CENTRAL

    def reconstruct_inner(self, nx: float, ny: float) -> float:
        """Inverse map: <x, y> from the angle and the two lengths."""
        if self.kind is AngleKind.HYPERBOLIC:
            return -nx * ny * math.cosh(self.theta)
        if self.kind is AngleKind.CENTRAL:
            return self.sign * nx * ny * math.cosh(self.theta)
        if self.kind is AngleKind.SPACELIKE:
            return nx * ny * math.cos(self.theta)
        return self.sign * nx * ny * math.sinh(self.theta)


def lorentz_angle(x: Any, y: Any, tol_null: float = TOL_NULL) -> LorentzAngle:
    cx, cy = causal_character(x, tol_null), causal_character(y, tol_null)
    if Character.NULL in (cx.kind, cy.kind) or cx.degenerate or cy.degenerate:
        raise NullInput("angle undefined for null or zero vectors")
    nx, ny = norm(x), norm(y)
    p = float(inner(x, y))
    sgn = 1 if p >= 0 else -1
    ratio = abs(p) / (nx * ny)
    if cx.kind is Character.TIMELIKE and cy.kind is Character.TIMELIKE:
        if cx.orientation is not cy.orientation:
            raise OppositeTimeOrientation("hyperbolic angle needs equal time orientation")
        return LorentzAngle(math.acosh(max(1.0, -p / (nx * ny))), AngleKind.HYPERBOLIC, sgn)
    if cx.kind is Character.SPACELIKE and cy.kind is Character.SPACELIKE:
        c = cross(x, y)
        cc = causal_character(c, tol_null)
        if cc.kind is Character.NULL:
            raise DegenerateSpan("spacelike vectors span a degenerate plane")
        if cc.kind is Character.TIMELIKE or cc.degenerate:
            return LorentzAngle(math.acos(min(1.0, max(-1.0, p / (nx * ny)))), AngleKind.SPACELIKE, sgn)
        return LorentzAngle(math.acosh(max(1.0, ratio)), AngleKind.CENTRAL, sgn)
    return LorentzAngle(math.asinh(ratio), AngleKind.LORENTZIAN_TIMELIKE, sgn)
