"""Parametric curves in E^3_1: exact derivatives, arc length, Frenet frames."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import jets
from .errors import (
    CausalCharacterChange,
    DegenerateCurvature,
    EpsilonChange,
    NullPrincipalNormal,
    NullTangent,
)
from .expr import Expression
from .jets import Jet
from .lorentz import TOL_NULL, Character, CausalCharacter, cross, euclidean_sq, inner

TOL_DEGENERATE = 1e-10


# -- vector jets: tuples of three univariate Jets ---------------------------

def lift(value, orders, shape) -> Jet:
    """Expression output as a Jet, broadcasting constants over the batch."""
    if isinstance(value, Jet):
        return value
    return Jet.constant(np.broadcast_to(np.asarray(value, dtype=float), shape), orders)


def vdiff(v):
    return tuple(c.diff() for c in v)


def vtrunc(v, k: int):
    return tuple(c if c.orders[0] == k else c.truncate(k) for c in v)


def order_of(v) -> int:
    return v[0].orders[0]


def vscale(v, s):
    return tuple(c * s for c in v)


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vvalue(v) -> np.ndarray:
    return np.stack([c.value for c in v], axis=-1)


def trunc(j: Jet, k: int) -> Jet:
    return j if j.orders[0] == k else j.truncate(k)


def d_ds(v, sigma: Jet):
    """Apply ``d/ds = (1/sigma) d/dt`` to a vector jet."""
    dv = vdiff(v)
    k = order_of(dv)
    inv = jets.reciprocal(trunc(sigma, k))
    return vscale(dv, inv)


def unit_tangent(x):
    """Unit tangent ``T = x'/|x'|`` and the speed jet ``|x'|``."""
    dx = vdiff(x)
    sigma = jets.sqrt_abs(inner(dx, dx))
    return vscale(dx, jets.reciprocal(sigma)), sigma


def grid_values(q: np.ndarray, e2: np.ndarray, tol_null: float = TOL_NULL) -> np.ndarray:
    return np.where(q > tol_null * e2, 1, np.where(q < -tol_null * e2, -1, 0))


# -- curve expressions ---------------------------------------------------------

class CurveExpr:
    """Closed-form curve ``t -> (x1(t), x2(t), x3(t))`` on ``[t0, t1]``."""

    def __init__(self, coords: Sequence[str], t0: float, t1: float,
                 constants: Mapping[str, float] | None = None, name: str = ""):
        if len(coords) != 3:
            raise ValueError("a curve needs three coordinate expressions")
        if not t1 > t0:
            raise ValueError("curve domain must satisfy t0 < t1")
        self.coords = tuple(str(c) for c in coords)
        self.exprs = tuple(Expression(c, ("t",), constants) for c in self.coords)
        self.t0, self.t1 = float(t0), float(t1)
        self.name = name

    def position_jets(self, t, order: int):
        t = np.asarray(t, dtype=float)
        tj = Jet.variable(t, (order,))
        return tuple(lift(e(t=tj), (order,), t.shape) for e in self.exprs)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.stack([np.broadcast_to(np.asarray(e(t=t), dtype=float), t.shape) for e in self.exprs], axis=-1)

    def derivatives(self, t, order: int = 3) -> list:
        """``[x, x', ..., x^(order)]`` as arrays of shape ``t.shape + (3,)``."""
        X = self.position_jets(t, order)
        return [np.stack([c.derivative(k) for c in X], axis=-1) for k in range(order + 1)]

    def speed(self, t) -> np.ndarray:
        d1 = self.derivatives(t, 1)[1]
        return np.sqrt(np.abs(inner(d1, d1)))


# -- arc length ------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _gauss(speed, a, b):
    """Gauss-Legendre (20 nodes) of ``speed`` over ``[a, b]``, vectorised in a, b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = mid[..., None] + half[..., None] * _GL_NODES
    return half * (speed(nodes) * _GL_WEIGHTS).sum(axis=-1)


class ArcLength:
    """Monotone map between a curve parameter ``t`` and arc length ``s``.

    The forward table comes from adaptive Gauss-Legendre panels with error at
    most ``tol * L``; the inverse starts from monotone interpolation and is
    polished by Newton iteration to ``1e-12`` in ``s``.
    """

    def __init__(self, speed, t0: float, t1: float, tol: float = 1e-10, panels: int = 16, max_panels: int = 1 << 14):
        self.speed = speed
        self.t0, self.t1 = float(t0), float(t1)
        self.tol = tol
        edges = np.linspace(self.t0, self.t1, panels + 1)
        while True:
            a, b = edges[:-1], edges[1:]
            whole = _gauss(speed, a, b)
            mid = 0.5 * (a + b)
            halves = _gauss(speed, a, mid) + _gauss(speed, mid, b)
            total = halves.sum()
            budget = tol * max(total, 1e-300) * (b - a) / (self.t1 - self.t0)
            bad = np.abs(whole - halves) > budget
            if not bad.any() or len(edges) > max_panels:
                break
            edges = np.sort(np.concatenate([edges, mid[bad]]))
        self.edges = edges
        self.cumulative = np.concatenate([[0.0], np.cumsum(halves)])
        self.length = float(self.cumulative[-1])
        self._guess = PchipInterpolator(self.cumulative, self.edges)

    def s_of_t(self, t) -> np.ndarray:
        t = np.clip(np.asarray(t, dtype=float), self.t0, self.t1)
        k = np.clip(np.searchsorted(self.edges, t, side="right") - 1, 0, len(self.edges) - 2)
        return self.cumulative[k] + _gauss(self.speed, self.edges[k], t)

    def t_of_s(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        t = np.clip(self._guess(np.clip(s, 0.0, self.length)), self.t0, self.t1)
        for _ in range(50):
            step = (self.s_of_t(t) - s) / self.speed(t)
            t = np.clip(t - step, self.t0, self.t1)
            if np.all(np.abs(step) * self.speed(t) <= 1e-12 * max(1.0, self.length)):
                break
        return t

    def uniform_grid(self, n: int) -> tuple:
        """``n`` equally spaced arc-length samples and their parameters."""
        s = np.linspace(0.0, self.length, n)
        return s, self.t_of_s(s)


def tangent_character(position_jets, t0: float, t1: float, samples: int = 256,
                      tol_null: float = TOL_NULL) -> CausalCharacter:
    """Constant causal character of the tangent field, checked on a grid."""
    t = np.linspace(t0, t1, samples)
    d1 = vvalue(vdiff(position_jets(t, 1)))
    q, e2 = inner(d1, d1), euclidean_sq(d1)
    sig = grid_values(q, e2, tol_null)
    if np.any(e2 == 0) or np.any(sig == 0):
        bad = float(t[(sig == 0) | (e2 == 0)][0])
        raise NullTangent(f"tangent is null or zero at t={bad!r}")
    if np.any(sig != sig[0]):
        bad = float(t[np.argmax(sig != sig[0])])
        raise CausalCharacterChange(f"tangent crosses the null cone near t={bad!r}")
    return CausalCharacter(Character.SPACELIKE if sig[0] > 0 else Character.TIMELIKE)


class UnitSpeedCurve:
    """A curve together with its arc-length parametrisation.

    Evaluation is by arc length ``s``; internally every query maps ``s`` to
    the underlying parameter and differentiates with ``d/ds = (1/|x'|) d/dt``.
    """

    def __init__(self, curve, tol: float = 1e-10, samples: int = 256, tol_null: float = TOL_NULL):
        self.curve = curve
        self.t0, self.t1 = curve.t0, curve.t1
        self.character = tangent_character(curve.position_jets, self.t0, self.t1, samples, tol_null)
        self.arc = ArcLength(self._speed, self.t0, self.t1, tol)
        self.length = self.arc.length

    def _speed(self, t):
        d1 = vvalue(vdiff(self.curve.position_jets(t, 1)))
        return np.sqrt(np.abs(inner(d1, d1)))

    def position_jets(self, t, order: int):
        return self.curve.position_jets(t, order)

    def t_of_s(self, s):
        return self.arc.t_of_s(s)

    def __call__(self, s) -> np.ndarray:
        return vvalue(self.curve.position_jets(self.t_of_s(s), 0))

    def derivatives(self, s, order: int = 3) -> list:
        """``[x, dx/ds, ..., d^order x/ds^order]`` at arc length ``s``."""
        x = self.curve.position_jets(self.t_of_s(s), order)
        out = [vvalue(x)]
        if order == 0:
            return out
        T, sigma = unit_tangent(x)
        cur = T
        out.append(vvalue(cur))
        for _ in range(order - 1):
            cur = d_ds(cur, sigma)
            out.append(vvalue(cur))
        return out


def arc_length_reparam(c: CurveExpr, tol: float = 1e-10) -> UnitSpeedCurve:
    return UnitSpeedCurve(c, tol)


def curve_causal_type(c: UnitSpeedCurve) -> CausalCharacter:
    return c.character


@dataclass
class FrenetData:
    """Frenet apparatus; array fields when evaluated on a grid."""

    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    epsilon: int  # <N,N> for spacelike curves, 0 for timelike curves
    timelike: bool
    k2_check: np.ndarray  # torsion read off the B' row


def frenet_from_jets(x, tol_degenerate: float = TOL_DEGENERATE, tol_null: float = TOL_NULL,
                     where: np.ndarray | None = None) -> FrenetData:
    """Frenet frame from a position jet of order >= 3 in any regular parameter."""
    T, sigma = unit_tangent(x)
    tt = inner(vvalue(T), vvalue(T))
    timelike = bool(np.all(tt < 0))
    if not timelike and np.any(tt < 0):
        raise CausalCharacterChange("tangent character varies across the requested points")
    dT = d_ds(T, sigma)
    q = inner(dT, dT)
    qv, e2 = q.value, euclidean_sq(vvalue(dT))
    loc = where if where is not None else np.zeros(np.shape(qv))
    small = np.sqrt(e2) <= tol_degenerate
    if np.any(small):
        raise DegenerateCurvature(f"curvature below {tol_degenerate:g} at parameter {float(np.ravel(loc)[np.argmax(np.ravel(small))])!r}")
    sig = grid_values(qv, e2, tol_null)
    if np.any(sig == 0):
        raise NullPrincipalNormal(f"principal normal is null at parameter {float(np.ravel(loc)[np.argmax(np.ravel(sig == 0))])!r}")
    kappa = jets.sqrt_abs(q)
    if np.any(kappa.value <= tol_degenerate):
        raise DegenerateCurvature(f"curvature below {tol_degenerate:g}")
    if timelike:
        eps = 0
    else:
        if np.any(sig != np.ravel(sig)[0]):
            raise EpsilonChange("principal normal changes causal character along the curve")
        eps = int(np.ravel(sig)[0])
    N = vscale(dT, jets.reciprocal(kappa))
    sigma1 = trunc(sigma, order_of(N))
    dN = d_ds(N, sigma1)
    B = cross(vtrunc(T, order_of(N)), N)
    dB = d_ds(B, sigma1)
    Nv, Bv = vvalue(N), vvalue(B)
    nb = inner(vvalue(dN), Bv)
    bn = inner(vvalue(dB), Nv)
    if timelike:
        k2, k2b = nb, -bn
    else:
        k2, k2b = -eps * nb, eps * bn
    return FrenetData(vvalue(T), Nv, Bv, kappa.value, k2, eps, timelike, k2b)


def frenet_frame(c: UnitSpeedCurve, s, tol_degenerate: float = TOL_DEGENERATE) -> FrenetData:
    t = c.t_of_s(s)
    return frenet_from_jets(c.position_jets(t, 3), tol_degenerate, where=np.asarray(s, dtype=float))


FAMILIES = {
    # name: (coordinates, default constants)
    "circle": (("0", "r*cos(t)", "r*sin(t)"), {"r": 1.0}),
    "helix": (("a*t", "r*cos(b*t)", "r*sin(b*t)"), {"a": 0.5, "b": 1.118033988749895, "r": 1.0}),
    "hyperbola": (("r*sinh(t)", "r*cosh(t)", "0"), {"r": 1.0}),
    "line": (("p1 + d1*t", "p2 + d2*t", "p3 + d3*t"), {"p1": 0.0, "p2": 0.0, "p3": 0.0, "d1": 0.0, "d2": 1.0, "d3": 0.0}),
}


def curve_family(name: str, t0: float, t1: float, **params) -> CurveExpr:
    coords, defaults = FAMILIES[name]
    unknown = set(params) - set(defaults)
    if unknown:
        raise ValueError(f"unknown parameters for curve family {name!r}: {sorted(unknown)}")
    return CurveExpr(coords, t0, t1, {**defaults, **params}, name=name)
