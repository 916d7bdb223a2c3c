"""Surface patches, framed curves (strips) and the Darboux apparatus."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import jets
from .curves import (
    TOL_DEGENERATE,
    ArcLength,
    CurveExpr,
    d_ds,
    frenet_from_jets,
    grid_values,
    lift,
    order_of,
    tangent_character,
    trunc,
    unit_tangent,
    vscale,
    vtrunc,
    vvalue,
)
from .errors import DegenerateTangentPlane, MixedCharacter, StripInvariantViolation
from .expr import Expression
from .jets import Jet
from .lorentz import TOL_NULL, Character, CausalCharacter, cross, euclidean_sq, inner

TOL_STRIP = 1e-9


class SurfaceCharacter(enum.Enum):
    TIMELIKE = "timelike"
    SPACELIKE = "spacelike"


def _embed(j: Jet, orders) -> Jet:
    """Lift a univariate jet into a multivariate one (extra variables at order 0 terms)."""
    dims = tuple(o + 1 for o in orders)
    c = np.zeros(j.c.shape[:-1] + dims)
    c[(Ellipsis, slice(0, j.orders[0] + 1)) + (0,) * (len(orders) - 1)] = j.c
    return Jet(c.reshape(j.c.shape[:-1] + (-1,)), orders)


class SurfacePatch:
    """Parametric patch ``(u, v) -> X(u, v)`` on a rectangle."""

    def __init__(self, coords: Sequence[str], u_range, v_range,
                 constants: Mapping[str, float] | None = None, name: str = ""):
        if len(coords) != 3:
            raise ValueError("a surface needs three coordinate expressions")
        self.coords = tuple(str(c) for c in coords)
        self.exprs = tuple(Expression(c, ("u", "v"), constants) for c in self.coords)
        self.constants = dict(constants or {})
        self.u_range = tuple(float(x) for x in u_range)
        self.v_range = tuple(float(x) for x in v_range)
        self.name = name

    def evaluate(self, U, V, shape):
        orders = U.orders if isinstance(U, Jet) else V.orders
        return tuple(lift(e(u=U, v=V), orders, shape) for e in self.exprs)

    def partials(self, u, v, order: int = 1):
        """Bivariate jets of X at points ``(u, v)`` up to ``order`` in each variable."""
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        orders = (order, order)
        U = Jet.variable(u, orders, 0)
        V = Jet.variable(v, orders, 1)
        return self.evaluate(U, V, u.shape)

    def tangents(self, u, v):
        X = self.partials(u, v, 1)
        Xu = np.stack([c.coef(1, 0) for c in X], axis=-1)
        Xv = np.stack([c.coef(0, 1) for c in X], axis=-1)
        return Xu, Xv

    def along(self, U: Jet, V: Jet):
        """Position, X_u and X_v along a parameter curve, as univariate jets.

        ``U`` and ``V`` are jets in the curve parameter; the surface is
        evaluated on ``(U + du, V + dv)`` and the first-order ``du``/``dv``
        coefficients are read back out.
        """
        k = U.orders[0]
        orders = (k, 1, 1)
        shape = U.value.shape
        Um = _embed(U, orders) + Jet.variable(np.zeros(shape), orders, 1)
        Vm = _embed(V, orders) + Jet.variable(np.zeros(shape), orders, 2)
        X = self.evaluate(Um, Vm, shape)
        pos = tuple(c.section(v1=0, v2=0) for c in X)
        xu = tuple(c.section(v1=1, v2=0) for c in X)
        xv = tuple(c.section(v1=0, v2=1) for c in X)
        return pos, xu, xv

    def grid(self, n: int = 32):
        u = np.linspace(*self.u_range, n)
        v = np.linspace(*self.v_range, n)
        return np.meshgrid(u, v, indexing="ij")


def surface_normal(S: SurfacePatch, u, v, tol_null: float = TOL_NULL):
    """Unit normal ``normalize(X_u x X_v)`` and its causal sign (+1 spacelike)."""
    Xu, Xv = S.tangents(u, v)
    c = cross(Xu, Xv)
    q, e2 = inner(c, c), euclidean_sq(c)
    sig = grid_values(q, e2, tol_null)
    if np.any(e2 == 0) or np.any(sig == 0):
        raise DegenerateTangentPlane(f"tangent plane degenerate at (u, v) = ({float(np.ravel(u)[0])!r}, {float(np.ravel(v)[0])!r})")
    return c / np.sqrt(np.abs(q))[..., None], sig


def surface_causal_type(S: SurfacePatch, n: int = 32, tol_null: float = TOL_NULL) -> SurfaceCharacter:
    u, v = S.grid(n)
    Xu, Xv = S.tangents(u, v)
    c = cross(Xu, Xv)
    q, e2 = inner(c, c), euclidean_sq(c)
    sig = grid_values(q, e2, tol_null)
    if np.any(e2 == 0):
        raise DegenerateTangentPlane("patch is singular on the sample grid")
    if np.all(sig == 1):
        return SurfaceCharacter.TIMELIKE
    if np.all(sig == -1):
        return SurfaceCharacter.SPACELIKE
    bad = np.argwhere(sig != np.ravel(sig)[0])
    i, j = bad[0] if len(bad) else np.argwhere(sig == 0)[0]
    raise MixedCharacter(f"normal character changes on the patch near (u, v) = ({float(u[i, j])!r}, {float(v[i, j])!r})")


# -- strips --------------------------------------------------------------------

class CaseTag(enum.Enum):
    """Which Darboux derivative system applies."""

    TIMELIKE_SURFACE_SPACELIKE_CURVE = "timelike-surface/spacelike-curve"
    TIMELIKE_SURFACE_TIMELIKE_CURVE = "timelike-surface/timelike-curve"
    SPACELIKE_SURFACE = "spacelike-surface/spacelike-curve"

    @property
    def epsilon(self) -> int:
        return -1 if self is CaseTag.TIMELIKE_SURFACE_TIMELIKE_CURVE else 1

    @property
    def surface(self) -> SurfaceCharacter:
        return SurfaceCharacter.SPACELIKE if self is CaseTag.SPACELIKE_SURFACE else SurfaceCharacter.TIMELIKE

    @property
    def curve(self) -> Character:
        return Character.TIMELIKE if self is CaseTag.TIMELIKE_SURFACE_TIMELIKE_CURVE else Character.SPACELIKE


# Sign relating the cross-product formulas k_g = <x', x'' x n>, tau_g = <x', n x n'>
# to the projection values, per case.  Calibrated by tests/test_surfaces.py.
CROSS_FORMULA_SIGNS = {
    CaseTag.SPACELIKE_SURFACE: (1, -1),
    CaseTag.TIMELIKE_SURFACE_SPACELIKE_CURVE: (-1, 1),
    CaseTag.TIMELIKE_SURFACE_TIMELIKE_CURVE: (1, -1),
}


class StripCurve:
    """A regular curve with a unit normal field orthogonal to its tangent.

    ``local(t, order)`` returns ``(x, n)``: position and normal as vector jets
    in the curve parameter ``t`` (any regular parametrisation).  Arc length is
    tabulated lazily.
    """

    def __init__(self, local: Callable, t0: float, t1: float, name: str = "", tol: float = 1e-10,
                 samples: int = 256):
        self._local = local
        self.t0, self.t1 = float(t0), float(t1)
        self.name = name
        self.tol = tol
        self.samples = samples
        self._arc = None
        self._case = None

    def local(self, t, order: int):
        return self._local(np.asarray(t, dtype=float), order)

    def position_jets(self, t, order: int):
        return self.local(t, order)[0]

    def speed(self, t) -> np.ndarray:
        x, _ = self.local(t, 1)
        _, sigma = unit_tangent(x)
        return sigma.value

    @property
    def arc(self) -> ArcLength:
        if self._arc is None:
            self.curve_character  # enforce a constant tangent character first
            self._arc = ArcLength(self.speed, self.t0, self.t1, self.tol)
        return self._arc

    @property
    def length(self) -> float:
        return self.arc.length

    @property
    def curve_character(self) -> CausalCharacter:
        return tangent_character(self.position_jets, self.t0, self.t1, self.samples)

    @property
    def case(self) -> CaseTag:
        if self._case is None:
            t = np.linspace(self.t0, self.t1, self.samples)
            self._case = darboux_at(self, t).case
        return self._case

    @property
    def surface_character(self) -> SurfaceCharacter:
        return self.case.surface

    def t_of_s(self, s):
        return self.arc.t_of_s(s)

    def flipped(self) -> "StripCurve":
        """Same curve with the opposite normal field."""
        base = self._local

        def local(t, order):
            x, n = base(t, order)
            return x, tuple(-c for c in n)

        return StripCurve(local, self.t0, self.t1, f"{self.name}~flip", self.tol, self.samples)


def strip_from_expressions(position: Sequence[str], normal: Sequence[str], t0: float, t1: float,
                           constants=None, name: str = "") -> StripCurve:
    """Strip with both the curve and its normal field given in closed form."""
    pos = CurveExpr(position, t0, t1, constants)
    nrm = CurveExpr(normal, t0, t1, constants)

    def local(t, order):
        return pos.position_jets(t, order), nrm.position_jets(t, order)

    return StripCurve(local, t0, t1, name)


class SurfaceCurve:
    """The curve ``t -> X(u(t), v(t))`` on a patch."""

    def __init__(self, surface: SurfacePatch, u_expr: str, v_expr: str, t0: float, t1: float,
                 constants=None, name: str = ""):
        self.surface = surface
        self.u = Expression(u_expr, ("t",), constants)
        self.v = Expression(v_expr, ("t",), constants)
        self.t0, self.t1 = float(t0), float(t1)
        self.name = name

    def params(self, t, order: int):
        t = np.asarray(t, dtype=float)
        tj = Jet.variable(t, (order,))
        return lift(self.u(t=tj), (order,), t.shape), lift(self.v(t=tj), (order,), t.shape)

    def position_jets(self, t, order: int):
        U, V = self.params(t, order)
        return self.surface.evaluate(U, V, U.value.shape)

    def local(self, t, order: int):
        U, V = self.params(t, order)
        pos, xu, xv = self.surface.along(U, V)
        c = cross(xu, xv)
        q = inner(c, c)
        return pos, vscale(c, jets.reciprocal(jets.sqrt_abs(q)))

    def strip(self) -> StripCurve:
        return StripCurve(self.local, self.t0, self.t1, self.name)

    def surface_character_along(self, samples: int = 256) -> SurfaceCharacter:
        t = np.linspace(self.t0, self.t1, samples)
        U, V = self.params(t, 0)
        _, sig = surface_normal(self.surface, U.value, V.value)
        if np.all(sig == 1):
            return SurfaceCharacter.TIMELIKE
        if np.all(sig == -1):
            return SurfaceCharacter.SPACELIKE
        raise MixedCharacter("surface character changes along the curve")


# -- Darboux frame ---------------------------------------------------------------

@dataclass
class DarbouxData:
    T: np.ndarray
    g: np.ndarray
    n: np.ndarray
    kg: np.ndarray
    kn: np.ndarray
    tg: np.ndarray
    case: CaseTag
    kg_cross: np.ndarray = field(repr=False, default=None)
    tg_cross: np.ndarray = field(repr=False, default=None)
    t: np.ndarray = field(repr=False, default=None)

    @property
    def epsilon(self) -> int:
        return self.case.epsilon


def _case_of(tt: np.ndarray, nn: np.ndarray) -> CaseTag:
    if np.all(nn > 0):
        return CaseTag.TIMELIKE_SURFACE_SPACELIKE_CURVE if np.all(tt > 0) else (
            CaseTag.TIMELIKE_SURFACE_TIMELIKE_CURVE if np.all(tt < 0) else None)
    if np.all(nn < 0) and np.all(tt > 0):
        return CaseTag.SPACELIKE_SURFACE
    return None


def darboux_from_jets(x, n, t=None, tol: float = TOL_STRIP) -> DarbouxData:
    """Darboux frame and invariants from position/normal jets (orders >= 2 / >= 1)."""
    T, sigma = unit_tangent(x)
    dT = d_ds(T, sigma)
    n1 = vtrunc(n, 1)
    dn = d_ds(n1, trunc(sigma, 1))
    Tv, dTv, nv, dnv = vvalue(T), vvalue(dT), vvalue(n), vvalue(dn)
    nn = inner(nv, nv)
    tn = inner(nv, Tv)
    if np.any(np.abs(np.abs(nn) - 1) > tol) or np.any(np.abs(tn) > tol):
        bad = np.argmax(np.maximum(np.abs(np.abs(nn) - 1), np.abs(tn)))
        where = np.ravel(t)[bad] if t is not None else bad
        raise StripInvariantViolation(f"normal field not unit/orthogonal at t={where!r}")
    tt = inner(Tv, Tv)
    case = _case_of(tt, nn)
    if case is None:
        raise StripInvariantViolation("surface/curve characters are not constant or not admissible")
    g = cross(nv, Tv)
    if case is CaseTag.SPACELIKE_SURFACE:
        kg = inner(dTv, g)
        kn = -inner(dTv, nv)
        tg = inner(dnv, g)
    else:
        e = case.epsilon
        kg = -e * inner(dTv, g)
        kn = -e * inner(dTv, nv)
        tg = -e * inner(dnv, g)
    kgx = inner(Tv, cross(dTv, nv))
    tgx = inner(Tv, cross(nv, dnv))
    return DarbouxData(Tv, g, nv, kg, kn, tg, case, kgx, tgx, t)


def darboux_at(sc: StripCurve, t) -> DarbouxData:
    t = np.asarray(t, dtype=float)
    x, n = sc.local(t, 2)
    return darboux_from_jets(x, n, t)


def darboux_frame(sc: StripCurve, s) -> DarbouxData:
    """Darboux frame ``{T, g, n}`` and ``(k_g, k_n, tau_g)`` at arc length ``s``."""
    return darboux_at(sc, sc.t_of_s(s))


def darboux_via_patch(curve: SurfaceCurve, t) -> DarbouxData:
    """Same invariants computed from the patch's own normal map.

    The normal derivative is assembled by the chain rule from the patch
    partials ``n_u``, ``n_v`` rather than from the composed jet.
    """
    t = np.asarray(t, dtype=float)
    U, V = curve.params(t, 2)
    x = curve.position_jets(t, 2)
    u0, v0, du, dv = U.value, V.value, U.derivative(1), V.derivative(1)
    X = curve.surface.partials(u0, v0, 2)
    Xu = [np.stack([c.coef(1, 0) for c in X], -1)]
    Xv = [np.stack([c.coef(0, 1) for c in X], -1)]
    Xuu = np.stack([2 * c.coef(2, 0) for c in X], -1)
    Xuv = np.stack([c.coef(1, 1) for c in X], -1)
    Xvv = np.stack([2 * c.coef(0, 2) for c in X], -1)
    Xu, Xv = Xu[0], Xv[0]
    m = cross(Xu, Xv)
    mu = cross(Xuu, Xv) + cross(Xu, Xuv)
    mv = cross(Xuv, Xv) + cross(Xu, Xvv)
    q = inner(m, m)
    nrm = np.sqrt(np.abs(q))
    dm = mu * du[..., None] + mv * dv[..., None]
    dq = 2 * inner(m, dm)
    dnrm = np.sign(q) * dq / (2 * nrm)
    n = m / nrm[..., None]
    dn_dt = dm / nrm[..., None] - m * (dnrm / nrm**2)[..., None]
    n_jet = tuple(Jet.from_derivatives([n[..., i], dn_dt[..., i]]) for i in range(3))
    return darboux_from_jets(x, n_jet, t)


def cross_formula_residuals(d: DarbouxData) -> tuple:
    """Residuals of the cross-product formulas against projection values,
    after applying the calibrated sign for the case."""
    sk, st = CROSS_FORMULA_SIGNS[d.case]
    return d.kg_cross - sk * d.kg, d.tg_cross - st * d.tg


# -- Frenet / Darboux link ---------------------------------------------------------

@dataclass
class FrenetDarbouxLink:
    phi: np.ndarray
    form: str  # "circular", "hyperbolic" or "hyperbolic-swapped"
    signs: tuple  # (s_g, s_n, s_t, s_p): k_g = s_g k C, k_n = s_n k S, tau_g = s_t tau + s_p phi'
    residuals: tuple  # residual triple under ``signs``
    literal: dict  # max residual triple for the printed circular/hyperbolic relations
    dphi: np.ndarray = field(repr=False, default=None)


def frenet_darboux_link(sc: StripCurve, s) -> FrenetDarbouxLink:
    """Angle between g and N and the Frenet/Darboux curvature relations.

    phi comes from decomposing g in the (N, B) plane.  Both sides are
    computed independently; the relation signs are reported, not assumed.
    """
    t = sc.t_of_s(s)
    x, n = sc.local(t, 3)
    fr = frenet_from_jets(x)
    dd = darboux_from_jets(vtrunc(x, 2), vtrunc(n, 2), t)
    T, sigma = unit_tangent(x)
    dT = d_ds(T, sigma)
    kappa = jets.sqrt_abs(inner(dT, dT))
    N = vscale(dT, jets.reciprocal(kappa))
    k = order_of(N)
    B = cross(vtrunc(T, k), N)
    g = cross(vtrunc(n, k), vtrunc(T, k))
    sN = np.sign(inner(fr.N, fr.N))
    sB = np.sign(inner(fr.B, fr.B))
    a = inner(g, N) * sN
    b = inner(g, B) * sB
    sig1 = trunc(sigma, k)
    da = a.diff() * jets.reciprocal(trunc(sig1, k - 1))
    db = b.diff() * jets.reciprocal(trunc(sig1, k - 1))
    av, bv, dav, dbv = a.value, b.value, da.value, db.value
    sg = np.sign(inner(dd.g, dd.g))
    if np.all(sN > 0) and np.all(sB > 0):
        form = "circular"
        phi = np.arctan2(bv, av)
        dphi = (av * dbv - bv * dav) / (av**2 + bv**2)
        C, S = np.cos(phi), np.sin(phi)
    elif np.all(sg == sN):
        form = "hyperbolic"
        phi = np.arctanh(bv / av)
        dphi = (av * dbv - bv * dav) / (av**2 - bv**2)
        C, S = np.cosh(phi), np.sinh(phi)
    else:
        form = "hyperbolic-swapped"
        phi = np.arctanh(av / bv)
        dphi = (bv * dav - av * dbv) / (bv**2 - av**2)
        C, S = np.sinh(phi), np.cosh(phi)
    kap, tau = fr.k1, fr.k2
    best = None
    for s_g in (1, -1):
        for s_n in (1, -1):
            for s_t in (1, -1):
                for s_p in (1, -1):
                    r = (dd.kg - s_g * kap * C, dd.kn - s_n * kap * S, dd.tg - (s_t * tau + s_p * dphi))
                    score = max(float(np.max(np.abs(c))) for c in r)
                    if best is None or score < best[0]:
                        best = (score, (s_g, s_n, s_t, s_p), r)
    literal = {}
    for name, (fc, fs) in {"circular": (np.cos, np.sin), "hyperbolic": (np.cosh, np.sinh)}.items():
        if name == "circular" and form != "circular":
            continue
        if name == "hyperbolic" and form == "circular":
            continue
        literal[name] = tuple(float(np.max(np.abs(r))) for r in (
            dd.kg - kap * fc(phi), dd.kn - kap * fs(phi), dd.tg - (tau + dphi)))
    return FrenetDarbouxLink(phi, form, best[1], best[2], literal, dphi)


# -- line classification -------------------------------------------------------------

class LineClass(enum.Enum):
    GEODESIC = "geodesic"
    ASYMPTOTIC = "asymptotic line"
    PRINCIPAL = "principal line"


def classify_line(sc: StripCurve, tol_line: float = 1e-8, samples: int = 128) -> set:
    s = np.linspace(0.0, sc.length, samples)
    d = darboux_frame(sc, s)
    out = set()
    if np.max(np.abs(d.kg)) <= tol_line:
        out.add(LineClass.GEODESIC)
    if np.max(np.abs(d.kn)) <= tol_line:
        out.add(LineClass.ASYMPTOTIC)
    if np.max(np.abs(d.tg)) <= tol_line:
        out.add(LineClass.PRINCIPAL)
    return out


SURFACE_FAMILIES = {
    "plane": (("0", "u", "v"), {}),
    "cylinder": (("u", "r*cos(v)", "r*sin(v)"), {"r": 1.0}),
    "hyperbolic_plane": (("r*cosh(u)", "r*sinh(u)*cos(v)", "r*sinh(u)*sin(v)"), {"r": 1.0}),
    "de_sitter": (("r*sinh(u)", "r*cosh(u)*cos(v)", "r*cosh(u)*sin(v)"), {"r": 1.0}),
    "hyperbolic_cylinder": (("r*cosh(u)", "r*sinh(u)", "v"), {"r": 1.0}),
}


def surface_family(name: str, u_range, v_range, **params) -> SurfacePatch:
    coords, defaults = SURFACE_FAMILIES[name]
    unknown = set(params) - set(defaults)
    if unknown:
        raise ValueError(f"unknown parameters for surface family {name!r}: {sorted(unknown)}")
    return SurfacePatch(coords, u_range, v_range, {**defaults, **params}, name=name)
