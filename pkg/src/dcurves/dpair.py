"""Bertrand partner D-curves: offset construction, pair typing and identity checks.

A partner of a strip ``x1`` is ``x = x1 + lam * g1`` with constant ``lam``.
Corresponding points share the base parameter, so every series here is
sampled on one uniform arc-length grid of the base curve.  Each identity is
evaluated as ``lhs - rhs``; where the literature offers competing sign
conventions both are evaluated and the outcome is reported, not assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import jets
from .curves import frenet_from_jets, order_of, unit_tangent, vadd, vdiff, vscale, vtrunc, vvalue
from .errors import (
    CausalCharacterChange,
    NullPartnerTangent,
    NullTangent,
    PreconditionNotMet,
    SingularOffset,
    UnsupportedCombination,
    ZeroLambda,
)
from .lorentz import cross, euclidean_sq, inner
from .surfaces import CaseTag, DarbouxData, StripCurve, darboux_at

TOL_SINGULAR = 1e-6
TOL_NULL_TANGENT = 1e-9

S, T = CaseTag.SPACELIKE_SURFACE, CaseTag.TIMELIKE_SURFACE_TIMELIKE_CURVE
M = CaseTag.TIMELIKE_SURFACE_SPACELIKE_CURVE

# (partner case, base case) -> pair type
PAIR_TYPES = {(S, S): 1, (S, T): 2, (T, T): 3, (T, S): 4, (M, M): 5}


# -- construction ----------------------------------------------------------------

def offset_coefficients(case: CaseTag, lam: float, kg1, tg1):
    """Coefficients ``(c_T, c_n)`` of the offset velocity ``dx/ds1 = c_T T1 + c_n n1``."""
    if case is CaseTag.SPACELIKE_SURFACE:
        return 1 - lam * kg1, lam * tg1
    return 1 + lam * kg1, lam * case.epsilon * tg1


def _offset_jets(base: StripCurve, lam: float, t, order: int):
    """Partner position (order+1), base frame (order) and offset velocity jets."""
    x1, n1 = base.local(t, order + 2)
    T1, sigma1 = unit_tangent(x1)
    k = order_of(T1)
    g1 = cross(vtrunc(n1, k), T1)
    x = vadd(vtrunc(x1, k), vscale(g1, lam))
    dx = vdiff(x)
    return x, dx, vtrunc(T1, k - 1), vtrunc(n1, k - 1), sigma1


def construct_partner(base: StripCurve, lam: float, samples: int = 256) -> StripCurve:
    """Offset strip ``x1 + lam g1`` with its normal field in ``span{T1, n1}``.

    The normal is ``<x', n1> T1 - <x', T1> n1`` normalised, oriented so that
    its ``n1`` coefficient is positive at the start of the domain.
    """
    lam = float(lam)
    if lam == 0.0:
        raise ZeroLambda("the offset constant must be nonzero")
    t = np.linspace(base.t0, base.t1, samples)
    x, dx, T1, n1, sigma1 = _offset_jets(base, lam, t, 0)
    dxv, T1v = vvalue(dx), vvalue(T1)
    cT = inner(dxv, T1v) / (sigma1.value * inner(T1v, T1v))
    if np.any(np.abs(cT) < TOL_SINGULAR) or np.any(np.sign(cT) != np.sign(cT[0])):
        i = int(np.argmin(np.abs(cT)))
        s1 = float(base.arc.s_of_t(t[i]))
        raise SingularOffset(f"tangential offset coefficient vanishes near s1={s1!r}, t={float(t[i])!r} (value {float(cT[i])!r})")
    q, e2 = inner(dxv, dxv), euclidean_sq(dxv)
    if np.any(np.abs(q) <= TOL_NULL_TANGENT * e2) or np.any(np.sign(q) != np.sign(q[0])):
        i = int(np.argmin(np.abs(q) / e2))
        raise NullPartnerTangent(f"offset tangent reaches the null cone near t={float(t[i])!r}")
    # the n1 coefficient of m is -<x', T1> = -sigma1 cT <T1, T1>
    orient = -float(np.sign(cT[0]) * np.sign(inner(T1v[0], T1v[0])))

    def local(tt, order):
        x, dx, T1, n1, _ = _offset_jets(base, lam, tt, order)
        m = vadd(vscale(T1, inner(dx, n1)), vscale(n1, -inner(dx, T1)))
        scale = jets.reciprocal(jets.sqrt_abs(inner(m, m))) * orient
        return vtrunc(x, order), vscale(m, scale)

    name = f"{base.name}+{lam!r}g" if base.name else ""
    partner = StripCurve(local, base.t0, base.t1, name, base.tol, base.samples)
    try:
        partner.curve_character
    except (NullTangent, CausalCharacterChange) as exc:
        raise NullPartnerTangent(str(exc)) from exc
    return partner


# -- residual bookkeeping ----------------------------------------------------------

@dataclass
class Residual:
    identity: str
    variant: str
    lhs: np.ndarray = field(repr=False)
    rhs: np.ndarray = field(repr=False)
    mask: np.ndarray = field(repr=False, default=None)

    def _diff(self):
        d = np.broadcast_to(np.asarray(self.lhs - self.rhs, dtype=float), np.shape(self.lhs + self.rhs))
        return d if self.mask is None else d[self.mask]

    @property
    def key(self) -> str:
        return f"{self.identity}[{self.variant}]"

    @property
    def abs_max(self) -> float:
        return float(np.max(np.abs(self._diff())))

    @property
    def rms(self) -> float:
        return float(np.sqrt(np.mean(self._diff() ** 2)))

    @property
    def scale(self) -> float:
        lhs = np.broadcast_to(self.lhs, np.shape(self.lhs + self.rhs))
        rhs = np.broadcast_to(self.rhs, np.shape(self.lhs + self.rhs))
        if self.mask is not None:
            lhs, rhs = lhs[self.mask], rhs[self.mask]
        return float(max(np.max(np.abs(lhs)), np.max(np.abs(rhs))))

    @property
    def rel_max(self) -> float:
        """Max residual over ``max(1, max |term|)``."""
        return self.abs_max / max(1.0, self.scale)

    def passes(self, tol: float) -> bool:
        return bool(self.rel_max <= tol)


def central_difference(f: np.ndarray, h: float) -> np.ndarray:
    """Five-point central difference; the two samples at each end are NaN."""
    out = np.full_like(f, np.nan, dtype=float)
    out[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    return out


# -- pair record ----------------------------------------------------------------------

@dataclass
class PairRecord:
    base: StripCurve = field(repr=False)
    partner: StripCurve = field(repr=False)
    lam: float
    pair_type: int
    s1: np.ndarray = field(repr=False)
    t: np.ndarray = field(repr=False)
    base_frame: DarbouxData = field(repr=False)
    partner_frame: DarbouxData = field(repr=False)
    theta: np.ndarray = field(repr=False)
    speed_ratio: np.ndarray = field(repr=False)
    branch: int = 1
    g_sign: int = 1
    lambda_deviation: float = 0.0
    g_coincidence: float = 0.0
    x1: np.ndarray = field(repr=False, default=None)
    x: np.ndarray = field(repr=False, default=None)
    ledger: dict = field(repr=False, default_factory=dict)

    @property
    def h(self) -> float:
        return float(self.s1[1] - self.s1[0])

    @property
    def interior(self) -> np.ndarray:
        m = np.ones(self.s1.shape, dtype=bool)
        m[:2] = m[-2:] = False
        return m

    def d_ds1(self, f: np.ndarray) -> np.ndarray:
        return central_difference(f, self.h)

    # convenient aliases
    @property
    def kg1(self):
        return self.base_frame.kg

    @property
    def kn1(self):
        return self.base_frame.kn

    @property
    def tg1(self):
        return self.base_frame.tg

    @property
    def kg(self):
        return self.partner_frame.kg

    @property
    def kn(self):
        return self.partner_frame.kn

    @property
    def tg(self):
        return self.partner_frame.tg

    def record(self, *residuals: Residual):
        for r in residuals:
            self.ledger[r.key] = r
        return residuals


def pair_type_of(partner_case: CaseTag, base_case: CaseTag) -> int:
    try:
        return PAIR_TYPES[(partner_case, base_case)]
    except KeyError:
        raise UnsupportedCombination(
            f"no pair type for partner {partner_case.value} with base {base_case.value}") from None


def pair_type(p: PairRecord) -> int:
    return pair_type_of(p.partner_frame.case, p.base_frame.case)


def _theta(ptype: int, alpha, beta):
    if ptype in (1, 3):
        return np.arctanh(beta / alpha)
    if ptype in (2, 4):
        return np.arctanh(alpha / beta)
    return np.arctan2(beta, alpha)


def build_pair(base: StripCurve, lam: float, grid: int = 512, partner: StripCurve | None = None) -> PairRecord:
    """Construct the partner and tabulate both strips on a uniform base grid."""
    if grid < 32:
        raise ValueError("grid must have at least 32 samples")
    if partner is None:
        partner = construct_partner(base, lam)
    s1 = np.linspace(0.0, base.length, grid)
    t = base.t_of_s(s1)
    db = darboux_at(base, t)
    dp = darboux_at(partner, t)
    ptype = pair_type_of(dp.case, db.case)
    ratio = partner.speed(t) / base.speed(t)
    alpha = inner(dp.T, db.T) / inner(db.T, db.T)
    beta = inner(dp.T, db.n) / inner(db.n, db.n)
    theta = _theta(ptype, alpha, beta)
    # types 2 and 4: T = branch (sinh theta T1 + cosh theta n1)
    branch = int(np.sign(beta[0])) if ptype in (2, 4) else 1
    xb = base.position_jets(t, 0)
    xp = partner.position_jets(t, 0)
    x1v, xv = vvalue(xb), vvalue(xp)
    lam_rec = inner(xv - x1v, db.g) / inner(db.g, db.g)
    lam_dev = float(np.max(np.abs(lam_rec - np.mean(lam_rec))))
    gdot = np.abs(inner(dp.g, db.g))
    g_co = float(np.max(np.abs(1 - gdot / np.sqrt(np.abs(inner(dp.g, dp.g) * inner(db.g, db.g))))))
    g_sign = int(np.sign(inner(dp.g[0], db.g[0]) / inner(db.g[0], db.g[0])))
    return PairRecord(base, partner, float(lam), ptype, s1, t, db, dp, theta, ratio, branch, g_sign,
                      lam_dev, g_co, x1v, xv)


def theta_and_speed_ratio(p: PairRecord, s1=None):
    """Signed angle and ``ds/ds1`` on the grid, or interpolated at ``s1``."""
    if s1 is None:
        return p.theta, p.speed_ratio
    return np.interp(s1, p.s1, p.theta), np.interp(s1, p.s1, p.speed_ratio)


def _hyp(ptype: int, theta):
    """(C, S) pair used by the type: cosh/sinh, or cos/sin for type 5."""
    if ptype == 5:
        return np.cos(theta), np.sin(theta)
    return np.cosh(theta), np.sinh(theta)


def verify_tangent_decomposition(p: PairRecord):
    """``(ds/ds1) T = c_T T1 + c_n n1`` with coefficients from the base invariants."""
    lam, typ = p.lam, p.pair_type
    cT, cn = offset_coefficients(p.base_frame.case, lam, p.kg1, p.tg1)
    C, Sn = _hyp(typ, p.theta)
    a, b = (C, Sn) if typ in (1, 3, 5) else (p.branch * Sn, p.branch * C)
    q = np.abs(cT**2 * np.sign(inner(p.base_frame.T, p.base_frame.T))
               + cn**2 * np.sign(inner(p.base_frame.n, p.base_frame.n)))
    return p.record(
        Residual("tangent_decomposition", "tangential", p.speed_ratio * a, cT),
        Residual("tangent_decomposition", "normal", p.speed_ratio * b, cn),
        Residual("speed_ratio", "norm", p.speed_ratio, np.sqrt(q)),
    )


def verify_definition(p: PairRecord, tol_lambda: float = 1e-9, tol_g: float = 1e-8) -> dict:
    return {
        "lambda_deviation": p.lambda_deviation,
        "g_coincidence": p.g_coincidence,
        "pass": p.lambda_deviation <= tol_lambda and p.g_coincidence <= tol_g,
    }


# -- torsion-rate characterisation ------------------------------------------------------

def _torsion_rate_bracket(p: PairRecord):
    lam, typ = p.lam, p.pair_type
    kg1, kn1, tg1, kn = p.kg1, p.kn1, p.tg1, p.kn
    dkg1 = p.d_ds1(kg1)
    th = p.theta
    if typ in (1, 4):
        c = 1 - lam * kg1
        div = np.cosh(th) if typ == 1 else np.sinh(th)
        return (c**2 - lam**2 * tg1**2) / c * (-kn1 + kn * c / div) - lam**2 * tg1 * dkg1 / c, 1
    if typ in (2, 3):
        c = 1 + lam * kg1
        div = np.sinh(th) if typ == 2 else np.cosh(th)
        return (c**2 - lam**2 * tg1**2) / c * (-kn1 + kn * c / div) - lam**2 * tg1 * dkg1 / c, -1
    c = 1 + lam * kg1
    return (c**2 + lam**2 * tg1**2) / c * (kn1 - kn * c / np.cos(th)) + lam**2 * tg1 * dkg1 / c, 1


def verify_torsion_rate(p: PairRecord):
    """Rate of the base geodesic torsion in terms of the pair invariants.

    Two variants: ``stated`` uses the stated prefix ``+-1/lam`` for the
    type and ``flipped`` its negative.
    """
    bracket, sign = _torsion_rate_bracket(p)
    lhs = p.d_ds1(p.tg1)
    m = p.interior
    return p.record(
        Residual("torsion_rate", "stated", lhs, sign / p.lam * bracket, m),
        Residual("torsion_rate", "flipped", lhs, -sign / p.lam * bracket, m),
    )


def torsion_rate_convention(p: PairRecord, tol: float = 1e-6) -> str:
    """``"stated"``, ``"flipped"``, ``"both"`` (non-discriminating) or ``"neither"``."""
    ok = [v for v in ("stated", "flipped") if p.ledger[f"torsion_rate[{v}]"].passes(tol)]
    return {0: "neither", 2: "both"}.get(len(ok), ok[0] if ok else "neither")


def verify_asymptotic_cases(p: PairRecord, tol_line: float = 1e-8):
    """Reductions of the torsion-rate law for an asymptotic partner (type 1 only)."""
    if p.pair_type != 1 or np.max(np.abs(p.kn)) > tol_line:
        raise PreconditionNotMet("needs a type 1 pair whose partner is an asymptotic line")
    lam, kg1, kn1, tg1 = p.lam, p.kg1, p.kn1, p.tg1
    dtg1, dkg1 = p.d_ds1(tg1), p.d_ds1(kg1)
    m = p.interior
    out = []
    if np.max(np.abs(kg1)) <= tol_line:
        out.append(Residual("asymptotic_geodesic_rate", "stated", lam * dtg1, kn1 * (1 - lam**2 * tg1**2), m))
        out.append(Residual("asymptotic_geodesic_rate", "flipped", lam * dtg1, -kn1 * (1 - lam**2 * tg1**2), m))
    if np.max(np.abs(kn1)) <= tol_line:
        out.append(Residual("asymptotic_pair_rate", "stated", dtg1, lam * tg1 * dkg1 / (1 - lam * kg1), m))
    if np.max(np.abs(tg1)) <= tol_line:
        out.append(Residual("asymptotic_principal_rate", "stated", lam * dtg1, kg1 * (1 - lam * kg1), m))
    return p.record(*out)


# -- curvature coupling -------------------------------------------------------------------

def verify_curvature_coupling(p: PairRecord, tol_line: float = 1e-8):
    """Algebraic relation between (k_g, tau_g) and (k_g1, tau_g1), per type."""
    lam, typ = p.lam, p.pair_type
    kg, tg, kg1, tg1 = p.kg, p.tg, p.kg1, p.tg1
    rows = {
        1: (kg - kg1, lam * (kg * kg1 + tg * tg1)),
        2: (kg + kg1, -lam * (kg * kg1 + tg * tg1)),
        3: (kg - kg1, -lam * (kg * kg1 - tg * tg1)),
        4: (kg + kg1, lam * (kg * kg1 + tg * tg1)),
        5: (kg - kg1, lam * (tg * tg1 - kg * kg1)),
    }
    if typ == 5:
        derived = (kg - kg1, -lam * (kg * kg1 - tg * tg1))
    elif p.base_frame.case is CaseTag.SPACELIKE_SURFACE:
        derived = (kg - kg1, lam * (kg * kg1 + tg * tg1))
    else:
        derived = (kg - kg1, -lam * (kg * kg1 + tg * tg1))
    out = [Residual("curvature_coupling", "stated", *rows[typ]),
           Residual("curvature_coupling", "derived", *derived)]
    if typ == 1:
        if np.max(np.abs(tg)) <= tol_line or np.max(np.abs(tg1)) <= tol_line:
            out.append(Residual("coupling_principal", "stated", kg - kg1, lam * kg * kg1))
        if np.max(np.abs(kg1)) <= tol_line:
            out.append(Residual("coupling_geodesic_base", "stated", kg, lam * tg * tg1))
        if np.max(np.abs(kg)) <= tol_line:
            out.append(Residual("coupling_geodesic_partner", "stated", kg1, -lam * tg * tg1))
    return p.record(*out)


# -- frame transfer ----------------------------------------------------------------------

def verify_frame_transfer(p: PairRecord):
    """Four transfer relations between the two Darboux frames, per type."""
    typ, r = p.pair_type, p.speed_ratio
    kg, kn, tg, kg1, kn1, tg1 = p.kg, p.kn, p.tg, p.kg1, p.kn1, p.tg1
    th = p.theta
    dth = p.d_ds1(th)
    ch, sh = np.cosh(th), np.sinh(th)
    c, s = np.cos(th), np.sin(th)
    table = {
        1: (kn * r - dth, kg1 * sh - tg1 * ch, kg1 * ch + tg1 * sh, (-kg * sh + tg * ch) * r),
        2: (dth + kn * r, kg1 * ch - tg1 * sh, kg1 * sh + tg1 * ch, (kg * ch - tg * sh) * r),
        3: (kn * r + dth, kg1 * sh - tg1 * ch, kg1 * ch + tg1 * sh, (-kg * sh + tg * ch) * r),
        4: (kn * r - dth, kg1 * ch + tg1 * sh, kg1 * sh + tg1 * ch, (kg * ch - tg * sh) * r),
        5: (kn * r + dth, -kg1 * s + tg1 * c, kg1 * c + tg1 * s, (kg * s + tg * c) * r),
    }
    i, ii, iii, iv = table[typ]
    di, dii, diii, div = _transfer_derived(p, dth)
    m = p.interior
    return p.record(
        Residual("transfer_normal_curvature", "stated", kn1, i, m),
        Residual("transfer_geodesic_torsion", "stated", tg * r, ii),
        Residual("transfer_geodesic_curvature", "stated", kg * r, iii),
        Residual("transfer_base_torsion", "stated", tg1, iv),
        Residual("transfer_normal_curvature", "derived", kn1, di, m),
        Residual("transfer_geodesic_torsion", "derived", tg * r, dii),
        Residual("transfer_geodesic_curvature", "derived", kg * r, diii),
        Residual("transfer_base_torsion", "derived", tg1, div),
    )


def _transfer_derived(p: PairRecord, dth):
    """Transfer relations re-derived from the frame equations of both strips."""
    typ, r, b = p.pair_type, p.speed_ratio, p.branch
    kg, kn, tg, kg1, tg1 = p.kg, p.kn, p.tg, p.kg1, p.tg1
    C, S = _hyp(typ, p.theta)
    if typ == 5:
        return kn * r + dth, -kg1 * S + tg1 * C, kg1 * C + tg1 * S, (kg * S + tg * C) * r
    if typ in (1, 3):
        return kn * r - dth, kg1 * S + tg1 * C, kg1 * C + tg1 * S, (-kg * S + tg * C) * r
    return kn * r - dth, -b * (kg1 * C + tg1 * S), -b * (kg1 * S + tg1 * C), -b * (kg * C - tg * S) * r


# -- base invariants from partner data ---------------------------------------------------

def invariants_via_closed_forms(p: PairRecord, tol_line: float = 1e-8):
    """Recover ``k_g1`` and ``tau_g1`` from partner invariants, theta and ds/ds1."""
    lam, typ, r = p.lam, p.pair_type, p.speed_ratio
    kg, tg = p.kg, p.tg
    th = p.theta
    ch, sh, c, s = np.cosh(th), np.sinh(th), np.cos(th), np.sin(th)
    kg_rows = {
        1: ((1 + lam * kg) * ch - lam * tg * sh) * (-kg - lam * kg**2 + lam * tg**2),
        2: ((1 + lam * kg) * sh - lam * tg * ch) * (kg + lam * kg**2 - lam * tg**2),
        3: ((1 - lam * kg) * ch + lam * tg * sh) * (-kg + lam * kg**2 - lam * tg**2),
        4: ((1 - lam * kg) * sh + lam * tg * ch) * (kg - lam * kg**2 + lam * tg**2),
        5: ((1 - lam * kg) * c + lam * tg * s) * (-kg + lam * kg**2 + lam * tg**2),
    }
    tg_rows = {
        1: (tg + lam * kg * tg) * ch**2 + (-kg - lam * kg**2 + lam * tg**2) * sh * ch + lam * tg * kg * sh**2,
        2: tg * sh**2 - lam * tg * kg + (lam * tg**2 - kg - lam * kg**2) * sh * ch,
        3: (tg - lam * kg * tg) * ch**2 + (-kg + lam * kg**2 + lam * tg**2) * sh * ch - lam * tg * kg * s**2,
        4: (tg + lam * kg * tg) * sh**2 - (lam * tg**2 + kg + lam * kg**2) * sh * ch + lam * tg * kg * ch**2,
        5: (tg - lam * kg * tg) * c**2 + (kg - lam * kg**2 + lam * tg**2) * s * c + lam * tg * kg * s**2,
    }
    kg1_pred = kg_rows[typ] * r**3
    tg1_pred = tg_rows[typ] * r**2
    # the base is the offset of the partner by -g_sign * lam along g
    cT, cn = offset_coefficients(p.partner_frame.case, -p.g_sign * lam, kg, tg)
    kg1_derived = p.g_sign * r**2 * (cT * kg + cn * tg)
    out = [
        Residual("base_geodesic_curvature", "stated", p.kg1, kg1_pred),
        Residual("base_geodesic_curvature", "sign-flipped", p.kg1, -kg1_pred),
        Residual("base_geodesic_curvature", "derived", p.kg1, kg1_derived),
        Residual("base_geodesic_torsion", "stated", p.tg1, tg1_pred),
        Residual("base_geodesic_torsion", "derived", p.tg1, _transfer_derived(p, 0.0)[3]),
    ]
    if typ == 3:
        alt = ((tg - lam * kg * tg) * ch**2 + (-kg + lam * kg**2 + lam * tg**2) * sh * ch
               - lam * tg * kg * sh**2) * r**2
        out.append(Residual("base_geodesic_torsion", "hyperbolic-square", p.tg1, alt))
    if typ == 1:
        if np.max(np.abs(kg)) <= tol_line:
            pred = lam * tg**2 * r**3 * (ch - lam * tg * sh)
            out += [Residual("base_curvature_geodesic_partner", "stated", p.kg1, pred),
                    Residual("base_curvature_geodesic_partner", "sign-flipped", p.kg1, -pred),
                    Residual("base_torsion_geodesic_partner", "stated", p.tg1,
                             (tg * ch**2 + lam * tg**2 * sh * ch) * r**2),
                    Residual("base_torsion_geodesic_partner", "derived", p.tg1, tg * ch * r)]
        if np.max(np.abs(tg)) <= tol_line:
            pred = -(kg + 2 * lam * kg**2 + lam**2 * kg**3) * r**3 * ch
            out += [Residual("base_curvature_principal_partner", "stated", p.kg1, pred),
                    Residual("base_curvature_principal_partner", "sign-flipped", p.kg1, -pred),
                    Residual("base_torsion_principal_partner", "stated", p.tg1,
                             -(kg + lam * kg**2) * sh * ch * r**2)]
    return p.record(*out)


def verify_partner_line_relations(p: PairRecord, tol_line: float = 1e-8):
    """Type 1 relations for a geodesic partner or a principal-line partner."""
    if p.pair_type != 1:
        raise PreconditionNotMet(f"needs a type 1 pair, got type {p.pair_type}")
    lam, kg, tg, kg1, tg1 = p.lam, p.kg, p.tg, p.kg1, p.tg1
    out = []
    if np.max(np.abs(kg)) <= tol_line:
        out.append(Residual("geodesic_partner_torsion", "stated", tg1,
                            tg * (1 - lam * kg1) * ((1 - lam * kg1) + lam**2 * tg * tg1)))
        out.append(Residual("geodesic_partner_torsion", "derived", tg1, tg * (1 - lam * kg1)))
    if np.max(np.abs(tg)) <= tol_line:
        prod = kg * (1 + lam * kg) * (1 - lam * kg1)
        out.append(Residual("principal_partner_product", "stated", prod, np.full_like(prod, -1 / lam)))
        out.append(Residual("principal_partner_product", "sign-flipped", prod, np.full_like(prod, 1 / lam)))
        out.append(Residual("principal_partner_product", "constancy", prod, np.full_like(prod, np.mean(prod))))
        out.append(Residual("principal_partner_product", "derived", (1 + lam * kg) * (1 - lam * kg1),
                            np.ones_like(prod)))
    if not out:
        raise PreconditionNotMet("partner is neither a geodesic nor a principal line")
    return p.record(*out)


def verify_bertrand_special_case(p: PairRecord, tol_line: float = 1e-8):
    """Both curves asymptotic: the classical Bertrand law and Frenet/Darboux coincidence."""
    if np.max(np.abs(p.kn)) > tol_line or np.max(np.abs(p.kn1)) > tol_line:
        raise PreconditionNotMet("both curves must be asymptotic lines")
    lam, kg1, tg1 = p.lam, p.kg1, p.tg1
    x, _ = p.base.local(p.t, 3)
    fr = frenet_from_jets(x)
    m = p.interior
    return p.record(
        Residual("bertrand_rate", "stated", p.d_ds1(tg1), lam * tg1 * p.d_ds1(kg1) / (1 - lam * kg1), m),
        Residual("frenet_darboux_curvature", "stated", kg1, fr.k1),
        Residual("frenet_darboux_torsion", "stated", tg1, fr.k2),
    )


# -- orientation covariance --------------------------------------------------------------

@dataclass
class CovarianceReport:
    position_gap: float
    theta_mirror: float
    flips: dict  # invariant name -> max |flipped + original|
    keeps: dict  # invariant name -> max |flipped - original|


def orientation_covariance(base: StripCurve, lam: float, grid: int = 512) -> CovarianceReport:
    """Compare the partner of ``lam`` on the flipped base with the partner of ``-lam``."""
    flipped = base.flipped()
    a = build_pair(base, -lam, grid)
    b = build_pair(flipped, lam, grid)
    flips, keeps = {}, {}
    for name in ("kg1", "kn1", "tg1"):
        u, v = getattr(a, name), getattr(b, name)
        flips[name] = float(np.max(np.abs(u + v)))
        keeps[name] = float(np.max(np.abs(u - v)))
    return CovarianceReport(float(np.max(np.abs(a.x - b.x))), float(np.max(np.abs(a.theta + b.theta))), flips, keeps)


# -- full suite ---------------------------------------------------------------------------

OPTIONAL_CHECKS: tuple = (
    verify_asymptotic_cases,
    verify_partner_line_relations,
    verify_bertrand_special_case,
)


def run_all(p: PairRecord, tol_line: float = 1e-8) -> dict:
    verify_tangent_decomposition(p)
    verify_torsion_rate(p)
    verify_curvature_coupling(p, tol_line)
    verify_frame_transfer(p)
    invariants_via_closed_forms(p, tol_line)
    for check in OPTIONAL_CHECKS:
        try:
            check(p, tol_line)
        except PreconditionNotMet:
            pass
    return p.ledger

