"""Deterministic CSV/JSON emission, residual summaries and figures."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

# tolerance per identity family, on the relative residual of ``Residual.rel_max``
TOLERANCES = {
    "tangent_decomposition": 1e-8,
    "speed_ratio": 1e-8,
    "torsion_rate": 1e-6,
    "asymptotic_geodesic_rate": 1e-6,
    "asymptotic_pair_rate": 1e-6,
    "asymptotic_principal_rate": 1e-6,
    "curvature_coupling": 1e-7,
    "coupling_principal": 1e-7,
    "coupling_geodesic_base": 1e-7,
    "coupling_geodesic_partner": 1e-7,
    "transfer_normal_curvature": 1e-7,
    "transfer_geodesic_torsion": 1e-7,
    "transfer_geodesic_curvature": 1e-7,
    "transfer_base_torsion": 1e-7,
    "base_geodesic_curvature": 1e-6,
    "base_geodesic_torsion": 1e-6,
    "base_curvature_geodesic_partner": 1e-6,
    "base_torsion_geodesic_partner": 1e-6,
    "base_curvature_principal_partner": 1e-6,
    "base_torsion_principal_partner": 1e-6,
    "geodesic_partner_torsion": 1e-6,
    "principal_partner_product": 1e-6,
    "bertrand_rate": 1e-6,
    "frenet_darboux_curvature": 1e-7,
    "frenet_darboux_torsion": 1e-7,
}
DEFAULT_TOLERANCE = 1e-6

# families carrying competing printed readings; any one of them may hold
CANDIDATES = {
    "torsion_rate": ("stated", "flipped"),
    "asymptotic_geodesic_rate": ("stated", "flipped"),
    "base_geodesic_curvature": ("stated", "sign-flipped"),
    "base_geodesic_torsion": ("stated", "hyperbolic-square"),
    "base_curvature_geodesic_partner": ("stated", "sign-flipped"),
    "base_curvature_principal_partner": ("stated", "sign-flipped"),
    "principal_partner_product": ("stated", "sign-flipped"),
}


def tolerance(identity: str, override: float | None = None) -> float:
    if override is not None:
        return float(override)
    return TOLERANCES.get(identity, DEFAULT_TOLERANCE)


def role(identity: str, variant: str) -> str:
    """``candidate`` for one of several competing readings, else ``required``."""
    return "candidate" if variant in CANDIDATES.get(identity, ()) else "required"


# -- float and container formatting ----------------------------------------------------

def fmt(x) -> str:
    """Shortest round-trip decimal for a float."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def jsonable(obj):
    """Plain containers with floats; NaN and infinities become ``null``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps_json(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def dumps_csv(columns: dict) -> str:
    """One header row, one row per sample; floats in shortest round-trip form."""
    names = list(columns)
    cols = [np.asarray(columns[k]) for k in names]
    n = len(cols[0]) if cols else 0
    if any(len(c) != n for c in cols):
        raise ValueError("CSV columns have different lengths")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for i in range(n):
        w.writerow([_cell(c[i]) for c in cols])
    return buf.getvalue()


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def emit(text: str, out: str | None):
    if out is None or out == "-":
        import sys
        sys.stdout.write(text)
        return None
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")
    return path


# -- residual summaries ---------------------------------------------------------------

def residual_entry(r, tol_override: float | None = None) -> dict:
    tol = tolerance(r.identity, tol_override)
    return {
        "max_residual": r.rel_max,
        "max_abs": r.abs_max,
        "rms": r.rms,
        "tol": tol,
        "pass": r.passes(tol),
        "role": role(r.identity, r.variant),
    }


def family_outcome(entries: dict, identity: str) -> str | None:
    """Name of the passing candidate reading, ``"both"``, ``"neither"``, or None."""
    names = CANDIDATES.get(identity, ())
    present = [v for v in names if f"{identity}[{v}]" in entries]
    if not present:
        return None
    ok = [v for v in present if entries[f"{identity}[{v}]"]["pass"]]
    if len(ok) > 1:
        return "both"
    return ok[0] if ok else "neither"


def ledger_summary(ledger: dict, tol_override: float | None = None) -> dict:
    """Residual entries for one pair plus the candidate outcomes and overall pass."""
    entries = {k: residual_entry(ledger[k], tol_override) for k in sorted(ledger)}
    outcomes = {}
    for ident in sorted({r.identity for r in ledger.values()}):
        o = family_outcome(entries, ident)
        if o is not None:
            outcomes[ident] = o
    ok = all(e["pass"] for e in entries.values() if e["role"] == "required")
    ok = ok and all(o != "neither" for o in outcomes.values())
    return {"residuals": entries, "conventions": outcomes, "pass": ok}


def suite_summary(runs: list, grid: int, tol_override: float | None = None) -> dict:
    """Merge per-pair ledgers into ``{identity -> {max_residual, grid, pass}}``.

    ``runs`` is a list of ``(name, PairRecord)`` in report order.  A candidate
    reading of a family is accepted for a pair type when it passes on every
    pair of that type.
    """
    identities: dict = {}
    by_type: dict = {}
    for name, p in runs:
        for key in sorted(p.ledger):
            r = p.ledger[key]
            e = residual_entry(r, tol_override)
            agg = identities.setdefault(key, {
                "max_residual": 0.0, "max_abs": 0.0, "rms": 0.0, "grid": grid, "tol": e["tol"],
                "pass": True, "role": e["role"], "pairs": 0, "worst": name, "failing": []})
            if e["max_residual"] >= agg["max_residual"]:
                agg["worst"] = name
            agg["max_residual"] = max(agg["max_residual"], e["max_residual"])
            agg["max_abs"] = max(agg["max_abs"], e["max_abs"])
            agg["rms"] = max(agg["rms"], e["rms"])
            agg["pairs"] += 1
            if not e["pass"]:
                agg["pass"] = False
                agg["failing"].append(name)
            by_type.setdefault(p.pair_type, {}).setdefault(key, []).append(e["pass"])
    conventions: dict = {}
    for ptype in sorted(by_type):
        table = {k: {"pass": all(v)} for k, v in by_type[ptype].items()}
        for ident in sorted({k.split("[", 1)[0] for k in table}):
            o = family_outcome(table, ident)
            if o is not None:
                conventions.setdefault(ident, {})[f"type {ptype}"] = o
    ok = all(a["pass"] for a in identities.values() if a["role"] == "required")
    ok = ok and all(o != "neither" for c in conventions.values() for o in c.values())
    return {
        "identities": {k: identities[k] for k in sorted(identities)},
        "conventions": conventions,
        "pass": ok,
    }


# -- figures -------------------------------------------------------------------------

def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=100, metadata={"Software": None})
    fig.clf()


def figure_paths(out: str | None, figures: str | None, stem: str, names, tag: str = "") -> dict:
    """Where figures go: ``--figures DIR``, else next to ``--out``, else nowhere."""
    if figures:
        base = Path(figures)
        return {n: base / f"{stem}{tag}-{n}.png" for n in names}
    if out and out != "-":
        p = Path(out)
        return {n: p.with_name(f"{p.stem}{tag}-{n}.png") for n in names}
    return {}


def plot_frame(series: dict, paths: dict):
    if not paths:
        return []
    plt = _pyplot()
    written = []
    s = np.asarray(series["s"])
    groups = {"frenet": ("kappa", "tau"), "darboux": ("kg", "kn", "tg")}
    for name, keys in groups.items():
        keys = [k for k in keys if k in series]
        if not keys or name not in paths:
            continue
        fig, ax = plt.subplots(figsize=(6, 4))
        for k in keys:
            ax.plot(s, series[k], label=k)
        ax.set_xlabel("s")
        ax.legend()
        _save(fig, paths[name])
        plt.close(fig)
        written.append(paths[name])
    return written


def plot_pair(series: dict, ledger: dict, paths: dict):
    if not paths:
        return []
    plt = _pyplot()
    s1 = np.asarray(series["s1"])
    written = []
    if "angle" in paths:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(s1, series["theta"], label="theta")
        ax.plot(s1, series["speed_ratio"], label="ds/ds1")
        ax.set_xlabel("s1")
        ax.legend()
        _save(fig, paths["angle"])
        plt.close(fig)
        written.append(paths["angle"])
    if "invariants" in paths:
        fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
        for ax, keys, title in ((axes[0], ("kg1", "kn1", "tg1"), "base"), (axes[1], ("kg", "kn", "tg"), "partner")):
            for k in keys:
                ax.plot(s1, series[k], label=k)
            ax.set_title(title)
            ax.set_xlabel("s1")
            ax.legend()
        _save(fig, paths["invariants"])
        plt.close(fig)
        written.append(paths["invariants"])
    if "residuals" in paths:
        written += _residual_bars(plt, ledger, paths["residuals"])
    return written


def _residual_bars(plt, entries: dict, path: Path):
    keys = list(entries)
    vals = [max(entries[k]["max_residual"], 1e-18) for k in keys]
    fig, ax = plt.subplots(figsize=(8, max(3, 0.22 * len(keys))))
    colors = ["tab:green" if entries[k]["pass"] else "tab:red" for k in keys]
    ax.barh(range(len(keys)), vals, color=colors)
    ax.scatter([entries[k]["tol"] for k in keys], range(len(keys)), marker="|", color="k", s=80)
    ax.set_yticks(range(len(keys)))
    ax.set_yticklabels(keys, fontsize=6)
    ax.set_xscale("log")
    ax.set_xlabel("max relative residual")
    ax.invert_yaxis()
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
    return [path]


def plot_suite(identities: dict, paths: dict):
    if not paths:
        return []
    return _residual_bars(_pyplot(), identities, paths["residuals"])
