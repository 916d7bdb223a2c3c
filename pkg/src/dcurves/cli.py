"""Command-line front end: ``frame``, ``pair`` and ``verify``.

Exit codes: 0 pass, 2 configuration error, 3 geometry error, 4 residual failure.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import config as cfg
from . import report
from .curves import UnitSpeedCurve, frenet_from_jets, vvalue
from .dpair import build_pair, run_all, verify_definition
from .errors import ConfigError, ExpressionError, GeometryError
from .surfaces import classify_line, darboux_at, frenet_darboux_link
from .witnesses import CATALOG, witness

EXIT_OK, EXIT_CONFIG, EXIT_GEOMETRY, EXIT_RESIDUAL = 0, 2, 3, 4
FRAME_GRID = 256
PAIR_GRID = 512


def _vector_columns(cols: dict, name: str, v: np.ndarray):
    for i in range(3):
        cols[f"{name}{i + 1}"] = v[..., i]


# -- frame ---------------------------------------------------------------------------

def frame_report(scene: cfg.SceneConfig, curve: str, grid: int | None, frenet: bool = True) -> dict:
    if curve not in scene.curves:
        raise ConfigError(f"unknown curve {curve!r}")
    grid = grid or FRAME_GRID
    kind, obj = cfg.build_curve(scene, curve)
    strip = obj.strip() if kind == "surface" else obj if kind == "strip" else None
    if strip is not None:
        length, t_of_s, pos = strip.length, strip.t_of_s, strip.position_jets
    else:
        uc = UnitSpeedCurve(obj)
        length, t_of_s, pos = uc.arc.length, uc.t_of_s, obj.position_jets
    s = np.linspace(0.0, length, grid)
    t = t_of_s(s)
    cols = {"s": s, "t": t}
    _vector_columns(cols, "x", vvalue(pos(t, 0)))
    summary = {"curve": curve, "grid": grid, "length": float(length)}
    if frenet:
        fr = frenet_from_jets(pos(t, 3), where=t)
        _vector_columns(cols, "T", fr.T)
        _vector_columns(cols, "N", fr.N)
        _vector_columns(cols, "B", fr.B)
        cols["kappa"], cols["tau"] = fr.k1, fr.k2
        summary["tangent"] = "timelike" if fr.timelike else "spacelike"
    if strip is not None:
        d = darboux_at(strip, t)
        if not frenet:
            _vector_columns(cols, "T", d.T)
        _vector_columns(cols, "g", d.g)
        _vector_columns(cols, "n", d.n)
        cols["kg"], cols["kn"], cols["tg"] = d.kg, d.kn, d.tg
        summary["case"] = d.case.value
        lines = classify_line(strip)
        order = ("geodesic", "asymptotic line", "principal line")
        summary["lines"] = [c.value for c in sorted(lines, key=lambda c: order.index(c.value))]
        summary["classification"] = ", ".join(summary["lines"]) or "none"
        if frenet:
            link = frenet_darboux_link(strip, s)
            cols["phi"] = link.phi
            summary["frenet_darboux_form"] = link.form
            summary["frenet_darboux_signs"] = list(link.signs)
    return {"summary": summary, "series": cols}


# -- pair ----------------------------------------------------------------------------

def _pair_settings(scene: cfg.SceneConfig, name: str, grid: int | None, tol: float | None):
    sec = scene.pairs[name]
    lams = sec.values["lambda"]
    lams = [float(x) for x in (lams if isinstance(lams, list) else [lams])]
    grid = grid or int(sec.values.get("grid", PAIR_GRID))
    if tol is None and "tol" in sec.values:
        tol = float(sec.values["tol"])
    return sec.values["base"], lams, grid, tol


def _pair_entry(p, tol: float | None) -> dict:
    summ = report.ledger_summary(p.ledger, tol)
    return {
        "lambda": p.lam,
        "pair_type": p.pair_type,
        "grid": int(p.s1.size),
        "branch": p.branch,
        "g_sign": p.g_sign,
        "definition": verify_definition(p),
        "conventions": summ["conventions"],
        "residuals": summ["residuals"],
        "pass": summ["pass"] and verify_definition(p)["pass"],
        "series": {
            "s1": p.s1, "theta": p.theta, "speed_ratio": p.speed_ratio,
            "kg1": p.kg1, "kn1": p.kn1, "tg1": p.tg1, "kg": p.kg, "kn": p.kn, "tg": p.tg,
        },
    }


def _run_pairs(jobs, workers: int):
    """Run ``(name, strip_factory, lam, grid)`` jobs; results keep input order."""

    def one(job):
        name, make, lam, grid = job
        p = build_pair(make(), lam, grid)
        run_all(p)
        return name, p

    if workers <= 1 or len(jobs) <= 1:
        return [one(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(one, jobs))


def pair_report(scene: cfg.SceneConfig, name: str, grid: int | None, tol: float | None, workers: int = 1) -> dict:
    if name not in scene.pairs:
        raise ConfigError(f"unknown pair {name!r}")
    base, lams, grid, tol = _pair_settings(scene, name, grid, tol)
    jobs = [(name, lambda: cfg.build_strip(scene, base), lam, grid) for lam in lams]
    entries = [_pair_entry(p, tol) for _, p in _run_pairs(jobs, workers)]
    return {"pair": name, "base": base, "entries": entries, "pass": all(e["pass"] for e in entries)}


# -- verify --------------------------------------------------------------------------

def suite_jobs(scene: cfg.SceneConfig | None, cli_grid: int | None):
    suite = scene.suite.values if scene is not None and scene.suite is not None else {}
    grid = cli_grid or int(suite.get("grid", PAIR_GRID))
    chosen = suite.get("witnesses", "all")
    if chosen == "all":
        ws = list(CATALOG)
    elif chosen == "none":
        ws = []
    else:
        names = chosen if isinstance(chosen, list) else [chosen]
        try:
            ws = [witness(str(n)) for n in names]
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from exc
    jobs = [(w.name, w.strip, w.lam, grid) for w in ws]
    if scene is not None:
        for pname in scene.pairs:
            base, lams, pgrid, _ = _pair_settings(scene, pname, cli_grid, None)
            for lam in lams:
                label = pname if len(lams) == 1 else f"{pname}[lambda={lam!r}]"
                jobs.append((label, lambda b=base: cfg.build_strip(scene, b), lam, pgrid))
    return jobs, grid


def verify_report(scene: cfg.SceneConfig | None, grid: int | None, tol: float | None, workers: int = 1) -> dict:
    if tol is None and scene is not None and scene.suite is not None and "tol" in scene.suite.values:
        tol = float(scene.suite.values["tol"])
    jobs, grid = suite_jobs(scene, grid)
    runs = _run_pairs(jobs, workers)
    summ = report.suite_summary(runs, grid, tol)
    pairs = []
    for name, p in runs:
        d = verify_definition(p)
        pairs.append({"name": name, "pair_type": p.pair_type, "lambda": p.lam, **d})
    ok = summ["pass"] and all(x["pass"] for x in pairs)
    return {
        "version": __version__,
        "grid": grid,
        "tolerance_override": tol,
        "pass": ok,
        "identities": summ["identities"],
        "conventions": summ["conventions"],
        "pairs": pairs,
    }


# -- output --------------------------------------------------------------------------

def _frame_text(rep: dict, fmt: str) -> str:
    if fmt == "csv":
        return report.dumps_csv(rep["series"])
    return report.dumps_json({"summary": rep["summary"], "series": rep["series"]})


def _pair_text(rep: dict, fmt: str) -> str:
    if fmt == "json":
        return report.dumps_json(rep)
    cols: dict = {}
    for e in rep["entries"]:
        n = len(e["series"]["s1"])
        block = {"lambda": np.full(n, e["lambda"]), **e["series"]}
        for k, v in block.items():
            cols.setdefault(k, []).extend(np.asarray(v, dtype=float).tolist())
    return report.dumps_csv(cols)


def _verify_text(rep: dict, fmt: str) -> str:
    if fmt == "json":
        return report.dumps_json(rep)
    ids = rep["identities"]
    keys = list(ids)
    cols = {"identity": keys}
    for field in ("max_residual", "max_abs", "rms", "tol", "grid", "pass", "role", "pairs", "worst"):
        cols[field] = [ids[k][field] for k in keys]
    return report.dumps_csv(cols)


def _residual_table(entries: dict, conventions: dict) -> str:
    lines = []
    for k, e in entries.items():
        mark = "ok  " if e["pass"] else ("alt " if e["role"] == "candidate" else "FAIL")
        lines.append(f"  {mark} {k:58s} max {report.fmt(e['max_residual']):>24s}  tol {e['tol']:g}")
    for ident, who in conventions.items():
        lines.append(f"  convention {ident}: {who}")
    return "\n".join(lines)


def _load(path: str | None, required: bool = True):
    if path is None:
        if required:
            raise ConfigError("a configuration file is required")
        return None
    return cfg.load(path)


def cmd_frame(args) -> int:
    scene = _load(args.config)
    rep = frame_report(scene, args.curve, args.grid, frenet=not args.no_frenet)
    fmt = args.format or scene.output.get("format", "json")
    report.emit(_frame_text(rep, fmt), args.out)
    paths = report.figure_paths(args.out, args.figures, f"frame-{args.curve}", ("frenet", "darboux"))
    if not args.no_figures:
        report.plot_frame(rep["series"], paths)
    summ = rep["summary"]
    if "classification" in summ:
        _log(args, f"{args.curve}: {summ['case']}; {summ['classification']}")
    return EXIT_OK


def cmd_pair(args) -> int:
    scene = _load(args.config)
    rep = pair_report(scene, args.pair, args.grid, args.tol, args.jobs)
    fmt = args.format or scene.output.get("format", "json")
    report.emit(_pair_text(rep, fmt), args.out)
    if fmt == "csv" and args.out and args.out != "-":
        from pathlib import Path

        p = Path(args.out)
        rows = {"lambda": [], "identity": [], "max_residual": [], "max_abs": [], "rms": [], "tol": [], "pass": [], "role": []}
        for e in rep["entries"]:
            for k, r in e["residuals"].items():
                rows["lambda"].append(e["lambda"])
                rows["identity"].append(k)
                for f in ("max_residual", "max_abs", "rms", "tol", "pass", "role"):
                    rows[f].append(r[f])
        report.emit(report.dumps_csv(rows), str(p.with_name(f"{p.stem}-residuals.csv")))
    for e in rep["entries"]:
        _log(args, f"{args.pair} lambda={report.fmt(e['lambda'])}: type {e['pair_type']}, "
                   f"{'pass' if e['pass'] else 'FAIL'}")
        _log(args, _residual_table(e["residuals"], e["conventions"]))
        if not args.no_figures:
            tag = "" if len(rep["entries"]) == 1 else f"-{e['lambda']!r}"
            paths = report.figure_paths(args.out, args.figures, f"pair-{args.pair}", ("angle", "invariants", "residuals"), tag)
            report.plot_pair(e["series"], e["residuals"], paths)
    return EXIT_OK if rep["pass"] else EXIT_RESIDUAL


def cmd_verify(args) -> int:
    scene = _load(args.config, required=False)
    rep = verify_report(scene, args.grid, args.tol, args.jobs)
    fmt = args.format or (scene.output.get("format", "json") if scene else "json")
    report.emit(_verify_text(rep, fmt), args.out)
    if not args.no_figures:
        report.plot_suite(rep["identities"], report.figure_paths(args.out, args.figures, "verify", ("residuals",)))
    failing = [k for k, v in rep["identities"].items() if not v["pass"] and v["role"] == "required"]
    _log(args, f"{len(rep['identities'])} identities over {len(rep['pairs'])} pairs; "
               f"{len(failing)} required identities fail; {'pass' if rep['pass'] else 'FAIL'}")
    for k in failing:
        v = rep["identities"][k]
        _log(args, f"  FAIL {k}: max {report.fmt(v['max_residual'])} > {v['tol']:g} on {', '.join(v['failing'])}")
    for ident, table in rep["conventions"].items():
        _log(args, f"  convention {ident}: " + ", ".join(f"{t} {w}" for t, w in table.items()))
    return EXIT_OK if rep["pass"] else EXIT_RESIDUAL


def _log(args, msg: str):
    if not args.quiet:
        print(msg, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=int, default=None, help="samples per curve (>= 32)")
    common.add_argument("--tol", type=float, default=None, help="override every residual tolerance")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--figures", default=None, help="directory for PNG figures")
    common.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    common.add_argument("--jobs", type=int, default=1, help="pairs computed concurrently")
    common.add_argument("-q", "--quiet", action="store_true", help="no summary on stderr")

    parser = argparse.ArgumentParser(prog="dcurves", description="Darboux frames and offset partners of curves in E^3_1.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("frame", parents=[common], help="tabulate Frenet and Darboux data of a curve")
    p.add_argument("config")
    p.add_argument("curve")
    p.add_argument("--no-frenet", action="store_true", help="omit the Frenet frame")
    p.set_defaults(func=cmd_frame)

    p = sub.add_parser("pair", parents=[common], help="build a partner and check every applicable identity")
    p.add_argument("config")
    p.add_argument("pair")
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("verify", parents=[common], help="run the witness catalogue and configured pairs")
    p.add_argument("config", nargs="?", default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.grid is not None and args.grid < 32:
            raise ConfigError("--grid must be at least 32")
        if args.tol is not None and not args.tol > 0:
            raise ConfigError("--tol must be positive")
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        return args.func(args)
    except (ConfigError, ExpressionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GeometryError as exc:
        print(f"geometry error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY


if __name__ == "__main__":
    sys.exit(main())
