"""Scene configuration: a small nested key/value format.

Example::

    # surfaces are built-in families or three expressions in u, v
    surface cyl { family = cylinder  r = 1  u = [-5, 5]  v = [-7, 7] }
    curve c1 { surface = cyl  u = "0"  v = "t"  t = [0, 6.283185307179586] }
    curve line { x = ["t", "0", "1"]  t = [0, 1] }
    pair p1 { base = c1  lambda = 0.5  grid = 512 }
    suite { witnesses = all  tol = 1e-6 }
    output { format = json }

Grammar::

    file    := item*
    item    := IDENT IDENT? '{' item* '}' | IDENT '=' value
    value   := STRING | NUMBER | IDENT | '[' (value (',' value)*)? ']'

Keys and values may be separated by newlines, spaces or ``;``.  ``#``
starts a comment running to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, ExpressionError

_TOKEN = re.compile(
    r"""(?P<ws>[ \t\r;]+)|(?P<nl>\n)|(?P<comment>\#[^\n]*)
       |(?P<str>"(?:[^"\\\n]|\\.)*")
       |(?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?(?![A-Za-z_]))
       |(?P<ident>[A-Za-z_][A-Za-z_0-9.\-]*)
       |(?P<punct>[{}\[\]=,])""",
    re.VERBOSE,
)

SECTION_KINDS = ("surface", "curve", "pair", "suite", "output")


@dataclass
class Section:
    kind: str
    name: str | None
    values: dict
    line: int


def _tokenize(text: str):
    line = 1
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ConfigError(f"line {line}: unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind == "nl":
            line += 1
        elif kind not in ("ws", "comment"):
            out.append((kind, m.group(), line))
        pos = m.end()
    out.append(("end", "", line))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, value=None, kind=None):
        tok = self.toks[self.i]
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = value if value is not None else kind
            raise ConfigError(f"line {tok[2]}: expected {want!r}, found {tok[1] or 'end of file'!r}")
        self.i += 1
        return tok

    def items(self, closing: str | None):
        sections, values = [], {}
        while True:
            kind, text, line = self.peek()
            if closing is None and kind == "end":
                break
            if closing is not None and text == closing:
                break
            if kind != "ident":
                raise ConfigError(f"line {line}: expected a key or section, found {text or 'end of file'!r}")
            if self.peek(1)[1] == "=":
                self.take()
                self.take("=")
                if text in values:
                    raise ConfigError(f"line {line}: duplicate key {text!r}")
                values[text] = self.value()
            else:
                self.take()
                name = None
                if self.peek()[0] in ("ident", "str"):
                    name = self._name(self.take())
                self.take("{")
                inner_sections, inner = self.items("}")
                self.take("}")
                if inner_sections:
                    raise ConfigError(f"line {line}: sections cannot be nested inside {text!r}")
                sections.append(Section(text, name, inner, line))
        return sections, values

    @staticmethod
    def _name(tok):
        return tok[1][1:-1] if tok[0] == "str" else tok[1]

    def value(self):
        kind, text, line = self.peek()
        if kind == "str":
            self.take()
            return bytes(text[1:-1], "utf-8").decode("unicode_escape")
        if kind == "num":
            self.take()
            return int(text) if re.fullmatch(r"[-+]?\d+", text) else float(text)
        if kind == "ident":
            self.take()
            return {"true": True, "false": False}.get(text, text)
        if text == "[":
            self.take()
            out = []
            while self.peek()[1] != "]":
                out.append(self.value())
                if self.peek()[1] == ",":
                    self.take()
                elif self.peek()[1] != "]":
                    raise ConfigError(f"line {self.peek()[2]}: expected ',' or ']' in list")
            self.take("]")
            return out
        raise ConfigError(f"line {line}: expected a value, found {text or 'end of file'!r}")


def parse_sections(text: str) -> list:
    sections, loose = _Parser(text).items(None)
    if loose:
        raise ConfigError(f"top-level keys are not allowed: {sorted(loose)}")
    return sections


# -- typed scene -----------------------------------------------------------------

@dataclass
class SceneConfig:
    surfaces: dict = field(default_factory=dict)
    curves: dict = field(default_factory=dict)
    pairs: dict = field(default_factory=dict)
    suite: dict | None = None
    output: dict = field(default_factory=dict)
    source: str = ""


def _number(sec: Section, key: str, default=None, positive=False, integer=False):
    v = sec.values.get(key, default)
    if v is None:
        raise ConfigError(f"line {sec.line}: {sec.kind} {sec.name!r} needs {key!r}")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"line {sec.line}: {key!r} must be a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(f"line {sec.line}: {key!r} must be an integer")
    if positive and v <= 0:
        raise ConfigError(f"line {sec.line}: {key!r} must be positive")
    return int(v) if integer else float(v)


def _interval(sec: Section, key: str, default=None):
    v = sec.values.get(key, default)
    if (not isinstance(v, list) or len(v) != 2 or
            not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
        raise ConfigError(f"line {sec.line}: {key!r} must be an interval [a, b]")
    if not v[0] < v[1]:
        raise ConfigError(f"line {sec.line}: {key!r} must satisfy a < b")
    return float(v[0]), float(v[1])


def _exprs(sec: Section, key: str):
    v = sec.values.get(key)
    if not isinstance(v, list) or len(v) != 3:
        raise ConfigError(f"line {sec.line}: {key!r} must list three expressions")
    return [str(x) for x in v]


def load_text(text: str) -> SceneConfig:
    sections = parse_sections(text)
    if not sections:
        raise ConfigError("configuration is empty")
    scene = SceneConfig(source=text)
    for sec in sections:
        if sec.kind not in SECTION_KINDS:
            raise ConfigError(f"line {sec.line}: unknown section kind {sec.kind!r}")
        if sec.kind in ("surface", "curve", "pair"):
            if not sec.name:
                raise ConfigError(f"line {sec.line}: {sec.kind} sections need a name")
            table = getattr(scene, sec.kind + "s")
            if sec.name in table:
                raise ConfigError(f"line {sec.line}: duplicate {sec.kind} {sec.name!r}")
            table[sec.name] = sec
        elif sec.kind == "suite":
            if scene.suite is not None:
                raise ConfigError(f"line {sec.line}: only one suite section is allowed")
            scene.suite = sec
        else:
            scene.output.update(sec.values)
    _validate(scene)
    return scene


def load(path) -> SceneConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return load_text(text)


def _validate(scene: SceneConfig):
    for sec in scene.surfaces.values():
        if "family" not in sec.values and "x" not in sec.values:
            raise ConfigError(f"line {sec.line}: surface {sec.name!r} needs 'family' or 'x'")
    for sec in scene.curves.values():
        surf = sec.values.get("surface")
        if surf is not None and surf not in scene.surfaces:
            raise ConfigError(f"line {sec.line}: curve {sec.name!r} refers to unknown surface {surf!r}")
        if "witness" not in sec.values:
            _interval(sec, "t")
    for sec in scene.pairs.values():
        base = sec.values.get("base")
        if base not in scene.curves:
            raise ConfigError(f"line {sec.line}: pair {sec.name!r} refers to unknown curve {base!r}")
        lams = sec.values.get("lambda")
        lams = lams if isinstance(lams, list) else [lams]
        for lam in lams:
            if lam is None or isinstance(lam, bool) or not isinstance(lam, (int, float)):
                raise ConfigError(f"line {sec.line}: pair {sec.name!r} needs a numeric 'lambda'")
            if lam == 0:
                raise ConfigError(f"line {sec.line}: pair {sec.name!r} has lambda = 0")
        grid = _number(sec, "grid", 512, positive=True, integer=True)
        if grid < 32:
            raise ConfigError(f"line {sec.line}: grid must be at least 32")
        if "tol" in sec.values:
            _number(sec, "tol", positive=True)
    if scene.suite is not None:
        if "tol" in scene.suite.values:
            _number(scene.suite, "tol", positive=True)
        if "grid" in scene.suite.values and _number(scene.suite, "grid", integer=True) < 32:
            raise ConfigError(f"line {scene.suite.line}: grid must be at least 32")
    fmt = scene.output.get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError(f"output format must be json or csv, got {fmt!r}")


# -- building geometry from sections ---------------------------------------------------

def _params(sec: Section, skip):
    return {k: float(v) for k, v in sec.values.items()
            if k not in skip and isinstance(v, (int, float)) and not isinstance(v, bool)}


def build_surface(scene: SceneConfig, name: str):
    from .surfaces import SURFACE_FAMILIES, SurfacePatch, surface_family

    sec = scene.surfaces[name]
    u = _interval(sec, "u", [-5, 5])
    v = _interval(sec, "v", [-5, 5])
    try:
        if "family" in sec.values:
            fam = sec.values["family"]
            if fam not in SURFACE_FAMILIES:
                raise ConfigError(f"line {sec.line}: unknown surface family {fam!r}")
            try:
                return surface_family(fam, u, v, **_params(sec, ("family",)))
            except ValueError as exc:
                raise ConfigError(f"line {sec.line}: {exc}") from exc
        return SurfacePatch(_exprs(sec, "x"), u, v, _params(sec, ()), name=name)
    except ExpressionError as exc:
        raise ConfigError(f"line {sec.line}: {exc}") from exc


def build_curve(scene: SceneConfig, name: str):
    """Returns ``(kind, obj)`` with kind ``"surface"`` (SurfaceCurve),
    ``"strip"`` (StripCurve) or ``"space"`` (CurveExpr)."""
    from .curves import FAMILIES, CurveExpr, curve_family
    from .surfaces import SurfaceCurve, strip_from_expressions
    from .witnesses import witness

    sec = scene.curves[name]
    vals = sec.values
    try:
        if "witness" in vals:
            try:
                return "strip", witness(str(vals["witness"])).strip()
            except KeyError as exc:
                raise ConfigError(f"line {sec.line}: {exc.args[0]}") from exc
        t0, t1 = _interval(sec, "t")
        consts = _params(sec, ())
        if "surface" in vals:
            surf = build_surface(scene, vals["surface"])
            for key in ("u", "v"):
                if key not in vals:
                    raise ConfigError(f"line {sec.line}: curve {name!r} on a surface needs {key!r}")
            return "surface", SurfaceCurve(surf, str(vals["u"]), str(vals["v"]), t0, t1, consts, name=name)
        if "normal" in vals:
            return "strip", strip_from_expressions(_exprs(sec, "x"), _exprs(sec, "normal"), t0, t1, consts, name)
        if "family" in vals:
            fam = vals["family"]
            if fam not in FAMILIES:
                raise ConfigError(f"line {sec.line}: unknown curve family {fam!r}")
            try:
                return "space", curve_family(fam, t0, t1, **_params(sec, ()))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"line {sec.line}: {exc}") from exc
        return "space", CurveExpr(_exprs(sec, "x"), t0, t1, consts, name=name)
    except ExpressionError as exc:
        raise ConfigError(f"line {sec.line}: {exc}") from exc


def build_strip(scene: SceneConfig, name: str):
    kind, obj = build_curve(scene, name)
    if kind == "surface":
        return obj.strip()
    if kind == "strip":
        return obj
    raise ConfigError(f"curve {name!r} carries no normal field; give a surface or a 'normal'")
