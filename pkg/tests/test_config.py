import pytest

from dcurves.config import build_curve, build_strip, build_surface, load, load_text, parse_sections
from dcurves.errors import ConfigError

SCENE = """
# a cylinder and two curves on it
surface cyl { family = cylinder  r = 1  u = [-5, 5]  v = [-7, 7] }
surface custom { x = ["u", "cos(v)", "sin(v)"] u = [-1, 1] v = [0, 7] }
curve c1 { surface = cyl  u = "0"  v = "t"  t = [0, 6.283185307179586] }
curve c2 { surface = custom; u = "a*t"; v = "t"; a = 0.5; t = [0, 1] }
curve space { x = ["t", "cos(t)", "sin(t)"]  t = [0, 0.5] }
curve fam { family = helix a = 0.5 t = [0, 1] }
curve strip { x = ["0", "cos(t)", "sin(t)"] normal = ["0", "cos(t)", "sin(t)"] t = [0, 1] }
curve w { witness = "circle" }
pair p1 { base = c1  lambda = 0.5  grid = 512 }
pair sweep { base = c1  lambda = [0.1, 0.2, 0.3]  tol = 1e-6 }
suite { witnesses = ["circle", "h2-circle"]  tol = 1e-6 }
output { format = csv }
"""


def test_parse_nested_sections():
    secs = parse_sections(SCENE)
    assert [s.kind for s in secs][:3] == ["surface", "surface", "curve"]
    assert secs[0].values == {"family": "cylinder", "r": 1, "u": [-5, 5], "v": [-7, 7]}
    assert secs[1].values["x"] == ["u", "cos(v)", "sin(v)"]


def test_scene_resolution():
    scene = load_text(SCENE)
    assert sorted(scene.pairs) == ["p1", "sweep"]
    assert scene.output["format"] == "csv"
    assert scene.suite.values["witnesses"] == ["circle", "h2-circle"]
    assert build_surface(scene, "cyl").constants == {"r": 1.0}
    kinds = {name: build_curve(scene, name)[0] for name in scene.curves}
    assert kinds == {"c1": "surface", "c2": "surface", "space": "space", "fam": "space", "strip": "strip", "w": "strip"}
    assert build_strip(scene, "c2").case.surface.value == "timelike"
    with pytest.raises(ConfigError, match="no normal field"):
        build_strip(scene, "space")


def test_load_reads_files(tmp_path):
    path = tmp_path / "scene.cfg"
    path.write_text(SCENE)
    assert "c1" in load(path).curves
    with pytest.raises(ConfigError, match="cannot read"):
        load(tmp_path / "missing.cfg")


@pytest.mark.parametrize("text, message", [
    ("", "empty"),
    ("# only a comment\n", "empty"),
    ("surface s { family = cylinder ", "expected"),
    ("x = 1", "top-level"),
    ("widget w { }", "unknown section"),
    ("surface { family = plane }", "need a name"),
    ("curve c { surface = nowhere u = \"t\" v = \"t\" t = [0, 1] }", "unknown surface"),
    ("curve c { x = [\"t\",\"0\",\"0\"] t = [0, 1] }\npair p { base = d lambda = 1 }", "unknown curve"),
    ("curve c { x = [\"t\",\"0\",\"0\"] t = [0, 1] }\npair p { base = c lambda = 0 }", "lambda = 0"),
    ("curve c { x = [\"t\",\"0\",\"0\"] t = [0, 1] }\npair p { base = c lambda = 1 grid = 16 }", "at least 32"),
    ("curve c { x = [\"t\",\"0\",\"0\"] t = [0, 1] }\npair p { base = c lambda = 1 tol = -1 }", "positive"),
    ("curve c { x = [\"t\",\"0\",\"0\"] t = [1, 0] }", "a < b"),
    ("curve c { x = [\"t\",\"0\",\"0\"] t = [0, 1] t = [0, 2] }", "duplicate key"),
    ("curve c { x = [\"t\" \"0\"] }", "expected ','"),
    ("curve c { x = 1 }", "interval"),
    ("surface s { a { } }", "nested"),
    ("output { format = xml }", "json or csv"),
    ("suite { tol = 0 }", "positive"),
    ("curve c { x = [\"t\",\"0\",\"0\"] t = [0, 1] }\ncurve c { x = [\"t\",\"0\",\"0\"] t = [0, 1] }", "duplicate curve"),
    ("curve c { t = [0, 1] x = [\"t\", \"0\", \"0\"] } @", "unexpected character"),
])
def test_invalid_configs(text, message):
    with pytest.raises(ConfigError, match=message):
        load_text(text)


def test_bad_expressions_and_families_are_config_errors():
    scene = load_text('curve c { x = ["t +", "0", "0"] t = [0, 1] }\n'
                      'curve d { family = spiral t = [0, 1] }\n'
                      'curve e { family = helix q = 2 t = [0, 1] }\n'
                      'surface s { family = torus }\n'
                      'curve f { surface = s u = "t" v = "t" t = [0, 1] }')
    for name in ("c", "d", "e", "f"):
        with pytest.raises(ConfigError):
            build_curve(scene, name)


def test_line_numbers_in_diagnostics():
    with pytest.raises(ConfigError, match="line 3"):
        load_text("surface s { family = plane }\n\npair p { base = missing lambda = 1 }")
