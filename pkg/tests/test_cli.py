import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from dcurves.cli import main
from dcurves.surfaces import SurfaceCurve, darboux_at, surface_family

SCENE = """
surface cyl { family = cylinder  r = 1  u = [-10, 10]  v = [-10, 10] }
surface h2 { family = hyperbolic_plane  u = [0.1, 3]  v = [-7, 7] }
curve circle { surface = cyl  u = "0"  v = "t"  t = [0, 6.283185307179586] }
curve helix { surface = cyl  u = "0.5*t"  v = "1.118033988749895*t"  t = [0, 6] }
curve space-helix { family = helix  t = [0, 6] }
curve line { x = ["0", "t", "1"]  t = [0, 1] }
curve h2circle { surface = h2  u = "1"  v = "t"  t = [0, 6] }
pair circle-pair { base = circle  lambda = 0.5  grid = 512 }
pair helix-sweep { base = helix  lambda = [0.1, 0.2, 0.3]  grid = 256 }
"""


@pytest.fixture
def scene(tmp_path):
    path = tmp_path / "scene.cfg"
    path.write_text(SCENE)
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_frame_on_cylinder_circle(scene, capsys):
    code, out, err = run(["frame", scene, "circle", "--no-figures"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["summary"]["classification"] == "geodesic, principal line"
    s = rep["series"]
    assert np.allclose(s["kg"], 0, atol=1e-12) and np.allclose(s["kn"], 1, atol=1e-12)
    assert np.allclose(s["tg"], 0, atol=1e-12)
    assert "geodesic, principal line" in err


def test_frame_on_straight_line_reports_degenerate_curvature(scene, capsys):
    code, _, err = run(["frame", scene, "line"], capsys)
    assert code == 3
    assert "DegenerateCurvature" in err and "parameter" in err


def test_frame_without_frenet_on_surface_curve(scene, capsys):
    code, out, _ = run(["frame", scene, "circle", "--no-frenet", "--no-figures"], capsys)
    assert code == 0 and "kappa" not in json.loads(out)["series"]


def test_frame_on_helix_has_constant_invariants(scene, capsys):
    for curve in ("helix", "space-helix"):
        code, out, _ = run(["frame", scene, curve, "--no-figures", "--grid", "64"], capsys)
        assert code == 0
        s = json.loads(out)["series"]
        assert np.ptp(s["kappa"]) <= 1e-9 and np.ptp(s["tau"]) <= 1e-9


def test_frame_csv_and_json_carry_the_same_numbers(scene, capsys):
    _, out_json, _ = run(["frame", scene, "helix", "--no-figures", "--grid", "40"], capsys)
    _, out_csv, _ = run(["frame", scene, "helix", "--no-figures", "--grid", "40", "--format", "csv"], capsys)
    series = json.loads(out_json)["series"]
    rows = list(csv.DictReader(io.StringIO(out_csv)))
    assert list(rows[0]) == list(series)
    for key in series:
        assert [float(r[key]) for r in rows] == series[key]


def test_pair_circle_is_type_five_with_vanishing_residuals(scene, capsys):
    code, out, _ = run(["pair", scene, "circle-pair", "--no-figures"], capsys)
    assert code == 0
    entry = json.loads(out)["entries"][0]
    assert entry["pair_type"] == 5
    assert all(r["max_abs"] <= 1e-12 for r in entry["residuals"].values())


def test_pair_helix_sweep_passes(scene, capsys):
    code, out, _ = run(["pair", scene, "helix-sweep", "--tol", "1e-6", "--no-figures"], capsys)
    rep = json.loads(out)
    assert [e["lambda"] for e in rep["entries"]] == [0.1, 0.2, 0.3]
    assert code == 0 and rep["pass"]


def test_pair_at_singular_offset_exits_with_location(tmp_path, capsys):
    base = SurfaceCurve(surface_family("hyperbolic_plane", (0.1, 3), (-7, 7)), "1", "t", 0, 6).strip()
    kg1 = float(np.mean(darboux_at(base, np.linspace(0, 6, 8)).kg))
    path = tmp_path / "singular.cfg"
    path.write_text(SCENE + f"pair singular {{ base = h2circle  lambda = {1 / kg1!r} }}\n")
    code, _, err = run(["pair", str(path), "singular"], capsys)
    assert code == 3 and "SingularOffset" in err and "s1=" in err


def test_pair_csv_writes_series_and_residual_table(scene, tmp_path, capsys):
    out = tmp_path / "pair.csv"
    code, _, _ = run(["pair", scene, "helix-sweep", "--format", "csv", "--out", str(out)], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 3 * 256 and {r["lambda"] for r in rows} == {"0.1", "0.2", "0.3"}
    assert (tmp_path / "pair-residuals.csv").exists()
    assert (tmp_path / "pair-0.2-invariants.png").exists()


def test_verify_reports_identities_and_figures(tmp_path, capsys):
    out = tmp_path / "verify.json"
    code, _, err = run(["verify", "--out", str(out)], capsys)
    rep = json.loads(out.read_text())
    assert len(rep["identities"]) >= 12
    assert all({"max_residual", "grid", "pass"} <= set(v) for v in rep["identities"].values())
    assert code == (0 if rep["pass"] else 4)
    assert (tmp_path / "verify-residuals.png").exists()
    assert "identities over" in err


def test_verify_with_machine_precision_tolerance_fails_per_identity(capsys):
    code, out, err = run(["verify", "--tol", "1e-14", "--no-figures"], capsys)
    rep = json.loads(out)
    assert code == 4 and not rep["pass"]
    failing = [k for k, v in rep["identities"].items() if not v["pass"]]
    assert len(failing) > 1
    assert err.count("FAIL ") >= len([k for k in failing if rep["identities"][k]["role"] == "required"])


def test_verify_is_deterministic(scene, capsys):
    outs = [run(["verify", scene, "--no-figures", "-q", "--grid", "64"], capsys)[1] for _ in range(2)]
    outs.append(run(["verify", scene, "--no-figures", "-q", "--grid", "64", "--jobs", "3"], capsys)[1])
    assert outs[0] == outs[1] == outs[2]
    names = [p["name"] for p in json.loads(outs[0])["pairs"]]
    assert names[-4:] == ["circle-pair", "helix-sweep[lambda=0.1]", "helix-sweep[lambda=0.2]", "helix-sweep[lambda=0.3]"]


@pytest.mark.parametrize("argv", [
    ["frame", "MISSING"],
    ["verify", "--grid", "16"],
    ["verify", "--tol", "0"],
])
def test_configuration_errors_exit_two(argv, tmp_path, capsys):
    argv = [str(tmp_path / "missing.cfg") if a == "MISSING" else a for a in argv]
    if argv[0] == "frame":
        argv.append("c")
    assert run(argv, capsys)[0] == 2


def test_empty_config_and_unknown_names_exit_two(tmp_path, scene, capsys):
    empty = tmp_path / "empty.cfg"
    empty.write_text("")
    code, _, err = run(["verify", str(empty)], capsys)
    assert code == 2 and "empty" in err
    assert run(["frame", scene, "nope"], capsys)[0] == 2
    assert run(["pair", scene, "nope"], capsys)[0] == 2


def test_module_entry_point(scene):
    proc = subprocess.run([sys.executable, "-m", "dcurves", "frame", scene, "line"], capture_output=True, text=True)
    assert proc.returncode == 3
