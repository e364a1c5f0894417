import json
import math
import os
import subprocess

import pytest

CLI = os.environ.get("STARSOS_CLI", "starsos")
FIX = os.environ.get("STARSOS_FIXTURES", "fixtures")
REFERENCE_A = [(-0.1752, 0.3335), (0.1268, 0.2213), (0.1752, -0.3335), (-0.1268, -0.2213)]


def run(*args, env=None):
    full = dict(os.environ)
    full.pop("STARSOS_SOLVER", None)
    full.update(env or {})
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=full)


def ok(*args):
    p = run(*args)
    assert p.returncode == 0, p.stderr
    return json.loads(p.stdout)


def test_approximate_disk():
    j = ok("approximate", "--set", f"{FIX}/disk.json", "--degree", "2")
    s = j["result"]["s_star"]
    assert math.sqrt(1.001) <= s <= math.sqrt(1.001) + 1e-3 + 1e-6
    assert j["result"]["certificate"]["valid"]
    assert j["seed"] == 0


def test_approximate_example_e():
    j = ok("approximate", "--set", f"{FIX}/exampleE.json", "--c", "0.9", "--r", "0.4", "--degree", "4")
    assert abs(j["result"]["s_star"] - 1.492) <= 0.02


def test_missing_file_is_input_error():
    p = run("approximate", "--set", "does-not-exist.json")
    assert p.returncode == 2
    err = json.loads(p.stderr.strip().splitlines()[-1])
    assert err["error"]["kind"] == "input"


def test_unknown_backend_is_input_error():
    p = run("volume", "--fixture", "disk", env={"STARSOS_SOLVER": "mosek"})
    assert p.returncode == 2


def test_kernel_outer_example_a():
    j = ok("kernel", "outer", "--set", f"{FIX}/exampleA.json", "--samples", "2000", "--seed", "7")
    verts = j["polytope"]["vertices"]
    assert len(verts) == 4
    for v in verts:
        assert min(math.dist(v, p) for p in REFERENCE_A) < 1e-2


def test_kernel_outer_example_e_is_empty():
    j = ok("kernel", "outer", "--set", f"{FIX}/exampleE.json", "--samples", "2000", "--seed", "7")
    assert j["polytope"]["empty"] is True
    assert "farkas" in j["polytope"]


def test_kernel_inner_inside_outer(tmp_path):
    inner = ok("kernel", "inner", "--set", f"{FIX}/exampleA.json", "--directions", "8")
    outer = ok("kernel", "outer", "--set", f"{FIX}/exampleA.json", "--samples", "2000", "--seed", "7")
    for v in inner["polytope"]["vertices"]:
        for h in outer["polytope"]["halfspaces"]:
            assert h["a"][0] * v[0] + h["a"][1] * v[1] <= h["b"] + 1e-6


def test_volumes():
    j = ok("volume", "--set", f"{FIX}/disk.json", "--method", "polar", "--center", "0,0")
    assert abs(j["volume"]["value"] - math.pi) < 1e-3
    j = ok("volume", "--set", f"{FIX}/exampleE.json", "--method", "grid")
    assert abs(j["volume"]["value"] - 2.8315) < 5e-3
    assert run("volume", "--set", f"{FIX}/disk.json", "--resolution", "0").returncode == 2
    assert run("volume", "--set", f"{FIX}/disk.json", "--method", "polar").returncode == 2


def test_outputs_are_deterministic(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"a{k}.json"
        svg = tmp_path / f"a{k}.svg"
        p = run("approximate", "--set", f"{FIX}/exampleE.json", "--r", "0.3", "--degree", "4",
                "--out", str(out), "--svg", str(svg))
        assert p.returncode == 0, p.stderr
        outs.append((out.read_bytes(), svg.read_bytes()))
    assert outs[0] == outs[1]
    assert outs[0][1].startswith(b"<svg")


def test_table2(tmp_path):
    out = tmp_path / "t.csv"
    p = run("table2", "--out", str(out))
    assert p.returncode == 0, p.stderr
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# seed")
    rows = [l.split(",") for l in lines[2:]]
    assert len(rows) == 4
    r04 = [r for r in rows if r[0].endswith("r=0.4")][0]
    assert abs(float(r04[3]) - 1.492) <= 0.02
    assert abs(float(r04[4]) - 1.492) <= 5e-4
