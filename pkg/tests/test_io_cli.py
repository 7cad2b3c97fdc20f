import io
import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shadow_cover import InvalidArgument, gen_noisy, gen_spliced
from shadow_cover import io as sio
from shadow_cover.cli import main


def run(*argv):
    return main([str(a) for a in argv])


# -- io -----------------------------------------------------------------------

@pytest.mark.parametrize("spec", ["cat", "ph3", "perturbed:0.01", "matrix:2,1,1,1"])
def test_parse_system_header_round_trip(spec):
    s = sio.parse_system(spec)
    name, params = sio.system_header(s)
    assert sio.same_system(s, sio.system_from_header(name, json.loads(sio.dumps(params))))


@pytest.mark.parametrize("spec", ["torus", "cat:1", "perturbed:x", "matrix:1,2,3", "matrix:1.5,0,0,1"])
def test_parse_system_rejects(spec):
    with pytest.raises(InvalidArgument):
        sio.parse_system(spec)


def test_dumps_floats():
    assert sio.dumps(0.1) == "0.10000000000000001"
    assert sio.dumps(2.0) == "2.0"
    assert sio.dumps([1, True, None]) == "[1,true,null]"
    with pytest.raises(InvalidArgument):
        sio.dumps(float("nan"))


@given(st.integers(0, 2**32 - 1), st.floats(0, 0.05))
def test_orbit_file_round_trip(seed, noise):
    system = sio.parse_system("perturbed:0.01")
    orbit = gen_noisy(system, [0.3, 0.7], (-6, 6), noise, seed)
    buf = io.StringIO()
    sio.write_orbit(orbit, buf)
    buf.seek(0)
    assert sio.read_orbit(buf) == orbit


def test_read_orbit_from_points_only(cat):
    orbit = gen_spliced(cat, [0.1, 0.2], [0.15, 0.2], -3, 3)
    lines = [json.loads(ln) for ln in sio.orbit_lines(orbit)]
    text = "\n".join([json.dumps(lines[0])] + [json.dumps({"k": r["k"], "x": r["x"]}) for r in lines[1:]])
    back = sio.read_orbit(io.StringIO(text))
    np.testing.assert_allclose(back.points, orbit.points, atol=1e-15)


@pytest.mark.parametrize("text", [
    "",
    "not json",
    '{"format":"other"}',
    '{"format":"pseudo-orbit/1","system":"cat","dim":3,"params":{}}\n{"k":0,"x":[0,0]}',
    '{"format":"pseudo-orbit/1","system":"cat","dim":2,"params":{}}',
    '{"format":"pseudo-orbit/1","system":"cat","dim":2,"params":{}}\n{"k":0,"x":[0,0]}\n{"k":2,"x":[0,0]}',
    '{"format":"pseudo-orbit/1","system":"cat","dim":2,"params":{}}\n{"k":0,"x":[0,0,0]}',
])
def test_read_orbit_rejects(text):
    with pytest.raises(InvalidArgument):
        sio.read_orbit(io.StringIO(text))


def test_read_orbit_system_mismatch(cat):
    buf = io.StringIO()
    sio.write_orbit(gen_spliced(cat, [0.1, 0.2], [0.15, 0.2], -3, 3), buf)
    buf.seek(0)
    with pytest.raises(InvalidArgument):
        sio.read_orbit(buf, sio.parse_system("perturbed:0.01"))


# -- cli ----------------------------------------------------------------------

@pytest.fixture
def spliced_file(tmp_path):
    path = tmp_path / "o.jsonl"
    assert run("gen", "--system", "cat", "--kind", "spliced", "--p", "0,0", "--q", "0.01,0",
               "--window", "-10:10", "--out", path) == 0
    return path


def test_gen_spliced_record_count(spliced_file):
    lines = spliced_file.read_text().splitlines()
    assert len(lines) == 22  # header plus 21 records
    assert [json.loads(ln)["k"] for ln in lines[1:]] == list(range(-10, 11))


def test_gen_noisy_is_deterministic(tmp_path):
    outs = []
    for name in ("a", "b"):
        path = tmp_path / f"{name}.jsonl"
        assert run("gen", "--system", "cat", "--kind", "noisy", "--noise", "1e-3", "--seed", 42,
                   "--p", "0.2,0.3", "--window", "-10:10", "--out", path) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_gen_splice_outside_window(tmp_path, capsys):
    code = run("gen", "--system", "cat", "--kind", "spliced", "--p", "0,0", "--q", "0.01,0",
               "--window", "5:10", "--out", tmp_path / "x.jsonl")
    assert code == 3
    assert capsys.readouterr().err


def test_solve_spliced(spliced_file, tmp_path):
    out = tmp_path / "r.json"
    assert run("solve", spliced_file, "--out", out) == 0
    doc = json.loads(out.read_text())
    assert doc["iterations"] == 1 and doc["converged"] is True
    assert doc["residual"] < 1e-10 and len(doc["z"]) == 2
    assert doc["decay"][0][0] == -60


def test_solve_both_agreement(spliced_file, tmp_path):
    out = tmp_path / "r.json"
    assert run("solve", "--in", spliced_file, "--algorithm", "both", "--out", out) == 0
    assert json.loads(out.read_text())["agreement"] < 1e-10


def test_solve_product_on_nonlinear(tmp_path, capsys):
    path = tmp_path / "p.jsonl"
    assert run("gen", "--system", "perturbed:0.01", "--kind", "noisy", "--noise", "1e-3",
               "--p", "0.2,0.3", "--out", path) == 0
    assert run("solve", path, "--algorithm", "product") == 3
    assert "NotLinear" in capsys.readouterr().err


def test_solve_no_convergence_still_writes(tmp_path):
    path = tmp_path / "p.jsonl"
    run("gen", "--system", "perturbed:0.01", "--kind", "noisy", "--noise", "1e-2", "--p", "0.2,0.3",
        "--out", path)
    out = tmp_path / "r.json"
    assert run("solve", path, "--max-iter", 1, "--out", out) == 2
    assert json.loads(out.read_text())["converged"] is False


def test_solve_system_flag_must_match(spliced_file):
    assert run("solve", spliced_file, "--system", "ph3") == 3
    assert run("solve", spliced_file, "--system", "cat", "--out", "-") == 0


def test_verify_and_csv(spliced_file, tmp_path):
    res, rep, csv = tmp_path / "r.json", tmp_path / "v.json", tmp_path / "v.csv"
    assert run("solve", spliced_file, "--out", res) == 0
    assert run("verify", spliced_file, "--result", res, "--out", rep, "--csv", csv) == 0
    doc = json.loads(rep.read_text())
    assert doc["ok"] is True
    rows = csv.read_text().splitlines()
    assert rows[0] == "k,distance,floor" and len(rows) == 1 + 21 + 100


def test_verify_wrong_point_fails(spliced_file):
    assert run("verify", spliced_file, "--z", "0.3,-0.2", "--out", "-") == 2


def test_solve_csv(spliced_file, tmp_path):
    csv = tmp_path / "d.csv"
    assert run("solve", spliced_file, "--csv", csv, "--out", tmp_path / "r.json") == 0
    assert csv.read_text().startswith("k,distance\n-60,")


def test_oracle_passes(tmp_path):
    out = tmp_path / "o.json"
    assert run("oracle", "--samples", 5, "--out", out) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] and doc["dense_agreement"] < 1e-10


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["gen", "--kind", "weird"],
    ["gen", "--window", "3"],
    ["gen", "--p", "a,b"],
    ["gen", "--kind", "noisy"],
    ["gen", "--system", "nope"],
    ["solve"],
    ["solve", "/nonexistent/file.jsonl"],
    ["solve", "x", "--tol", "0"],
    ["verify", "/nonexistent/file.jsonl", "--z", "0,0"],
    ["oracle", "--system", "ph3"],
])
def test_invalid_input_exits_3(argv, capsys):
    assert main(argv) == 3
    assert capsys.readouterr().err


def test_verify_needs_a_point(spliced_file):
    assert run("verify", spliced_file) == 3
    assert run("verify", spliced_file, "--z", "0,0,0") == 3


def test_module_entry_point(spliced_file):
    proc = subprocess.run([sys.executable, "-m", "shadow_cover", "solve", str(spliced_file)],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["iterations"] == 1
