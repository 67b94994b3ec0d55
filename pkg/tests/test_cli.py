import json
import subprocess
import sys

import pytest

from polycont.cli import main

from conftest import EXAMPLE_START_TEXT, EXAMPLE_TARGET_TEXT

SOLS_TEXT = "1, -1\n1, 1\n-1, 1\n-1, -1\n"


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in [("start", EXAMPLE_START_TEXT), ("target", EXAMPLE_TARGET_TEXT), ("sols", SOLS_TEXT)]:
        path = tmp_path / f"{name}.txt"
        path.write_text(text)
        paths[name] = str(path)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_json_is_reproducible(capsys, files):
    code, first, _ = run(capsys, "solve", files["target"], "--seed", "7", "--json", "--no-timing")
    _, second, _ = run(capsys, "solve", files["target"], "--seed", "7", "--json", "--no-timing")
    assert code == 0
    assert first == second
    report = json.loads(first)
    assert len(report["solutions"]) == 4
    assert report["failures"] == 0 and report["wall_time_s"] == 0.0
    assert all(s["status"] == "Regular" for s in report["solutions"])


def test_track_without_gamma_reports_two_failures(capsys, files):
    code, out, _ = run(capsys, "track", files["start"], files["target"], files["sols"], "--gamma", "1")
    assert code == 1
    assert out.count("[M,t=0.047") == 2
    assert "{0, 1}" in out and "{0, 9}" in out


def test_track_with_gamma_json(capsys, files):
    code, out, _ = run(
        capsys, "track", files["start"], files["target"], files["sols"], "--gamma", "0.6+0.8i", "--json"
    )
    assert code == 0
    report = json.loads(out)
    assert report["gamma"] == [0.6, 0.8]
    assert [s["status"] for s in report["solutions"]] == ["Regular"] * 4


def test_refine(capsys, tmp_path):
    sys_file = tmp_path / "f.txt"
    sys_file.write_text("ring x\npoly x^2-2\n")
    pts = tmp_path / "p.txt"
    pts.write_text("1.4\n-1.5\n")
    code, out, _ = run(capsys, "refine", str(sys_file), str(pts), "--json")
    assert code == 0
    values = [s["point"][0][0] for s in json.loads(out)["solutions"]]
    assert values == pytest.approx([2**0.5, -(2**0.5)], abs=1e-15)

    sys_file.write_text("ring x\npoly x^2\n")
    pts.write_text("0\n")
    code, out, _ = run(capsys, "refine", str(sys_file), str(pts))
    assert code == 1
    assert "NOT converged" in out


@pytest.mark.parametrize(
    "text",
    ["ring x, y\npoly x^2 +* y\npoly y", "ring x, y\npoly x^2-1", "ring x\npoly x - x"],
)
def test_input_errors_exit_two(capsys, tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    code, _, err = run(capsys, "solve", str(path))
    assert code == 2
    assert err.startswith("error:")


def test_missing_file_exit_two(capsys, tmp_path):
    code, _, err = run(capsys, "solve", str(tmp_path / "nope.txt"))
    assert code == 2 and "nope.txt" in err


def test_syntax_error_names_location(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("ring x\npoly x + y\n")
    code, _, err = run(capsys, "solve", str(path))
    assert code == 2
    assert "line 2" in err and "column 10" in err


def test_bench_katsura(capsys):
    code, out, _ = run(capsys, "bench", "katsura", "8")
    assert code == 0
    assert "128 regular solutions (expected 128)" in out


def test_bench_gevp(capsys):
    code, out, _ = run(capsys, "bench", "gevp", "35")
    assert code == 0
    assert "35 regular solutions (expected 35)" in out


def test_bench_random_needs_degree(capsys):
    code, _, _ = run(capsys, "bench", "random", "3")
    assert code == 2


def test_predictors_agree_on_katsura(capsys):
    sets = []
    for pred in ("tangent", "rk4"):
        code, out, _ = run(capsys, "bench", "katsura", "5", "--predictor", pred, "--json", "--no-timing")
        assert code == 0
        pts = json.loads(out)["solutions"]
        sets.append(sorted(tuple(round(v, 6) + 0.0 for z in s["point"] for v in z) for s in pts))
    assert len(sets[0]) == 16
    assert sets[0] == sets[1]


def test_dump_slp(capsys, files):
    code, out, _ = run(capsys, "solve", files["target"], "--dump-slp")
    assert code == 0
    lines = out.splitlines()
    assert any(" := mul(" in line for line in lines)
    assert "value[1]" in out and "jacobian[1,1]" in out


def test_dump_system_round_trips(capsys, tmp_path):
    from polycont import parse_system

    code, out, _ = run(capsys, "bench", "random", "2", "3", "--dump-system", "--seed", "3")
    assert code == 0
    sys_ = parse_system(out)
    assert sys_.degrees == (3, 3)


def test_module_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "polycont", "solve", files["target"], "--json", "--no-timing", "--seed", "1"],
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert proc.returncode == 0, proc.stderr
    assert len(json.loads(proc.stdout)["solutions"]) == 4
