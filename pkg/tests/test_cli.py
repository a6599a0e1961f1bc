import json
import subprocess
import sys

import pytest

from mqfactor.cli import main, read_config
from mqfactor.errors import PreconditionError


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def rows(csv_text):
    lines = csv_text.strip("\n").split("\n")
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_orbits(capsys):
    code, out = run(capsys, "orbits", "--N", "15", "--y", "2")
    data = json.loads(out)
    assert code == 0
    assert (data["r"], data["t"], data["d"]) == (4, 5, 3)
    assert (data["pp_bound"], data["pp_count"], data["pp_pass"]) == (8, 12, True)


def test_orbits_not_coprime(capsys):
    code, out = run(capsys, "orbits", "--N", "15", "--y", "6")
    assert code == 2 and json.loads(out)["error"] == "NotCoprime"


def test_orbits_identity(capsys):
    code, out = run(capsys, "orbits", "--N", "15", "--y", "1")
    data = json.loads(out)
    assert code == 0 and data["r"] == 1 and "warning" in data


def test_scan_15(capsys):
    code, out = run(capsys, "scan", "--N", "15", "--y", "2", "--m-max", "8")
    header, body = rows(out)
    assert code == 0 and header == ["m", "I", "Iy"]
    assert [float(r["Iy"]) for r in body] == [0, 3, 0, 3, 0, 3, 0, 3, 0]


def test_scan_21_per_order(capsys):
    code, out = run(capsys, "scan", "--N", "21", "--y", "2", "--m-max", "6", "--per-order")
    header, body = rows(out)
    assert header[3:] == [f"Iy_p{p}" for p in range(-5, 6)]
    assert [int(r["m"]) for r in body if float(r["Iy"]) == 0] == [0, 3, 6]


def test_scan_empty_range(capsys):
    code, out = run(capsys, "scan", "--N", "15", "--y", "2", "--m-max", "-1")
    assert code == 0 and out == "m,I,Iy\n"


@pytest.mark.parametrize("m", ["1", "2", "0"])
def test_spectrum(capsys, m):
    code, out = run(capsys, "spectrum", "--N", "15", "--y", "2", "--m", m)
    header, body = rows(out)
    assert header == ["order", "intensity", "dft_intensity"]
    want = {"1": 3.0, "2": 0.0, "0": 0.0}[m]
    for r in body:
        expect = want if r["order"] == "0" else 0.0
        assert float(r["intensity"]) == expect
        assert float(r["dft_intensity"]) == pytest.approx(expect, abs=1e-9)


@pytest.mark.parametrize("N,want", [("15", [3, 5]), ("21", [3, 7])])
def test_factor(capsys, N, want):
    code, out = run(capsys, "factor", "--N", N)
    assert code == 0 and json.loads(out)["factors"] == want


def test_factor_precondition(capsys):
    code, out = run(capsys, "factor", "--N", "16")
    assert code == 2 and json.loads(out)["error"] == "PreconditionError"


def test_factor_exhausted_exit_code(capsys):
    code, out = run(capsys, "factor", "--N", "21", "--m-max", "0")
    data = json.loads(out)
    assert code == 3 and data["status"] == "exhausted"


def test_verify_15(capsys):
    code, out = run(capsys, "verify", "--N", "15", "--y", "2")
    data = json.loads(out)
    assert code == 0 and data["all_pass"] and data["max_discrepancy"] <= 1e-9
    assert data["diagonalizer_residual"] > 1e-6


def test_verify_21(capsys):
    code, out = run(capsys, "verify", "--N", "21", "--y", "4")
    data = json.loads(out)
    assert code == 0 and data["all_pass"]
    assert data["diagonalizer_residual"] <= 1e-9
    assert "diagonalizer_exact" in [c["name"] for c in data["checks"]]


def test_verify_identity(capsys):
    code, out = run(capsys, "verify", "--N", "15", "--y", "1")
    data = json.loads(out)
    assert code == 0 and data["checks"] == [] and data["warnings"]


def test_missing_flags(capsys):
    assert run(capsys, "scan", "--N", "15")[0] == 2
    assert run(capsys, "spectrum", "--N", "15", "--y", "2")[0] == 2


def test_config_equivalence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# scan settings\nN = 21\ny=2\nm-max=6\nper-order=true\n")
    _, from_file = run(capsys, "scan", "--config", str(cfg))
    _, from_flags = run(capsys, "scan", "--N", "21", "--y", "2", "--m-max", "6", "--per-order")
    assert from_file == from_flags
    # flags win over the file
    _, override = run(capsys, "scan", "--config", str(cfg), "--m-max", "3")
    assert len(rows(override)[1]) == 4


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour=blue\n")
    with pytest.raises(PreconditionError):
        read_config(bad)
    bad.write_text("N 15\n")
    with pytest.raises(PreconditionError):
        read_config(bad)


def test_out_file_is_byte_identical(tmp_path, capsys):
    target = tmp_path / "spectrum.csv"
    run(capsys, "spectrum", "--N", "21", "--y", "2", "--m", "1", "--out", str(target))
    first = target.read_bytes()
    run(capsys, "spectrum", "--N", "21", "--y", "2", "--m", "1", "--out", str(target))
    assert target.read_bytes() == first and b"\r" not in first


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mqfactor", "orbits", "--N", "21", "--y", "4"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["r"] == 3
