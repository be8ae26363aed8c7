import json

import pytest

from bianchi_heights.cli import main


def test_ball_empty(tmp_path, capsys):
    assert main(["ball", "--T", "1", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "ball.json").read_text())
    assert doc["schema"] == 1 and doc["reported"]["size"] == 0


def test_bad_spec_exit_code(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("D 1\n1 2 3\n")
    assert main(["ball", "--spec", str(bad), "--out", str(tmp_path)]) == 2


def test_cost_guard_exit_code(tmp_path):
    assert main(["ball", "--T", "1000000", "--out", str(tmp_path)]) == 3


def test_density_and_heights(tmp_path):
    assert main(["density", "--D", "2", "--prime-bound", "7", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "density.csv").exists()
    assert main(["heights", "--T", "5", "--out", str(tmp_path)]) == 0


def test_fixture_spec(tmp_path):
    from bianchi_heights.group import fixture_path
    assert main(["ball", "--spec", str(fixture_path("bianchi_d2.txt")), "--T", "8", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "ball.json").read_text())
    assert doc["asserted"] == {"ball saturated": True}
    assert "delta_hat" in doc["reported"]


def test_circle_reproducible(tmp_path):
    args = ["circle", "--N", "256", "--out"]
    assert main(args + [str(tmp_path / "a")]) == 0
    assert main(args + [str(tmp_path / "b")]) == 0
    for name in ("circle.csv", "circle.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_verify_subset(tmp_path, capsys):
    assert main(["verify", "--only", "3", "12", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 2
