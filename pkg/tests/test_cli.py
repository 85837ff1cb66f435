"""End-to-end runs of the command line front end (in process)."""

import json
import math

import pytest

from rchlab.cli import main


def test_coeffs_json(capsys):
    assert main(["coeffs", "--omega", "0", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["c"] == 1.0
    assert data["c1"] == 1.0
    assert data["c2"] == 0.0
    assert data["c3"] == 0.0


def test_coeffs_plain(capsys):
    assert main(["coeffs", "--omega", "1"]) == 0
    out = capsys.readouterr().out
    assert "c1" in out and "gamma" in out


def test_data_then_besov(tmp_path, capsys):
    path = tmp_path / "psi.csv"
    assert main(["data", "--family", "psi", "--out", str(path)]) == 0
    capsys.readouterr()
    assert main(["besov", "--input", str(path), "--s", "2", "--r", "-1"]) == 0
    out = capsys.readouterr().out.splitlines()
    tag, val = out[0].split(",")
    assert tag == "besov_norm"
    assert float(val) > 0.0
    assert out[1] == "j,weighted_block_norm"
    assert out[2].startswith("-1,")


def test_solve_writes_snapshots(tmp_path, capsys):
    out = tmp_path / "run"
    rc = main(["solve", "--init", "smoke", "--tend", "0.05", "--dt", "0.01",
               "--N", "2048", "--out", str(out)])
    assert rc == 0
    snaps = sorted(out.glob("snap_*.csv"))
    assert len(snaps) == 6  # t = 0, 0.01, ..., 0.05
    assert len(sorted(out.glob("snap_*.bin"))) == 6
    lines = (out / "norms.csv").read_text().splitlines()
    assert lines[0] == "t,l2,linf,h1_integral,besov_2_2_2"
    assert len(lines) == 7


def test_lagrangian_cross_check(tmp_path, capsys):
    out = tmp_path / "lag"
    rc = main(["lagrangian", "--init", "smoke", "--tend", "0.04",
               "--dt", "0.01", "--N", "2048", "--out", str(out),
               "--cross-check"])
    assert rc == 0
    assert len(sorted(out.glob("flow_*.csv"))) == 5
    rows = (out / "cross_check.csv").read_text().splitlines()[1:]
    gaps = [float(r.split(",")[1]) for r in rows]
    assert max(gaps) <= 1e-4


def test_data_certify(tmp_path, capsys):
    path = tmp_path / "cert.csv"
    rc = main(["data", "--certify", "--n-min", "5", "--n-max", "6",
               "--out", str(path)])
    assert rc == 0
    text = path.read_text()
    assert text.splitlines()[0] == "quantity,n,value"
    assert "w0n_besov_center,5," in text
    assert "low_product_norm_top_half_min" in text


def test_picard_campaign_exit_code(tmp_path, capsys):
    out = tmp_path / "picard"
    rc = main(["picard", "--N", "2048", "--m-max", "8", "--steps", "100",
               "--out", str(out)])
    text = capsys.readouterr().out
    assert rc == 0, text
    assert "[PASS] contraction" in text
    assert (out / "report.json").exists()
    assert (out / "table.csv").exists()
    assert (out / "plot.gp").exists()


def test_missing_input_file(tmp_path):
    with pytest.raises(SystemExit):
        main(["solve", "--init", str(tmp_path / "nope.csv"),
              "--tend", "0.1", "--dt", "0.05", "--out", str(tmp_path / "x")])


def test_data_family_needs_mode_index(tmp_path):
    with pytest.raises(SystemExit):
        main(["data", "--family", "w0n", "--out", str(tmp_path / "w.csv")])
