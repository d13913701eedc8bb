"""Command-line surface: schemas, determinism, exit codes, file formats."""

from __future__ import annotations

import json
import re

import numpy as np
import pytest

from sng.cli import main

# one float field in the fixed CSV format: 17 significant digits, e-notation
FLOAT_RE = re.compile(r"^-?\d\.\d{16}e[+-]\d{2,3}$")


def _read_json(path):
    return json.loads(path.read_text())


# --- solve -------------------------------------------------------------------

@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    """One coarse-grid solve shared by the schema/determinism tests."""
    root = tmp_path_factory.mktemp("solve")
    out = root / "ground.json"
    code = main(["solve", "--n", "0", "--points", "2001", "--out-json", str(out)])
    assert code == 0
    return root


def test_solve_json_schema(solved):
    data = _read_json(solved / "ground.json")
    assert set(data) == {
        "n", "gamma0", "gamma1", "epsilon_star", "node_count",
        "bracket_width", "grid", "generated_by", "x_csv",
    }
    assert data["n"] == 0 and data["node_count"] == 0
    assert data["generated_by"] == "sng 0.1.0"
    assert data["grid"] == {"rho_max": 40.0, "points": 2001}
    assert data["x_csv"] == "ground.csv"
    assert data["gamma0"] == pytest.approx(-0.91858, abs=1e-4)


def test_solve_csv_format(solved):
    lines = (solved / "ground.csv").read_text().splitlines()
    assert lines[0] == "rho,f_star,g_star"
    assert len(lines) == 2002
    for line in (lines[1], lines[1000], lines[-1]):
        fields = line.split(",")
        assert len(fields) == 3
        assert all(FLOAT_RE.match(f) for f in fields), line
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    assert float(first[1]) == 1.0


def test_solve_stdout_when_no_output_path(capsys):
    code = main(["solve", "--n", "0", "--points", "1201", "--rho-max", "30"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["node_count"] == 0
    assert "x_csv" not in data  # no CSV written without a path to derive


def test_solve_reruns_are_byte_identical(tmp_path):
    paths = []
    for tag in ("a", "b"):
        sub = tmp_path / tag
        sub.mkdir()
        out = sub / "state.json"
        assert main(["solve", "--n", "1", "--points", "2001",
                     "--out-json", str(out)]) == 0
        paths.append(sub)
    assert (paths[0] / "state.json").read_bytes() == (paths[1] / "state.json").read_bytes()
    assert (paths[0] / "state.csv").read_bytes() == (paths[1] / "state.csv").read_bytes()


# --- spectrum ----------------------------------------------------------------

def test_spectrum_deterministic_across_thread_counts(tmp_path, monkeypatch):
    blobs = []
    for threads in ("2", "7"):
        monkeypatch.setenv("SNG_THREADS", threads)
        out = tmp_path / f"spec_{threads}.json"
        assert main(["spectrum", "--n-max", "2", "--points", "2001",
                     "--out-json", str(out)]) == 0
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1]
    states = json.loads(blobs[0])
    assert [s["n"] for s in states] == [0, 1, 2]
    gammas = [s["gamma0"] for s in states]
    assert all(a > b for a, b in zip(gammas, gammas[1:]))


# --- rescale -----------------------------------------------------------------

@pytest.fixture(scope="module")
def rescaled_natural(solved, tmp_path_factory):
    out = tmp_path_factory.mktemp("rescale") / "natural.json"
    code = main(["rescale", str(solved / "ground.json"), "--natural",
                 "--out-json", str(out)])
    assert code == 0
    return _read_json(out)


def test_rescale_json_schema(rescaled_natural):
    assert set(rescaled_natural) == {
        "bohr_radius_m", "half_max_radius_m", "rms_radius_m",
        "e_kinetic_J", "e_gravity_J", "e_total_J", "epsilon_J", "e_single_J",
        "virial_residual", "renormalized", "x_norm", "x_phi_tail_shift",
        "generated_by",
    }


def test_rescale_natural_units_identity(rescaled_natural):
    assert rescaled_natural["bohr_radius_m"] == 1.0
    assert rescaled_natural["half_max_radius_m"] == pytest.approx(3.8882, abs=2e-3)
    assert rescaled_natural["epsilon_J"] == pytest.approx(-0.16277, abs=2e-4)
    assert rescaled_natural["virial_residual"] < 1e-4
    assert rescaled_natural["renormalized"] is False
    assert rescaled_natural["x_norm"] == pytest.approx(1.0, abs=1e-9)


def test_rescale_physical_units_scales(solved, tmp_path):
    out = tmp_path / "condensate.json"
    assert main(["rescale", str(solved / "ground.json"),
                 "--mass-kg", "1.67262192369e-27", "--n-particles", "1e23",
                 "--out-json", str(out), "--out-csv", str(tmp_path / "prof.csv")]) == 0
    data = _read_json(out)
    assert 0.3 <= data["half_max_radius_m"] <= 10.0
    assert data["e_total_J"] < 0.0
    header = (tmp_path / "prof.csv").read_text().splitlines()[0]
    assert header == "r_m,f,phi"
    assert data["x_csv"] == "prof.csv"


def test_rescale_requires_a_unit_choice(solved, capsys):
    code = main(["rescale", str(solved / "ground.json")])
    assert code == 2
    assert "pick units" in capsys.readouterr().err


def test_rescale_natural_excludes_physical_flags(solved):
    assert main(["rescale", str(solved / "ground.json"), "--natural",
                 "--mass-kg", "1e-27"]) == 2


def test_rescale_missing_companion_csv_is_exit_2(solved, tmp_path):
    orphan = tmp_path / "orphan.json"
    orphan.write_text((solved / "ground.json").read_text())
    assert main(["rescale", str(orphan), "--natural"]) == 2


# --- evolve ------------------------------------------------------------------

def test_evolve_free_gaussian_observables(tmp_path):
    out = tmp_path / "free.csv"
    code = main(["evolve", "--free", "--gaussian-sigma", "1.0",
                 "--points", "1001", "--r-max", "40", "--steps", "50",
                 "--dt", "0.01", "--out-csv", str(out)])
    assert code == 0
    table = np.genfromtxt(out, delimiter=",", names=True)
    assert list(table.dtype.names) == ["t", "norm", "energy", "rms_width"]
    assert len(table) == 51
    assert np.abs(table["norm"] - 1.0).max() < 1e-9
    assert np.abs(table["energy"] / table["energy"][0] - 1.0).max() < 1e-9
    assert table["rms_width"][-1] > table["rms_width"][0]  # packet disperses


def test_evolve_cubic_zero_coupling_matches_free_bytes(tmp_path):
    outputs = []
    for tag, flags in (("free", ["--free"]),
                       ("cubic", ["--cubic", "--kappa", "0"])):
        out = tmp_path / f"{tag}.csv"
        assert main(["evolve", *flags, "--gaussian-sigma", "1.0",
                     "--points", "1001", "--r-max", "40", "--steps", "20",
                     "--dt", "0.01", "--out-csv", str(out)]) == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_evolve_from_profile_with_snapshots(solved, tmp_path):
    out = tmp_path / "grav.csv"
    code = main(["evolve", "--gravity", "--from", str(solved / "ground.json"),
                 "--steps", "40", "--observe-every", "10",
                 "--snapshot-every", "20", "--out-csv", str(out)])
    assert code == 0
    table = np.genfromtxt(out, delimiter=",", names=True)
    assert len(table) == 5  # steps 0, 10, 20, 30, 40
    assert np.abs(table["norm"] - 1.0).max() < 1e-8
    snaps = sorted(tmp_path.glob("grav_snap_*.csv"))
    assert [p.name for p in snaps] == [
        "grav_snap_0000.csv", "grav_snap_0001.csv", "grav_snap_0002.csv"]
    header = snaps[0].read_text().splitlines()[0]
    assert header == "r,density"


def test_evolve_needs_exactly_one_initial_state(tmp_path, solved):
    base = ["--steps", "5", "--out-csv", str(tmp_path / "x.csv")]
    assert main(["evolve", "--free", *base]) == 2
    assert main(["evolve", "--free", "--gaussian-sigma", "1.0",
                 "--from", str(solved / "ground.json"), *base]) == 2


def test_evolve_cubic_requires_kappa(tmp_path):
    assert main(["evolve", "--cubic", "--gaussian-sigma", "1.0",
                 "--steps", "5", "--out-csv", str(tmp_path / "x.csv")]) == 2


# --- exit codes for solver failures -----------------------------------------

def test_unbracketable_state_is_exit_3(capsys):
    code = main(["solve", "--n", "40", "--points", "801"])
    assert code == 3
    assert "no bracket" in capsys.readouterr().err


def test_unreachable_decay_regime_is_exit_4(capsys):
    code = main(["solve", "--n", "2", "--rho-max", "10", "--points", "1001"])
    assert code == 4
    err = capsys.readouterr().err
    assert "rho_max" in err or "oscillatory" in err


def test_oversized_step_is_exit_5(tmp_path, capsys):
    # a dispersing packet under gravity changes shape too fast at dt=50
    # (an exact eigenstate would sail through: its potential is static)
    code = main(["evolve", "--gravity", "--gaussian-sigma", "1.0",
                 "--points", "1001", "--dt", "50", "--steps", "3",
                 "--out-csv", str(tmp_path / "x.csv")])
    assert code == 5
    assert "suggested dt" in capsys.readouterr().err


def test_unknown_check_suite_is_exit_2(capsys):
    assert main(["check", "--suites", "nonsense"]) == 2
    assert "unknown suite" in capsys.readouterr().err


# --- check -------------------------------------------------------------------

def test_check_single_suite_reports_rows(capsys):
    code = main(["check", "--suites", "homogeneity"])
    out = capsys.readouterr().out
    assert code == 0
    lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert len(lines) == 3
    assert all(l.startswith("PASS") for l in lines)
    assert "3/3 checks passed" in out
