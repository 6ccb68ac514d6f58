import math
from pathlib import Path

import numpy as np
import pytest

from gawq.cli import main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


SMALL_SPECTRUM = """
system.g = 0.812
system.N = 3
system.gamma = -0.215
grid.k_start = 0.4
grid.k_stop = 2.7
grid.k_count = 41
"""

SMALL_EVOLVE = """
system.g = 0.812
system.N = 3
system.gamma = -0.215
packet.alpha = 0.05
packet.j_c = -200
packet.k_c = 1.32
lattice.sites = 1400
evolve.t_end = 60.0
evolve.snapshots = -30,60
"""


def test_spectrum_command_and_determinism(tmp_path):
    cfg = write(tmp_path, SMALL_SPECTRUM)
    assert main(["spectrum", cfg, "--out", str(tmp_path / "a")]) == 0
    assert main(["spectrum", cfg, "--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "spectrum.csv").read_bytes()
    b = (tmp_path / "b" / "spectrum.csv").read_bytes()
    assert a == b
    header = a.decode().splitlines()[0]
    assert header == "k,omega_k,Re_r,Im_r,Re_t,Im_t,R,T,flux_sum,singular_flag"
    assert len(a.decode().splitlines()) == 42


def test_fig2d_spectrum_reference_features(tmp_path):
    assert main(["spectrum", str(CONFIG_DIR / "fig2d.cfg"), "--out", str(tmp_path)]) == 0
    data = np.genfromtxt(tmp_path / "spectrum.csv", delimiter=",", names=True)
    peak = np.nanmax(data["flux_sum"])
    omega_at_peak = data["omega_k"][np.nanargmax(data["flux_sum"])]
    assert peak > 1e3
    assert abs(omega_at_peak - (-0.496)) < 0.005
    at_pi3 = data["flux_sum"][np.argmin(np.abs(data["k"] - math.pi / 3))]
    assert abs(at_pi3 - 1.0) < 1e-12


def test_singularity_command(tmp_path):
    cfg = write(tmp_path, "system.g = 0.812\nsystem.N = 3\n")
    assert main(["singularity", cfg, "--out", str(tmp_path)]) == 0
    data = np.genfromtxt(tmp_path / "singularities.csv", delimiter=",", names=True)
    assert abs(float(data["gamma"]) - 0.215) < 0.005
    assert abs(float(data["k"]) - 1.32) < 0.01


def test_poles_command_critical_gain(tmp_path):
    assert main(["poles", str(CONFIG_DIR / "fig3.cfg"), "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "poles.csv").read_text().splitlines()
    assert lines[0] == "gamma,Re_k,Im_k,Re_E,Im_E,class,residual,branch"
    assert len(lines) == 3  # header + two poles
    classes = {line.split(",")[5] for line in lines[1:]}
    assert classes == {"in-continuum", "growing"}


def test_trajectory_command(tmp_path):
    cfg = write(tmp_path, (
        "system.g = 0.812\nsystem.N = 3\n"
        "sweep.gamma_start = 0.20\nsweep.gamma_stop = 0.23\nsweep.gamma_count = 7\n"
    ))
    assert main(["trajectory", cfg, "--out", str(tmp_path)]) == 0
    data = np.genfromtxt(tmp_path / "trajectory.csv", delimiter=",", names=True,
                         dtype=None, encoding="utf-8")
    gammas = np.atleast_1d(data["gamma"])
    counts = {g: int(np.sum(gammas == g)) for g in np.unique(gammas)}
    assert min(counts.values()) == 1 and max(counts.values()) == 2


def test_modes_command(tmp_path):
    assert main(["modes", str(CONFIG_DIR / "modes.cfg"), "--out", str(tmp_path)]) == 0
    coeffs = (tmp_path / "coefficients.csv").read_text().splitlines()
    assert coeffs[0] == "pole_id,Re_C,Im_C,Re_A,Im_A"
    assert len(coeffs) == 3
    prof = np.genfromtxt(tmp_path / "profiles_p1.csv", delimiter=",", names=True)
    assert prof["j"][0] == -80 and prof["j"][-1] == 83
    assert np.all(prof["abs2"] >= 0)


def test_evolve_command_artifacts(tmp_path):
    cfg = write(tmp_path, SMALL_EVOLVE)
    assert main(["evolve", cfg, "--out", str(tmp_path)]) == 0
    obs = np.genfromtxt(tmp_path / "observables.csv", delimiter=",", names=True)
    assert obs["t"][-1] == pytest.approx(60.0)
    snaps = np.genfromtxt(tmp_path / "snapshots.csv", delimiter=",", names=True)
    assert set(np.unique(snaps["t"])) == {-30.0, 60.0}
    fits = (tmp_path / "fits.txt").read_text()
    assert "final_R_L" in fits and "final_T_L" in fits


def test_dump_roundtrip_byte_identical(tmp_path, capsys):
    assert main(["dump", str(CONFIG_DIR / "fig4b.cfg")]) == 0
    first = capsys.readouterr().out
    redumped = write(tmp_path, first, "redump.cfg")
    assert main(["dump", redumped]) == 0
    second = capsys.readouterr().out
    assert first == second


def test_config_error_exit_codes(tmp_path, capsys):
    bad = write(tmp_path, "system.g = 0.5\nsystem.N = 0\n")
    assert main(["spectrum", bad, "--out", str(tmp_path)]) == 2
    assert "system.N" in capsys.readouterr().err
    assert main(["spectrum", str(tmp_path / "missing.cfg")]) == 2
    no_grid = write(tmp_path, "system.g = 0.5\nsystem.N = 2\n")
    assert main(["spectrum", no_grid, "--out", str(tmp_path)]) == 2


def test_boundary_violation_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, (
        "system.g = 0.0\nsystem.N = 3\n"
        "packet.alpha = 0.08\npacket.j_c = -150\npacket.k_c = 1.32\n"
        "lattice.sites = 560\nevolve.t_end = 400.0\n"
    ))
    assert main(["evolve", cfg, "--out", str(tmp_path)]) == 4
    assert "boundary" in capsys.readouterr().err.lower()
