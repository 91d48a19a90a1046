import io

import numpy as np
import pytest

from decaysim import __version__
from decaysim.main import EXIT_AUDIT, EXIT_OK, EXIT_USAGE, main
from decaysim.output import read_table


def _run(*argv):
    buffer = io.StringIO()
    code = main(list(argv), stdout=buffer)
    return code, buffer.getvalue()


def test_rate_free_space(config_dir):
    code, out = _run("rate", "--config", str(config_dir / "free_space.ini"))
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "gamma_ratio = 1.000000"
    assert lines[1].startswith("delta_omega = ")


def test_rate_without_shift(config_dir):
    code, out = _run("rate", "--config", str(config_dir / "free_space.ini"), "--no-shift")
    assert code == EXIT_OK
    assert out == "gamma_ratio = 1.000000\n"


def test_missing_config_file(tmp_path):
    code, _ = _run("rate", "--config", str(tmp_path / "absent.ini"))
    assert code == EXIT_USAGE


def test_invalid_config(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[material.m.oscillator]\nomega_t = 1\nomega_p = 1\ngamma = -0.1\n")
    code, _ = _run("spectrum", "--config", str(path))
    assert code == EXIT_USAGE


def test_usage_errors(config_dir):
    assert _run()[0] == EXIT_USAGE
    assert _run("plot", "--config", str(config_dir / "default.ini"))[0] == EXIT_USAGE
    assert _run("rate")[0] == EXIT_USAGE


def test_geometry_without_atom_position(tmp_path):
    path = tmp_path / "toy.ini"
    path.write_text("[geometry]\nkind = toy1d\nleft = m\nright = m\n[material.m]\neps = 2+0.1j\neps_omega = 1\n")
    code, _ = _run("rate", "--config", str(path))
    assert code == EXIT_USAGE


def test_eps_table(config_dir, tmp_path):
    out = tmp_path / "eps.csv"
    code, _ = _run(
        "eps",
        "--config",
        str(config_dir / "default.ini"),
        "--out",
        str(out),
        "--override",
        "eps.n_points=6",
    )
    assert code == EXIT_OK
    header = [line for line in out.read_text().splitlines() if line.startswith("#")]
    assert header[0] == f"# decaysim {__version__}"
    assert header[1] == "# command: eps"
    assert header[2].startswith("# config_hash: ")
    assert header[3].startswith("# units: ")
    assert header[4] == "# columns: omega,eps_re,eps_im,kk_re_residual,kk_im_residual"
    frame = read_table(out)
    assert len(frame) == 6
    assert frame["omega"].iloc[0] == pytest.approx(0.2)
    assert (frame["eps_im"] > 0).all()
    assert (frame["kk_re_residual"] < 1e-4).all()


def test_spectrum_to_stdout(config_dir):
    code, out = _run("spectrum", "--config", str(config_dir / "free_space.ini"), "--override", "window.n_samples=17")
    assert code == EXIT_OK
    assert out.startswith(f"# decaysim {__version__}\n# command: spectrum\n")
    rows = [line for line in out.splitlines() if line and not line.startswith("#")]
    assert rows[0] == "omega,s"
    assert all(float(row.split(",")[1]) == pytest.approx(1.0) for row in rows[1:])


def test_decay_output_is_deterministic(config_dir, tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        code, _ = _run(
            "decay",
            "--config",
            str(config_dir / "free_space.ini"),
            "--out",
            str(path),
            "--override",
            "time.n_steps=200",
        )
        assert code == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()
    frame = read_table(paths[0])
    assert list(frame.columns) == ["t", "re_c", "im_c", "population", "markov_population"]
    assert frame["t"].iloc[-1] == pytest.approx(5.0)


def test_decay_flat_spectrum_fits_exponential(config_dir, tmp_path):
    out = tmp_path / "decay.csv"
    code, _ = _run(
        "decay",
        "--config",
        str(config_dir / "free_space.ini"),
        "--out",
        str(out),
        "--override",
        "time.n_steps=10000",
    )
    assert code == EXIT_OK
    frame = read_table(out)
    assert np.max(np.abs(frame["population"] - np.exp(-frame["t"]))) < 1e-3


def test_audit_failure_exit_code(config_dir):
    code, out = _run(
        "audit",
        "--config",
        str(config_dir / "free_space.ini"),
        "--override",
        "audit.n_pairs=5",
        "--override",
        "audit.oracle_tolerance=1e-12",
        "--override",
        "audit.n_modes=200",
        "--override",
        "time.n_steps=50",
    )
    assert code == EXIT_AUDIT
    assert "FAIL  solver_vs_oracle" in out


@pytest.mark.slow
def test_audit_default_config_passes(config_dir):
    code, out = _run("audit", "--config", str(config_dir / "default.ini"))
    assert code == EXIT_OK, out
    assert out.count("PASS") == 8



def test_non_positive_layer_thickness_is_usage_error(tmp_path):
    path = tmp_path / "layers.ini"
    path.write_text(
        "[geometry]\nkind = toy1d\nleft = m\nright = m\nlayers = m:0\n"
        "[material.m]\neps = 2+0.1j\neps_omega = 1\n"
    )
    code, _ = _run("eps", "--config", str(path))
    assert code == EXIT_USAGE


def _markov_gap(config_dir, tmp_path, *overrides):
    out = tmp_path / "decay.csv"
    argv = ["decay", "--config", str(config_dir / "sphere_bandgap.ini"), "--out", str(out)]
    for item in overrides:
        argv += ["--override", item]
    code, _ = _run(*argv)
    assert code == EXIT_OK
    frame = read_table(out)
    return float(np.max(np.abs(frame["population"] - frame["markov_population"])))


@pytest.mark.slow
def test_band_edge_decay_is_non_markovian(config_dir, tmp_path):
    assert _markov_gap(config_dir, tmp_path) > 0.05


@pytest.mark.slow
def test_far_detuned_decay_is_markovian(config_dir, tmp_path):
    gap = _markov_gap(config_dir, tmp_path, "atom.omega_a=0.5", "atom.gamma0=0.001")
    assert gap < 0.01
