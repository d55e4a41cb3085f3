import os
import textwrap

import numpy as np
import pytest

from gammadev import cli
from gammadev.config import RunConfig, load_config
from gammadev.errors import ConfigurationError, ConstraintError, InsufficientDataError, UsageError
from gammadev.report import COLUMNS, emit, fmt_value, render_csv
from gammadev.sweep import SweepReport, fit_exponent, fit_rates, run_sweep

GOLDEN = os.path.join(os.path.dirname(__file__), "golden", "reference_sweep.csv")


def test_golden_csv_byte_identical(ref_sweep, tmp_path):
    files = emit(ref_sweep, tmp_path)
    with open(files[0], "rb") as a, open(GOLDEN, "rb") as b:
        assert a.read() == b.read()


def test_sweep_deterministic(ref_config, ref_sweep):
    again = run_sweep(ref_config.with_eps([0.05, 0.025]))
    assert render_csv(again).splitlines()[-1] == render_csv(ref_sweep).splitlines()[-2]


def test_rows_in_eps_order(ref_sweep, ref_config):
    assert list(ref_sweep.column("eps")) == list(ref_config.eps)
    assert ref_sweep.complete


def test_omega_over_eps2_constant(ref_sweep):
    q = ref_sweep.column("omega_over_eps2")
    np.testing.assert_allclose(q, q[0], rtol=1e-6)


def test_limsup_quotient_decays(ref_sweep):
    q = ref_sweep.column("limsup_quotient")
    assert np.isnan(q[0])
    assert fit_exponent(ref_sweep.column("eps"), q) >= 1 - 0.2


def test_empty_eps_header_only(tmp_path):
    rep = run_sweep(RunConfig(eps=()))
    assert rep.rows == [] and rep.complete
    path = emit(rep, tmp_path)[0]
    lines = open(path).read().splitlines()
    assert lines[-1] == ",".join(COLUMNS)
    files = emit(rep, tmp_path / "pd", "plotdata")
    assert len(files) == len(COLUMNS) - 1
    assert all(open(f).read().splitlines()[-1].startswith("# eps") for f in files)


def test_unknown_format(ref_sweep, tmp_path):
    with pytest.raises(UsageError):
        emit(ref_sweep, tmp_path, "xml")


def test_incomplete_needs_force(ref_sweep, tmp_path):
    row = dict(ref_sweep.rows[0], converged=False)
    rep = SweepReport(ref_sweep.header, [row])
    with pytest.raises(UsageError):
        emit(rep, tmp_path)
    assert emit(rep, tmp_path, force=True)


def test_unwritable_path(ref_sweep, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        emit(ref_sweep, blocker / "sub")


def test_fit_exponent_synthetic():
    eps = np.array([0.1, 0.05, 0.025, 0.0125])
    assert fit_exponent(eps, 3.7 * eps**2) == pytest.approx(2.0, abs=1e-6)
    assert fit_exponent(eps, np.full(4, 0.3)) == 0.0
    assert np.isnan(fit_exponent(eps[:2], eps[:2]))


def test_fit_rates_needs_three_rows(ref_sweep):
    with pytest.raises(InsufficientDataError):
        fit_rates(SweepReport(ref_sweep.header, ref_sweep.rows[:2]))


def test_fmt_value():
    assert fmt_value(True) == "1"
    assert fmt_value(float("nan")) == "nan"
    assert fmt_value(1 / 3) == "0.333333333333"


def test_config_validation():
    with pytest.raises(ConfigurationError):
        RunConfig(eps=(0.05, 0.1))
    with pytest.raises(ConfigurationError):
        RunConfig(r=None)
    with pytest.raises(ConstraintError):
        RunConfig(r=None, m=4.0)


def test_mass_constraint_before_solving(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[geometry]\nm = 3.2\n")
    with pytest.raises(ConstraintError):
        load_config(path)
    assert cli.main(["sweep", "--config", str(path), "--out", str(tmp_path)]) == 2
    assert not (tmp_path / "sweep.csv").exists()


def test_config_round_trip(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(
        textwrap.dedent(
            """
            [norm]
            kind = weighted-p-norm
            p = 3
            weights = 1, 1.5
            [well]
            beta = 1.4
            [geometry]
            R = 1.2
            m = 0.5
            [sweep]
            eps = 0.05, 0.025
            [output]
            seed = 7
            """
        )
    )
    cfg = load_config(path)
    assert cfg.norm().kind == "weighted-p-norm"
    assert cfg.eps == (0.05, 0.025)
    assert cfg.mass == 0.5 and cfg.seed == 7
    assert 0 < cfg.radius < cfg.R
    echo = dict(cfg.echo())
    assert echo["geometry.m"] == "0.5"


def test_malformed_config(tmp_path):
    path = tmp_path / "x.ini"
    path.write_text("[mystery]\na = 1\n")
    with pytest.raises(ConfigurationError):
        load_config(path)
    path.write_text("[sweep]\neps = a, b\n")
    with pytest.raises(ConfigurationError):
        load_config(path)


def test_cli_sweep_and_plotdata(tmp_path, capsys):
    assert cli.main(["sweep", "--eps", "0.05", "0.025", "0.0125", "--out", str(tmp_path), "--format", "plotdata"]) == 0
    assert (tmp_path / "lambda.dat").exists()
    assert (tmp_path / "rates.png").exists()
    assert "fit excess" in capsys.readouterr().out


def test_cli_unknown_format(tmp_path):
    assert cli.main(["sweep", "--format", "xml", "--out", str(tmp_path)]) == 2


def test_cli_solve_dump(tmp_path):
    assert cli.main(["solve", "--eps", "0.025", "--out", str(tmp_path)]) == 0
    data = np.loadtxt(tmp_path / "solve_eps0.025.dat")
    assert data.shape[1] == 4
    assert data[-1, 2] == 1.0
    assert (tmp_path / "solve_eps0.025.png").exists()


def test_cli_solve_needs_one_eps(tmp_path):
    assert cli.main(["solve", "--out", str(tmp_path)]) == 2


def test_cli_nonconverged_exit(tmp_path):
    path = tmp_path / "tight.ini"
    path.write_text("[tolerances]\nel_tol = 1e-30\nkkt_tol = 1e-30\n[grid]\nfine = 16\nh_max = 0.05\n")
    assert cli.main(["solve", "--config", str(path), "--eps", "0.05", "--out", str(tmp_path)]) == 1


def test_cli_profile_and_recover(tmp_path, capsys):
    assert cli.main(["profile", "--out", str(tmp_path)]) == 0
    t, z, dz = np.loadtxt(tmp_path / "profile.dat", unpack=True)
    assert z[0] == -1 and z[-1] == 1
    assert cli.main(["recover", "--eps", "0.05", "0.025"]) == 0
    assert cli.main(["recover", "--eps", "0.1"]) == 1
    assert "quotient" in capsys.readouterr().out


def test_cli_rearrange(tmp_path):
    assert cli.main(["rearrange", "--fields", "2", "--size", "128", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "rearranged_0.png").exists()


def test_output_dir_env(monkeypatch):
    monkeypatch.setenv("GAMMADEV_OUT", "/tmp/x")
    assert RunConfig().output_dir() == "/tmp/x"
    assert RunConfig().output_dir("y") == "y"


def test_cli_eps_comma_list(capsys):
    assert cli.main(["recover", "--eps", "0.05,0.025"]) == 0
    out = capsys.readouterr().out
    assert "eps=0.05 " in out and "eps=0.025 " in out


def test_cli_check_reports_every_criterion(tmp_path, capsys):
    import json

    code = cli.main(["check", "--json", str(tmp_path / "check.json")])
    data = json.load(open(tmp_path / "check.json"))
    assert [d["number"] for d in data] == list(range(1, 11))
    assert code == (0 if all(d["passed"] for d in data) else 1)
    assert capsys.readouterr().out.count("criterion") == 10
