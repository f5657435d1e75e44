"""End-to-end CLI: flags, outputs, manifests, exit codes."""

import hashlib
import json

import pytest

from vortexeq.cli import main


def sha256(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def read_csv_rows(path):
    lines = [ln for ln in path.read_text().strip().splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    return [dict(zip(header, ln.split(","))) for ln in lines[1:]]


def test_solve_balance_point(tmp_path, capsys):
    out = tmp_path / "point.csv"
    code = main(["solve", "--mu", "0.5", "--z", "1.5", "--out", str(out)])
    assert code == 0
    row = read_csv_rows(out)[0]
    assert abs(float(row["E"])) <= 1e-8
    assert row["regime"] == "Uniform"
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["outputs"][out.name] == sha256(out)
    assert manifest["parameters"]["mu"] == 0.5


def test_solve_mu0_z2_closed_form(tmp_path):
    out = tmp_path / "point.csv"
    assert main(["solve", "--mu", "0", "--z", "2", "--out", str(out)]) == 0
    row = read_csv_rows(out)[0]
    assert float(row["beta"]) == pytest.approx(4.0, abs=1e-8)
    assert float(row["E"]) == pytest.approx(0.25, abs=1e-8)


def test_solve_json_format(tmp_path):
    out = tmp_path / "point.json"
    assert main(["solve", "--mu", "0", "--z", "2", "--out", str(out),
                 "--format", "json"]) == 0
    data = json.loads(out.read_text())
    assert data["beta"] == pytest.approx(4.0, abs=1e-8)
    assert data["regime"] == "EdgePeaked"


def test_solve_unreachable_exits_2(tmp_path, capsys):
    code = main(["solve", "--mu", "0", "--z", "3", "--out", str(tmp_path / "x.csv")])
    assert code == 2
    assert "2*sqrt(2)" in capsys.readouterr().err


def test_usage_error_exit_1(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(["solve", "--z", "2"])  # --mu missing
    assert exc_info.value.code == 1
    with pytest.raises(SystemExit) as exc_info:
        main(["frobnicate"])
    assert exc_info.value.code == 1


def test_invalid_params_exit_1(tmp_path, capsys):
    code = main(["solve", "--mu", "0.5", "--z", "1.5", "--epsilon", "-1",
                 "--out", str(tmp_path / "x.csv")])
    assert code == 1
    assert "epsilon" in capsys.readouterr().err


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# model parameters\nepsilon = 2.0\nlambda_total = 1.0\n")
    out = tmp_path / "a.csv"
    assert main(["solve", "--mu", "0.5", "--z", "1.5", "--config", str(cfg),
                 "--out", str(out)]) == 0
    assert float(read_csv_rows(out)[0]["beta"]) == pytest.approx(2.25, abs=1e-8)
    out2 = tmp_path / "b.csv"
    assert main(["solve", "--mu", "0.5", "--z", "1.5", "--config", str(cfg),
                 "--epsilon", "1.0", "--out", str(out2)]) == 0
    assert float(read_csv_rows(out2)[0]["beta"]) == pytest.approx(1.125, abs=1e-8)


def test_outdir_env_default(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("VORTEXEQ_OUTDIR", str(tmp_path / "results"))
    assert main(["solve", "--mu", "0.5", "--z", "1.0"]) == 0
    files = list((tmp_path / "results").glob("solve-*.csv"))
    assert len(files) == 1


def test_sweep_metastable_summary(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--mu", "0.75", "--z-min", "0.5", "--z-max", "3",
                 "--n", "12", "--out", str(out)])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "metastable: [" in stdout
    rows = read_csv_rows(out)
    assert len(rows) == 12
    interior_cv = [float(r["cv"]) for r in rows[1:-1]]
    assert all(c < 0 for c in interior_cv)


def test_sweep_no_metastable(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--mu", "0.25", "--z-min", "0.5", "--z-max", "3",
                 "--n", "10", "--out", str(out)]) == 0
    assert "metastable: none" in capsys.readouterr().out


def test_sweep_balance_cv_zero(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--mu", "0.5", "--z-min", "0.5", "--z-max", "3",
                 "--n", "10", "--out", str(out)]) == 0
    rows = read_csv_rows(out)
    assert all(abs(float(r["cv"])) <= 1e-6 for r in rows[1:-1])


def test_sweep_plot_deterministic(tmp_path, capsys):
    out1 = tmp_path / "s1" / "sweep.csv"
    out2 = tmp_path / "s2" / "sweep.csv"
    for out in (out1, out2):
        assert main(["sweep", "--mu", "0.6", "--z-min", "0.8", "--z-max", "2",
                     "--n", "6", "--plot", "--out", str(out)]) == 0
    for name in ("sweep-E.svg", "sweep-T.svg", "sweep-rho0.svg"):
        a, b = out1.parent / name, out2.parent / name
        assert a.exists()
        assert sha256(a) == sha256(b)
    manifest = json.loads((out1.parent / "manifest.json").read_text())
    assert len(manifest["outputs"]) == 4


def test_sweep_empty_exit_2(tmp_path, capsys):
    code = main(["sweep", "--mu", "0", "--z-min", "2.9", "--z-max", "3.2",
                 "--n", "4", "--out", str(tmp_path / "s.csv")])
    assert code == 2


def test_profile_consistency_with_solve(tmp_path):
    prof = tmp_path / "profile.csv"
    point = tmp_path / "point.csv"
    assert main(["profile", "--mu", "0", "--z", "2", "--samples", "41",
                 "--out", str(prof)]) == 0
    assert main(["solve", "--mu", "0", "--z", "2", "--out", str(point)]) == 0
    rows = read_csv_rows(prof)
    assert len(rows) == 41
    rho0 = float(read_csv_rows(point)[0]["rho0"])
    assert float(rows[0]["rho"]) == pytest.approx(rho0, rel=1e-12)
    assert float(rows[-1]["rho"]) / float(rows[0]["rho"]) == pytest.approx(4.0, rel=1e-8)


def test_profile_uniform_at_balance(tmp_path):
    prof = tmp_path / "profile.csv"
    assert main(["profile", "--mu", "0.5", "--z", "1.5", "--samples", "21",
                 "--out", str(prof)]) == 0
    values = [float(r["rho"]) for r in read_csv_rows(prof)]
    assert max(values) - min(values) <= 1e-9 * max(values)


MC_CONFIG = """
# mapped small run: mu = eps*mu'*R^2/(2*lambda) = 0.5, beta_s = z^2/(2*lambda)
lambda_total = 8
epsilon = 1
gamma = 1
alpha = 2
radius = 4
mu = 0.5
n_filaments = 8
points_per_filament = 4
period = 1.0
mu_prime = 0.5
beta_s = 1.0
sweeps = 500
burn_in = 150
step_point = 0.2
step_translate = 0.8
seed = 31
histogram_bins = 36
histogram_rmax = 9.0
"""


@pytest.fixture()
def mc_run(tmp_path, capsys):
    cfg = tmp_path / "mc.cfg"
    cfg.write_text(MC_CONFIG)
    out_dir = tmp_path / "run1"
    assert main(["mc", "--config", str(cfg), "--out-dir", str(out_dir)]) == 0
    capsys.readouterr()
    return cfg, out_dir


def test_mc_outputs_and_manifest(mc_run):
    _, out_dir = mc_run
    summary = json.loads((out_dir / "summary.json").read_text())
    assert summary["seed"] == 31
    assert (out_dir / "histogram.csv").exists()
    trace_rows = read_csv_rows(out_dir / "trace.csv")
    assert len(trace_rows) == 500
    manifest = json.loads((out_dir / "manifest.json").read_text())
    for name, digest in manifest["outputs"].items():
        assert sha256(out_dir / name) == digest
    assert manifest["seeds"] == [31]
    # histogram mass: sum over count column + overflow = N*M*retained
    counts = sum(int(r["count"]) for r in read_csv_rows(out_dir / "histogram.csv"))
    assert counts + summary["histogram_overflow"] == 8 * 4 * summary["retained_sweeps"]


def test_mc_seeded_rerun_identical_digest(mc_run, tmp_path, capsys):
    cfg, out_dir = mc_run
    first = json.loads((out_dir / "summary.json").read_text())["trace_digest"]
    out2 = tmp_path / "run2"
    assert main(["mc", "--config", str(cfg), "--out-dir", str(out2)]) == 0
    second = json.loads((out2 / "summary.json").read_text())["trace_digest"]
    assert first == second
    assert sha256(out_dir / "trace.csv") == sha256(out2 / "trace.csv")


def test_compare_mapped_run(mc_run, capsys):
    _, out_dir = mc_run
    code = main(["compare", "--mc-summary", str(out_dir / "summary.json"),
                 "--mu", "0.5", "--z", "4.0",
                 "--l1-tol", "0.95", "--moment-band", "5"])
    out = capsys.readouterr().out
    assert code == 0
    assert "comparison: PASS" in out
    assert "L1 distance" in out


def test_compare_fail_exits_2(mc_run, capsys):
    _, out_dir = mc_run
    code = main(["compare", "--mc-summary", str(out_dir / "summary.json"),
                 "--mu", "0.5", "--z", "4.0", "--l1-tol", "1e-6"])
    assert code == 2
    assert "comparison: FAIL" in capsys.readouterr().out


def test_compare_mismatched_mapping_exits_2(mc_run, capsys):
    _, out_dir = mc_run
    # wrong z: beta_s no longer matches beta_mf/gamma
    code = main(["compare", "--mc-summary", str(out_dir / "summary.json"),
                 "--mu", "0.5", "--z", "2.0"])
    assert code == 2
    assert "beta_s" in capsys.readouterr().err


def test_compare_trap_off_mismatch(tmp_path, capsys):
    cfg = tmp_path / "mc0.cfg"
    cfg.write_text(
        MC_CONFIG.replace("mu_prime = 0.5", "mu_prime = 0")
        .replace("mu = 0.5", "mu = 0")
        .replace("sweeps = 500", "sweeps = 60")
        .replace("burn_in = 150", "burn_in = 20")
    )
    out_dir = tmp_path / "run0"
    assert main(["mc", "--config", str(cfg), "--out-dir", str(out_dir)]) == 0
    capsys.readouterr()
    code = main(["compare", "--mc-summary", str(out_dir / "summary.json"),
                 "--mu", "0.5", "--z", "4.0"])
    assert code == 2
    assert "mu_prime" in capsys.readouterr().err
