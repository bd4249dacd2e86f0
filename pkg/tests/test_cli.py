"""Command-line behavior: precedence, exit codes, outputs, reruns."""

import json
import os

import numpy as np
import pytest

from sddelab.cli import main
from sddelab.config import ConfigError, parse_config_file, resolve_config
from sddelab.manifest import read_manifest, sha256_file, verify_outputs


def run(args):
    return main([str(a) for a in args])


# --- config resolution ----------------------------------------------------


def test_precedence_default_env_file_flag(tmp_path, monkeypatch):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("alpha = 0.35\nn_main = 1024\n")
    monkeypatch.setenv("SDDELAB_ALPHA", "0.31")
    monkeypatch.setenv("SDDELAB_SEED", "7")
    resolved = resolve_config("norms", None, {})
    assert resolved["alpha"] == 0.31  # env beats the default
    assert resolved["seed"] == 7
    resolved = resolve_config("norms", str(cfg_file), {})
    assert resolved["alpha"] == 0.35  # file beats env
    assert resolved["n_main"] == 1024
    resolved = resolve_config("norms", str(cfg_file), {"alpha": "0.4"})
    assert resolved["alpha"] == 0.4  # flag beats file


def test_config_file_comments_and_blank_lines(tmp_path):
    f = tmp_path / "c.cfg"
    f.write_text("# full-line comment\n\nhurst = 0.8  # trailing comment\n")
    assert parse_config_file(str(f)) == {"hurst": "0.8"}


def test_config_file_rejects_duplicates_and_bad_lines(tmp_path):
    dup = tmp_path / "dup.cfg"
    dup.write_text("alpha = 0.3\nalpha = 0.4\n")
    with pytest.raises(ConfigError):
        parse_config_file(str(dup))
    noeq = tmp_path / "noeq.cfg"
    noeq.write_text("alpha 0.3\n")
    with pytest.raises(ConfigError):
        parse_config_file(str(noeq))


def test_unknown_file_key_is_an_error(tmp_path):
    f = tmp_path / "c.cfg"
    f.write_text("alpha = 0.3\nwibble = 2\n")
    with pytest.raises(ConfigError, match="wibble"):
        resolve_config("norms", str(f), {})


def test_foreign_env_key_is_ignored_but_junk_errors(monkeypatch):
    monkeypatch.setenv("SDDELAB_PRESET", "sine")  # a solve key, not an fbm key
    assert "preset" not in resolve_config("fbm", None, {})
    monkeypatch.setenv("SDDELAB_BOGUS", "1")
    with pytest.raises(ConfigError, match="SDDELAB_BOGUS"):
        resolve_config("fbm", None, {})


def test_type_coercion_failures_are_config_errors():
    with pytest.raises(ConfigError, match="alpha"):
        resolve_config("norms", None, {"alpha": "fast"})
    with pytest.raises(ConfigError, match="n_main"):
        resolve_config("norms", None, {"n_main": "2.5"})


def test_optional_weight_accepts_none():
    assert resolve_config("solve", None, {"lam": "none"})["lam"] is None
    assert resolve_config("solve", None, {"lam": "3.5"})["lam"] == 3.5
    with pytest.raises(ConfigError):
        resolve_config("solve", None, {"lam": "0.5"})  # must be >= 1


def test_exponent_constraint_names_the_interval(capsys, tmp_path):
    code = run(["solve", "--alpha", "0.2", "--hurst", "0.75",
                "--outdir", tmp_path / "x"])
    assert code == 2
    err = capsys.readouterr().err
    assert "(0.25, 0.5)" in err
    assert "alpha" in err and "hurst" in err
    assert not (tmp_path / "x").exists()


def test_converge_requires_step_aligned_delays():
    with pytest.raises(ConfigError, match="divisible"):
        resolve_config("converge", None, {"n_main": "100", "k_max": "5"})


def test_converge_rejects_hereditary_presets():
    with pytest.raises(ConfigError, match="drift"):
        resolve_config("converge", None, {"preset": "hereditary-sup"})


# --- subcommand runs ------------------------------------------------------


def test_usage_errors_exit_2(tmp_path):
    assert run(["norms", "--no-such-flag", "1"]) == 2
    assert run(["frobnicate"]) == 2
    assert run([]) == 2


def test_fbm_run_and_manifest(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    before = set(os.listdir(tmp_path))
    assert run(["fbm", "--outdir", "out", "--n-main", 64, "--seed", 3]) == 0
    after = set(os.listdir(tmp_path))
    assert after - before == {"out"}  # nothing written outside the outdir
    assert sorted(os.listdir("out")) == ["manifest.jsonl", "path.csv"]
    (record,) = read_manifest("out")
    assert record.subcommand == "fbm"
    assert record.config["n_main"] == 64
    assert record.config["seed"] == 3
    assert record.outputs["path.csv"] == sha256_file("out/path.csv")
    assert verify_outputs("out", record) == {}


def test_fbm_is_deterministic_across_directories(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["fbm", "--outdir", a, "--n-main", 64]) == 0
    assert run(["fbm", "--outdir", b, "--n-main", 64]) == 0
    assert (a / "path.csv").read_bytes() == (b / "path.csv").read_bytes()


def test_norms_csv_has_the_pinned_header(tmp_path):
    out = tmp_path / "n"
    assert run(["norms", "--outdir", out, "--n-main", 128]) == 0
    header, row = (out / "norms.csv").read_text().splitlines()
    assert header == (
        "alpha,lambda,norm_alpha_infty,holder,alpha_lambda,"
        "Lambda_alpha,Delta_r,norm_1ma,norm_alpha_1"
    )
    values = [float(v) for v in row.split(",")]
    assert len(values) == 9
    assert values[0] == 0.3


def test_norms_reads_an_external_path(tmp_path):
    src = tmp_path / "src"
    assert run(["fbm", "--outdir", src, "--n-main", 128, "--seed", 5]) == 0
    out = tmp_path / "n"
    assert run(["norms", "--outdir", out, "--input", src / "path.csv"]) == 0
    assert (out / "norms.csv").exists()


def test_integrate_writes_certificate(tmp_path):
    out = tmp_path / "i"
    assert run(["integrate", "--outdir", out, "--n-main", 128]) == 0
    cert = json.loads((out / "certificate.json").read_text())
    assert cert["satisfied"] is True
    assert cert["measured"] <= cert["bound"] * (1 + 1e-9)
    assert (out / "integral.csv").exists()


def test_integrate_requires_paired_inputs(tmp_path):
    code = run(["integrate", "--outdir", tmp_path / "i",
                "--f-input", "only-one.csv"])
    assert code == 2


def test_solve_outputs_solution_and_record(tmp_path):
    out = tmp_path / "s"
    assert run([
        "solve", "--outdir", out, "--n-main", 256, "--preset", "sine",
        "--r", 0.25, "--seed", 2,
    ]) == 0
    rec = json.loads((out / "record.json").read_text())
    assert rec["scheme_used"] == "picard"
    assert rec["converged"] is True
    assert rec["lam"] >= 1.0
    assert rec["lam_formula"] >= rec["lam"]
    assert rec["norms"]["alpha"] == 0.3
    assert rec["regime"]["pathwise"] is True
    assert rec["a_priori"]["measured"] > 0
    header = (out / "solution.csv").read_text().splitlines()[0]
    assert header == "t,x_1"


def test_solve_euler_scheme_selected_by_flag(tmp_path):
    out = tmp_path / "se"
    assert run([
        "solve", "--outdir", out, "--n-main", 128, "--scheme", "euler",
    ]) == 0
    rec = json.loads((out / "record.json").read_text())
    assert rec["scheme_used"] == "euler"
    assert rec["iterations"] == 0


def test_converge_outputs_and_gate_exit(tmp_path):
    out = tmp_path / "c"
    code = run([
        "converge", "--outdir", out, "--n-main", 256, "--n-seeds", 30,
        "--k-min", 2, "--k-max", 5,
    ])
    assert code == 0
    samples = (out / "samples.csv").read_text().splitlines()
    assert samples[0] == "seed,r,dist_alpha,dist_sup,Lambda_alpha"
    assert len(samples) == 1 + 30 * 4  # header + seeds x delays
    summary = (out / "summary.csv").read_text().splitlines()
    assert summary[0] == "r,p,mean,stderr"
    assert len(summary) == 1 + 4 * 2
    script = (out / "plot_convergence.py").read_text()
    compile(script, "plot_convergence.py", "exec")  # valid python


def test_converge_gate_failure_exits_3(tmp_path, monkeypatch):
    import sddelab.cli as cli
    from sddelab import ConvergenceReport

    # A nearly flat ladder: every gate should reject it.
    delays = (0.25, 0.125, 0.0625, 0.03125)
    rng = np.random.default_rng(0)
    dist = np.outer(1.0 + 0.2 * rng.random(8), np.asarray(delays) ** 0.05)
    means = np.stack([dist.mean(axis=0), (dist**2).mean(axis=0)])
    flat = ConvergenceReport(
        delays=delays,
        alpha=0.3,
        p_list=(1.0, 2.0),
        seeds=tuple(range(8)),
        dist_alpha=dist,
        dist_sup=dist * 0.5,
        lambda_alpha_samples=np.ones(8),
        lp_means=means,
        lp_stderr=np.zeros_like(means),
        dominating=dist.max(axis=1),
    )

    def fake_study(*args, **kwargs):
        return flat

    monkeypatch.setattr(cli, "lp_convergence_study", fake_study)
    code = run([
        "converge", "--outdir", tmp_path / "c", "--n-main", 256,
        "--n-seeds", 30, "--k-min", 2, "--k-max", 5,
    ])
    assert code == 3


def test_rerun_reproduces_bytes(tmp_path):
    first = tmp_path / "first"
    assert run(["solve", "--outdir", first, "--n-main", 128, "--seed", 9]) == 0
    again = tmp_path / "again"
    assert run(["rerun", "--manifest", first, "--outdir", again]) == 0
    for name in ("solution.csv", "record.json"):
        assert (first / name).read_bytes() == (again / name).read_bytes()


def test_rerun_detects_tampering(tmp_path):
    first = tmp_path / "first"
    assert run(["fbm", "--outdir", first, "--n-main", 64]) == 0
    (record,) = read_manifest(first)
    (first / "path.csv").write_text("t,x_1\n0,0\n")
    mismatches = verify_outputs(first, record)
    assert "path.csv" in mismatches


def test_rerun_bad_index_is_a_usage_error(tmp_path):
    first = tmp_path / "first"
    assert run(["fbm", "--outdir", first, "--n-main", 64]) == 0
    assert run(["rerun", "--manifest", first, "--index", 5,
                "--outdir", tmp_path / "x"]) == 2
