from ringmix.cli import EXIT_BOUNDS, EXIT_DIVERGED, EXIT_OK, EXIT_USAGE, main

GOOD = """
[experiment]
strategies = d1d
learners = 4
iterations = 10
trials = 1
seed = 2
lr = 0.05
batch_mode = per-learner-fixed
batch_size = 4

[oracle]
kind = quadratic
dimension = 4
condition_number = 5.0
noise_scale = 1.0
"""


def test_spectral_subcommand(capsys):
    assert main(["spectral", "8", "16"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "0.804737854" in out
    assert "0.949253022" in out


def test_spectral_rejects_small_rings(capsys):
    assert main(["spectral", "2"]) == EXIT_USAGE
    assert ">= 3" in capsys.readouterr().err


def test_usage_errors_exit_one(capsys):
    assert main(["frobnicate"]) == EXIT_USAGE
    assert main(["run"]) == EXIT_USAGE
    assert main(["spectral"]) == EXIT_USAGE


def test_run_subcommand_and_overrides(tmp_path, capsys):
    cfg_file = tmp_path / "exp.ini"
    cfg_file.write_text(GOOD)
    out_dir = tmp_path / "out"
    code = main(["run", "--config", str(cfg_file), "--out", str(out_dir), "--trials", "2"])
    assert code == EXIT_OK
    csvs = sorted(p.name for p in out_dir.glob("d1d_*.csv"))
    assert csvs == ["d1d_L4_trial0.csv", "d1d_L4_trial1.csv"]
    capsys.readouterr()

    other = tmp_path / "other"
    assert main(
        ["run", "--config", str(cfg_file), "--out", str(other), "--seed", "9", "--quiet"]
    ) == EXIT_OK
    assert capsys.readouterr().out == ""
    base = (out_dir / "summary.csv").read_text().splitlines()[1].split(",")[3]
    reseeded = (other / "summary.csv").read_text().splitlines()[1].split(",")[3]
    assert base != reseeded


def test_run_missing_and_invalid_config(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "nope.ini")]) == EXIT_USAGE
    bad = tmp_path / "bad.ini"
    bad.write_text("[experiment]\nstrategies = d1d\n")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "o")]) == EXIT_USAGE
    assert "missing required key" in capsys.readouterr().err


def test_run_divergence_exit_code(tmp_path, capsys):
    cfg_file = tmp_path / "explode.ini"
    cfg_file.write_text(GOOD.replace("lr = 0.05", "lr = 80.0"))
    code = main(["run", "--config", str(cfg_file), "--out", str(tmp_path / "out")])
    assert code == EXIT_DIVERGED
    assert "diverged" in capsys.readouterr().err


def test_verify_bounds_quiet_passes(capsys):
    assert main(["verify-bounds", "--trials", "300", "--seed", "5", "--quiet"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "PASS"
    assert main(["verify-bounds", "--trials", "1"]) == EXIT_USAGE
    assert EXIT_BOUNDS == 3
