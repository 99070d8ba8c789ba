import json
import math
import os

from perctree.cli import main
from perctree import harness


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_mu_subcommand(capsys):
    code, out, _ = run_cli(capsys, "mu", "--kind", "uniform-binary", "--c", "0.5")
    assert code == 0
    lines = dict(line.split("=", 1) for line in out.strip().split("\n"))
    assert float(lines["mu"]) == 0.5
    assert lines["span"] == "none"
    assert math.isclose(float(lines["lambda"]), math.exp(-1), abs_tol=1e-12)


def test_mu_lattice_span(capsys):
    code, out, _ = run_cli(capsys, "mu", "--kind", "fixed-multiset",
                           "--multiset", "0.5 0.25 0.125 0.125")
    assert code == 0
    lines = dict(line.split("=", 1) for line in out.strip().split("\n"))
    assert math.isclose(float(lines["mu"]), 1.75 * math.log(2), abs_tol=1e-12)
    assert math.isclose(float(lines["span"]), math.log(2), abs_tol=1e-9)


def test_generate_and_dump(capsys, tmp_path):
    dump = tmp_path / "tree.txt"
    code, out, _ = run_cli(capsys, "generate", "--kind", "uniform-binary",
                           "--n", "50", "--seed", "3", "--out", str(dump))
    assert code == 0
    assert "n_vertices=50" in out
    lines = dump.read_text().strip().split("\n")
    assert lines[0] == "# seed=3"
    assert len(lines) == 51


def test_percolate_keep_all(capsys):
    code, out, _ = run_cli(capsys, "percolate", "--kind", "uniform-binary",
                           "--n", "2", "--p", "1", "--seed", "7")
    assert code == 0
    rec = json.loads(out)
    assert rec["C0"] == 2
    assert rec["C"] == []
    assert rec["seed"] == 7


def test_percolate_requires_one_of_c_p(capsys):
    code, _, err = run_cli(capsys, "percolate", "--kind", "uniform-binary",
                           "--n", "10")
    assert code == 1 and "usage error" in err
    code, _, err = run_cli(capsys, "percolate", "--kind", "uniform-binary",
                           "--n", "10", "--p", "0.5", "--c", "0.5")
    assert code == 1


def test_regular_subcommand(capsys):
    code, out, _ = run_cli(capsys, "regular", "--d", "2", "--h", "6",
                           "--c", "1.0", "--seed", "5")
    assert code == 0
    rec = json.loads(out)
    assert rec["d"] == 2 and rec["h"] == 6
    assert rec["G0"] >= 1


def test_oracle_subcommand(capsys):
    code, out, _ = run_cli(capsys, "oracle", "--fixture", "path3", "--p", "0.5")
    assert code == 0
    rows = dict(line.split("\t") for line in out.strip().split("\n"))
    assert math.isclose(float(rows["1"]), 0.5, abs_tol=1e-12)
    assert math.isclose(float(rows["4"]), 0.125, abs_tol=1e-12)


def test_oracle_regular(capsys):
    code, out, _ = run_cli(capsys, "oracle", "--d", "2", "--h", "1", "--p", "0.9")
    assert code == 0
    assert "tau1 law" in out


def test_oracle_mask_table(capsys, tmp_path):
    table = tmp_path / "masks.txt"
    code, out, _ = run_cli(capsys, "oracle", "--fixture", "star3", "--p", "0.5",
                           "--ranked", "--out", str(table))
    assert code == 0
    assert len(table.read_text().strip().split("\n")) == 8


def test_usage_error_unknown_kind(capsys):
    code, _, err = run_cli(capsys, "mu", "--kind", "nope")
    assert code == 1
    assert "usage error" in err


def test_usage_error_missing_subcommand(capsys):
    code, _, err = run_cli(capsys, "--bogus")
    assert code == 1


def test_usage_error_produces_no_output_file(capsys, tmp_path):
    out = tmp_path / "never.json"
    code, _, _ = run_cli(capsys, "percolate", "--kind", "uniform-binary",
                         "--n", "10", "--out", str(out))  # missing --c/--p
    assert code == 1
    assert not out.exists()


def test_runtime_error_exit_code(capsys, tmp_path):
    # unwritable output directory: runtime error, exit 2
    cfg = tmp_path / "exp.cfg"
    _write_tiny_config(cfg, out="/dev/null/definitely/not/writable")
    code, _, err = run_cli(capsys, "experiment", "--config", str(cfg))
    assert code == 2


def _write_tiny_config(path, out=None, kind="theorem1"):
    from perctree import ExperimentConfig, uniform_binary
    cfg = ExperimentConfig(
        experiment=kind, c=0.5, replications=5, master_seed=11,
        vector_spec=uniform_binary(), s=1, s0=1, s1=0,
        n_grid=(200, 500), t_grid=(0.0, 1.0), out=out)
    cfg.to_file(path)


def test_experiment_subcommand_reproducible(capsys, tmp_path):
    cfg = tmp_path / "exp.cfg"
    _write_tiny_config(cfg)
    out_a, out_b = tmp_path / "a", tmp_path / "b"

    harness.clear_caches()
    code, stdout, _ = run_cli(capsys, "experiment", "--config", str(cfg),
                              "--seed", "42", "--out", str(out_a))
    assert code == 0
    assert "experiment=theorem1" in stdout

    harness.clear_caches()
    code, _, _ = run_cli(capsys, "experiment", "--config", str(cfg),
                         "--seed", "42", "--out", str(out_b))
    assert code == 0
    a = (out_a / "records.jsonl").read_bytes()
    b = (out_b / "records.jsonl").read_bytes()
    assert a == b
    report = json.loads((out_a / "report.json").read_text())
    assert report["master_seed"] == 42


def test_experiment_missing_config_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "experiment", "--config", "/no/such/file.cfg")
    assert code == 1


def test_experiment_gate_exit_code(capsys, tmp_path):
    # at n <= 500 the finite-size bias guarantees the mean gate fails: exit 3
    cfg = tmp_path / "exp.cfg"
    _write_tiny_config(cfg)
    harness.clear_caches()
    code, stdout, _ = run_cli(capsys, "experiment", "--config", str(cfg),
                              "--gate")
    assert code == 3
    assert "FAIL" in stdout


def test_seed_echoed_in_artifacts(capsys, tmp_path):
    cfg = tmp_path / "exp.cfg"
    _write_tiny_config(cfg)
    out = tmp_path / "run"
    harness.clear_caches()
    code, _, _ = run_cli(capsys, "experiment", "--config", str(cfg),
                         "--seed", "77", "--out", str(out))
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["master_seed"] == 77
    for line in (out / "records.jsonl").read_text().strip().split("\n"):
        assert "seed" in json.loads(line)
    csv_text = (out / "report.csv").read_text()
    assert csv_text.strip().split("\n")[1].endswith("77")
