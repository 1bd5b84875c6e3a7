"""test_cli.py

Subcommands End to End: Exit Codes, Run Directories and Reproducibility

"""
import pytest

from latent_witness.cli import build_parser, main
from latent_witness.files import read_frame, read_json
from latent_witness.utilities.functions import file_checksum

SMALL = ["--points", "12", "--contexts", "3", "--bins", "6", "--tol", "1e-6"]


def run(tmp_path, *argv):
    command, rest = argv[0], list(argv[1:])
    return main([command, "--threads", "1", "--output_dir", str(tmp_path)] + rest)


def test_parser_knows_every_subcommand():
    parser = build_parser()
    for command in ["matrix", "witness", "detect-curve", "heatmap", "protocol", "spin"]:
        args = parser.parse_args([command])
        assert callable(args.func)
    with pytest.raises(SystemExit):
        parser.parse_args(["witness", "--model", "SQUEEZED"])


def test_matrix_run(tmp_path, capsys):
    assert run(tmp_path, "matrix", "--points", "20", "--contexts", "5", "--bins", "20") == 0
    directory = tmp_path / "matrix"
    for name in ["forward_matrix.fits", "matrix.json", "config.yaml", "run.json", "manifest.json"]:
        assert (directory / name).is_file()
    summary = read_json(directory / "matrix.json")
    assert summary["shape"] == [100, 400]
    assert summary["nnz"] == 5 * 400
    assert summary["column_block_sums_exact"]
    assert summary["checksum"] in capsys.readouterr().out
    manifest = read_json(directory / "manifest.json")["files"]
    assert manifest["matrix.json"] == file_checksum(directory / "matrix.json")
    assert "manifest.json" not in manifest
    record = read_json(directory / "run.json")
    assert (record["command"], record["seed"]) == ("matrix", 20240611)
    assert "workers" not in record
    assert read_json(directory / "host.json") == {"workers": 1}
    assert "host.json" not in manifest
    assert "THREADS" not in (directory / "config.yaml").read_text()


def test_insufficient_coverage_is_a_validation_error(tmp_path):
    assert run(tmp_path, "matrix", "--points", "20", "--y_max_factor", "1.0") == 2
    assert not (tmp_path / "matrix").exists()


def test_bad_override_is_a_validation_error(tmp_path):
    assert run(tmp_path, "witness", *SMALL, "--set", "SOLVER.variant=NEWTON") == 2
    assert run(tmp_path, "witness", *SMALL, "--set", "MODEL.beta") == 2


def test_iteration_cap_is_a_convergence_failure(tmp_path):
    assert run(tmp_path, "witness", *SMALL, "--max_iterations", "1") == 3


def test_unwritable_output_is_an_io_failure(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert main(["matrix", "--threads", "1", "--output_dir", str(blocker), "--points", "12"]) == 4


def test_witness_runs_are_reproducible(tmp_path):
    assert run(tmp_path, "witness", *SMALL, "--label", "first") == 0
    assert run(tmp_path, "witness", *SMALL, "--label", "second") == 0
    for name in ["witness.json", "statistics.csv", "statistics.fits", "config.yaml"]:
        first = (tmp_path / "first" / name).read_bytes()
        assert first == (tmp_path / "second" / name).read_bytes()
    report = read_json(tmp_path / "first" / "witness.json")
    assert report["metadata"]["model"] == "FOCK1"
    assert report["metadata"]["tol"] == 1e-6
    assert report["n_contexts"] == 3


def test_detect_curve_run(tmp_path):
    argv = SMALL + ["--sigma", "0.01", "0.02", "--alpha", "0.0", "0.5", "1.0", "--n_mc", "50"]
    assert run(tmp_path, "detect-curve", *argv) == 0
    directory = tmp_path / "detect-curve"
    curve = read_frame(directory / "curve_sigma_0.01.csv")
    assert list(curve.columns) == ["alpha", "p_closed", "p_mc", "mc_stderr"]
    assert len(curve) == 3
    assert (directory / "curve_sigma_0.02.csv").is_file()
    combined = read_frame(directory / "curves.csv")
    assert list(combined.columns) == ["alpha", "p_closed[0.01]", "p_closed[0.02]"]
    summary = read_json(directory / "detection.json")
    assert summary["sigmas"] == [0.01, 0.02]
    assert summary["n_mc"] == 50


def test_heatmap_run(tmp_path):
    argv = SMALL + ["--sigma", "0.01", "--alpha", "0.0", "1.0", "--set", "DETECTION.betas=[0.0, 0.5]"]
    assert run(tmp_path, "heatmap", *argv, "--freeze_witness") == 0
    directory = tmp_path / "heatmap"
    frame = read_frame(directory / "heatmap_sigma_0.01.csv")
    assert list(frame["beta"]) == [0.0, 0.5]
    summary = read_json(directory / "heatmap.json")
    assert summary["betas"] == [0.0, 0.5]
    assert "heatmap_sigma_0.01.csv" in summary["maps"]
    config = (directory / "config.yaml").read_text()
    assert "freeze_witness: true" in config


def test_protocol_run(tmp_path):
    argv = SMALL + ["--trials", "200", "--bootstrap", "20", "--runs", "2"]
    assert run(tmp_path, "protocol", *argv) == 0
    directory = tmp_path / "protocol"
    runs = read_frame(directory / "protocol_runs.csv")
    assert list(runs["run"]) == [0, 1]
    summary = read_json(directory / "protocol.json")
    assert summary["runs"] == 2
    assert summary["witness_model"] == "MIX(0.0)"
    assert 0.0 <= summary["detection_rate"] <= 1.0
    assert "trial_log" not in summary
    assert (directory / "trials.csv").is_file()
    assert read_json(directory / "trials.json")["seed"] == 20240611


def test_spin_run(tmp_path):
    argv = [
        "--j", "0.5",
        "--state", "maximally_mixed",
        "--tol", "1e-6",
        "--set", "SPIN.directions=10",
        "--set", "SPIN.sphere_points=200",
    ]
    assert run(tmp_path, "spin", *argv) == 0
    directory = tmp_path / "spin"
    report = read_json(directory / "spin_witness.json")
    assert report["classical"]
    assert report["metadata"]["state"] == "maximally_mixed"
    assert len(read_frame(directory / "directions.csv")) == 10
    assert len(read_frame(directory / "spin_statistics.csv")) == 20
    log = read_json(directory / "run.json")["log"]
    assert any("uniform witness" in entry["message"] for entry in log)


def test_spin_threshold_out_of_range(tmp_path):
    # j = 1 has the default basis state |1, 1>, so only the threshold is wrong
    assert run(tmp_path, "spin", "--j", "1", "--set", "SPIN.threshold=1.0") == 2
    assert not (tmp_path / "spin").exists()


def test_half_integer_spin_with_the_default_basis_state(tmp_path):
    argv = ["--j", "1.5", "--tol", "1e-6", "--set", "SPIN.directions=6", "--set", "SPIN.sphere_points=200"]
    assert run(tmp_path, "spin", *argv) == 0
    assert read_json(tmp_path / "spin" / "spin_witness.json")["metadata"]["state"] == "basis"


def test_odd_sphere_lattice_is_rejected_before_output(tmp_path):
    argv = ["--j", "1", "--set", "SPIN.directions=6", "--set", "SPIN.sphere_points=201"]
    assert run(tmp_path, "spin", *argv) == 2
    assert not (tmp_path / "spin").exists()


def test_negative_marginal_leaves_no_run_directory(tmp_path):
    argv = ["--points", "1", "--contexts", "3", "--bins", "2"]
    assert run(tmp_path, "witness", *argv) == 2
    assert not (tmp_path / "witness").exists()


def test_manifests_do_not_depend_on_the_worker_count(tmp_path):
    argv = SMALL + ["--sigma", "0.01", "--alpha", "0.0", "0.5", "--n_mc", "50"]
    for threads, label in [("1", "serial"), ("2", "parallel")]:
        arguments = ["detect-curve", "--threads", threads, "--output_dir", str(tmp_path)]
        assert main(arguments + ["--label", label] + argv) == 0
    serial = (tmp_path / "serial" / "manifest.json").read_bytes()
    assert serial == (tmp_path / "parallel" / "manifest.json").read_bytes()
    assert read_json(tmp_path / "parallel" / "host.json") == {"workers": 2}
