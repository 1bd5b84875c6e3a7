"""cli.py

Command Line Front End: One Subcommand per Pipeline, One Directory per Run

"""
import argparse
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from . import __version__, config_loader
from .detection import classical_saturator, detection_curve, heatmap
from .empirical import TrialBudget, run_protocol
from .exceptions import EXIT_IO, EXIT_SUCCESS, LatentWitnessError, ValidationError
from .files import (
    HOST_NAME,
    read_directions,
    run_directory,
    save_forward_matrix,
    save_statistics,
    save_statistics_csv,
    write_directions,
    write_frame,
    write_json,
    write_manifest,
    write_trial_log,
)
from .phase_space import (
    ContextSet,
    LatentGrid,
    OutcomeBinning,
    QuantumLatentModel,
    build_forward_matrix,
    check_coverage,
    discretization_error,
    ideal_statistics,
    sampling_error,
)
from .spin import DirectionSet, SpinState, check_spin, run_spin_test, spin_statistics
from .spin.operators import check_threshold
from .tasks import available_workers
from .utilities.functions import seed_sequence
from .witness import SolverVariant, optimal_witness

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class RecordingHandler(logging.Handler):
    """
    Keeps Warnings and Errors of a Run for its Metadata File
    """

    def __init__(self, timestamps=False):
        super().__init__(level=logging.WARNING)
        self.timestamps = timestamps
        self.entries = []

    def emit(self, record):
        entry = {"level": record.levelname, "message": record.getMessage()}
        if self.timestamps:
            entry["time"] = time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime(record.created))
        self.entries.append(entry)


@dataclass
class RunConfig:
    """
    Validated Objects Built From the Effective Configuration
    """

    config: dict
    grid: LatentGrid
    contexts: ContextSet
    binning: OutcomeBinning
    model: QuantumLatentModel
    solver: dict
    budget: TrialBudget
    workers: int
    seed: int
    spin_state: Optional[SpinState] = None
    directions: Optional[DirectionSet] = None

    @property
    def detection(self):
        return self.config["DETECTION"]

    @property
    def protocol(self):
        return self.config["PROTOCOL"]


def spin_state_from_config(spin, seed):
    j = check_spin(spin["j"])
    kind = spin["state"]
    if kind == "basis":
        return SpinState.basis(j, j if spin.get("m") is None else spin["m"])
    if kind == "coherent":
        polar = np.deg2rad(spin.get("polar") or 0.0)
        azimuth = np.deg2rad(spin.get("azimuth") or 0.0)
        return SpinState.coherent(j, polar, azimuth)
    if kind == "maximally_mixed":
        return SpinState.maximally_mixed(j)
    return SpinState.haar_random(j, np.random.default_rng(seed_sequence(seed).spawn(1)[0]))


def directions_from_config(spin):
    if spin.get("directions_file"):
        directions = read_directions(Path(spin["directions_file"]).expanduser())
    else:
        directions = DirectionSet.fibonacci(spin["directions"])
    if spin.get("threshold") is not None:
        directions = directions.with_threshold(spin["threshold"])
    return directions


def settings_from_config(config, command):
    """Builds and Validates Everything a Subcommand Needs Before Any Output

    Parameters
    ----------
    config : dict
        Effective configuration (already schema-validated)
    command : str
        Subcommand name

    Returns
    -------
    RunConfig
    """
    grid = LatentGrid(config["GRID"]["half_width"], config["GRID"]["points_per_axis"])
    contexts = ContextSet(config["CONTEXTS"]["count"])
    binning = OutcomeBinning.for_grid(
        grid, config["BINNING"]["count"], config["BINNING"]["y_max_factor"]
    )
    if command != "spin":
        check_coverage(grid, binning)
    model = QuantumLatentModel(config["MODEL"]["variant"], config["MODEL"]["beta"])
    solver = {
        "tol": float(config["SOLVER"]["tol"]),
        "max_iterations": int(config["SOLVER"]["max_iterations"]),
        "variant": SolverVariant.parse(config["SOLVER"]["variant"]),
    }
    if solver["tol"] <= 0:
        raise ValidationError("SOLVER.tol must be positive")
    if config["DETECTION"]["kappa"] <= 0:
        raise ValidationError("DETECTION.kappa must be positive")
    protocol = config["PROTOCOL"]
    budget = TrialBudget(
        protocol["trials"], protocol["bootstrap"], protocol["split"], protocol["cell_trials"]
    )
    workers = config.get("THREADS") or available_workers()

    spin_state = directions = None
    if command == "spin":
        spin = config["SPIN"]
        if spin["sphere_points"] % 2:
            raise ValidationError(
                f"SPIN.sphere_points must be even for the antipodal sphere, got {spin['sphere_points']}"
            )
        spin_state = spin_state_from_config(spin, config["SEED"])
        directions = directions_from_config(spin)
        for threshold in directions.thresholds:
            check_threshold(spin_state.j, threshold)
    return RunConfig(
        config, grid, contexts, binning, model, solver, budget, workers, config["SEED"],
        spin_state, directions,
    )


def sigma_label(sigma):
    return repr(float(sigma))


def cmd_matrix(settings, directory):
    """Builds and Stores the Forward Matrix, Printing its Shape and Checksum"""
    forward = build_forward_matrix(settings.grid, settings.contexts, settings.binning)
    block_sums = forward.column_block_sums()
    checksum = forward.checksum()
    save_forward_matrix(forward, directory / "forward_matrix.fits")
    write_json(
        {
            "shape": list(forward.shape),
            "nnz": int(forward.matrix.nnz),
            "checksum": checksum,
            "column_block_sums_exact": bool(np.all(block_sums == 1.0)),
        },
        directory / "matrix.json",
    )
    print(f"Forward matrix {forward.shape[0]} x {forward.shape[1]}, sha256 {checksum}")


def _witness_pipeline(settings, model=None):
    forward = build_forward_matrix(settings.grid, settings.contexts, settings.binning)
    p_q = ideal_statistics(model or settings.model, settings.grid, settings.contexts, settings.binning, forward)
    witness = optimal_witness(p_q, forward, **settings.solver)
    return forward, p_q, witness


def cmd_witness(settings, directory):
    """Optimal Witness of the Configured Model"""
    forward, p_q, witness = _witness_pipeline(settings)
    save_statistics(p_q, directory / "statistics.fits")
    save_statistics_csv(p_q, directory / "statistics.csv")
    report = witness.to_dict()
    report["metadata"].update(
        {
            "model": settings.model.tag,
            "discretization_error": discretization_error(
                settings.model, settings.grid, settings.contexts, settings.binning, forward
            ),
            "sampling_error": sampling_error(
                settings.model, settings.grid, settings.contexts, settings.binning, forward
            ),
        }
    )
    write_json(report, directory / "witness.json")
    print(f"{settings.model.tag}: gap {witness.gap!r}, certificate residual {witness.certificate_residual!r}")


def cmd_detect_curve(settings, directory):
    """Closed-Form and Monte Carlo Detection Curves, One per Noise Scale"""
    forward, p_q, witness = _witness_pipeline(settings)
    p_cl = classical_saturator(forward, witness.c)
    detection = settings.detection
    sigmas = detection["sigmas"]
    combined = pd.DataFrame({"alpha": np.asarray(detection["alphas"], dtype=float)})
    for sigma, child in zip(sigmas, seed_sequence(settings.seed).spawn(len(sigmas))):
        curve = detection_curve(
            detection["alphas"],
            sigma,
            witness,
            p_q,
            p_cl,
            kappa=detection["kappa"],
            n_mc=detection["n_mc"],
            seed=child,
            workers=settings.workers,
        )
        write_frame(curve, directory / f"curve_sigma_{sigma_label(sigma)}.csv")
        combined[f"p_closed[{sigma_label(sigma)}]"] = curve["p_closed"].to_numpy()
    write_frame(combined, directory / "curves.csv")
    write_json(
        {
            "model": settings.model.tag,
            "sigmas": sigmas,
            "kappa": detection["kappa"],
            "n_mc": detection["n_mc"],
            "seed": settings.seed,
            "witness_gap": witness.gap,
            "s_cl": witness.s_cl,
            "saturating_column": p_cl.metadata["column"],
        },
        directory / "detection.json",
    )


def cmd_heatmap(settings, directory):
    """Detection Probability Over (alpha, beta), One Matrix per Noise Scale"""
    forward = build_forward_matrix(settings.grid, settings.contexts, settings.binning)
    detection = settings.detection
    metadata = {"alphas": detection["alphas"], "betas": detection["betas"], "maps": {}}
    for sigma in detection["sigmas"]:
        result = heatmap(
            detection["alphas"],
            detection["betas"],
            sigma,
            settings.grid,
            settings.contexts,
            settings.binning,
            forward,
            kappa=detection["kappa"],
            freeze_witness=detection["freeze_witness"],
            workers=settings.workers,
            **settings.solver,
        )
        name = f"heatmap_sigma_{sigma_label(sigma)}.csv"
        write_frame(result.to_frame(), directory / name)
        entry = dict(result.metadata)
        entry["gaps"] = [float(gap) for gap in result.gaps]
        metadata["maps"][name] = entry
    write_json(metadata, directory / "heatmap.json")


def cmd_protocol(settings, directory):
    """Seeded Protocol Runs With a Witness Designed Beforehand"""
    protocol = settings.protocol
    design = QuantumLatentModel.mix(protocol["witness_beta"])
    forward, _, witness = _witness_pipeline(settings, design)
    runs = []
    first = None
    for index, child in enumerate(seed_sequence(settings.seed).spawn(protocol["runs"])):
        report = run_protocol(
            settings.model,
            witness,
            settings.budget,
            kappa=settings.detection["kappa"],
            seed=child,
            grid=settings.grid,
            contexts=settings.contexts,
            binning=settings.binning,
            forward=forward,
            sigma_source=protocol["sigma_source"],
            workers=settings.workers,
        )
        if first is None:
            first = report
        runs.append(
            {
                "run": index,
                "s_obs": report.s_obs,
                "s_cl": report.s_cl,
                "sigma_s": report.sigma_s,
                "detected": report.detected,
            }
        )
    frame = pd.DataFrame(runs)
    write_frame(frame, directory / "protocol_runs.csv")
    rate = float(frame["detected"].mean())
    summary = first.to_dict()
    summary.update(
        {
            "seed": settings.seed,
            "witness_model": design.tag,
            "runs": len(runs),
            "detection_rate": rate,
            "detection_rate_stderr": float(np.sqrt(rate * (1.0 - rate) / len(runs))),
        }
    )
    write_json(summary, directory / "protocol.json")
    write_trial_log(first.trial_log, directory / "trials.csv", settings.seed, settings.model.tag)
    print(f"{settings.model.tag}: detected in {int(frame['detected'].sum())} of {len(runs)} runs")


def cmd_spin(settings, directory):
    """Spin-j Activation Statistics Tested Against the Sphere Model"""
    spin = settings.config["SPIN"]
    result = run_spin_test(
        settings.spin_state,
        settings.directions,
        sphere_points=spin["sphere_points"],
        **settings.solver,
    )
    save_statistics_csv(
        spin_statistics(settings.spin_state, settings.directions), directory / "spin_statistics.csv"
    )
    write_directions(settings.directions, directory / "directions.csv")
    report = result.to_dict()
    report["metadata"].update({"state": spin["state"]})
    write_json(report, directory / "spin_witness.json")
    print(f"spin-{settings.spin_state.j}: gap {result.gap!r}")


COMMANDS = {
    "matrix": cmd_matrix,
    "witness": cmd_witness,
    "detect-curve": cmd_detect_curve,
    "heatmap": cmd_heatmap,
    "protocol": cmd_protocol,
    "spin": cmd_spin,
}

# (flag destination, dotted config key)
FLAG_KEYS = [
    ("seed", "SEED"),
    ("threads", "THREADS"),
    ("output_dir", "OUTPUT_DIRECTORY"),
    ("points", "GRID.points_per_axis"),
    ("half_width", "GRID.half_width"),
    ("contexts", "CONTEXTS.count"),
    ("bins", "BINNING.count"),
    ("y_max_factor", "BINNING.y_max_factor"),
    ("model", "MODEL.variant"),
    ("beta", "MODEL.beta"),
    ("tol", "SOLVER.tol"),
    ("max_iterations", "SOLVER.max_iterations"),
    ("solver", "SOLVER.variant"),
    ("sigma", "DETECTION.sigmas"),
    ("alpha", "DETECTION.alphas"),
    ("kappa", "DETECTION.kappa"),
    ("n_mc", "DETECTION.n_mc"),
    ("trials", "PROTOCOL.trials"),
    ("bootstrap", "PROTOCOL.bootstrap"),
    ("runs", "PROTOCOL.runs"),
    ("spin_j", "SPIN.j"),
    ("state", "SPIN.state"),
    ("directions_file", "SPIN.directions_file"),
]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        metavar="config",
        type=str,
        help="The Path to the YAML Config File",
        default=str(config_loader.default_config_path),
    )
    common.add_argument(
        "--schema",
        metavar="schema",
        type=str,
        help="The Path to the YAML Schema File",
        default=str(config_loader.default_schema_path),
    )
    common.add_argument(
        "--set",
        dest="overrides",
        metavar="KEY=VALUE",
        action="append",
        default=[],
        help="Overrides a Config Key, e.g. GRID.points_per_axis=20",
    )
    common.add_argument("--output_dir", type=str, help="Root Directory for Run Outputs")
    common.add_argument("--label", type=str, help="Name of the Run Directory")
    common.add_argument("--threads", type=int, help="Maximum Worker Processes (0 for All CPUs)")
    common.add_argument("--seed", type=int, help="Master Random Seed")
    common.add_argument("--verbose", action="store_true", help="Log Debug Messages")
    common.add_argument("--timestamps", action="store_true", help="Time-Stamp Directory and Log Entries")

    phase_space = argparse.ArgumentParser(add_help=False)
    phase_space.add_argument("--points", type=int, help="Grid Points per Axis")
    phase_space.add_argument("--half_width", type=float, help="Grid Half Width L")
    phase_space.add_argument("--contexts", type=int, help="Number of Projection Angles J")
    phase_space.add_argument("--bins", type=int, help="Number of Outcome Bins K")
    phase_space.add_argument("--y_max_factor", type=float, help="y_max as a Multiple of sqrt(2) L")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--model", type=str.upper, choices=["FOCK1", "THERMAL1", "MIX"])
    solver.add_argument("--beta", type=float, help="Thermal Weight of the MIX Model")
    solver.add_argument("--tol", type=float, help="Solver Distance Tolerance")
    solver.add_argument("--max_iterations", type=int, help="Solver Iteration Cap")
    solver.add_argument("--solver", type=str.upper, choices=[variant.value for variant in SolverVariant])

    noise = argparse.ArgumentParser(add_help=False)
    noise.add_argument("--sigma", type=float, nargs="+", help="Noise Scales per Entry")
    noise.add_argument("--alpha", type=float, nargs="+", help="Admixture Grid")
    noise.add_argument("--kappa", type=float, help="Confidence Multiplier")
    noise.add_argument("--n_mc", type=int, help="Monte Carlo Repetitions per alpha")

    parser = argparse.ArgumentParser(
        prog="latent_witness", description="Nonclassicality Witnesses for Latent Representations"
    )
    sp = parser.add_subparsers(dest="command", required=True)

    sp_matrix = sp.add_parser("matrix", parents=[common, phase_space], help="Builds the Forward Matrix")
    sp_matrix.set_defaults(func=cmd_matrix)

    sp_witness = sp.add_parser(
        "witness", parents=[common, phase_space, solver], help="Computes the Optimal Witness"
    )
    sp_witness.set_defaults(func=cmd_witness)

    sp_curve = sp.add_parser(
        "detect-curve",
        parents=[common, phase_space, solver, noise],
        help="Detection Probability Versus alpha",
    )
    sp_curve.set_defaults(func=cmd_detect_curve)

    sp_heatmap = sp.add_parser(
        "heatmap",
        parents=[common, phase_space, solver, noise],
        help="Detection Probability Over (alpha, beta)",
    )
    sp_heatmap.add_argument(
        "--freeze_witness",
        action="store_true",
        help="Reuse the beta = 0 Witness for Every Row",
    )
    sp_heatmap.set_defaults(func=cmd_heatmap)

    sp_protocol = sp.add_parser(
        "protocol",
        parents=[common, phase_space, solver, noise],
        help="Simulates the Finite-Trial Protocol",
    )
    sp_protocol.add_argument("--trials", type=int, help="Trials per Context")
    sp_protocol.add_argument("--bootstrap", type=int, help="Bootstrap Resamples")
    sp_protocol.add_argument("--runs", type=int, help="Number of Seeded Runs")
    sp_protocol.set_defaults(func=cmd_protocol)

    sp_spin = sp.add_parser("spin", parents=[common], help="Spin-j Classicality Test")
    sp_spin.add_argument("--j", dest="spin_j", type=float, help="Spin")
    sp_spin.add_argument(
        "--state", choices=["basis", "coherent", "maximally_mixed", "haar_random"]
    )
    sp_spin.add_argument("--directions_file", type=str, help="CSV of polar, azimuth, threshold")
    sp_spin.add_argument("--tol", type=float, help="Solver Distance Tolerance")
    sp_spin.set_defaults(func=cmd_spin)
    return parser


def effective_config(args):
    """Config File, Then --set Overrides, Then Named Flags"""
    config_loader.validate_yaml_schema(args.config, args.schema)
    config = config_loader.apply_overrides(config_loader.load_yaml(args.config), args.overrides)
    for destination, key in FLAG_KEYS:
        value = getattr(args, destination, None)
        if value is not None:
            config_loader.set_value(config, key, value)
    if getattr(args, "freeze_witness", False):
        config_loader.set_value(config, "DETECTION.freeze_witness", True)
    if args.timestamps:
        config["TIMESTAMPS"] = True
    config_loader.validate_config_dict(config, args.schema)
    return config


def reproducible_config(config):
    """Effective Configuration Without the Worker Count, Which Lives in host.json"""
    return {key: value for key, value in config.items() if key != "THREADS"}


def configure_logging(verbose):
    logging.basicConfig(format=LOG_FORMAT)
    logging.getLogger("latent_witness").setLevel(logging.DEBUG if verbose else logging.INFO)


def main(argv=None):
    """Runs One Subcommand and Returns its Exit Code

    Parameters
    ----------
    argv : list(str), optional
        Arguments without the program name (defaults to sys.argv[1:])

    Returns
    -------
    int
        0 success, 2 validation, 3 convergence, 4 I/O
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    package_logger = logging.getLogger("latent_witness")
    recorder = None
    try:
        config = effective_config(args)
        settings = settings_from_config(config, args.command)
        recorder = RecordingHandler(config["TIMESTAMPS"])
        package_logger.addHandler(recorder)
        directory = run_directory(
            config["OUTPUT_DIRECTORY"], args.command, args.label, config["TIMESTAMPS"]
        )
        logger.info("Running %s into %s", args.command, directory)
        args.func(settings, directory)
        config_loader.dump_yaml(reproducible_config(config), directory / "config.yaml")
        write_json(
            {
                "command": args.command,
                "version": __version__,
                "seed": settings.seed,
                "log": recorder.entries,
            },
            directory / "run.json",
        )
        write_manifest(directory)
        write_json({"workers": settings.workers}, directory / HOST_NAME)
    except LatentWitnessError as e:
        logger.error("%s", e)
        return e.exit_code
    except OSError as e:
        logger.error("I/O failure: %s", e)
        return EXIT_IO
    finally:
        if recorder is not None:
            package_logger.removeHandler(recorder)
    return EXIT_SUCCESS
