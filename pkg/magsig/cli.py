"""
CLI magsig: симуляция записей, признаки, обучение, оценка и эксперименты

    python -m magsig simulate --kind pass --structure 3 --env env-2 --out rec.csv
    python -m magsig featurize rec.csv --out rec.features.csv --dump-frames rec.frames.jsonl
    python -m magsig train train.features.csv --family LSTM --out lstm.npz
    python -m magsig evaluate --model lstm.npz --manifest test/manifest.json --out report.json
    python -m magsig experiment baseline --config exp.toml
    python -m magsig report runs/baseline --compare other/baseline
"""
import argparse
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from .config import EXPERIMENT_ALIASES, FramingDefaults, MagsigSettings, SimulationDefaults, load_experiment_config
from .errors import ConfigurationError, MagsigError
from .evaluation import ConditionMeta
from .features import concat_matrices, featurize_recording, read_feature_matrix, write_feature_matrix
from .fieldsim import (
    PRESET_NAMES,
    WalkSpec,
    build_superstructure,
    clutter_preset,
    read_recording,
    simulate_pass,
    write_recording,
)
from .harness import (
    build_test_set,
    build_training_set,
    evaluate_model,
    featurize_dataset,
    load_dataset,
    load_experiment_report,
    load_manifest,
    reports_equal_ignoring_timestamps,
    run_experiment,
    save_model_bundle,
    save_report_bundle,
    train_family,
    verify_manifest,
    write_manifest,
)
from .models import ModelFamily, load_model
from .sigproc import dump_frames, frame_stream

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ACCEPTANCE = 2
LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


def _seed(args: argparse.Namespace, settings: MagsigSettings) -> int:
    if args.seed is not None:
        return args.seed
    return settings.seed if settings.seed is not None else 0


def cmd_simulate(args: argparse.Namespace, settings: MagsigSettings) -> int:
    seed = _seed(args, settings)
    out = Path(args.out)
    if args.kind == "pass":
        structure = build_superstructure(args.structure)
        walk = WalkSpec.for_structure(
            pace=args.pace,
            lateral_distance=args.lateral,
            structure_length=structure.length,
            sample_rate=args.rate,
            heading_azimuth=args.yaw,
        )
        clutter = clutter_preset(args.env, target_sir_db=args.sir)
        recording = simulate_pass(walk, structure, clutter, seed=seed)
        write_recording(recording, out)
        logger.info("pass written: %s (%d samples, %d event)", out, len(recording), len(recording.pass_events))
        return EXIT_OK

    if args.kind == "train":
        dataset = build_training_set(args.shots, seed, sample_rate=args.rate, out_dir=out, featurize=False)
    else:
        dataset = build_test_set(
            args.passes,
            envs=args.envs,
            sir_db=args.sir,
            seed=seed,
            pace=args.fixed_pace,
            sample_rate=args.rate,
            out_dir=out,
            featurize=False,
        )
    path = write_manifest(dataset.manifest, out / "manifest.json")
    logger.info("%s set: %d passes, manifest %s", args.kind, dataset.manifest.n_passes, path)
    return EXIT_OK


def cmd_featurize(args: argparse.Namespace, settings: MagsigSettings) -> int:
    matrices = []
    for name in args.recordings:
        recording = read_recording(name)
        if args.dump_frames:
            count = dump_frames(frame_stream(recording, args.window, args.shift), args.dump_frames)
            logger.info("dumped %d frames to %s", count, args.dump_frames)
        matrix = featurize_recording(
            recording, args.window, args.shift, vector_stride=args.stride, recording_id=Path(name).stem
        )
        matrices.append(matrix)
    matrix = concat_matrices(matrices)
    path = write_feature_matrix(matrix, args.out)
    logger.info("feature matrix written: %s (%d vectors)", path, len(matrix))
    return EXIT_OK


def cmd_train(args: argparse.Namespace, settings: MagsigSettings) -> int:
    matrix = concat_matrices([read_feature_matrix(p, shift=args.shift, window=args.window) for p in args.features])
    overrides: Dict[str, Any] = {}
    if args.hidden_size is not None:
        overrides["hidden_size"] = args.hidden_size
    seed = _seed(args, settings)
    model = train_family(matrix, args.family, seed=seed, max_epochs=args.max_epochs, overrides=overrides)
    out = Path(args.out)
    path = save_model_bundle(model, out.parent, out.stem)
    logger.info("model written: %s", path)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace, settings: MagsigSettings) -> int:
    model = load_model(args.model)
    manifest = load_manifest(args.manifest)
    dataset = load_dataset(manifest, base_dir=Path(args.manifest).parent)
    featurize_dataset(dataset, vector_stride=args.stride, window=args.window, shift=args.shift)
    condition = ConditionMeta(
        name=args.condition,
        target_sir_db=manifest.sir_db,
        measured_sir_db=manifest.mean_measured_sir_db,
        sample_rate=manifest.recordings[0].sample_rate if manifest.recordings else None,
        pace=manifest.pace,
        seed=manifest.seed,
    )
    report = evaluate_model(model, dataset, condition)
    out = Path(args.out)
    save_report_bundle(report, out.parent, out.stem)
    logger.info(
        "%s: accuracy %.2f%%, AUC %.4f, MLE %s -> %s",
        report.family,
        report.localization_accuracy,
        report.macro_auc,
        "n/a" if report.mle_m is None else f"{report.mle_m:.3f} m",
        out,
    )
    return EXIT_OK


def _experiment_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    update: Dict[str, Any] = {}
    for flag in ("full_scale", "frame_scale", "write_recordings"):
        if getattr(args, flag):
            update[flag] = True
    if args.seeds:
        update["seeds"] = args.seeds
    if args.families:
        update["families"] = args.families
        update["sweep_families"] = args.families
    if args.out:
        update["output_dir"] = args.out
    if args.workers is not None:
        update["workers"] = args.workers
    if args.max_epochs is not None:
        update["max_epochs"] = args.max_epochs
    return update


def cmd_experiment(args: argparse.Namespace, settings: MagsigSettings) -> int:
    cfg = load_experiment_config(args.config, args.name, settings)
    update = _experiment_overrides(args)
    if update:
        try:
            cfg = cfg.model_validate({**cfg.model_dump(), **update})
        except ValueError as e:
            raise ConfigurationError(str(e)) from e
    report = run_experiment(cfg)
    if report.failures:
        logger.error("%d job(s) failed", len(report.failures))
        return EXIT_ERROR
    if report.acceptance_failures:
        logger.error("acceptance failed: %d check(s)", len(report.acceptance_failures))
        for line in report.acceptance_failures:
            logger.error("  %s", line)
        return EXIT_ACCEPTANCE
    logger.info("experiment %s passed all acceptance checks", cfg.experiment)
    return EXIT_OK


def cmd_report(args: argparse.Namespace, settings: MagsigSettings) -> int:
    if args.verify_manifest:
        problems = verify_manifest(load_manifest(args.verify_manifest), base_dir=Path(args.verify_manifest).parent)
        for problem in problems:
            logger.error("manifest: %s", problem)
        if problems:
            return EXIT_ERROR
        logger.info("manifest %s regenerates bit-exactly", args.verify_manifest)
        if args.path is None:
            return EXIT_OK

    if args.path is None:
        raise ConfigurationError("report needs a report path or --verify-manifest")
    report = load_experiment_report(args.path)
    logger.info("%s (%d runs, %d failed jobs)", report.experiment, len(report.runs), len(report.failures))
    for s in report.summaries:
        logger.info(
            "  %-12s %-8s accuracy %6.2f ± %5.2f  AUC %.4f  MLE %s  ref %s",
            s.condition,
            s.family,
            s.accuracy_mean,
            s.accuracy_spread,
            s.auc_mean,
            "n/a" if s.mle_mean is None else f"{s.mle_mean:.3f} m",
            "-" if s.reference_accuracy is None else f"{s.reference_accuracy:g}%",
        )
    if args.compare:
        if not reports_equal_ignoring_timestamps(args.path, args.compare):
            logger.error("reports differ: %s vs %s", args.path, args.compare)
            return EXIT_ERROR
        logger.info("reports identical (timestamps ignored)")
    return EXIT_OK


def _add_framing(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--window", type=float, default=FramingDefaults.WINDOW, help="Frame length, s.")
    parser.add_argument("--shift", type=float, default=FramingDefaults.SHIFT, help="Frame shift, s.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="magsig", description="Magnetic superstructure localization toolkit.")
    parser.add_argument("--log-level", help="Logging level (default MAGSIG_LOG_LEVEL or INFO).")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Simulate one pass or a whole train/test set.")
    sim.add_argument("--kind", choices=["pass", "train", "test"], default="pass")
    sim.add_argument("--structure", type=int, default=1, help="Superstructure id 1..6 (pass).")
    sim.add_argument("--env", choices=PRESET_NAMES, default="shielded", help="Clutter preset (pass).")
    sim.add_argument("--envs", nargs="+", default=["env-1", "env-2", "env-3", "env-4"], help="Test environments.")
    sim.add_argument("--pace", type=float, default=1.2, help="Walking pace, m/s (pass).")
    sim.add_argument("--fixed-pace", type=float, help="Pace override for every test pass.")
    sim.add_argument("--lateral", type=float, default=0.75, help="Lateral distance, m (pass).")
    sim.add_argument("--yaw", type=float, default=0.0, help="Heading azimuth, deg (pass).")
    sim.add_argument("--sir", type=float, default=8.0, help="Target SIR, dB.")
    sim.add_argument("--shots", type=int, default=30, help="Passes per structure (train).")
    sim.add_argument("--passes", type=int, default=10, help="Passes per structure per environment (test).")
    sim.add_argument("--rate", type=float, default=SimulationDefaults.SAMPLE_RATE, help="Sample rate, Hz.")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--out", required=True, help="CSV path (pass) or output directory (train/test).")
    sim.set_defaults(handler=cmd_simulate)

    feat = sub.add_parser("featurize", help="Feature matrix CSV from recording CSVs.")
    feat.add_argument("recordings", nargs="+")
    feat.add_argument("--out", required=True)
    feat.add_argument("--stride", type=int, default=1, help="Keep every n-th feature vector.")
    feat.add_argument("--dump-frames", help="Write the extended frames as JSON lines (debug).")
    _add_framing(feat)
    feat.set_defaults(handler=cmd_featurize)

    tr = sub.add_parser("train", help="Train one model family on feature CSVs.")
    tr.add_argument("features", nargs="+")
    tr.add_argument("--family", type=ModelFamily.parse, default=ModelFamily.LSTM)
    tr.add_argument("--max-epochs", type=int, default=60)
    tr.add_argument("--hidden-size", type=int, help="Recurrent hidden size.")
    tr.add_argument("--seed", type=int)
    tr.add_argument("--out", required=True, help="Model path (.npz).")
    _add_framing(tr)
    tr.set_defaults(handler=cmd_train)

    ev = sub.add_parser("evaluate", help="Evaluate a saved model on a test manifest.")
    ev.add_argument("--model", required=True)
    ev.add_argument("--manifest", required=True)
    ev.add_argument("--stride", type=int, default=1)
    ev.add_argument("--condition", default="baseline")
    ev.add_argument("--out", required=True, help="EvalReport JSON path; ROC CSVs go next to it.")
    _add_framing(ev)
    ev.set_defaults(handler=cmd_evaluate)

    exp = sub.add_parser("experiment", help="Run an experiment and check its acceptance gates.")
    exp.add_argument("name", choices=sorted(EXPERIMENT_ALIASES))
    exp.add_argument("--config", type=Path, help="JSON or TOML experiment config.")
    exp.add_argument("--seeds", type=int, nargs="+")
    exp.add_argument("--families", nargs="+")
    exp.add_argument("--full-scale", action="store_true", help="Full-size datasets (every feature vector).")
    exp.add_argument("--frame-scale", action="store_true", help="SIR sweep by frame-energy scaling.")
    exp.add_argument("--write-recordings", action="store_true")
    exp.add_argument("--max-epochs", type=int)
    exp.add_argument("--workers", type=int)
    exp.add_argument("--out", help="Output directory (default MAGSIG_OUT or runs).")
    exp.set_defaults(handler=cmd_experiment)

    rep = sub.add_parser("report", help="Summarize, compare or verify experiment outputs.")
    rep.add_argument("path", nargs="?", help="Experiment directory or report.json.")
    rep.add_argument("--compare", help="Second report; exit 1 unless identical apart from timestamps.")
    rep.add_argument("--verify-manifest", help="Regenerate every recording of a dataset manifest.")
    rep.set_defaults(handler=cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = MagsigSettings()
    except ValueError as e:
        logging.basicConfig(level=logging.INFO, format=LOG_FORMAT)
        logger.error("invalid MAGSIG_* settings: %s", e)
        return EXIT_ERROR
    level = (args.log_level or settings.log_level).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT)

    try:
        return args.handler(args, settings)
    except MagsigError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_ERROR
