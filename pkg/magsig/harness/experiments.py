"""
Эксперименты: сравнение шести семейств моделей и четыре проверки устойчивости
(SIR, частота дискретизации, число обучающих проходов, темп ходьбы).
Каждый seed это отдельная задача; задачи выполняются в пуле процессов, итог собирает один писатель.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, replace
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import psutil

from ..config import ExperimentConfig, SimulationDefaults
from ..errors import ConfigurationError, UndefinedSIRError
from ..evaluation import ConditionMeta
from ..fieldsim import Recording, decimate, rescale_to_sir, scale_pattern_energy
from ..models import TrainedModel
from ..sigproc import measure_sir
from .acceptance import check_acceptance
from .datasets import Dataset, build_test_set, build_training_set, featurize_dataset, write_manifest
from .pipeline import evaluate_model, save_model_bundle, save_report_bundle, train_family
from .references import family_reference, sweep_reference
from .reports import ExperimentReport, ReportDigest, digest_report, summarize, write_experiment_report
from .runlog import RUN_LOG_NAME, append_run_event

logger = logging.getLogger(__name__)

EXPERIMENTS = ("baseline", "sir_sweep", "decimation", "fewshot", "pace_sweep")
BASE_RATE = SimulationDefaults.SAMPLE_RATE


@dataclass
class ExperimentJob:
    experiment: str
    seed: int
    cfg: ExperimentConfig
    out_dir: str


def decimation_factor(base_rate: float, rate: float) -> int:
    """Integer factor that takes base_rate to rate; anything else would need interpolation."""
    if not rate > 0:
        raise ConfigurationError(f"sample rate must be positive, got {rate}")
    ratio = base_rate / rate
    factor = int(round(ratio))
    if factor < 1 or abs(ratio - factor) > 1e-9 * ratio:
        raise ConfigurationError(f"{rate:g} Hz is not an integer divisor of {base_rate:g} Hz")
    return factor


def worker_count(cfg: ExperimentConfig, n_jobs: int) -> int:
    requested = cfg.workers
    if requested is None:
        requested = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
    return max(1, min(int(requested), n_jobs))


# --- per-seed jobs -------------------------------------------------------------------------------


def _recordings_dir(job: ExperimentJob, tag: str) -> Optional[Path]:
    return Path(job.out_dir) / "recordings" / tag if job.cfg.write_recordings else None


def _training_set(job: ExperimentJob, shots: int, tag: str = "train") -> Dataset:
    cfg = job.cfg
    dataset = build_training_set(
        shots_per_structure=shots,
        seed=job.seed,
        gap_s=cfg.gap_s,
        vector_stride=cfg.effective_train_stride,
        out_dir=_recordings_dir(job, tag),
    )
    write_manifest(dataset.manifest, Path(job.out_dir) / f"{tag}_manifest.json")
    return dataset


def _test_set(job: ExperimentJob, pace: Optional[float] = None, featurize: bool = True, tag: str = "test") -> Dataset:
    cfg = job.cfg
    dataset = build_test_set(
        passes_per_structure=cfg.test_passes,
        envs=cfg.environments,
        sir_db=cfg.test_sir_db,
        seed=job.seed,
        pace=pace,
        gap_s=cfg.effective_gap_s,
        vector_stride=cfg.effective_test_stride,
        out_dir=_recordings_dir(job, tag),
        featurize=featurize,
    )
    write_manifest(dataset.manifest, Path(job.out_dir) / f"{tag}_manifest.json")
    return dataset


def _derived_set(base: Dataset, recordings: Dict[str, Recording], stride: int) -> Dataset:
    dataset = Dataset(replace(base.manifest), recordings)
    return featurize_dataset(dataset, vector_stride=stride)


def _train_models(job: ExperimentJob, dataset: Dataset, families: Sequence[str], tag: str) -> Dict[str, TrainedModel]:
    models = {}
    for family in families:
        model = train_family(
            dataset,
            family,
            seed=job.seed,
            max_epochs=job.cfg.max_epochs,
            overrides=job.cfg.model_overrides.get(family),
        )
        save_model_bundle(model, Path(job.out_dir) / "models", f"{tag}_{family}")
        models[family] = model
    return models


def _sample_rate(dataset: Dataset) -> float:
    return float(next(iter(dataset.recordings.values())).sample_rate)


def _mean_sir(dataset: Dataset) -> Optional[float]:
    values = []
    for recording in dataset.recordings.values():
        try:
            values.append(measure_sir(recording))
        except UndefinedSIRError as e:
            logger.warning("SIR undefined: %s", e)
    return float(np.mean(values)) if values else None


def _mean_pace(dataset: Dataset) -> Optional[float]:
    paces = [e.pace for rec in dataset.recordings.values() for e in rec.pass_events]
    return float(np.mean(paces)) if paces else None


def _evaluate(
    job: ExperimentJob,
    model: TrainedModel,
    dataset: Dataset,
    condition: ConditionMeta,
    requested: Optional[float],
    value: Optional[float],
) -> ReportDigest:
    report = evaluate_model(model, dataset, condition)
    stem = f"{condition.name}_{report.family}"
    save_report_bundle(report, job.out_dir, stem)
    return digest_report(report, job.seed, requested, value, f"{Path(job.out_dir).name}/{stem}.json")


def _baseline_job(job: ExperimentJob) -> List[ReportDigest]:
    cfg = job.cfg
    train_set = _training_set(job, cfg.train_shots)
    test_set = _test_set(job)
    measured = test_set.manifest.mean_measured_sir_db
    digests = []
    for family, model in _train_models(job, train_set, cfg.families, "baseline").items():
        condition = ConditionMeta(
            name="baseline",
            target_sir_db=cfg.test_sir_db,
            measured_sir_db=measured,
            sample_rate=_sample_rate(test_set),
            shots=cfg.train_shots,
            seed=job.seed,
            reference_accuracy=family_reference(family),
        )
        digests.append(_evaluate(job, model, test_set, condition, None, measured))
    return digests


def _reference(family: str, experiment: str, value) -> Optional[float]:
    return sweep_reference(experiment, value) if family == "LSTM" else None


def _sir_job(job: ExperimentJob) -> List[ReportDigest]:
    cfg = job.cfg
    models = _train_models(job, _training_set(job, cfg.train_shots), cfg.sweep_families, "baseline")
    base = _test_set(job, featurize=False)
    digests = []
    for sir in cfg.sir_values:
        if cfg.frame_scale:
            scaled = {rid: scale_pattern_energy(rec, sir) for rid, rec in base.recordings.items()}
        else:
            scaled = {rid: rescale_to_sir(rec, sir) for rid, rec in base.recordings.items()}
        dataset = _derived_set(base, scaled, cfg.effective_test_stride)
        measured = _mean_sir(dataset)
        for family, model in models.items():
            condition = ConditionMeta(
                name=f"sir{sir:g}dB",
                target_sir_db=sir,
                measured_sir_db=measured,
                sample_rate=_sample_rate(dataset),
                shots=cfg.train_shots,
                seed=job.seed,
                reference_accuracy=_reference(family, "sir_sweep", sir),
            )
            digests.append(_evaluate(job, model, dataset, condition, sir, measured))
    return digests


def _decimation_job(job: ExperimentJob) -> List[ReportDigest]:
    cfg = job.cfg
    models = _train_models(job, _training_set(job, cfg.train_shots), cfg.sweep_families, "baseline")
    base = _test_set(job)
    base_rate = _sample_rate(base)
    measured = base.manifest.mean_measured_sir_db
    digests = []
    # Undecimated reference, so the factor-1 condition can be checked against it
    for family, model in models.items():
        condition = ConditionMeta(
            name="baseline",
            target_sir_db=cfg.test_sir_db,
            measured_sir_db=measured,
            sample_rate=base_rate,
            shots=cfg.train_shots,
            seed=job.seed,
        )
        digests.append(_evaluate(job, model, base, condition, base_rate, base_rate))
    for rate in cfg.rates:
        factor = decimation_factor(base_rate, rate)
        decimated = {rid: decimate(rec, factor) for rid, rec in base.recordings.items()}
        dataset = _derived_set(base, decimated, cfg.effective_test_stride)
        actual = _sample_rate(dataset)
        for family, model in models.items():
            condition = ConditionMeta(
                name=f"rate{rate:g}Hz",
                target_sir_db=cfg.test_sir_db,
                measured_sir_db=measured,
                sample_rate=actual,
                shots=cfg.train_shots,
                seed=job.seed,
                reference_accuracy=_reference(family, "decimation", actual),
            )
            digests.append(_evaluate(job, model, dataset, condition, rate, actual))
    return digests


def _fewshot_job(job: ExperimentJob) -> List[ReportDigest]:
    cfg = job.cfg
    test_set = _test_set(job)
    measured = test_set.manifest.mean_measured_sir_db
    digests = []
    for shots in cfg.shots:
        train_set = _training_set(job, shots, tag=f"train_shots{shots}")
        actual = train_set.manifest.n_passes // len(train_set.manifest.recordings)
        for family, model in _train_models(job, train_set, cfg.sweep_families, f"shots{shots}").items():
            condition = ConditionMeta(
                name=f"shots{shots}",
                target_sir_db=cfg.test_sir_db,
                measured_sir_db=measured,
                sample_rate=_sample_rate(test_set),
                shots=actual,
                seed=job.seed,
                reference_accuracy=_reference(family, "fewshot", actual),
            )
            digests.append(_evaluate(job, model, test_set, condition, shots, actual))
    return digests


def _pace_job(job: ExperimentJob) -> List[ReportDigest]:
    cfg = job.cfg
    models = _train_models(job, _training_set(job, cfg.train_shots), cfg.sweep_families, "baseline")
    digests = []
    for pace in cfg.paces:
        test_set = _test_set(job, pace=pace, tag=f"test_pace{pace:g}")
        actual = _mean_pace(test_set)
        for family, model in models.items():
            condition = ConditionMeta(
                name=f"pace{pace:g}",
                target_sir_db=cfg.test_sir_db,
                measured_sir_db=test_set.manifest.mean_measured_sir_db,
                sample_rate=_sample_rate(test_set),
                shots=cfg.train_shots,
                pace=actual,
                seed=job.seed,
                reference_accuracy=_reference(family, "pace_sweep", pace),
            )
            digests.append(_evaluate(job, model, test_set, condition, pace, actual))
    return digests


_JOB_RUNNERS: Dict[str, Callable[[ExperimentJob], List[ReportDigest]]] = {
    "baseline": _baseline_job,
    "sir_sweep": _sir_job,
    "decimation": _decimation_job,
    "fewshot": _fewshot_job,
    "pace_sweep": _pace_job,
}


def _run_job(job: ExperimentJob) -> Dict[str, Any]:
    started = time.perf_counter()
    try:
        digests = _JOB_RUNNERS[job.experiment](job)
        return {
            "success": True,
            "error": None,
            "seed": job.seed,
            "digests": digests,
            "elapsed_s": time.perf_counter() - started,
        }
    except Exception as e:
        logger.exception("%s job (seed=%d) failed", job.experiment, job.seed)
        return {
            "success": False,
            "error": f"{type(e).__name__}: {e}",
            "seed": job.seed,
            "digests": [],
            "elapsed_s": time.perf_counter() - started,
        }


def run_jobs(jobs: Sequence[ExperimentJob], workers: int) -> List[Dict[str, Any]]:
    """Results in job order, whatever order the pool finishes in."""
    if workers <= 1:
        return [_run_job(job) for job in jobs]
    results: Dict[int, Dict[str, Any]] = {}
    with ProcessPoolExecutor(max_workers=workers) as ex:
        fut2idx = {ex.submit(_run_job, job): i for i, job in enumerate(jobs)}
        for fut in as_completed(fut2idx):
            i = fut2idx[fut]
            try:
                results[i] = fut.result()
            except Exception as e:
                # The worker process itself died
                results[i] = {
                    "success": False,
                    "error": f"{type(e).__name__}: {e}",
                    "seed": jobs[i].seed,
                    "digests": [],
                    "elapsed_s": None,
                }
            logger.info("job seed=%d %s", jobs[i].seed, "done" if results[i]["success"] else "FAILED")
    return [results[i] for i in range(len(jobs))]


def _log_runs(out_dir: Path, experiment: str, results: Sequence[Dict[str, Any]]) -> None:
    log_path = out_dir / RUN_LOG_NAME
    for result in results:
        for digest in result["digests"]:
            append_run_event(
                log_path,
                {
                    "experiment": experiment,
                    "condition": digest.condition.name,
                    "family": digest.family,
                    "seed": digest.seed,
                    "success": True,
                    "accuracy": digest.accuracy,
                    "auc": digest.auc,
                    "mle_m": digest.mle_m,
                },
            )
        if not result["success"]:
            append_run_event(
                log_path,
                {
                    "experiment": experiment,
                    "condition": "*",
                    "family": "*",
                    "seed": result["seed"],
                    "success": False,
                    "error": result["error"],
                },
            )


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    name = cfg.experiment
    if name not in _JOB_RUNNERS:
        raise ConfigurationError(f"Unknown experiment: {name}")
    if name == "decimation":
        for rate in cfg.rates:
            decimation_factor(BASE_RATE, rate)

    out_dir = Path(cfg.output_dir) / name
    jobs = [ExperimentJob(name, seed, cfg, str(out_dir / f"seed{seed}")) for seed in cfg.seeds]
    workers = worker_count(cfg, len(jobs))
    logger.info("experiment %s: %d job(s) on %d worker(s), output %s", name, len(jobs), workers, out_dir)

    started = time.perf_counter()
    results = run_jobs(jobs, workers)
    runs = [digest for result in results for digest in result["digests"]]
    failures = [{"seed": r["seed"], "error": r["error"]} for r in results if not r["success"]]
    for failure in failures:
        logger.error("experiment %s seed=%d failed: %s", name, failure["seed"], failure["error"])

    report = ExperimentReport(
        experiment=name,
        config=cfg.model_dump(mode="json"),
        summaries=summarize(runs),
        runs=runs,
        failures=failures,
        generated_at=datetime.now().isoformat(),
        timing={
            "total_s": time.perf_counter() - started,
            "jobs": {str(r["seed"]): r["elapsed_s"] for r in results},
            "workers": workers,
        },
    )
    report.acceptance_failures = check_acceptance(report)
    _log_runs(out_dir, name, results)
    write_experiment_report(report, out_dir)
    for s in report.summaries:
        logger.info(
            "%-12s %-8s accuracy %.2f ± %.2f  AUC %.4f  MLE %s",
            s.condition,
            s.family,
            s.accuracy_mean,
            s.accuracy_spread,
            s.auc_mean,
            "n/a" if s.mle_mean is None else f"{s.mle_mean:.3f} m",
        )
    return report


def _with(cfg: ExperimentConfig, **update: Any) -> ExperimentConfig:
    update = {k: v for k, v in update.items() if v is not None}
    return ExperimentConfig.model_validate({**cfg.model_dump(), **update})


def run_baseline(cfg: ExperimentConfig) -> ExperimentReport:
    return run_experiment(_with(cfg, experiment="baseline"))


def run_sir_sweep(cfg: ExperimentConfig, sirs: Optional[Sequence[float]] = None) -> ExperimentReport:
    return run_experiment(_with(cfg, experiment="sir_sweep", sir_values=None if sirs is None else list(sirs)))


def run_decimation(cfg: ExperimentConfig, rates: Optional[Sequence[float]] = None) -> ExperimentReport:
    return run_experiment(_with(cfg, experiment="decimation", rates=None if rates is None else list(rates)))


def run_fewshot(cfg: ExperimentConfig, shots: Optional[Sequence[int]] = None) -> ExperimentReport:
    return run_experiment(_with(cfg, experiment="fewshot", shots=None if shots is None else list(shots)))


def run_pace_sweep(cfg: ExperimentConfig, paces: Optional[Sequence[float]] = None) -> ExperimentReport:
    return run_experiment(_with(cfg, experiment="pace_sweep", paces=None if paces is None else list(paces)))
