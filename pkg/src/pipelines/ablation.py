"""Ablation and gamma-sweep runner: one training run per (variant, seed)."""

import asyncio
import logging
from collections.abc import Sequence
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import pandas as pd

from src.contracts.errors import InputError
from src.contracts.records import RunRecord
from src.contracts.schemas import TrainConfig
from src.emit.csv_sink import write_frame
from src.pipelines.trainer import COVERAGE_HEADER, Trainer
from src.utils.logging import latency_log, run_scope
from src.utils.preset_loader import VariantPreset

logger = logging.getLogger(__name__)

RUNS_FILE = "ablation_runs.csv"
SUMMARY_FILE = "ablation_summary.csv"
MERGED_COVERAGE_FILE = "coverage.csv"
RUNS_HEADER = tuple(RunRecord.model_fields)
SUMMARY_HEADER = (
    "variant",
    "method",
    "aug",
    "n_seeds",
    "success_mean",
    "success_var",
    "reach_visited_mean",
    "reach_augmented_mean",
)
MERGED_COVERAGE_HEADER = ("variant", "seed", *COVERAGE_HEADER)
GAMMA_SWEEP = (0.99, 0.999, 0.9999)


@dataclass(frozen=True)
class AblationJob:
    """Everything a worker process needs for one run."""

    variant: str
    seed: int
    config: TrainConfig
    run_dir: Path
    float_format: str = "%.10g"

    @property
    def run_id(self) -> str:
        return f"{self.variant}/seed_{self.seed}"


@dataclass
class AblationOutcome:
    record: RunRecord
    coverage_rows: list[dict[str, Any]]


@dataclass
class AblationResult:
    """Files and records produced by one ablation."""

    runs_path: Path
    summary_path: Path
    coverage_path: Path
    records: list[RunRecord]
    summary: pd.DataFrame


def _train_variant(job: AblationJob) -> AblationOutcome:
    """Worker entry point; must stay importable at module level for process pools."""
    with run_scope(job.run_id):
        result = Trainer(job.config, job.run_dir, float_format=job.float_format).run()
    cfg = job.config
    record = RunRecord(
        variant=job.variant,
        method=cfg.method.value,
        aug=cfg.aug.value,
        seed=job.seed,
        gamma=cfg.gamma,
        final_success=result.final_success,
        mean_reach_visited=result.coverage.mean_visited,
        mean_reach_augmented=result.coverage.mean_augmented,
        run_dir=str(job.run_dir),
    )
    rows = [{"variant": job.variant, "seed": job.seed, **row} for row in result.coverage.rows()]
    return AblationOutcome(record=record, coverage_rows=rows)


def summarize(records: Sequence[RunRecord]) -> pd.DataFrame:
    """Per-variant mean and population variance of final success, in first-seen order."""
    frame = pd.DataFrame([r.model_dump() for r in records])
    grouped = frame.groupby(["variant", "method", "aug"], sort=False)
    summary = grouped.agg(
        n_seeds=("seed", "count"),
        success_mean=("final_success", "mean"),
        success_var=("final_success", lambda s: float(s.var(ddof=0))),
        reach_visited_mean=("mean_reach_visited", "mean"),
        reach_augmented_mean=("mean_reach_augmented", "mean"),
    ).reset_index()
    return summary[list(SUMMARY_HEADER)]


class AblationRunner:
    """
    Runs every (variant, seed) pair and merges their outputs.

    Runs are independent: each writes into its own directory and only the
    returned records are merged, so they may execute in worker processes.
    """

    def __init__(
        self,
        base: TrainConfig,
        variants: Sequence[VariantPreset],
        seeds: Sequence[int],
        out_dir: str | Path,
        executor: Executor | None = None,
        max_workers: int = 1,
        float_format: str = "%.10g",
    ) -> None:
        """
        Initialize ablation runner.

        Args:
            base: Configuration shared by every variant.
            variants: Variants to compare, in output order.
            seeds: Seeds run for every variant.
            out_dir: Root directory; each run gets ``<variant>/seed_<n>``.
            executor: Optional executor; defaults to a process pool of ``max_workers``.
            max_workers: Worker count for the default executor.
            float_format: Float format for CSV outputs.
        """
        if not seeds:
            raise InputError("an ablation needs at least one seed")
        if not variants:
            raise InputError("an ablation needs at least one variant")
        self._base = base
        self._variants = list(variants)
        self._seeds = list(seeds)
        self._out_dir = Path(out_dir)
        self._executor = executor
        self._max_workers = max_workers
        self._float_format = float_format

    def jobs(self) -> list[AblationJob]:
        """
        One job per (variant, seed), variants outermost.

        When any variant draws augmented states, the non-augmented variants get
        ``match_sample_count`` so every method sees as many states per update.
        """
        match = any(v.method.uses_augmentation for v in self._variants)
        jobs = []
        for variant in self._variants:
            config = variant.apply(self._base)
            if match and not config.method.uses_augmentation and not config.match_sample_count:
                logger.info(f"{variant.name}: doubling visited draws to match augmented variants")
                config = config.model_copy(update={"match_sample_count": True})
            for seed in self._seeds:
                jobs.append(
                    AblationJob(
                        variant=variant.name,
                        seed=seed,
                        config=config.model_copy(update={"seed": seed}),
                        run_dir=self._out_dir / variant.name / f"seed_{seed}",
                        float_format=self._float_format,
                    )
                )
        return jobs

    async def run(self) -> AblationResult:
        """Execute all jobs and write the runs, summary and merged coverage files."""
        jobs = self.jobs()
        logger.info(f"Running {len(jobs)} jobs ({len(self._variants)} variants x {len(self._seeds)} seeds)")

        owned = self._executor is None
        executor = self._executor or self._default_executor()
        loop = asyncio.get_running_loop()
        try:
            with latency_log(logger, "Ablation"):
                outcomes = await asyncio.gather(
                    *(loop.run_in_executor(executor, _train_variant, job) for job in jobs)
                )
        finally:
            if owned:
                executor.shutdown(wait=True)

        records = [o.record for o in outcomes]
        coverage_rows = [row for o in outcomes for row in o.coverage_rows]
        summary = summarize(records)
        ff = self._float_format
        runs_path = write_frame([r.model_dump() for r in records], self._out_dir / RUNS_FILE, RUNS_HEADER, ff)
        summary_path = write_frame(
            summary.to_dict(orient="records"), self._out_dir / SUMMARY_FILE, SUMMARY_HEADER, ff
        )
        coverage_path = write_frame(
            coverage_rows, self._out_dir / MERGED_COVERAGE_FILE, MERGED_COVERAGE_HEADER, ff
        )
        for row in summary.itertuples(index=False):
            logger.info(
                f"{row.variant}: success {row.success_mean:.3f} (var {row.success_var:.4f}), "
                f"reach visited {row.reach_visited_mean:.3f} augmented {row.reach_augmented_mean:.3f}"
            )
        return AblationResult(runs_path, summary_path, coverage_path, records, summary)

    def _default_executor(self) -> Executor:
        if self._max_workers > 1:
            return ProcessPoolExecutor(max_workers=self._max_workers)
        return ThreadPoolExecutor(max_workers=1)


def gamma_variants(base: TrainConfig, gammas: Sequence[float] = GAMMA_SWEEP) -> list[VariantPreset]:
    """The base method and augmentation rerun at each visited-state discount."""
    return [
        VariantPreset(
            name=f"gamma_{gamma:g}",
            method=base.method,
            aug=base.aug,
            description=f"visited-state discount {gamma:g}",
            overrides={"gamma": gamma},
        )
        for gamma in gammas
    ]


def run_ablation(
    base: TrainConfig,
    variants: Sequence[VariantPreset],
    seeds: Sequence[int],
    out_dir: str | Path,
    **kwargs: Any,
) -> AblationResult:
    """Synchronous wrapper around ``AblationRunner.run``."""
    return asyncio.run(AblationRunner(base, variants, seeds, out_dir, **kwargs).run())


def run_gamma_sweep(
    base: TrainConfig,
    seeds: Sequence[int],
    out_dir: str | Path,
    gammas: Sequence[float] = GAMMA_SWEEP,
    **kwargs: Any,
) -> AblationResult:
    """Rerun ``base`` at each discount in ``gammas`` for every seed."""
    return run_ablation(base, gamma_variants(base, gammas), seeds, out_dir, **kwargs)
