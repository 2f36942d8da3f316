"""Pipeline module - training, evaluation, ablations and benchmarks."""

from src.pipelines.ablation import (
    AblationJob,
    AblationResult,
    AblationRunner,
    gamma_variants,
    run_ablation,
    run_gamma_sweep,
    summarize,
)
from src.pipelines.embeddings import dump_embeddings, embedding_columns, embedding_rows
from src.pipelines.evaluation import (
    ChainCriticReport,
    chain_critic_report,
    evaluate,
    evaluate_policy,
    load_for_env,
    visited_state_marginal,
)
from src.pipelines.mi_bench import (
    MI_BENCH_HEADER,
    estimate_mi,
    gaussian_pairs,
    mi_bench,
    train_gaussian_critic,
)
from src.pipelines.trainer import CoverageReport, Trainer, TrainResult, train

__all__ = [
    "MI_BENCH_HEADER",
    "AblationJob",
    "AblationResult",
    "AblationRunner",
    "ChainCriticReport",
    "CoverageReport",
    "TrainResult",
    "Trainer",
    "chain_critic_report",
    "dump_embeddings",
    "embedding_columns",
    "embedding_rows",
    "estimate_mi",
    "evaluate",
    "evaluate_policy",
    "load_for_env",
    "gamma_variants",
    "gaussian_pairs",
    "mi_bench",
    "run_ablation",
    "run_gamma_sweep",
    "summarize",
    "train",
    "train_gaussian_critic",
    "visited_state_marginal",
]
