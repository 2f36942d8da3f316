"""Training loop: collect rollouts, update the critic encoders and the policy, evaluate."""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from src.actor import ActorLoss, PolicyParams, init_policy, policy_sample
from src.contracts.records import MetricsRow
from src.contracts.schemas import AugmentationSpec, AugTag, TrainConfig
from src.contrastive import (
    CriticLoss,
    CriticObjective,
    EncoderSet,
    bo_estimate,
    club_estimate,
    critic_inputs,
    infonce_objective,
    init_encoders,
)
from src.emit.checkpoint import Checkpoint, save_checkpoint
from src.emit.csv_sink import CsvMetricsSink, write_frame
from src.emit.ports import MetricsSink
from src.envs import GoalEnv, env_from_config
from src.numerics import OptState, ParamSet, init_opt_state, opt_step, value_and_grad
from src.pipelines.evaluation import evaluate_policy
from src.replay import (
    ContrastiveBatch,
    ReplayBuffer,
    Trajectory,
    reachability_histogram,
    sample_batch,
)
from src.replay.batch import REACHABILITY_BINS
from src.utils.config_loader import dump_train_config
from src.utils.logging import latency_log

logger = logging.getLogger(__name__)

METRICS_FILE = "metrics.csv"
CHECKPOINT_FILE = "checkpoint.bin"
COVERAGE_FILE = "coverage.csv"
CONFIG_FILE = "config.conf"
COVERAGE_HEADER = ("bin_low", "bin_high", "visited_fraction", "augmented_fraction")


@dataclass
class CoverageReport:
    """Reachability statistics of visited vs augmented samples from the final buffer."""

    visited_hist: np.ndarray
    augmented_hist: np.ndarray
    mean_visited: float
    mean_augmented: float
    n_visited: int = 0
    n_augmented: int = 0

    def rows(self) -> list[dict[str, float]]:
        edges = np.linspace(0.0, 1.0, REACHABILITY_BINS + 1)
        return [
            {
                "bin_low": float(edges[i]),
                "bin_high": float(edges[i + 1]),
                "visited_fraction": float(self.visited_hist[i]),
                "augmented_fraction": float(self.augmented_hist[i]),
            }
            for i in range(REACHABILITY_BINS)
        ]


@dataclass
class TrainResult:
    """Paths and final state of one training run."""

    run_dir: Path
    metrics_path: Path
    checkpoint_path: Path
    coverage_path: Path
    rows: list[MetricsRow]
    encoders: EncoderSet
    policy: PolicyParams
    coverage: CoverageReport

    @property
    def final_success(self) -> float:
        return self.rows[-1].eval_success_rate if self.rows else 0.0


@dataclass
class _RunningMeans:
    sums: dict[str, float] = field(default_factory=lambda: defaultdict(float))
    counts: dict[str, int] = field(default_factory=lambda: defaultdict(int))

    def add(self, **values: float) -> None:
        for key, value in values.items():
            self.sums[key] += value
            self.counts[key] += 1

    def mean(self, key: str) -> float:
        return self.sums[key] / self.counts[key] if self.counts[key] else 0.0

    def reset(self) -> None:
        self.sums.clear()
        self.counts.clear()


class Trainer:
    """
    One deterministic training run.

    Per episode: roll out toward a sampled goal, store the trajectory, then run
    ``updates_per_step`` critic (and actor) updates per collected env step.
    A single seed drives every random stream through ``SeedSequence.spawn``.
    """

    def __init__(
        self,
        config: TrainConfig,
        run_dir: str | Path,
        sink: MetricsSink | None = None,
        float_format: str = "%.10g",
    ) -> None:
        """
        Initialize trainer.

        Args:
            config: Validated experiment configuration.
            run_dir: Output directory for metrics, checkpoint and coverage.
            sink: Optional metrics sink; defaults to a CSV file in ``run_dir``.
            float_format: Float format for CSV outputs.
        """
        self.config = config
        self.run_dir = Path(run_dir)
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self._float_format = float_format
        self._sink = sink or CsvMetricsSink(self.run_dir / METRICS_FILE, float_format)

        init_seq, env_seq, sampler_seq, policy_seq, eval_seq = np.random.SeedSequence(
            config.seed
        ).spawn(5)
        init_rng = np.random.default_rng(init_seq)
        self._env_rng = np.random.default_rng(env_seq)
        self._sampler_rng = np.random.default_rng(sampler_seq)
        self._policy_rng = np.random.default_rng(policy_seq)
        self._eval_seed = int(eval_seq.generate_state(1)[0])

        self.env: GoalEnv = env_from_config(config)
        feat = self.env.state_feature_dim
        self.encoders = init_encoders(
            feat,
            self.env.action_feature_dim,
            config.embed_dim,
            config.hidden_sizes,
            init_rng,
            config.hidden_activation,
        )
        self.policy = init_policy(
            2 * feat,
            self.env.spec.action_dim,
            config.hidden_sizes,
            init_rng,
            config.hidden_activation,
            self.env.spec.action_low,
            self.env.spec.action_high,
        )
        self._critic_opt: list[OptState] = [init_opt_state(p) for p in self.encoders.as_list()]
        self._actor_opt = init_opt_state(self.policy.trunk)

        self.buffer = ReplayBuffer(config.buffer_capacity)
        self.objective = CriticObjective(
            method=config.method,
            convention=config.safe_convention,
            lambda_club=config.lambda_club,
            detach_base=config.bo_detach_base,
        )
        self._aug_spec = (
            config.augmentation() if config.method.uses_augmentation else AugmentationSpec()
        )
        self.env_steps = 0
        self.critic_updates = 0
        self._means = _RunningMeans()
        self.rows: list[MetricsRow] = []

    # -------------------------------------------------------------------------
    # Rollouts
    # -------------------------------------------------------------------------

    @property
    def acting_randomly(self) -> bool:
        return self.config.critic_only or self.env_steps < self.config.warmup_steps

    def collect_episode(self) -> Trajectory:
        """Roll out one full episode toward a freshly sampled goal and store it."""
        env = self.env
        spec = env.spec
        goal = env.sample_goal(self._env_rng)
        state = env.reset(goal, seed=int(self._env_rng.integers(2**31)))
        goal_feat = env.state_features(goal)
        random_actions = self.acting_randomly

        states = [state]
        actions = []
        for _ in range(spec.episode_len):
            if random_actions:
                action = self._policy_rng.uniform(spec.action_low, spec.action_high, spec.action_dim)
            else:
                sampled, _ = policy_sample(
                    self.policy, env.state_features(state), goal_feat, self._policy_rng
                )
                action = sampled[0]
            result = env.step(state, action)
            actions.append(np.asarray(action, dtype=np.float64))
            state = result.next_state
            states.append(state)

        self.env_steps += spec.episode_len
        return self.buffer.append(
            Trajectory(
                states=np.stack(states),
                actions=np.stack(actions),
                exploration_goal=np.asarray(goal, dtype=np.float64),
            )
        )

    # -------------------------------------------------------------------------
    # Updates
    # -------------------------------------------------------------------------

    def sample(self) -> ContrastiveBatch:
        return sample_batch(
            self.buffer,
            self.config.effective_batch_size,
            self.config.gamma,
            self._aug_spec,
            self._sampler_rng,
        )

    def critic_update(self, batch: ContrastiveBatch) -> float:
        """One Adam step on psi, phi (and phi_hat when the objective uses it)."""
        cfg = self.config
        inputs = critic_inputs(batch, self.env)
        loss = CriticLoss(inputs, self.objective)
        params = self.encoders.as_list()
        value, grads = value_and_grad(loss, params)

        n_sets = 3 if self.objective.needs_augmentation else 2
        new_params: list[ParamSet] = list(params)
        for i in range(n_sets):
            new_params[i], self._critic_opt[i] = opt_step(
                params[i],
                grads[i],
                self._critic_opt[i],
                cfg.lr_critic,
                (cfg.adam_beta1, cfg.adam_beta2),
                cfg.adam_eps,
            )
        self.encoders = EncoderSet.from_list(new_params)
        self.critic_updates += 1

        scores = loss.last_scores
        assert scores is not None
        negatives = inputs.negatives
        stats: dict[str, float] = {
            "critic_loss": value,
            "infonce_value": infonce_objective(scores.s_v, negatives),
            "mean_reach_visited": float(batch.visited_reachability().mean()),
        }
        if scores.has_boost:
            stats["club_value"] = club_estimate(scores.s_full, negatives)
            stats["bo_value"] = bo_estimate(scores, negatives)
        else:
            stats["club_value"] = club_estimate(scores.s_v, negatives)
        if batch.has_augmentation:
            stats["mean_reach_augmented"] = float(batch.augmented_reachability().mean())
        self._means.add(**stats)
        return value

    def actor_update(self, batch: ContrastiveBatch) -> float:
        """One Adam step on the policy with goals relabeled to the batch's visited states."""
        cfg = self.config
        loss = ActorLoss(
            self.policy,
            self.encoders,
            self.env.state_features(batch.states),
            self.env.state_features(batch.visited_states),
            cfg.alpha,
            self._policy_rng,
        )
        value, grads = value_and_grad(loss, [self.policy.trunk])
        trunk, self._actor_opt = opt_step(
            self.policy.trunk,
            grads[0],
            self._actor_opt,
            cfg.lr_actor,
            (cfg.adam_beta1, cfg.adam_beta2),
            cfg.adam_eps,
        )
        self.policy = self.policy.with_trunk(trunk)
        self._means.add(actor_loss=value, policy_entropy=-loss.last_log_prob)
        return value

    def update(self) -> None:
        batch = self.sample()
        self.critic_update(batch)
        if not self.acting_randomly:
            self.actor_update(batch)

    # -------------------------------------------------------------------------
    # Evaluation and outputs
    # -------------------------------------------------------------------------

    def evaluate(self) -> MetricsRow:
        """Write one metrics row for the interval that just ended."""
        with latency_log(logger, f"Evaluation at step {self.env_steps}", level=logging.DEBUG):
            rate = evaluate_policy(
                self.env, self.policy, self.config.eval_episodes, self._eval_seed + self.env_steps
            )
        m = self._means
        row = MetricsRow(
            env_step=self.env_steps,
            eval_success_rate=rate,
            critic_loss=m.mean("critic_loss"),
            infonce_value=m.mean("infonce_value"),
            club_value=m.mean("club_value"),
            bo_value=m.mean("bo_value"),
            actor_loss=m.mean("actor_loss"),
            policy_entropy=m.mean("policy_entropy"),
            mean_reachability_visited=m.mean("mean_reach_visited"),
            mean_reachability_augmented=m.mean("mean_reach_augmented"),
        )
        self._sink.write(row)
        self.rows.append(row)
        m.reset()
        logger.info(
            f"step={row.env_step} success={row.eval_success_rate:.3f} "
            f"critic_loss={row.critic_loss:.4f} actor_loss={row.actor_loss:.4f}"
        )
        return row

    def coverage(self) -> CoverageReport:
        """Reachability histograms over ``effective_coverage_samples`` draws from the final buffer."""
        n = self.config.effective_coverage_samples
        if n < 2 or len(self.buffer) < 2:
            empty = np.zeros(REACHABILITY_BINS)
            return CoverageReport(empty, empty.copy(), 0.0, 0.0)
        rng = np.random.default_rng(np.random.SeedSequence([self.config.seed, 1]))
        spec = self._aug_spec if self._aug_spec.tag != AugTag.NONE else AugmentationSpec()
        batch = sample_batch(self.buffer, n, self.config.gamma, spec, rng)
        visited = batch.visited_reachability()
        if batch.has_augmentation:
            augmented = batch.augmented_reachability()
            aug_hist, aug_mean = reachability_histogram(augmented), float(augmented.mean())
        else:
            aug_hist, aug_mean = np.zeros(REACHABILITY_BINS), 0.0
        return CoverageReport(
            visited_hist=reachability_histogram(visited),
            augmented_hist=aug_hist,
            mean_visited=float(visited.mean()),
            mean_augmented=aug_mean,
            n_visited=len(visited),
            n_augmented=len(augmented) if batch.has_augmentation else 0,
        )

    def checkpoint(self) -> Checkpoint:
        return Checkpoint(
            env=self.config.env,
            chain_states=self.config.chain_states,
            episode_len=self.env.spec.episode_len,
            encoders=self.encoders,
            policy=self.policy,
        )

    def run(self) -> TrainResult:
        """Train to ``total_env_steps`` and write every output file."""
        cfg = self.config
        logger.info(
            f"Training {cfg.method.value}/{cfg.aug.value} on {cfg.env.value} "
            f"for {cfg.total_env_steps} env steps (seed={cfg.seed})"
        )
        (self.run_dir / CONFIG_FILE).write_text(dump_train_config(cfg), encoding="utf-8")

        next_eval = cfg.eval_every
        with latency_log(logger, "Training run"):
            while self.env_steps < cfg.total_env_steps:
                self.collect_episode()
                if len(self.buffer) >= 2 and self.env_steps >= cfg.warmup_steps:
                    for _ in range(self.env.spec.episode_len * cfg.updates_per_step):
                        self.update()
                if self.env_steps >= next_eval:
                    self.evaluate()
                    next_eval += cfg.eval_every * (
                        (self.env_steps - next_eval) // cfg.eval_every + 1
                    )
            if not self.rows or self.rows[-1].env_step != self.env_steps:
                self.evaluate()
        self._sink.close()

        with latency_log(logger, "Checkpoint and coverage", level=logging.DEBUG):
            checkpoint_path = save_checkpoint(self.checkpoint(), self.run_dir / CHECKPOINT_FILE)
            coverage = self.coverage()
            coverage_path = write_frame(
                coverage.rows(), self.run_dir / COVERAGE_FILE, COVERAGE_HEADER, self._float_format
            )

        return TrainResult(
            run_dir=self.run_dir,
            metrics_path=self.run_dir / METRICS_FILE,
            checkpoint_path=checkpoint_path,
            coverage_path=coverage_path,
            rows=self.rows,
            encoders=self.encoders,
            policy=self.policy,
            coverage=coverage,
        )


def train(config: TrainConfig, out_dir: str | Path, **kwargs: Any) -> Path:
    """
    Run one training job.

    Returns:
        Path of the metrics file.
    """
    return Trainer(config, out_dir, **kwargs).run().metrics_path
