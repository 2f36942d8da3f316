"""Command-line interface for training, evaluation, ablations and benchmarks."""

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from pydantic import ValidationError

from src.config import Settings, get_settings
from src.contracts.errors import ConfigError, NumericError
from src.pipelines import (
    dump_embeddings,
    evaluate,
    mi_bench,
    run_ablation,
    run_gamma_sweep,
    train,
)
from src.pipelines.ablation import GAMMA_SWEEP
from src.utils.config_loader import build_train_config, parse_overrides
from src.utils.logging import configure_logging, run_scope
from src.utils.preset_loader import PresetLoader

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

ABLATION_PRESET = "ablation_variants"


def _floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def _ints(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _names(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="visa",
        description="Contrastive goal-conditioned RL with visited-state augmentation",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Train with a config file, overriding one key
  visa train --config configs/point_reach.conf --seed 1 --set total_env_steps=50000

  # Evaluate a checkpoint
  visa eval --checkpoint runs/train/seed_1/checkpoint.bin --env point_reach --episodes 50 --seed 0

  # Compare augmentation strategies over three seeds
  visa ablate --config configs/point_reach_wall.conf --variants strong_unbias,random_goal --seeds 0,1,2 --out runs/ablation

  # Estimator benchmark on correlated Gaussians
  visa mi-bench --rho 0,0.5,0.8,0.95 --batch 256 --steps 2000 --seed 0 --out runs/mi.csv
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_overrides(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="Override a config key (repeatable)",
        )

    p = sub.add_parser("train", help="Run one training job")
    p.add_argument("--config", type=Path, help="Flat key = value config file")
    p.add_argument("--seed", type=int, help="Seed (overrides the file)")
    p.add_argument("--out", type=Path, help="Run directory")
    with_overrides(p)

    p = sub.add_parser("eval", help="Greedy success rate of a checkpoint")
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--env", required=True)
    p.add_argument("--episodes", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("ablate", help="Train every variant for every seed")
    p.add_argument("--config", type=Path, help="Base config file")
    p.add_argument("--variants", type=_names, required=True, help="Comma-separated variant names")
    p.add_argument("--seeds", type=_ints, required=True, help="Comma-separated seeds")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--preset", default=ABLATION_PRESET, help="Variant table under presets_dir")
    p.add_argument("--workers", type=int, help="Worker processes (default: settings)")
    with_overrides(p)

    p = sub.add_parser("gamma-sweep", help="Rerun the base config at several discounts")
    p.add_argument("--config", type=Path, help="Base config file")
    p.add_argument("--gammas", type=_floats, default=list(GAMMA_SWEEP))
    p.add_argument("--seeds", type=_ints, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--workers", type=int, help="Worker processes (default: settings)")
    with_overrides(p)

    p = sub.add_parser("mi-bench", help="InfoNCE and CLUB on correlated Gaussians")
    p.add_argument("--rho", type=_floats, required=True)
    p.add_argument("--batch", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("dump-embeddings", help="Write psi/phi embeddings of greedy rollouts")
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--env", required=True)
    p.add_argument("--rollouts", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)

    return parser


def _run(args: argparse.Namespace, settings: Settings) -> None:
    command = args.command
    ff = settings.float_format

    if command == "train":
        overrides = parse_overrides(args.overrides)
        if args.seed is not None:
            overrides["seed"] = str(args.seed)
        config = build_train_config(args.config, overrides)
        out = args.out or Path(settings.output_dir) / "train" / f"seed_{config.seed}"
        with run_scope(f"train/seed_{config.seed}"):
            print(train(config, out, float_format=ff))

    elif command == "eval":
        print(f"{evaluate(args.checkpoint, args.env, args.episodes, args.seed):.6f}")

    elif command == "ablate":
        base = build_train_config(args.config, parse_overrides(args.overrides))
        table = PresetLoader(settings.presets_dir).load(args.preset)
        result = run_ablation(
            base,
            table.select(args.variants),
            args.seeds,
            args.out,
            max_workers=args.workers or settings.max_workers,
            float_format=ff,
        )
        print(result.summary_path)

    elif command == "gamma-sweep":
        base = build_train_config(args.config, parse_overrides(args.overrides))
        result = run_gamma_sweep(
            base,
            args.seeds,
            args.out,
            gammas=args.gammas,
            max_workers=args.workers or settings.max_workers,
            float_format=ff,
        )
        print(result.summary_path)

    elif command == "mi-bench":
        with run_scope("mi-bench"):
            mi_bench(args.rho, args.batch, args.steps, args.seed, args.out, float_format=ff)
        print(args.out)

    elif command == "dump-embeddings":
        print(dump_embeddings(args.checkpoint, args.env, args.rollouts, args.seed, args.out, ff))


def main(argv: Sequence[str] | None = None) -> int:
    """
    Parse arguments, run one command, and map failures to exit codes.

    Returns:
        0 on success, 2 for configuration errors, 3 for numeric errors, 1 otherwise.
    """
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings()
    except ValidationError as e:
        print(f"invalid VISA_* settings: {e}", file=sys.stderr)
        return EXIT_CONFIG
    configure_logging(settings)

    try:
        _run(args, settings)
    except (ConfigError, ValidationError) as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except NumericError as e:
        logger.error(f"Numeric error at {e.node}: {e}")
        return EXIT_NUMERIC
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return EXIT_FAILURE
    except Exception as e:
        logger.error(f"Error: {e}", exc_info=True)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
