"""Tests for the command-line interface."""

from pathlib import Path

import pytest

from src.config import get_settings
from src.contracts.errors import NumericError
from src.contracts.schemas import TrainConfig
from src.entrypoints import build_parser, cli, main
from src.entrypoints.cli import EXIT_CONFIG, EXIT_FAILURE, EXIT_NUMERIC, EXIT_OK
from src.utils.config_loader import dump_train_config
from tests.conftest import tiny_config

PRESETS = Path(__file__).resolve().parent.parent / "presets"


@pytest.fixture
def tiny_conf(tmp_path: Path) -> Path:
    path = tmp_path / "tiny.conf"
    path.write_text(dump_train_config(tiny_config()))
    return path


@pytest.fixture
def presets_env(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("VISA_PRESETS_DIR", str(PRESETS))
    get_settings.cache_clear()


class TestParser:
    """Tests for argument parsing."""

    def test_command_required(self) -> None:
        """Test that a subcommand is mandatory."""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_ablate_lists(self) -> None:
        """Test comma-separated variants and seeds."""
        args = build_parser().parse_args(
            ["ablate", "--variants", "strong_unbias, crl_cpc", "--seeds", "0,1,2", "--out", "x"]
        )
        assert args.variants == ["strong_unbias", "crl_cpc"]
        assert args.seeds == [0, 1, 2]
        assert args.preset == cli.ABLATION_PRESET

    def test_bad_seed_list(self) -> None:
        """Test that non-integer seeds are a usage error."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["ablate", "--variants", "a", "--seeds", "0,x", "--out", "x"])

    def test_repeatable_overrides(self) -> None:
        """Test that --set accumulates."""
        args = build_parser().parse_args(["train", "--set", "seed=1", "--set", "gamma=0.9"])
        assert args.overrides == ["seed=1", "gamma=0.9"]

    def test_gamma_sweep_default(self) -> None:
        """Test the default discount list."""
        args = build_parser().parse_args(["gamma-sweep", "--seeds", "0", "--out", "x"])
        assert args.gammas == [0.99, 0.999, 0.9999]


class TestMain:
    """Tests for command execution and exit codes."""

    def test_train(self, tiny_conf: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that train writes its outputs and prints the metrics path."""
        out = tmp_path / "run"
        assert main(["train", "--config", str(tiny_conf), "--out", str(out), "--seed", "5"]) == EXIT_OK
        assert (out / "metrics.csv").exists()
        assert (out / "checkpoint.bin").exists()
        assert str(out / "metrics.csv") in capsys.readouterr().out

    def test_eval(self, tiny_conf: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that eval prints a success rate in [0, 1]."""
        out = tmp_path / "run"
        main(["train", "--config", str(tiny_conf), "--out", str(out)])
        capsys.readouterr()
        code = main(["eval", "--checkpoint", str(out / "checkpoint.bin"), "--env", "point_reach", "--episodes", "3"])
        assert code == EXIT_OK
        assert 0.0 <= float(capsys.readouterr().out.strip().splitlines()[-1]) <= 1.0

    def test_invalid_config_exits_2(self, tmp_path: Path) -> None:
        """Test that an invalid configuration maps to exit code 2."""
        path = tmp_path / "bad.conf"
        path.write_text("method = crl_cpc\naug = strong_unbias\n")
        assert main(["train", "--config", str(path), "--out", str(tmp_path / "run")]) == EXIT_CONFIG

    def test_unknown_key_exits_2(self, tmp_path: Path) -> None:
        """Test that an unknown --set key maps to exit code 2."""
        assert main(["train", "--set", "learning_rate=0.1", "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_missing_checkpoint_exits_2(self, tmp_path: Path) -> None:
        """Test that a missing checkpoint maps to exit code 2."""
        args = ["eval", "--checkpoint", str(tmp_path / "absent.bin"), "--env", "point_reach", "--episodes", "1"]
        assert main(args) == EXIT_CONFIG

    def test_numeric_error_exits_3(self, monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
        """Test that a non-finite graph value maps to exit code 3."""

        def explode(config: TrainConfig, out: Path, **kwargs: object) -> Path:
            raise NumericError("psi")

        monkeypatch.setattr(cli, "train", explode)
        assert main(["train", "--out", str(tmp_path)]) == EXIT_NUMERIC

    def test_input_error_exits_1(self, tmp_path: Path) -> None:
        """Test that an out-of-range runtime argument maps to exit code 1."""
        args = ["mi-bench", "--rho", "1.0", "--batch", "8", "--steps", "1", "--out", str(tmp_path / "mi.csv")]
        assert main(args) == EXIT_FAILURE

    def test_mi_bench(self, tmp_path: Path) -> None:
        """Test that mi-bench writes its CSV."""
        out = tmp_path / "mi.csv"
        assert main(["mi-bench", "--rho", "0,0.5", "--batch", "8", "--steps", "2", "--out", str(out)]) == EXIT_OK
        assert len(out.read_text().splitlines()) == 3

    def test_unknown_variant_exits_2(self, presets_env: None, tiny_conf: Path, tmp_path: Path) -> None:
        """Test that an unknown ablation variant maps to exit code 2."""
        args = ["ablate", "--config", str(tiny_conf), "--variants", "nope", "--seeds", "0", "--out", str(tmp_path)]
        assert main(args) == EXIT_CONFIG

    def test_ablate(self, presets_env: None, tiny_conf: Path, tmp_path: Path) -> None:
        """Test a one-variant, one-seed ablation end to end."""
        out = tmp_path / "ablation"
        args = ["ablate", "--config", str(tiny_conf), "--variants", "crl_cpc", "--seeds", "0", "--out", str(out)]
        assert main(args) == EXIT_OK
        assert (out / "ablation_summary.csv").exists()
        assert (out / "crl_cpc" / "seed_0" / "metrics.csv").exists()
