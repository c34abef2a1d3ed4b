import numpy as np
import pytest

from cpmtl.checkpoint import load_checkpoint
from cpmtl.cli import build_parser, run_cli


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    """A tiny real training run through the CLI entry point."""
    root = tmp_path_factory.mktemp("cli")
    ckpt_path = root / "run.ckpt"
    log_path = root / "run.log"
    rc = run_cli(
        [
            "train",
            "--problem",
            "synthetic",
            "--steps",
            "50",
            "--seed",
            "1",
            "--log",
            str(log_path),
            "--out",
            str(ckpt_path),
        ]
    )
    assert rc == 0
    return root, ckpt_path, log_path


class TestUsageErrors:
    def test_missing_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args([])
        assert exc.value.code == 2

    def test_unknown_problem_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            run_cli(["train", "--problem", "knapsack", "--out", "x.ckpt"])
        assert exc.value.code == 2

    def test_missing_required_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            run_cli(["sweep", "--samples", "5"])
        assert exc.value.code == 2


class TestRuntimeErrors:
    def test_missing_checkpoint_exits_1(self, tmp_path, capsys):
        rc = run_cli(["eval", "--ckpt", str(tmp_path / "absent.ckpt")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_corrupt_checkpoint_exits_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.ckpt"
        bad.write_bytes(b"not a checkpoint at all")
        rc = run_cli(["sweep", "--ckpt", str(bad), "--out", str(tmp_path / "o.csv")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_invalid_config_exits_1(self, tmp_path, capsys):
        rc = run_cli(
            ["train", "--problem", "synthetic", "--steps", "0", "--out", str(tmp_path / "x.ckpt")]
        )
        assert rc == 1


class TestTrain:
    def test_writes_checkpoint_and_log(self, trained):
        _, ckpt_path, log_path = trained
        ckpt = load_checkpoint(ckpt_path)
        assert ckpt.step == 50
        lines = log_path.read_text().strip().split("\n")
        assert len(lines) == 50
        assert lines[0].split(" ")[0] == "1"

    def test_summary_line_printed(self, tmp_path, capsys):
        rc = run_cli(
            [
                "train",
                "--problem",
                "synthetic",
                "--steps",
                "2",
                "--out",
                str(tmp_path / "t.ckpt"),
            ]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "trained 2 steps" in out


class TestSweepEvalFlow:
    def test_sweep_writes_csv_and_figure(self, trained, capsys):
        root, ckpt_path, _ = trained
        csv = root / "front.csv"
        fig = root / "front.png"
        rc = run_cli(
            [
                "sweep",
                "--ckpt",
                str(ckpt_path),
                "--samples",
                "12",
                "--out",
                str(csv),
                "--plot",
                str(fig),
            ]
        )
        assert rc == 0
        lines = csv.read_text().strip().split("\n")
        assert lines[0] == "p_1,p_2,f_1,f_2"
        assert len(lines) == 13
        assert fig.exists() and fig.stat().st_size > 0
        assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_eval_writes_metrics_and_figure(self, trained, capsys):
        root, ckpt_path, _ = trained
        metrics_path = root / "metrics.txt"
        fig = root / "eval.png"
        rc = run_cli(
            [
                "eval",
                "--ckpt",
                str(ckpt_path),
                "--samples",
                "12",
                "--out",
                str(metrics_path),
                "--plot",
                str(fig),
            ]
        )
        assert rc == 0
        doc = metrics_path.read_text()
        parsed = dict(line.split(" ") for line in doc.strip().split("\n"))
        for key in (
            "hypervolume",
            "mean_oracle_distance",
            "max_oracle_gap",
            "region_compliance_rate",
            "dominated_count",
        ):
            assert key in parsed
        assert capsys.readouterr().out.count("hypervolume") == 1
        assert fig.exists() and fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_eval_stdout_matches_file(self, trained, capsys):
        root, ckpt_path, _ = trained
        out_path = root / "metrics2.txt"
        run_cli(["eval", "--ckpt", str(ckpt_path), "--samples", "8", "--out", str(out_path)])
        captured = capsys.readouterr().out
        assert out_path.read_text() in captured


class TestGradcheck:
    def test_passes_at_default_tolerance(self, capsys):
        rc = run_cli(["gradcheck", "--probes", "3"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "OK" in out

    def test_fails_at_impossible_tolerance(self, capsys):
        rc = run_cli(["gradcheck", "--probes", "2", "--tolerance", "1e-300"])
        assert rc == 1
        assert "FAIL" in capsys.readouterr().err
