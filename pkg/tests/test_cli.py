import json
import re
import subprocess
import sys
import time

import pytest

from firewatch.cli import run
from firewatch.dataset import load_dataset
from firewatch.svm import load_model, predict_many


@pytest.fixture()
def pipeline(tmp_path):
    """generate -> split -> train, returning the working paths."""
    paths = {
        "data": tmp_path / "d.csv",
        "parts": tmp_path / "parts",
        "model": tmp_path / "fire.model",
    }
    assert run(["generate", "--n", "300", "--out", str(paths["data"]), "--seed", "11"]) == 0
    assert run(["split", "--in", str(paths["data"]), "--out-dir", str(paths["parts"])]) == 0
    assert (
        run(["train", "--in", str(paths["parts"] / "train.csv"), "--model", str(paths["model"])])
        == 0
    )
    return paths


class TestExitCodes:
    def test_unknown_subcommand_is_usage_error(self, capsys):
        assert run(["frobnicate"]) == 1

    def test_missing_required_flag_is_usage_error(self, capsys):
        assert run(["train", "--model", "x"]) == 1

    def test_no_arguments_is_usage_error(self, capsys):
        assert run([]) == 1

    def test_help_exits_zero(self, capsys):
        assert run(["--help"]) == 0
        assert "simulate" in capsys.readouterr().out

    def test_missing_file_is_runtime_error(self, tmp_path, capsys):
        code = run(["train", "--in", str(tmp_path / "nope.csv"), "--model", str(tmp_path / "m")])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_bad_point_is_runtime_error(self, pipeline, capsys):
        code = run(["predict", "--model", str(pipeline["model"]), "--point", "1,2"])
        assert code == 2


class TestGenerateSplit:
    def test_split_sizes(self, tmp_path, capsys):
        data = tmp_path / "d.csv"
        parts = tmp_path / "parts"
        assert run(["generate", "--n", "700", "--out", str(data), "--seed", "0"]) == 0
        assert run(["split", "--in", str(data), "--out-dir", str(parts)]) == 0
        sizes = [len(load_dataset(parts / f"{name}.csv")) for name in ("train", "test", "validation")]
        assert sizes == [420, 140, 140]

    def test_generate_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert run(["generate", "--n", "200", "--out", str(out), "--seed", "5"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_custom_rule_flags(self, tmp_path):
        out = tmp_path / "d.csv"
        code = run(
            [
                "generate", "--n", "50", "--out", str(out),
                "--rule-weights", "1,0,0", "--rule-threshold", "1e9",
            ]
        )
        assert code == 0
        assert set(load_dataset(out).labels()) == {0}


class TestTrainPredict:
    def test_train_reports_status(self, pipeline, capsys):
        # retrain to capture output
        assert run(["train", "--in", str(pipeline["parts"] / "train.csv"),
                    "--model", str(pipeline["model"])]) == 0
        out = capsys.readouterr().out
        assert re.search(r"support vectors: \d+", out)
        assert "converged:" in out

    def test_predict_point_prints_single_label(self, pipeline, capsys):
        assert run(["predict", "--model", str(pipeline["model"]), "--point", "45,90,800"]) == 0
        out = capsys.readouterr().out.strip()
        assert out in ("0", "1")

    def test_predict_csv_matches_in_process_model(self, pipeline, capsys):
        test_csv = pipeline["parts"] / "test.csv"
        assert run(["predict", "--model", str(pipeline["model"]), "--in", str(test_csv)]) == 0
        printed = [int(line) for line in capsys.readouterr().out.split()]
        model = load_model(pipeline["model"])
        rows = load_dataset(test_csv).rows
        assert printed == predict_many(model, [row.features for row in rows])

    def test_model_file_deterministic(self, pipeline, tmp_path):
        other = tmp_path / "again.model"
        assert run(["train", "--in", str(pipeline["parts"] / "train.csv"), "--model", str(other)]) == 0
        assert other.read_bytes() == pipeline["model"].read_bytes()


class TestEvaluate:
    def test_text_report_and_outputs(self, pipeline, tmp_path, capsys):
        roc_json = tmp_path / "roc.json"
        code = run(
            ["evaluate", "--model", str(pipeline["model"]),
             "--in", str(pipeline["parts"] / "test.csv"), "--roc-out", str(roc_json)]
        )
        assert code == 0
        out = capsys.readouterr().out
        for key in ("tp=", "tn=", "fp=", "fn=", "tpr=", "fpr=", "precision=",
                    "accuracy=", "error_rate=", "n=", "auc="):
            assert key in out
        assert roc_json.exists()
        assert roc_json.with_suffix(".png").exists()
        payload = json.loads(roc_json.read_text())
        assert 0.0 <= payload["auc"] <= 1.0

    def test_json_mode(self, pipeline, tmp_path, capsys):
        roc_json = tmp_path / "roc.json"
        code = run(
            ["evaluate", "--model", str(pipeline["model"]),
             "--in", str(pipeline["parts"] / "test.csv"),
             "--roc-out", str(roc_json), "--json", "--no-figures"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["n"] == payload["tp"] + payload["tn"] + payload["fp"] + payload["fn"]
        assert payload["accuracy"] + payload["error_rate"] == pytest.approx(1.0)
        assert not roc_json.with_suffix(".png").exists()

    def test_single_class_test_set_skips_roc(self, pipeline, tmp_path, capsys):
        lopsided = tmp_path / "ones.csv"
        lopsided.write_text("Temp,Smoke,Flame,Label\n45,90,800,1\n46,91,810,1\n")
        roc_json = tmp_path / "roc.json"
        code = run(
            ["evaluate", "--model", str(pipeline["model"]), "--in", str(lopsided),
             "--roc-out", str(roc_json), "--no-figures"]
        )
        assert code == 0
        assert "single class" in capsys.readouterr().err
        assert not roc_json.exists()


class TestVisualize:
    def test_emits_data_and_figures(self, pipeline, tmp_path, capsys):
        viz = tmp_path / "viz"
        code = run(["visualize", "--in", str(pipeline["data"]), "--out-dir", str(viz)])
        assert code == 0
        for name in ("lag.csv", "corr.json", "andrews.csv", "lag.png", "corr.png", "andrews.png"):
            assert (viz / name).exists(), name

    def test_no_figures_mode(self, pipeline, tmp_path, capsys):
        viz = tmp_path / "viz"
        code = run(
            ["visualize", "--in", str(pipeline["data"]), "--out-dir", str(viz), "--no-figures"]
        )
        assert code == 0
        assert (viz / "lag.csv").exists()
        assert not (viz / "lag.png").exists()

    def test_json_manifest(self, pipeline, tmp_path, capsys):
        viz = tmp_path / "viz"
        code = run(
            ["visualize", "--in", str(pipeline["data"]), "--out-dir", str(viz),
             "--json", "--no-figures", "--column", "Flame", "--lag", "2"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["lag_pairs"] == payload["rows"] - 2
        assert set(payload["files"]) == {"lag_csv", "corr_json", "andrews_csv"}


class TestSimulateProcess:
    def test_simulate_and_ingest_as_processes(self, sample_path, tmp_path):
        proc = subprocess.Popen(
            [sys.executable, "-m", "firewatch.cli", "simulate",
             "--replay", str(sample_path), "--listen", "127.0.0.1:0",
             "--max-requests", "5"],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
        )
        try:
            line = proc.stdout.readline().strip()
            match = re.search(r"(http://[\d.]+:\d+/data)", line)
            assert match, f"no url in {line!r}"
            out = tmp_path / "cap.csv"
            code = run(
                ["ingest", "--endpoint", match.group(1), "--out", str(out),
                 "--interval-ms", "10", "--count", "5", "--label", "none"]
            )
            assert code == 0
            assert len(out.read_text().splitlines()) == 6
            proc.wait(timeout=10)
        finally:
            if proc.poll() is None:
                proc.kill()
                proc.wait()
