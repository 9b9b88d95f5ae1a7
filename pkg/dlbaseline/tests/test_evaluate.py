"""Fixed-fold evaluation: schema validity, fold fidelity, determinism."""

import json
import os

import numpy as np
import pytest

from dlbaseline.cli import main
from dlbaseline.errors import DataFileError
from dlbaseline.training import (
    TrainConfig,
    accuracy,
    confusion_matrix,
    evaluate_dl,
    macro_f1,
    write_report,
)

SCHEMA_PATH = os.path.join(os.path.dirname(__file__), "..", "..", "docs", "cvreport.schema.json")

CHEAP = dict(batch_size=8, max_epochs=3, patience=2, val_fraction=0.25)


@pytest.fixture(scope="session")
def tiny_report(tiny_corpus):
    cfg = TrainConfig(seed=1, **CHEAP)
    return evaluate_dl(tiny_corpus["manifest"], tiny_corpus["folds"], "calltype", cfg)


def test_metric_helpers():
    conf = confusion_matrix(np.array([0, 0, 1, 1]), np.array([0, 0, 0, 0]), 2)
    assert conf.tolist() == [[2, 0], [2, 0]]
    assert accuracy(conf) == 0.5
    assert macro_f1(conf) == pytest.approx(1.0 / 3.0)
    perfect = confusion_matrix(np.array([0, 1, 2]), np.array([0, 1, 2]), 3)
    assert accuracy(perfect) == 1.0
    assert macro_f1(perfect) == 1.0


def test_report_validates_against_published_schema(tiny_report):
    jsonschema = pytest.importorskip("jsonschema")
    with open(SCHEMA_PATH) as fh:
        schema = json.load(fh)
    jsonschema.validate(tiny_report, schema)


def test_report_mirrors_the_fold_file(tiny_corpus, tiny_report):
    assert tiny_report["protocol"] == {"k": 2, "r": 0, "seed": 1}
    assert tiny_report["classes"] == ["HF", "LF"]
    assert [f["index"] for f in tiny_report["folds"]] == [0, 1]
    # Each fold's confusion must account for exactly that fold's test rows.
    for fold_entry in tiny_report["folds"]:
        rows = [r for r in tiny_corpus["rows"] if r[3] == fold_entry["index"]]
        by_class = {"HF": 0, "LF": 0}
        for _, _, ct, _ in rows:
            by_class[ct] += 1
        row_sums = [sum(r) for r in fold_entry["confusion"]]
        assert row_sums == [by_class["HF"], by_class["LF"]]


def test_summary_aggregates_folds(tiny_report):
    accs = [f["test_accuracy"] for f in tiny_report["folds"]]
    assert tiny_report["summary"]["test_accuracy_mean"] == pytest.approx(np.mean(accs))
    assert tiny_report["summary"]["test_accuracy_std"] == pytest.approx(np.std(accs, ddof=1))


def test_evaluation_is_deterministic(tiny_corpus, tiny_report):
    cfg = TrainConfig(seed=1, **CHEAP)
    again = evaluate_dl(tiny_corpus["manifest"], tiny_corpus["folds"], "calltype", cfg)
    assert json.dumps(again, sort_keys=True) == json.dumps(tiny_report, sort_keys=True)


def test_cow_target_reads_classes_from_the_fold_file(tiny_corpus):
    cfg = TrainConfig(seed=2, batch_size=8, max_epochs=1, val_fraction=0.0)
    report = evaluate_dl(tiny_corpus["manifest"], tiny_corpus["folds"], "cowid", cfg)
    assert report["classes"] == ["c1", "c2", "c3", "c4"]
    assert all(np.array(f["confusion"]).shape == (4, 4) for f in report["folds"])


def test_fold_rows_must_exist_in_the_manifest(tiny_corpus, tmp_path):
    folds = tmp_path / "folds.csv"
    with open(tiny_corpus["folds"]) as fh:
        folds.write_text(fh.read() + "ghost,c1,HF,0\n")
    with pytest.raises(DataFileError, match="ghost"):
        evaluate_dl(tiny_corpus["manifest"], str(folds), "calltype", TrainConfig())


def test_write_report_round_trips(tiny_report, tmp_path):
    path = tmp_path / "report.json"
    write_report(tiny_report, str(path))
    assert json.loads(path.read_text()) == tiny_report
    assert path.read_text().endswith("\n")


def test_cli_writes_report_and_summary(tiny_corpus, tmp_path, capsys):
    out = tmp_path / "dl_report.json"
    code = main([
        tiny_corpus["manifest"],
        tiny_corpus["folds"],
        "--task", "calltype",
        "--epochs", "2",
        "--batch-size", "8",
        "--seed", "4",
        "--out", str(out),
    ])
    captured = capsys.readouterr()
    assert code == 0
    assert "calltype/all k=2" in captured.out
    assert "test accuracy" in captured.out
    report = json.loads(out.read_text())
    assert report["protocol"]["r"] == 0


def test_cli_usage_errors(tiny_corpus, tmp_path, capsys):
    assert main(["--task", "calltype"]) == 64
    capsys.readouterr()
    missing = str(tmp_path / "gone.csv")
    assert main([missing, tiny_corpus["folds"], "--task", "calltype"]) == 64
    assert "error:" in capsys.readouterr().err


@pytest.mark.dataset
def test_call_type_accuracy_on_released_recordings(dataset_paths):
    manifest, folds = dataset_paths
    report = evaluate_dl(manifest, folds, "calltype", TrainConfig(seed=20220711))
    assert report["summary"]["test_accuracy_mean"] >= 0.80
