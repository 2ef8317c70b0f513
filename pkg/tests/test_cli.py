import json

import pytest

from conftest import MINI_DUMP, MINI_LABELS, REPO_ROOT
from secmine.cli import main

CONFIG = REPO_ROOT / "data" / "mini_pipeline.ini"


def run_cli(tmp_path, *args):
    import os

    old = os.getcwd()
    os.chdir(tmp_path)
    try:
        return main(["--config", str(CONFIG), *[str(a) for a in args]])
    finally:
        os.chdir(old)


@pytest.fixture(scope="module")
def pipeline_dir(tmp_path_factory):
    """Artifacts of the stages every CLI test builds on."""
    wd = tmp_path_factory.mktemp("pipeline")
    assert run_cli(wd, "tags", "--dump", MINI_DUMP, "--out", "tags.csv") == 0
    assert run_cli(wd, "ingest", "--dump", MINI_DUMP, "--tags-file", "tags.csv",
                   "--out", "posts.jsonl") == 0
    assert run_cli(wd, "sentences", "--posts", "posts.jsonl", "--out", "sentences.jsonl") == 0
    return wd


class TestStages:
    def test_tags_csv_shape(self, pipeline_dir):
        lines = (pipeline_dir / "tags.csv").read_text().splitlines()
        assert lines[0] == "tag,count_in_p,count_in_dump,mu,nu,selected"
        rows = [l.split(",") for l in lines[1:]]
        assert any(r[5] == "false" for r in rows)  # "python" fails mu on the fixture
        assert any(r[5] == "true" for r in rows)

    def test_manifest_written(self, pipeline_dir):
        manifest = json.loads((pipeline_dir / "tags.manifest.json").read_text())
        assert manifest["stage"] == "tags"
        assert "config_hash" in manifest and "wall_time_s" in manifest
        assert manifest["versions"]["secmine"]

    def test_sample_deterministic(self, pipeline_dir):
        assert run_cli(pipeline_dir, "sample", "--sentences", "sentences.jsonl",
                       "--out", "s1.csv") == 0
        assert run_cli(pipeline_dir, "sample", "--sentences", "sentences.jsonl",
                       "--out", "s2.csv") == 0
        assert (pipeline_dir / "s1.csv").read_bytes() == (pipeline_dir / "s2.csv").read_bytes()

    def test_train_predict_eval_chain(self, pipeline_dir):
        assert run_cli(pipeline_dir, "train", "--sentences", "sentences.jsonl",
                       "--labels", MINI_LABELS, "--out", "model.json",
                       "--cv-report", "cv_report.json") == 0
        assert run_cli(pipeline_dir, "predict", "--model", "model.json",
                       "--sentences", "sentences.jsonl", "--out", "predictions.jsonl") == 0
        assert run_cli(pipeline_dir, "eval", "--pred", "predictions.jsonl",
                       "--labels", MINI_LABELS, "--out", "eval_report.json",
                       "--csv", "eval_report.csv", "--roc", "roc.csv") == 0
        report = json.loads((pipeline_dir / "eval_report.json").read_text())
        assert set(report) >= {"precision", "recall", "f1", "accuracy", "mcc", "auc"}
        assert report["n"] > 0
        cv = json.loads((pipeline_dir / "cv_report.json").read_text())
        assert len(cv["folds"]) == 5
        assert len(cv["grid"]) == 2  # from the config lattice
        roc = (pipeline_dir / "roc.csv").read_text().splitlines()
        assert roc[0] == "threshold,fpr,tpr"
        csv_lines = (pipeline_dir / "eval_report.csv").read_text().splitlines()
        assert csv_lines[0].startswith("precision,recall,f1")
        assert len(csv_lines) == 2

    def test_eval_annotation_tabulation(self, pipeline_dir):
        assert run_cli(pipeline_dir, "eval", "--pred", "predictions.jsonl",
                       "--labels", MINI_LABELS, "--out", "eval2.json",
                       "--misclassified", "mis.csv", "--sentences", "sentences.jsonl") == 0
        mis = pipeline_dir / "mis.csv"
        lines = mis.read_text().splitlines()
        annotated = [lines[0]]
        for line in lines[1:]:
            if line.split(",")[1] in ("FP", "FN"):
                line = line + "AmbiguousKeywords"
            annotated.append(line)
        (pipeline_dir / "mis_annotated.csv").write_text("\n".join(annotated) + "\n")
        assert run_cli(pipeline_dir, "eval", "--pred", "predictions.jsonl",
                       "--labels", MINI_LABELS, "--out", "eval3.json",
                       "--annotations", "mis_annotated.csv") == 0
        counts = json.loads((pipeline_dir / "mis_annotated.counts.json").read_text())
        assert sum(counts.values()) == len(lines) - 1 - sum(
            1 for l in lines[1:] if l.split(",")[1] == "SKIPPED")

    def test_topics_save_theta(self, pipeline_dir):
        assert run_cli(pipeline_dir, "predict", "--model", "model.json",
                       "--sentences", "sentences.jsonl", "--out", "p2.jsonl") == 0
        assert run_cli(pipeline_dir, "topics", "--sentences", "sentences.jsonl",
                       "--predictions", "p2.jsonl", "--k-grid", "2",
                       "--iterations", "30", "--burn-in", "10",
                       "--save-theta", "--out-dir", "topics_theta") == 0
        import numpy as np

        theta = np.load(pipeline_dir / "topics_theta" / "theta.npy")
        assert theta.shape[1] == 2
        assert np.allclose(theta.sum(axis=1), 1.0, atol=1e-9)

    def test_agreement_stage(self, pipeline_dir, tmp_path):
        from secmine.classify import write_labels_csv

        write_labels_csv({"a-0": 1, "b-0": 0}, tmp_path / "ra.csv")
        write_labels_csv({"a-0": 1, "b-0": 1}, tmp_path / "rb.csv")
        assert run_cli(tmp_path, "agreement", "--rater-a", "ra.csv", "--rater-b", "rb.csv",
                       "--out", "agreement.json", "--disagreements", "dis.csv") == 0
        report = json.loads((tmp_path / "agreement.json").read_text())
        assert report["percent"] == 0.5
        assert (tmp_path / "dis.csv").read_text().splitlines()[1].startswith("b-0,")


class TestErrorHandling:
    def test_missing_artifact_names_producing_stage(self, tmp_path, capsys):
        rc = main(["sentences", "--posts", str(tmp_path / "nope.jsonl"), "--out", "x"])
        assert rc == 2
        err = json.loads(capsys.readouterr().err)
        assert err["stage"] == "sentences"
        assert "ingest" in err["error"]

    def test_eval_missing_predictions(self, tmp_path, capsys):
        rc = main(["eval", "--pred", str(tmp_path / "missing.jsonl"),
                   "--labels", str(MINI_LABELS)])
        assert rc == 2
        err = json.loads(capsys.readouterr().err)
        assert err["stage"] == "eval"
        assert "predict" in err["error"]

    def test_bad_config_path(self, tmp_path, capsys):
        rc = main(["--config", str(tmp_path / "missing.ini"), "report",
                   "--dir", str(tmp_path), "--out", str(tmp_path / "r.json")])
        assert rc == 2

    def test_report_never_recomputes(self, tmp_path):
        (tmp_path / "eval_report.json").write_text('{"f1": 0.5, "precision": 0.5}')
        rc = main(["report", "--dir", str(tmp_path), "--out", str(tmp_path / "summary.json")])
        assert rc == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["present"] == ["eval_report.json"]
        assert summary["eval"]["f1"] == 0.5
