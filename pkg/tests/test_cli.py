import json
import shutil
from pathlib import Path

import pytest

from slotshot.cli import main
from slotshot.synth import main as synth_main


def read_rows(path: Path) -> list[dict]:
    with path.open() as fh:
        return [json.loads(line) for line in fh]


@pytest.fixture(scope="module")
def workdir(tmp_path_factory) -> Path:
    """One synthetic corpus pushed through every pipeline stage."""
    root = tmp_path_factory.mktemp("cli")
    corpus = root / "corpus"
    assert synth_main(["--out", str(corpus), "--seed", "13", "--entities", "50"]) == 0

    rc = main(
        [
            "build",
            "--docs", str(corpus / "documents.jsonl"),
            "--facts", str(corpus / "facts.jsonl"),
            "--entities", str(corpus / "entities.jsonl"),
            "--out", str(root / "instances.jsonl"),
            "--report", str(root / "build_report.json"),
        ]
    )
    assert rc == 0

    rc = main(
        [
            "querify",
            "--templates", str(corpus / "templates.jsonl"),
            "--instances", str(root / "instances.jsonl"),
            "--entities", str(corpus / "entities.jsonl"),
            "--out", str(root / "positives.jsonl"),
        ]
    )
    assert rc == 0

    rc = main(
        [
            "negatives",
            "--instances", str(root / "instances.jsonl"),
            "--templates", str(corpus / "templates.jsonl"),
            "--entities", str(corpus / "entities.jsonl"),
            "--seed", "7",
            "--out", str(root / "negatives.jsonl"),
            "--report", str(root / "neg_report.json"),
        ]
    )
    assert rc == 0

    examples = root / "examples.jsonl"
    examples.write_bytes(
        (root / "positives.jsonl").read_bytes() + (root / "negatives.jsonl").read_bytes()
    )
    return root


class TestPipelineStages:
    def test_build_report_aligns_everything(self, workdir):
        report = json.loads((workdir / "build_report.json").read_text())
        assert report["facts_total"] > 0
        assert report["facts_aligned"] == report["facts_total"]
        assert report["instances"] > 0

    def test_positive_ids_and_polarity(self, workdir):
        rows = read_rows(workdir / "positives.jsonl")
        assert rows
        assert all(r["id"].startswith("pos::") for r in rows)
        assert all(r["answers"] for r in rows)

    def test_negatives_hit_the_ratio_target(self, workdir):
        report = json.loads((workdir / "neg_report.json").read_text())
        positives = len(read_rows(workdir / "positives.jsonl"))
        assert report["positives"] == positives
        assert report["target"] == positives  # default --ratio 1.0
        assert report["generated"] == report["target"]
        rows = read_rows(workdir / "negatives.jsonl")
        assert len(rows) == report["generated"]
        assert all(not r["answers"] for r in rows)

    def test_stage_reruns_are_byte_identical(self, workdir, tmp_path):
        again = tmp_path / "neg_again.jsonl"
        rc = main(
            [
                "negatives",
                "--instances", str(workdir / "instances.jsonl"),
                "--templates", str(workdir / "corpus" / "templates.jsonl"),
                "--entities", str(workdir / "corpus" / "entities.jsonl"),
                "--seed", "7",
                "--out", str(again),
                "--report", str(tmp_path / "r.json"),
            ]
        )
        assert rc == 0
        assert again.read_bytes() == (workdir / "negatives.jsonl").read_bytes()

    def test_missing_input_file_is_usage_error(self, workdir, tmp_path):
        rc = main(
            [
                "build",
                "--docs", str(workdir / "no_such.jsonl"),
                "--facts", str(workdir / "corpus" / "facts.jsonl"),
                "--entities", str(workdir / "corpus" / "entities.jsonl"),
                "--out", str(tmp_path / "x.jsonl"),
            ]
        )
        assert rc == 1


class TestSplitCommand:
    def split_args(self, workdir, out_dir, kind, extra=()):
        return [
            "split",
            "--examples", str(workdir / "examples.jsonl"),
            "--kind", kind,
            "--seed", "3",
            "--out", str(out_dir),
            "--train-size", "120",
            "--dev-size", "30",
            "--test-size", "60",
            *extra,
        ]

    def test_entity_split_layout(self, workdir, tmp_path):
        out = tmp_path / "splits"
        rc = main(self.split_args(workdir, out, "entities", ["--folds", "2"]))
        assert rc == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["kind"] == "entities"
        assert len(manifest["folds"]) == 2
        for fold in ("fold00", "fold01"):
            for name in ("train", "dev", "test"):
                rows = read_rows(out / fold / f"{name}.jsonl")
                n_pos = sum(1 for r in rows if r["answers"])
                assert n_pos == len(rows) - n_pos  # balanced 1:1

    def test_template_split_writes_seen_test(self, workdir, tmp_path):
        out = tmp_path / "tsplits"
        extra = [
            "--templates", str(workdir / "corpus" / "templates.jsonl"),
            "--entities", str(workdir / "corpus" / "entities.jsonl"),
        ]
        rc = main(self.split_args(workdir, out, "templates", extra))
        assert rc == 0
        seen = read_rows(out / "fold00" / "seen_test.jsonl")
        assert seen
        assert all(r["id"].endswith("::seen") for r in seen if r["answers"])

    def test_template_split_without_inventory_fails(self, workdir, tmp_path):
        rc = main(self.split_args(workdir, tmp_path / "bad", "templates"))
        assert rc == 2

    def test_relation_split_partitions_relations(self, workdir, tmp_path):
        out = tmp_path / "rsplits"
        rc = main(self.split_args(workdir, out, "relations"))
        assert rc == 0
        fold = out / "fold00"
        seen = {}
        for name in ("train", "dev", "test"):
            seen[name] = {r["relation_id"] for r in read_rows(fold / f"{name}.jsonl")}
        assert not seen["train"] & seen["test"]
        assert not seen["train"] & seen["dev"]
        assert not seen["dev"] & seen["test"]

    def test_bad_relation_counts_flag(self, workdir, tmp_path):
        rc = main(
            self.split_args(
                workdir, tmp_path / "x", "relations", ["--relation-counts", "1,2"]
            )
        )
        assert rc == 1


class TestPredictAndEval:
    def test_lexical_predictions_are_deterministic(self, workdir, tmp_path):
        first, second = tmp_path / "p1.jsonl", tmp_path / "p2.jsonl"
        for out in (first, second):
            rc = main(
                [
                    "predict",
                    "--in", str(workdir / "examples.jsonl"),
                    "--out", str(out),
                    "--scorer", "lexical",
                ]
            )
            assert rc == 0
        assert first.read_bytes() == second.read_bytes()
        rows = read_rows(first)
        assert len(rows) == len(read_rows(workdir / "examples.jsonl"))

    def test_eval_writes_report(self, workdir, tmp_path):
        pred = tmp_path / "pred.jsonl"
        main(
            [
                "predict",
                "--in", str(workdir / "examples.jsonl"),
                "--out", str(pred),
                "--scorer", "lexical",
            ]
        )
        report_path = tmp_path / "report.json"
        rc = main(
            [
                "eval",
                "--pred", str(pred),
                "--gold", str(workdir / "examples.jsonl"),
                "--out", str(report_path),
            ]
        )
        assert rc == 0
        report = json.loads(report_path.read_text())
        assert set(report) == {"precision", "recall", "f1", "counts"}
        assert sum(report["counts"].values()) == len(read_rows(pred))

    def test_parallel_jobs_match_serial(self, workdir, tmp_path):
        serial, parallel = tmp_path / "s.jsonl", tmp_path / "p.jsonl"
        for out, jobs in ((serial, "1"), (parallel, "4")):
            rc = main(
                [
                    "predict",
                    "--in", str(workdir / "examples.jsonl"),
                    "--out", str(out),
                    "--scorer", "random-ne",
                    "--seed", "11",
                    "--jobs", jobs,
                ]
            )
            assert rc == 0
        assert serial.read_bytes() == parallel.read_bytes()

    def test_ensemble_merges_per_sentence(self, workdir, tmp_path):
        out = tmp_path / "ens.jsonl"
        rc = main(
            [
                "predict",
                "--in", str(workdir / "positives.jsonl"),
                "--out", str(out),
                "--scorer", "lexical",
                "--ensemble", "2",
                "--seed", "5",
            ]
        )
        assert rc == 0
        merged = read_rows(out)
        examples = read_rows(workdir / "positives.jsonl")
        groups = {(r["relation_id"], r["entity_id"], r["sentence"]["document_id"], r["sentence"]["index"]) for r in examples}
        assert len(merged) == len(groups)

    def test_random_ne_without_seed_is_usage_error(self, workdir, tmp_path):
        rc = main(
            [
                "predict",
                "--in", str(workdir / "examples.jsonl"),
                "--out", str(tmp_path / "x.jsonl"),
                "--scorer", "random-ne",
            ]
        )
        assert rc == 1

    def test_unknown_scorer_is_usage_error(self, workdir, tmp_path):
        rc = main(
            [
                "predict",
                "--in", str(workdir / "examples.jsonl"),
                "--out", str(tmp_path / "x.jsonl"),
                "--scorer", "psychic",
            ]
        )
        assert rc == 1

    def test_unreachable_external_scorer_exits_3(self, workdir, tmp_path):
        rc = main(
            [
                "predict",
                "--in", str(workdir / "examples.jsonl"),
                "--out", str(tmp_path / "x.jsonl"),
                "--scorer", "external:127.0.0.1:1",
                "--timeout", "0.5",
            ]
        )
        assert rc == 3

    def test_duplicate_prediction_ids_exit_2(self, workdir, tmp_path):
        example_id = read_rows(workdir / "examples.jsonl")[0]["id"]
        record = {
            "example_id": example_id,
            "answer_text": None,
            "probability": 0.5,
            "null_probability": 0.5,
        }
        pred = tmp_path / "dup.jsonl"
        pred.write_text(json.dumps(record) + "\n" + json.dumps(record) + "\n")
        rc = main(
            ["eval", "--pred", str(pred), "--gold", str(workdir / "examples.jsonl")]
        )
        assert rc == 2

    def test_partial_prediction_file_exits_2(self, workdir, tmp_path):
        pred = tmp_path / "partial.jsonl"
        pred.write_text(json.dumps({"partial": True, "expected": 10}) + "\n")
        rc = main(
            ["eval", "--pred", str(pred), "--gold", str(workdir / "examples.jsonl")]
        )
        assert rc == 2


class TestCurveCommand:
    def test_explicit_thresholds(self, workdir, tmp_path):
        pred = tmp_path / "pred.jsonl"
        main(
            [
                "predict",
                "--in", str(workdir / "examples.jsonl"),
                "--out", str(pred),
                "--scorer", "lexical",
            ]
        )
        out = tmp_path / "curve.csv"
        rc = main(
            [
                "curve",
                "--pred", str(pred),
                "--gold", str(workdir / "examples.jsonl"),
                "--out", str(out),
                "--thresholds", "0.1,0.5,0.9",
            ]
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "threshold,precision,recall"
        assert len(lines) == 4
        recalls = [float(line.split(",")[2]) for line in lines[1:]]
        assert recalls == sorted(recalls, reverse=True)

    def test_bad_threshold_string(self, workdir, tmp_path):
        pred = tmp_path / "pred.jsonl"
        main(
            [
                "predict",
                "--in", str(workdir / "positives.jsonl"),
                "--out", str(pred),
                "--scorer", "lexical",
            ]
        )
        rc = main(
            [
                "curve",
                "--pred", str(pred),
                "--gold", str(workdir / "positives.jsonl"),
                "--out", str(tmp_path / "c.csv"),
                "--thresholds", "low,high",
            ]
        )
        assert rc == 1


class TestServeDataDirectory:
    def test_service_loads_from_pipeline_output(self, workdir, tmp_path):
        from slotshot.annotation.service import AnnotationService

        data = tmp_path / "anno"
        data.mkdir()
        for name in ("relations.jsonl", "entities.jsonl"):
            shutil.copy(workdir / "corpus" / name, data / name)
        shutil.copy(workdir / "instances.jsonl", data / "instances.jsonl")
        service = AnnotationService.from_directory(data)
        try:
            relations = service.list_relations()
            assert relations
            assert sum(r["instances"] for r in relations) > 0
        finally:
            service.close()
