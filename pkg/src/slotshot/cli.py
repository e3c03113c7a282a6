"""Command line entry point.

Every pipeline stage reads and writes line-delimited JSON files, so stages
can be re-run independently. All randomness is seeded explicitly and output
records are sorted before writing; re-running a command with the same inputs
and flags produces byte-identical files.

Exit codes: 0 success, 1 usage, 2 data contract violation, 3 scorer or
service failure.
"""

from __future__ import annotations

import csv
import json
import logging
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

import click

from .builder import build_dataset, fact_from_dict
from .corpus import (
    RCExample,
    example_from_dict,
    example_to_dict,
    instance_from_dict,
    instance_to_dict,
    load_documents,
    load_entities,
    read_jsonl,
    write_jsonl,
)
from .engine import DecodeParams, Prediction, Span, decode, ensemble, score
from .errors import DataContractError, ScorerError, ServiceError
from .evaluation import aggregate_metrics, judge_instance, pr_curve
from .negatives import derive_seed, generate_negatives
from .querify import join_schema, load_templates
from .scorers import ExternalScorer, LexicalOverlapScorer, RandomNEScorer
from .splits import SplitSpec, make_splits

log = logging.getLogger("slotshot")


@click.group()
@click.option(
    "--log-level",
    default="warning",
    type=click.Choice(["debug", "info", "warning", "error"]),
    show_default=True,
)
def cli(log_level: str) -> None:
    """Slot filling as answerable and unanswerable reading comprehension."""
    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _write_report(report: dict, path: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stderr.write(text)


# ---------------------------------------------------------------------------
# pipeline stages

_IN_FILE = click.Path(exists=True, dir_okay=False)


@cli.command()
@click.option("--docs", required=True, type=_IN_FILE)
@click.option("--facts", required=True, type=_IN_FILE)
@click.option("--entities", "entities_path", required=True, type=_IN_FILE)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--report", "report_path", default=None, type=click.Path(dir_okay=False))
def build(docs: str, facts: str, entities_path: str, out: str, report_path: str | None) -> None:
    """Align facts with document sentences into slot filling instances."""
    documents = load_documents(docs)
    entities = load_entities(entities_path)
    fact_list = [fact_from_dict(r) for r in read_jsonl(facts)]
    instances, report = build_dataset(documents, entities, fact_list)
    write_jsonl(out, (instance_to_dict(i) for i in instances))
    _write_report(report.to_dict(), report_path)


@cli.command()
@click.option("--templates", "templates_path", required=True, type=_IN_FILE)
@click.option("--instances", "instances_path", required=True, type=_IN_FILE)
@click.option("--entities", "entities_path", required=True, type=_IN_FILE)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def querify(
    templates_path: str, instances_path: str, entities_path: str, out: str
) -> None:
    """Cross verified question templates with instances of their relation."""
    templates = [t for t in load_templates(templates_path) if t.status == "verified"]
    instances = [instance_from_dict(r) for r in read_jsonl(instances_path)]
    entities = load_entities(entities_path)
    examples = join_schema(templates, instances, entities)
    write_jsonl(out, (example_to_dict(e) for e in examples))
    log.info("querified %d instances into %d examples", len(instances), len(examples))


@cli.command()
@click.option("--instances", "instances_path", required=True, type=_IN_FILE)
@click.option("--templates", "templates_path", required=True, type=_IN_FILE)
@click.option("--entities", "entities_path", required=True, type=_IN_FILE)
@click.option("--ratio", default=1.0, show_default=True,
              help="Positives per negative in the final mix.")
@click.option("--seed", required=True, type=int)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--report", "report_path", default=None, type=click.Path(dir_okay=False))
def negatives(
    instances_path: str,
    templates_path: str,
    entities_path: str,
    ratio: float,
    seed: int,
    out: str,
    report_path: str | None,
) -> None:
    """Sample unanswerable question-sentence pairs by crossing relations."""
    instances = [instance_from_dict(r) for r in read_jsonl(instances_path)]
    templates = load_templates(templates_path)
    entities = load_entities(entities_path)
    examples, report = generate_negatives(instances, templates, entities, ratio, seed)
    write_jsonl(out, (example_to_dict(e) for e in examples))
    _write_report(report.to_dict(), report_path)


@cli.command()
@click.option("--examples", "examples_path", required=True, type=_IN_FILE)
@click.option("--kind", required=True,
              type=click.Choice(["entities", "templates", "relations"]))
@click.option("--seed", required=True, type=int)
@click.option("--folds", default=1, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--templates", "templates_path", default=None, type=_IN_FILE,
              help="Required for --kind templates.")
@click.option("--entities", "entities_path", default=None, type=_IN_FILE,
              help="Required for --kind templates.")
@click.option("--train-size", default=20_000, show_default=True)
@click.option("--dev-size", default=500, show_default=True)
@click.option("--test-size", default=2_000, show_default=True)
@click.option("--ratio", default=1.0, show_default=True)
@click.option("--relation-counts", default=None,
              help="train,dev,test relation counts for --kind relations.")
def split(
    examples_path: str,
    kind: str,
    seed: int,
    folds: int,
    out_dir: str,
    templates_path: str | None,
    entities_path: str | None,
    train_size: int,
    dev_size: int,
    test_size: int,
    ratio: float,
    relation_counts: str | None,
) -> None:
    """Generate train/dev/test folds that hold out entities, templates, or relations."""
    examples = [example_from_dict(r) for r in read_jsonl(examples_path)]
    counts = None
    if relation_counts is not None:
        try:
            parts = tuple(int(p) for p in relation_counts.split(","))
        except ValueError:
            raise click.UsageError("--relation-counts must be three integers a,b,c")
        if len(parts) != 3:
            raise click.UsageError("--relation-counts must be three integers a,b,c")
        counts = parts
    spec = SplitSpec(
        kind=kind,
        seed=seed,
        folds=folds,
        train_size=train_size,
        dev_size=dev_size,
        test_size=test_size,
        ratio=ratio,
        relation_counts=counts,
    )
    templates = load_templates(templates_path) if templates_path else None
    entities = load_entities(entities_path) if entities_path else None
    results = make_splits(examples, spec, templates, entities)

    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    manifest = {"kind": kind, "seed": seed, "folds": []}
    for result in results:
        fold_dir = root / f"fold{result.fold:02d}"
        fold_dir.mkdir(parents=True, exist_ok=True)
        for name in ("train", "dev", "test"):
            rows = getattr(result, name)
            write_jsonl(fold_dir / f"{name}.jsonl", (example_to_dict(e) for e in rows))
        if result.seen_test is not None:
            write_jsonl(
                fold_dir / "seen_test.jsonl",
                (example_to_dict(e) for e in result.seen_test),
            )
        manifest["folds"].append(result.manifest)
    (root / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


# ---------------------------------------------------------------------------
# prediction and evaluation


def _build_scorer(spec: str, seed: int | None, timeout: float):
    if spec == "random-ne":
        if seed is None:
            raise click.UsageError("--scorer random-ne requires --seed")
        return RandomNEScorer(seed)
    if spec == "lexical":
        return LexicalOverlapScorer()
    if spec.startswith("external:"):
        address = spec[len("external:"):]
        host, sep, port = address.rpartition(":")
        if not sep or not host:
            raise click.UsageError(
                "--scorer external takes host:port, e.g. external:localhost:9090"
            )
        try:
            port_num = int(port)
        except ValueError:
            raise click.UsageError(f"bad external scorer port {port!r}")
        return ExternalScorer.connect_tcp(host, port_num, timeout=timeout)
    raise click.UsageError(f"unknown scorer {spec!r}")


def _decode_one(
    scorer, example: RCExample, params: DecodeParams
) -> Prediction:
    scores = score(scorer, example.question, example.sentence.token_texts())
    return decode(scores, example.sentence, params)


def _prediction_record(example_id: str, prediction: Prediction) -> dict:
    return {
        "example_id": example_id,
        "answer_text": None if prediction.answer is None else prediction.answer.text,
        "probability": prediction.probability,
        "null_probability": prediction.null_probability,
    }


@cli.command()
@click.option("--in", "in_path", required=True, type=_IN_FILE)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--scorer", "scorer_spec", required=True,
              help="random-ne, lexical, or external:host:port.")
@click.option("--seed", type=int, default=None,
              help="Required for random-ne and --ensemble.")
@click.option("--bias", default=0.0, show_default=True)
@click.option("--p-min", default=None, type=float)
@click.option("--max-span-len", default=10, show_default=True)
@click.option("--ensemble", "ensemble_k", default=0, show_default=True,
              help="Ask k templates per instance and merge their answers.")
@click.option("--jobs", default=1, show_default=True)
@click.option("--timeout", default=10.0, show_default=True,
              help="Per-request timeout for external scorers, seconds.")
def predict(
    in_path: str,
    out: str,
    scorer_spec: str,
    seed: int | None,
    bias: float,
    p_min: float | None,
    max_span_len: int,
    ensemble_k: int,
    jobs: int,
    timeout: float,
) -> None:
    """Decode an answer or an abstention for every example."""
    if ensemble_k < 0:
        raise click.UsageError("--ensemble must be >= 0")
    if ensemble_k and seed is None:
        raise click.UsageError("--ensemble requires --seed")
    if jobs < 1:
        raise click.UsageError("--jobs must be >= 1")
    examples = [example_from_dict(r) for r in read_jsonl(in_path)]
    params = DecodeParams(bias=bias, p_min=p_min, max_span_len=max_span_len)
    scorer = _build_scorer(scorer_spec, seed, timeout)

    if ensemble_k:
        groups: dict[tuple, list[RCExample]] = {}
        for example in examples:
            key = (example.relation_id, example.entity_id) + example.sentence.ref
            groups.setdefault(key, []).append(example)
        batches = []
        for key in sorted(groups):
            members = sorted(groups[key], key=lambda e: e.id)
            if len(members) > ensemble_k:
                rng = random.Random(derive_seed(seed, "ensemble", *key))
                members = sorted(rng.sample(members, ensemble_k), key=lambda e: e.id)
            batches.append(members)
        todo = [example for batch in batches for example in batch]
    else:
        batches = None
        todo = examples

    records = []
    try:
        if jobs > 1 and getattr(scorer, "thread_safe", False):
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                predictions = list(
                    pool.map(lambda e: _decode_one(scorer, e, params), todo)
                )
        else:
            predictions = [_decode_one(scorer, e, params) for e in todo]
        by_id = dict(zip((e.id for e in todo), predictions))
        if batches is None:
            records = [_prediction_record(e.id, by_id[e.id]) for e in examples]
        else:
            for members in batches:
                merged = ensemble([(e.id, by_id[e.id]) for e in members])
                records.append(_prediction_record(members[0].id, merged))
        records.sort(key=lambda r: r["example_id"])
        write_jsonl(out, records)
    except ScorerError:
        # Keep whatever finished, but make the truncation impossible to miss.
        records.sort(key=lambda r: r["example_id"])
        records.append({"partial": True, "expected": len(todo)})
        write_jsonl(out, records)
        raise
    finally:
        close = getattr(scorer, "close", None)
        if close is not None:
            close()


def _load_pairs(
    pred_path: str, gold_path: str
) -> list[tuple[Prediction, RCExample]]:
    examples = {r["id"]: example_from_dict(r) for r in read_jsonl(gold_path)}
    pairs = []
    seen = set()
    for record in read_jsonl(pred_path):
        if record.get("partial"):
            raise DataContractError(
                f"{pred_path} is a partial prediction file; re-run predict"
            )
        try:
            example_id = record["example_id"]
            text = record["answer_text"]
            probability = float(record["probability"])
            null_probability = float(record["null_probability"])
        except KeyError as exc:
            raise DataContractError(f"prediction record missing field {exc}") from exc
        if example_id in seen:
            raise DataContractError(f"duplicate prediction for {example_id!r}")
        seen.add(example_id)
        example = examples.get(example_id)
        if example is None:
            raise DataContractError(f"prediction for unknown example {example_id!r}")
        answer = None if text is None else Span(-1, -1, text)
        pairs.append((Prediction(answer, probability, null_probability), example))
    return pairs


@cli.command("eval")
@click.option("--pred", "pred_path", required=True, type=_IN_FILE)
@click.option("--gold", "gold_path", required=True, type=_IN_FILE)
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
def eval_cmd(pred_path: str, gold_path: str, out_path: str | None) -> None:
    """Score predictions against gold answers; writes a JSON report."""
    pairs = _load_pairs(pred_path, gold_path)
    judgments = [
        judge_instance(prediction, example.answers) for prediction, example in pairs
    ]
    report = aggregate_metrics(judgments).to_dict()
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


@cli.command()
@click.option("--pred", "pred_path", required=True, type=_IN_FILE)
@click.option("--gold", "gold_path", required=True, type=_IN_FILE)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--thresholds", default=None,
              help="Comma-separated list; default sweeps observed confidences.")
def curve(
    pred_path: str, gold_path: str, out_path: str, thresholds: str | None
) -> None:
    """Sweep the confidence threshold and write a precision/recall CSV."""
    pairs = _load_pairs(pred_path, gold_path)
    cutoffs = None
    if thresholds is not None:
        try:
            cutoffs = [float(p) for p in thresholds.split(",")]
        except ValueError:
            raise click.UsageError("--thresholds must be comma-separated numbers")
    points = pr_curve(
        [(prediction, example.answers) for prediction, example in pairs], cutoffs
    )
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["threshold", "precision", "recall"])
        for threshold, precision, recall in points:
            writer.writerow([repr(threshold), repr(precision), repr(recall)])


@cli.command()
@click.option("--port", required=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data", "data_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
def serve(port: int, host: str, data_dir: str) -> None:
    """Run the annotation task server over a data directory."""
    import uvicorn

    from .annotation.api import create_app
    from .annotation.service import AnnotationService

    service = AnnotationService.from_directory(data_dir)
    app = create_app(service)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    finally:
        service.close()


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.Abort:
        sys.stderr.write("aborted\n")
        return 1
    except DataContractError as exc:
        sys.stderr.write(f"data contract violation: {exc}\n")
        return 2
    except (ScorerError, ServiceError) as exc:
        sys.stderr.write(f"scorer/service failure: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
