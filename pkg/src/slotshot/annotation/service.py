"""Domain logic for the two-phase template annotation workflow.

Phase one (collection) shows annotators masked example sentences and asks
for three question templates each. Phase two (verification) instantiates a
candidate template over fresh instances and checks the annotators' spans
against distant-supervision answers. All mutations flow through the event
log; replaying the log rebuilds identical state.
"""

from __future__ import annotations

import hashlib
import math
import random
import threading
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from ..corpus import (
    Entity,
    Relation,
    AnswerSpan,
    Sentence,
    SlotFillingInstance,
    load_entities,
    load_relations,
    read_jsonl,
    sentence_from_dict,
    sentence_to_dict,
    span_from_dict,
    span_to_dict,
    instance_from_dict,
)
from ..engine import Prediction, Span
from ..errors import (
    ConflictError,
    DataContractError,
    NotFoundError,
    ValidationError,
)
from ..evaluation import (
    TN,
    TP,
    judge_instance,
    normalize_answer_tokens,
    overlap_prf,
)
from ..negatives import derive_seed
from ..querify import (
    PLACEHOLDER,
    QuestionTemplate,
    Verification,
    instantiate,
    load_templates,
    template_from_dict,
    template_to_dict,
)
from ..textnorm import fold_tokens
from .store import EventLog

COLLECTION_SETS = 3
SENTENCES_PER_SET = 4
SLOTS_PER_TASK = 3
TEMPLATES_PER_RESPONSE = 3
DEFAULT_TRIALS = 10

MAJORITY = 0.6
MIN_MEAN_OVERLAP = 0.75


# ---------------------------------------------------------------------------
# Entity masking


@dataclass(frozen=True)
class Underline:
    """Inclusive token range of one gold answer in the masked token list."""

    start: int
    end: int
    text: str


@dataclass(frozen=True)
class MaskedSentence:
    tokens: tuple[str, ...]
    placeholder_index: int
    underlines: tuple[Underline, ...]

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    def to_dict(self) -> dict:
        return {
            "tokens": list(self.tokens),
            "placeholder_index": self.placeholder_index,
            "underlines": [
                {"start": u.start, "end": u.end, "text": u.text}
                for u in self.underlines
            ],
        }

    @staticmethod
    def from_dict(record: dict) -> "MaskedSentence":
        return MaskedSentence(
            tuple(record["tokens"]),
            record["placeholder_index"],
            tuple(
                Underline(u["start"], u["end"], u["text"])
                for u in record["underlines"]
            ),
        )


def _entity_occurrences(
    folded: Sequence[str], surfaces: Sequence[tuple[str, ...]]
) -> list[tuple[int, int]]:
    """Non-overlapping entity mentions, longest surface form first."""
    found: list[tuple[int, int]] = []
    i = 0
    while i < len(folded):
        hit = 0
        for surface in surfaces:
            k = len(surface)
            if k and tuple(folded[i : i + k]) == surface:
                hit = k
                break
        if hit:
            found.append((i, i + hit - 1))
            i += hit
        else:
            i += 1
    return found


def mask_entity(
    sentence: Sentence, entity: Entity, answers: Iterable[AnswerSpan]
) -> MaskedSentence | None:
    """Replace every entity mention with the placeholder and remap answers.

    Returns None when the entity does not occur or no answer survives the
    masking, in which case the sentence cannot be shown to annotators.
    """
    texts = sentence.token_texts()
    folded = fold_tokens(texts)
    surfaces = sorted(
        (fold_tokens(form.split()) for form in entity.surface_forms()),
        key=len,
        reverse=True,
    )
    occurrences = _entity_occurrences(folded, surfaces)
    if not occurrences:
        return None

    index_map: dict[int, int] = {}
    masked: list[str] = []
    cursor = 0
    for start, end in occurrences:
        for t in range(cursor, start):
            index_map[t] = len(masked)
            masked.append(texts[t])
        masked.append(PLACEHOLDER)
        cursor = end + 1
    for t in range(cursor, len(texts)):
        index_map[t] = len(masked)
        masked.append(texts[t])

    underlines = []
    for span in answers:
        if span.token_start in index_map and span.token_end in index_map:
            underlines.append(
                Underline(index_map[span.token_start], index_map[span.token_end], span.text)
            )
    if not underlines:
        return None
    return MaskedSentence(tuple(masked), masked.index(PLACEHOLDER), tuple(underlines))


# ---------------------------------------------------------------------------
# Tasks


@dataclass(frozen=True)
class CollectionTask:
    id: str
    relation_id: str
    set_index: int
    show_relation_name: bool
    relation_name: str
    examples: tuple[MaskedSentence, ...]
    instance_keys: tuple[tuple[str, str, str, int], ...]
    slots: int = SLOTS_PER_TASK

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "relation_id": self.relation_id,
            "set_index": self.set_index,
            "show_relation_name": self.show_relation_name,
            "relation_name": self.relation_name,
            "examples": [m.to_dict() for m in self.examples],
            "instance_keys": [list(k) for k in self.instance_keys],
            "slots": self.slots,
        }

    @staticmethod
    def from_dict(record: dict) -> "CollectionTask":
        return CollectionTask(
            record["id"],
            record["relation_id"],
            record["set_index"],
            record["show_relation_name"],
            record["relation_name"],
            tuple(MaskedSentence.from_dict(m) for m in record["examples"]),
            tuple(
                (k[0], k[1], k[2], int(k[3])) for k in record["instance_keys"]
            ),
            record["slots"],
        )


@dataclass(frozen=True)
class VerificationTask:
    id: str
    template_id: str
    relation_id: str
    entity_id: str
    question: str
    sentence: Sentence
    golds: tuple[AnswerSpan, ...]

    @property
    def gold_texts(self) -> tuple[str, ...]:
        return tuple(g.text for g in self.golds)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "template_id": self.template_id,
            "relation_id": self.relation_id,
            "entity_id": self.entity_id,
            "question": self.question,
            "sentence": sentence_to_dict(self.sentence),
            "golds": [span_to_dict(g) for g in self.golds],
        }

    @staticmethod
    def from_dict(record: dict) -> "VerificationTask":
        return VerificationTask(
            record["id"],
            record["template_id"],
            record["relation_id"],
            record["entity_id"],
            record["question"],
            sentence_from_dict(record["sentence"]),
            tuple(span_from_dict(g) for g in record["golds"]),
        )


# ---------------------------------------------------------------------------
# Template verdicts


@dataclass(frozen=True)
class TemplateDecision:
    status: str
    n_trials: int
    n_correct: int
    mean_overlap_f1: float


def decide_template(
    tasks: Mapping[str, VerificationTask], responses: Sequence[dict]
) -> TemplateDecision:
    """Pure verdict: majority of responses correct and answered spans close.

    A response is correct when judged TP (or TN against an empty gold set).
    The overlap filter averages the best token-overlap F1 of answered
    responses only. With no responses the template stays a candidate.
    """
    if not responses:
        return TemplateDecision("candidate", 0, 0, 0.0)
    n_correct = 0
    answered: list[float] = []
    for response in responses:
        task = tasks.get(response["task_id"])
        if task is None:
            raise DataContractError(
                f"response references unknown task {response['task_id']!r}"
            )
        if response.get("unanswerable"):
            prediction = Prediction(None, 1.0, 1.0)
        else:
            span = response["span"]
            text = task.sentence.span_text(span["start"], span["end"])
            prediction = Prediction(Span(span["start"], span["end"], text), 1.0, 0.0)
        judgment = judge_instance(prediction, task.golds)
        if judgment.outcome in (TP, TN):
            n_correct += 1
        if prediction.answer is not None:
            pred_counts = normalize_answer_tokens(prediction.answer.text)
            best = 0.0
            for gold in task.gold_texts:
                best = max(
                    best,
                    overlap_prf(pred_counts, normalize_answer_tokens(gold))[2],
                )
            answered.append(best)
    mean_f1 = sum(answered) / len(answered) if answered else 0.0
    ok = n_correct >= math.ceil(MAJORITY * len(responses)) and mean_f1 >= MIN_MEAN_OVERLAP
    return TemplateDecision(
        "verified" if ok else "rejected", len(responses), n_correct, mean_f1
    )


# ---------------------------------------------------------------------------
# Service


def _normalize_template_text(text: str) -> str:
    return " ".join(text.split()).casefold()


def _template_id(relation_id: str, normalized: str) -> str:
    digest = hashlib.sha256(normalized.encode("utf-8")).hexdigest()[:8]
    return f"tpl::{relation_id}::{digest}"


class AnnotationService:
    """In-memory state over an append-only event log.

    One lock serializes all mutations, which subsumes the per-template
    single-writer requirement; reads copy out plain dicts.
    """

    def __init__(
        self,
        relations: Iterable[Relation],
        entities: Iterable[Entity],
        instances: Iterable[SlotFillingInstance],
        templates: Iterable[QuestionTemplate] = (),
        log: EventLog | None = None,
        clock: Callable[[], float] = time.time,
        snapshot_every: int = 100,
    ):
        self._lock = threading.RLock()
        self._clock = clock
        self._log = log
        self._snapshot_every = snapshot_every

        self.relations = {r.id: r for r in relations}
        self.entities = {e.id: e for e in entities}
        self.instances: dict[tuple[str, str, str, int], SlotFillingInstance] = {}
        self.by_relation: dict[str, list[tuple[str, str, str, int]]] = {}
        for instance in instances:
            if instance.relation_id not in self.relations:
                raise DataContractError(
                    f"instance references unknown relation {instance.relation_id!r}"
                )
            if instance.entity_id not in self.entities:
                raise DataContractError(
                    f"instance references unknown entity {instance.entity_id!r}"
                )
            self.instances[instance.key] = instance
            self.by_relation.setdefault(instance.relation_id, []).append(instance.key)
        for keys in self.by_relation.values():
            keys.sort()

        self.templates: dict[str, QuestionTemplate] = {}
        self._norm_index: dict[tuple[str, str], str] = {}
        for template in templates:
            self._register_template(template)

        self.collection_tasks: dict[str, CollectionTask] = {}
        self.collection_responses: dict[str, dict[str, dict]] = {}
        self.used_in_collection: dict[str, set] = {}
        self.verification_tasks: dict[str, VerificationTask] = {}
        self.tasks_by_template: dict[str, list[str]] = {}
        self.verification_responses: dict[str, dict[str, dict]] = {}

        if self._log is not None:
            snap = self._log.load_snapshot()
            after = 0
            if snap is not None:
                self._restore(snap["state"])
                after = snap["seq"]
            for event in self._log.replay(after):
                self._apply(event)

    @classmethod
    def from_directory(cls, data_dir: str | Path, **kwargs) -> "AnnotationService":
        data = Path(data_dir)
        relations = load_relations(data / "relations.jsonl")
        entities = load_entities(data / "entities.jsonl")
        instances = [
            instance_from_dict(r) for r in read_jsonl(data / "instances.jsonl")
        ]
        templates_path = data / "templates.jsonl"
        templates = (
            load_templates(templates_path) if templates_path.exists() else []
        )
        return cls(
            relations.values(),
            entities.values(),
            instances,
            templates,
            log=EventLog(data),
            **kwargs,
        )

    # -- event plumbing

    def _record(self, event: dict) -> None:
        if self._log is not None:
            event = self._log.append(event)
        self._apply(event)
        if (
            self._log is not None
            and self._snapshot_every
            and self._log.seq % self._snapshot_every == 0
        ):
            self.snapshot()

    def snapshot(self) -> None:
        if self._log is not None:
            self._log.write_snapshot(self._state)

    def close(self) -> None:
        if self._log is not None:
            self.snapshot()
            self._log.close()

    def _state(self) -> dict:
        return {
            "templates": [template_to_dict(t) for t in self.templates.values()],
            "collection_tasks": [t.to_dict() for t in self.collection_tasks.values()],
            "collection_responses": {
                tid: list(by.values()) for tid, by in self.collection_responses.items()
            },
            "verification_tasks": [
                t.to_dict() for t in self.verification_tasks.values()
            ],
            "verification_responses": {
                tid: list(by.values())
                for tid, by in self.verification_responses.items()
            },
        }

    def _restore(self, state: dict) -> None:
        for record in state["templates"]:
            self._register_template(template_from_dict(record))
        for record in state["collection_tasks"]:
            self._add_collection_task(CollectionTask.from_dict(record))
        for tid, rows in state["collection_responses"].items():
            for row in rows:
                self.collection_responses.setdefault(tid, {})[row["annotator_id"]] = row
        for record in state["verification_tasks"]:
            self._add_verification_task(VerificationTask.from_dict(record))
        for tid, rows in state["verification_responses"].items():
            for row in rows:
                self.verification_responses.setdefault(tid, {})[
                    row["annotator_id"]
                ] = row

    def _apply(self, event: dict) -> None:
        kind = event["type"]
        if kind == "collection_tasks":
            for record in event["tasks"]:
                self._add_collection_task(CollectionTask.from_dict(record))
        elif kind == "collection_response":
            row = event["response"]
            self.collection_responses.setdefault(row["task_id"], {})[
                row["annotator_id"]
            ] = row
            for record in event["new_templates"]:
                self._register_template(template_from_dict(record))
        elif kind == "verification_tasks":
            for record in event["tasks"]:
                self._add_verification_task(VerificationTask.from_dict(record))
        elif kind == "verification_response":
            row = event["response"]
            self.verification_responses.setdefault(row["task_id"], {})[
                row["annotator_id"]
            ] = row
        elif kind == "template_status":
            template = self.templates[event["template_id"]]
            stats = event["stats"]
            self.templates[event["template_id"]] = replace(
                template,
                status=event["status"],
                verification=Verification(
                    stats["n_trials"], stats["n_correct"], stats["mean_overlap_f1"]
                ),
            )
        else:
            raise DataContractError(f"unknown event type {kind!r}")

    def _register_template(self, template: QuestionTemplate) -> None:
        self.templates[template.id] = template
        norm = _normalize_template_text(template.text)
        self._norm_index.setdefault((template.relation_id, norm), template.id)

    def _add_collection_task(self, task: CollectionTask) -> None:
        self.collection_tasks[task.id] = task
        used = self.used_in_collection.setdefault(task.relation_id, set())
        used.update(task.instance_keys)

    def _add_verification_task(self, task: VerificationTask) -> None:
        self.verification_tasks[task.id] = task
        self.tasks_by_template.setdefault(task.template_id, []).append(task.id)

    # -- collection phase

    def create_collection_tasks(
        self, relation_id: str, seed: int
    ) -> list[CollectionTask]:
        with self._lock:
            relation = self.relations.get(relation_id)
            if relation is None:
                raise NotFoundError(f"unknown relation {relation_id!r}")
            if any(
                t.relation_id == relation_id for t in self.collection_tasks.values()
            ):
                raise ConflictError(
                    f"collection tasks already exist for relation {relation_id!r}"
                )
            pool = []
            for key in self.by_relation.get(relation_id, []):
                instance = self.instances[key]
                masked = mask_entity(
                    instance.sentence,
                    self.entities[instance.entity_id],
                    instance.answers,
                )
                if masked is not None:
                    pool.append((key, masked))
            if len(pool) < SENTENCES_PER_SET:
                raise ValidationError(
                    f"relation {relation_id!r} has {len(pool)} usable instances; "
                    f"need at least {SENTENCES_PER_SET}"
                )
            rng = random.Random(derive_seed(seed, "collection", relation_id))
            if len(pool) >= COLLECTION_SETS * SENTENCES_PER_SET:
                drawn = rng.sample(pool, COLLECTION_SETS * SENTENCES_PER_SET)
                sets = [
                    drawn[i * SENTENCES_PER_SET : (i + 1) * SENTENCES_PER_SET]
                    for i in range(COLLECTION_SETS)
                ]
            else:
                sets = [
                    rng.sample(pool, SENTENCES_PER_SET)
                    for _ in range(COLLECTION_SETS)
                ]
            tasks = []
            for set_index, chunk in enumerate(sets):
                for shown in (True, False):
                    mode = "shown" if shown else "hidden"
                    tasks.append(
                        CollectionTask(
                            id=f"ct::{relation_id}::s{set_index}::{mode}",
                            relation_id=relation_id,
                            set_index=set_index,
                            show_relation_name=shown,
                            relation_name=relation.name,
                            examples=tuple(m for _, m in chunk),
                            instance_keys=tuple(k for k, _ in chunk),
                        )
                    )
            self._record(
                {"type": "collection_tasks", "tasks": [t.to_dict() for t in tasks]}
            )
            return tasks

    def open_collection_tasks(self, annotator_id: str) -> list[dict]:
        with self._lock:
            out = []
            for task_id in sorted(self.collection_tasks):
                task = self.collection_tasks[task_id]
                responses = self.collection_responses.get(task_id, {})
                if annotator_id in responses or len(responses) >= task.slots:
                    continue
                payload = task.to_dict()
                del payload["instance_keys"]
                if not task.show_relation_name:
                    payload["relation_name"] = None
                payload["slots_remaining"] = task.slots - len(responses)
                out.append(payload)
            return out

    def submit_collection(
        self, task_id: str, annotator_id: str, templates: Sequence[str]
    ) -> dict:
        with self._lock:
            task = self.collection_tasks.get(task_id)
            if task is None:
                raise NotFoundError(f"unknown collection task {task_id!r}")
            if not annotator_id or not isinstance(annotator_id, str):
                raise ValidationError("annotator_id must be a non-empty string")
            responses = self.collection_responses.get(task_id, {})
            if annotator_id in responses:
                raise ConflictError(
                    f"annotator {annotator_id!r} already answered {task_id!r}"
                )
            if len(responses) >= task.slots:
                raise ConflictError(f"task {task_id!r} has no open slots")
            if len(templates) != TEMPLATES_PER_RESPONSE:
                raise ValidationError(
                    f"exactly {TEMPLATES_PER_RESPONSE} templates required, "
                    f"got {len(templates)}"
                )
            normalized = []
            for text in templates:
                if not isinstance(text, str) or not text.strip():
                    raise ValidationError("templates must be non-empty strings")
                count = text.count(PLACEHOLDER)
                if count != 1:
                    raise ValidationError(
                        f"template must contain {PLACEHOLDER!r} exactly once, "
                        f"found {count}: {text!r}"
                    )
                normalized.append(_normalize_template_text(text))
            if len(set(normalized)) != len(normalized):
                raise ValidationError("the 3 templates must be distinct")

            source = "shown_name" if task.show_relation_name else "hidden_name"
            new_templates, stored, merged = [], [], []
            for text, norm in zip(templates, normalized):
                existing = self._norm_index.get((task.relation_id, norm))
                if existing is not None:
                    merged.append(existing)
                    continue
                # Within-payload duplicates were rejected above, so ids are fresh.
                template = QuestionTemplate(
                    id=_template_id(task.relation_id, norm),
                    relation_id=task.relation_id,
                    text=" ".join(text.split()),
                    source=source,
                    status="candidate",
                )
                new_templates.append(template)
                stored.append(template.id)

            response = {
                "task_id": task_id,
                "annotator_id": annotator_id,
                "templates": list(templates),
                "timestamp": self._clock(),
            }
            self._record(
                {
                    "type": "collection_response",
                    "response": response,
                    "new_templates": [template_to_dict(t) for t in new_templates],
                    "merged": merged,
                }
            )
            return {"stored": stored, "merged": merged}

    # -- verification phase

    def create_verification_tasks(
        self, template_id: str, seed: int, n_trials: int = DEFAULT_TRIALS
    ) -> tuple[list[VerificationTask], dict]:
        if n_trials <= 0:
            raise ValidationError("n_trials must be positive")
        with self._lock:
            template = self.templates.get(template_id)
            if template is None:
                raise NotFoundError(f"unknown template {template_id!r}")
            if template.status != "candidate":
                raise ConflictError(
                    f"template {template_id!r} is {template.status}, not a candidate"
                )
            if self.tasks_by_template.get(template_id):
                raise ConflictError(
                    f"verification tasks already exist for {template_id!r}"
                )
            used = self.used_in_collection.get(template.relation_id, set())
            fresh = [
                key
                for key in self.by_relation.get(template.relation_id, [])
                if key not in used
            ]
            rng = random.Random(derive_seed(seed, "verification", template_id))
            chosen = rng.sample(fresh, min(n_trials, len(fresh)))
            tasks = []
            for i, key in enumerate(sorted(chosen)):
                instance = self.instances[key]
                entity = self.entities[instance.entity_id]
                tasks.append(
                    VerificationTask(
                        id=f"vt::{template_id}::{i:02d}",
                        template_id=template_id,
                        relation_id=instance.relation_id,
                        entity_id=instance.entity_id,
                        question=instantiate(template, entity),
                        sentence=instance.sentence,
                        golds=instance.answers,
                    )
                )
            report = {"requested": n_trials, "created": len(tasks)}
            if tasks:
                self._record(
                    {
                        "type": "verification_tasks",
                        "template_id": template_id,
                        "requested": n_trials,
                        "tasks": [t.to_dict() for t in tasks],
                    }
                )
            return tasks, report

    def open_verification_tasks(self, annotator_id: str) -> list[dict]:
        with self._lock:
            out = []
            for task_id in sorted(self.verification_tasks):
                if annotator_id in self.verification_responses.get(task_id, {}):
                    continue
                task = self.verification_tasks[task_id]
                out.append(
                    {
                        "id": task.id,
                        "template_id": task.template_id,
                        "question": task.question,
                        "sentence": {
                            "text": task.sentence.text,
                            "tokens": list(task.sentence.token_texts()),
                        },
                    }
                )
            return out

    def submit_verification(
        self,
        task_id: str,
        annotator_id: str,
        span: dict | None = None,
        unanswerable: bool = False,
    ) -> dict:
        with self._lock:
            task = self.verification_tasks.get(task_id)
            if task is None:
                raise NotFoundError(f"unknown verification task {task_id!r}")
            if not annotator_id or not isinstance(annotator_id, str):
                raise ValidationError("annotator_id must be a non-empty string")
            if annotator_id in self.verification_responses.get(task_id, {}):
                raise ConflictError(
                    f"annotator {annotator_id!r} already answered {task_id!r}"
                )
            if (span is None) == (not unanswerable):
                raise ValidationError(
                    "exactly one of span or unanswerable must be given"
                )
            response = {
                "task_id": task_id,
                "annotator_id": annotator_id,
                "span": None,
                "unanswerable": bool(unanswerable),
                "timestamp": self._clock(),
            }
            if span is not None:
                try:
                    start, end = int(span["start"]), int(span["end"])
                except (KeyError, TypeError, ValueError) as exc:
                    raise ValidationError("span must carry integer start/end") from exc
                n = len(task.sentence.tokens)
                if not 0 <= start <= end < n:
                    raise ValidationError(
                        f"span ({start}, {end}) out of bounds for {n} tokens"
                    )
                response["span"] = {"start": start, "end": end}
            self._record({"type": "verification_response", "response": response})
            return {"accepted": True}

    def evaluate_template(self, template_id: str) -> TemplateDecision:
        with self._lock:
            template = self.templates.get(template_id)
            if template is None:
                raise NotFoundError(f"unknown template {template_id!r}")
            task_ids = self.tasks_by_template.get(template_id, [])
            tasks = {tid: self.verification_tasks[tid] for tid in task_ids}
            responses = [
                row
                for tid in sorted(task_ids)
                for row in self.verification_responses.get(tid, {}).values()
            ]
            decision = decide_template(tasks, responses)
            if decision.status == "candidate":
                return decision
            stats = {
                "n_trials": decision.n_trials,
                "n_correct": decision.n_correct,
                "mean_overlap_f1": decision.mean_overlap_f1,
            }
            current = template.verification
            if template.status != decision.status or current != Verification(
                decision.n_trials, decision.n_correct, decision.mean_overlap_f1
            ):
                self._record(
                    {
                        "type": "template_status",
                        "template_id": template_id,
                        "status": decision.status,
                        "stats": stats,
                    }
                )
            return decision

    # -- reads

    def list_templates(
        self, relation_id: str | None = None, status: str | None = None
    ) -> list[dict]:
        with self._lock:
            out = []
            for template_id in sorted(self.templates):
                template = self.templates[template_id]
                if relation_id is not None and template.relation_id != relation_id:
                    continue
                if status is not None and template.status != status:
                    continue
                out.append(template_to_dict(template))
            return out

    def list_relations(self) -> list[dict]:
        with self._lock:
            return [
                {
                    "id": r.id,
                    "name": r.name,
                    "instances": len(self.by_relation.get(r.id, [])),
                }
                for r in sorted(self.relations.values(), key=lambda r: r.id)
            ]

    def dashboard(self) -> dict:
        """Per-relation template counts by status plus verification pass rate."""
        with self._lock:
            rows = {}
            for template in self.templates.values():
                row = rows.setdefault(
                    template.relation_id,
                    {"candidate": 0, "verified": 0, "rejected": 0},
                )
                row[template.status] += 1
            decided = sum(r["verified"] + r["rejected"] for r in rows.values())
            verified = sum(r["verified"] for r in rows.values())
            return {
                "relations": [
                    dict(rows[rid], relation_id=rid) for rid in sorted(rows)
                ],
                "decided": decided,
                "verified": verified,
                "pass_rate": verified / decided if decided else 0.0,
            }
