"""Question templates and the schema-to-question join.

A template is a natural language question with exactly one entity placeholder
``{x}``. Joining verified templates against slot filling instances yields one
positive reading comprehension example per (template, instance) pair that
share a relation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

from .corpus import POSITIVE, Entity, RCExample, SlotFillingInstance, tokenize
from .errors import DataContractError, MalformedTemplateError

PLACEHOLDER = "{x}"

SOURCES = ("shown_name", "hidden_name", "manual")
STATUSES = ("candidate", "verified", "rejected")


@dataclass(frozen=True)
class Verification:
    """Outcome counters from the template verification phase."""

    n_trials: int = 0
    n_correct: int = 0
    mean_overlap_f1: float = 0.0


@dataclass(frozen=True)
class QuestionTemplate:
    id: str
    relation_id: str
    text: str
    source: str = "manual"
    status: str = "candidate"
    verification: Verification = Verification()

    def __post_init__(self) -> None:
        if not self.id or not self.relation_id:
            raise DataContractError("template needs id and relation_id")
        if self.source not in SOURCES:
            raise DataContractError(f"bad template source {self.source!r}")
        if self.status not in STATUSES:
            raise DataContractError(f"bad template status {self.status!r}")
        count = self.text.count(PLACEHOLDER)
        if count != 1:
            raise MalformedTemplateError(
                f"template {self.id!r} contains {count} placeholders, expected exactly 1"
            )


def template_to_dict(template: QuestionTemplate) -> dict:
    return {
        "id": template.id,
        "relation_id": template.relation_id,
        "text": template.text,
        "source": template.source,
        "status": template.status,
        "verification": {
            "n_trials": template.verification.n_trials,
            "n_correct": template.verification.n_correct,
            "mean_overlap_f1": template.verification.mean_overlap_f1,
        },
    }


def template_from_dict(record: dict) -> QuestionTemplate:
    try:
        ver = record.get("verification", {})
        return QuestionTemplate(
            record["id"],
            record["relation_id"],
            record["text"],
            record.get("source", "manual"),
            record.get("status", "candidate"),
            Verification(
                ver.get("n_trials", 0),
                ver.get("n_correct", 0),
                ver.get("mean_overlap_f1", 0.0),
            ),
        )
    except KeyError as exc:
        raise DataContractError(f"template record missing field {exc}") from exc


def instantiate(template: QuestionTemplate, entity: Entity) -> str:
    """Replace the placeholder with the entity's canonical name."""
    count = template.text.count(PLACEHOLDER)
    if count != 1:
        raise MalformedTemplateError(
            f"template {template.id!r} contains {count} placeholders, expected exactly 1"
        )
    return template.text.replace(PLACEHOLDER, entity.name)


def instance_example_id(instance: SlotFillingInstance, template_id: str) -> str:
    doc_id, sent_index = instance.sentence.ref
    return "::".join(
        ["pos", instance.relation_id, instance.entity_id, doc_id, str(sent_index), template_id]
    )


def join_schema(
    templates: Sequence[QuestionTemplate],
    instances: Sequence[SlotFillingInstance],
    entities: Mapping[str, Entity],
) -> list[RCExample]:
    """Cross verified templates with instances of the same relation.

    Every output example's question contains the instance entity's name.
    Output is sorted by relation, instance key, then template id.
    """
    for template in templates:
        if template.status != "verified":
            raise DataContractError(
                f"join_schema requires verified templates, got {template.id!r} "
                f"with status {template.status!r}"
            )
    by_relation: dict[str, list[QuestionTemplate]] = {}
    for template in templates:
        by_relation.setdefault(template.relation_id, []).append(template)
    for group in by_relation.values():
        group.sort(key=lambda t: t.id)

    examples: list[RCExample] = []
    for instance in sorted(instances, key=lambda i: i.key):
        entity = entities.get(instance.entity_id)
        if entity is None:
            raise DataContractError(f"unknown entity {instance.entity_id!r} in instance")
        for template in by_relation.get(instance.relation_id, ()):
            question = tuple(t.text for t in tokenize(instantiate(template, entity)))
            examples.append(
                RCExample(
                    id=instance_example_id(instance, template.id),
                    relation_id=instance.relation_id,
                    entity_id=instance.entity_id,
                    template_id=template.id,
                    question=question,
                    sentence=instance.sentence,
                    answers=instance.answers,
                    polarity=POSITIVE,
                )
            )
    examples.sort(key=lambda e: (e.relation_id, e.entity_id, e.sentence.ref, e.template_id))
    return examples


def load_templates(path) -> list[QuestionTemplate]:
    from .corpus import read_jsonl

    templates = []
    seen: set[str] = set()
    for record in read_jsonl(path):
        template = template_from_dict(record)
        if template.id in seen:
            raise DataContractError(f"duplicate template id {template.id}")
        seen.add(template.id)
        templates.append(template)
    return templates
