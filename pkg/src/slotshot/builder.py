"""Distant supervision: align KB facts to sentences and group into instances.

A fact aligns to the first sentence of the subject entity's document that
contains both an entity mention and the fact's object text, under
case-insensitive token-sequence matching. Facts with no such sentence are
dropped and counted, never guessed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .corpus import (
    AnswerSpan,
    Document,
    Entity,
    Sentence,
    SlotFillingInstance,
    tokenize,
)
from .errors import DataContractError
from .textnorm import find_subsequence, fold_tokens

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Fact:
    """A KB triple; the object is a surface string."""

    relation_id: str
    subject_entity_id: str
    object_text: str

    def __post_init__(self) -> None:
        if not self.relation_id or not self.subject_entity_id:
            raise DataContractError("fact needs relation and subject ids")
        if not self.object_text.strip():
            raise DataContractError("fact object text must be non-empty")


def fact_from_dict(record: dict) -> Fact:
    try:
        return Fact(record["relation_id"], record["subject_entity_id"], record["object_text"])
    except KeyError as exc:
        raise DataContractError(f"fact record missing field {exc}") from exc


def fact_to_dict(fact: Fact) -> dict:
    return {
        "relation_id": fact.relation_id,
        "subject_entity_id": fact.subject_entity_id,
        "object_text": fact.object_text,
    }


@dataclass
class BuildReport:
    """Alignment bookkeeping for one build run."""

    facts_total: int = 0
    facts_aligned: int = 0
    dropped_no_sentence: int = 0
    dropped_missing_document: int = 0
    dropped_missing_entity: int = 0
    instances: int = 0

    def to_dict(self) -> dict:
        dropped = (
            self.dropped_no_sentence
            + self.dropped_missing_document
            + self.dropped_missing_entity
        )
        return {
            "facts_total": self.facts_total,
            "facts_aligned": self.facts_aligned,
            "facts_dropped": dropped,
            "dropped_no_sentence": self.dropped_no_sentence,
            "dropped_missing_document": self.dropped_missing_document,
            "dropped_missing_entity": self.dropped_missing_entity,
            "instances": self.instances,
        }


def _fold_surfaces(texts: Iterable[str]) -> list[tuple[str, ...]]:
    folded = []
    for text in texts:
        toks = fold_tokens([t.text for t in tokenize(text)])
        if toks:
            folded.append(toks)
    return folded


def mentions_entity(sentence: Sentence, entity: Entity) -> bool:
    """True when the entity name or an alias occurs as a token subsequence."""
    hay = fold_tokens(sentence.token_texts())
    return any(
        find_subsequence(hay, surface) >= 0
        for surface in _fold_surfaces(entity.surface_forms())
    )


def align_fact(
    document: Document, entity: Entity, fact: Fact
) -> tuple[Sentence, AnswerSpan] | None:
    """First sentence containing both an entity mention and the object text.

    The answer span covers the first occurrence of the object in that
    sentence. Returns None when no sentence qualifies.
    """
    surfaces = _fold_surfaces(entity.surface_forms())
    object_tokens = fold_tokens([t.text for t in tokenize(fact.object_text)])
    if not object_tokens or not surfaces:
        return None
    for sentence in document.sentences:
        hay = fold_tokens(sentence.token_texts())
        if not any(find_subsequence(hay, s) >= 0 for s in surfaces):
            continue
        start = find_subsequence(hay, object_tokens)
        if start < 0:
            continue
        end = start + len(object_tokens) - 1
        span = AnswerSpan(
            document.id, sentence.index, start, end, sentence.span_text(start, end)
        )
        return sentence, span
    return None


def group_instances(
    aligned: Iterable[tuple[str, str, Sentence, AnswerSpan]],
) -> list[SlotFillingInstance]:
    """Merge aligned facts that share (relation, entity, sentence).

    Answers are deduplicated by token range and sorted; output order is
    deterministic in the grouping key.
    """
    groups: dict[tuple[str, str, str, int], tuple[Sentence, dict]] = {}
    for relation_id, entity_id, sentence, span in aligned:
        key = (relation_id, entity_id) + sentence.ref
        if key not in groups:
            groups[key] = (sentence, {})
        groups[key][1][(span.token_start, span.token_end)] = span
    instances = []
    for key in sorted(groups):
        sentence, spans = groups[key]
        answers = tuple(spans[k] for k in sorted(spans))
        instances.append(SlotFillingInstance(key[0], key[1], sentence, answers))
    return instances


def build_dataset(
    documents: Mapping[str, Document],
    entities: Mapping[str, Entity],
    facts: Sequence[Fact],
) -> tuple[list[SlotFillingInstance], BuildReport]:
    """Align every fact and group the survivors into instances."""
    report = BuildReport(facts_total=len(facts))
    aligned: list[tuple[str, str, Sentence, AnswerSpan]] = []
    for fact in facts:
        entity = entities.get(fact.subject_entity_id)
        if entity is None:
            report.dropped_missing_entity += 1
            continue
        document = documents.get(fact.subject_entity_id)
        if document is None:
            report.dropped_missing_document += 1
            continue
        result = align_fact(document, entity, fact)
        if result is None:
            report.dropped_no_sentence += 1
            continue
        sentence, span = result
        aligned.append((fact.relation_id, entity.id, sentence, span))
        report.facts_aligned += 1
    instances = group_instances(aligned)
    report.instances = len(instances)
    log.info(
        "aligned %d/%d facts into %d instances",
        report.facts_aligned,
        report.facts_total,
        report.instances,
    )
    return instances, report
