"""Unanswerable example generation by crossing relations of the same entity.

For an entity with facts under two different relations, pairing a question
about one relation with a sentence aligned to the other yields a plausible
but unanswerable example, provided the sentence does not contain any gold
answer of the question's relation for that entity.
"""

from __future__ import annotations

import hashlib
import logging
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import NEGATIVE, AnswerSpan, Entity, RCExample, Sentence, SlotFillingInstance, tokenize
from .errors import DataContractError
from .querify import QuestionTemplate, instantiate
from .textnorm import find_subsequence, fold_tokens

log = logging.getLogger(__name__)


def derive_seed(seed: int, *parts: object) -> int:
    """Stable sub-seed from a base seed and a key; independent of PYTHONHASHSEED."""
    material = ":".join([str(seed)] + [str(p) for p in parts]).encode("utf-8")
    return int.from_bytes(hashlib.sha256(material).digest()[:8], "big")


def contains_answer(sentence: Sentence, answers: Iterable[AnswerSpan | str]) -> bool:
    """True when any answer occurs in the sentence as a token subsequence.

    Matching is case-insensitive over token sequences, the same rule used by
    fact alignment.
    """
    hay = fold_tokens(sentence.token_texts())
    for answer in answers:
        text = answer.text if isinstance(answer, AnswerSpan) else answer
        needle = fold_tokens([t.text for t in tokenize(text)])
        if needle and find_subsequence(hay, needle) >= 0:
            return True
    return False


@dataclass
class NegativesReport:
    positives: int = 0
    target: int = 0
    candidates: int = 0
    generated: int = 0
    entities_skipped: int = 0  # entities with fewer than two relations

    def to_dict(self) -> dict:
        return {
            "positives": self.positives,
            "target": self.target,
            "candidates": self.candidates,
            "generated": self.generated,
            "entities_skipped": self.entities_skipped,
        }


def generate_negatives(
    instances: Sequence[SlotFillingInstance],
    templates: Sequence[QuestionTemplate],
    entities: Mapping[str, Entity],
    ratio: float,
    seed: int,
) -> tuple[list[RCExample], NegativesReport]:
    """Sample unanswerable examples at the requested positives-per-negative ratio.

    The candidate pool is every (question template of R1, sentence of R2)
    pair over one entity with R1 != R2, filtered so the sentence contains no
    gold answer of (R1, entity). Sampling is uniform over the pool under the
    seed; the target count is #positives / ratio, capped by pool size.
    """
    if ratio <= 0:
        raise DataContractError(f"ratio must be positive, got {ratio}")
    verified_by_relation: dict[str, list[QuestionTemplate]] = {}
    for template in templates:
        if template.status == "verified":
            verified_by_relation.setdefault(template.relation_id, []).append(template)
    for group in verified_by_relation.values():
        group.sort(key=lambda t: t.id)

    by_entity: dict[str, list[SlotFillingInstance]] = {}
    gold_texts: dict[tuple[str, str], set[str]] = {}
    for instance in instances:
        by_entity.setdefault(instance.entity_id, []).append(instance)
        bucket = gold_texts.setdefault((instance.relation_id, instance.entity_id), set())
        bucket.update(a.text for a in instance.answers)

    report = NegativesReport()
    report.positives = sum(
        len(verified_by_relation.get(i.relation_id, ())) for i in instances
    )
    report.target = int(round(report.positives / ratio))

    # Candidate enumeration is deterministic per entity and needs no RNG, so
    # it can run in any order or in parallel; sampling happens once globally.
    # Sentences shared by several relations of one entity are considered once
    # per question template.
    candidates: list[tuple[str, QuestionTemplate, SlotFillingInstance]] = []
    for entity_id in sorted(by_entity):
        entity_instances = sorted(by_entity[entity_id], key=lambda i: i.key)
        relations = sorted({i.relation_id for i in entity_instances})
        if len(relations) < 2:
            report.entities_skipped += 1
            continue
        seen: set[tuple[str, str, int]] = set()
        for question_relation in relations:
            relation_templates = verified_by_relation.get(question_relation, ())
            if not relation_templates:
                continue
            golds = gold_texts[(question_relation, entity_id)]
            for instance in entity_instances:
                if instance.relation_id == question_relation:
                    continue
                key = (question_relation,) + instance.sentence.ref
                if key in seen:
                    continue
                seen.add(key)
                if contains_answer(instance.sentence, golds):
                    continue
                for template in relation_templates:
                    candidates.append((entity_id, template, instance))
    report.candidates = len(candidates)

    rng = random.Random(derive_seed(seed, "negatives"))
    if report.target >= len(candidates):
        chosen = list(candidates)
    else:
        chosen = rng.sample(candidates, report.target)

    examples: list[RCExample] = []
    for entity_id, template, instance in chosen:
        entity = entities.get(entity_id)
        if entity is None:
            raise DataContractError(f"unknown entity {entity_id!r} in instance")
        question = tuple(t.text for t in tokenize(instantiate(template, entity)))
        doc_id, sent_index = instance.sentence.ref
        example_id = "::".join(
            ["neg", template.relation_id, entity_id, doc_id, str(sent_index), template.id]
        )
        examples.append(
            RCExample(
                id=example_id,
                relation_id=template.relation_id,
                entity_id=entity_id,
                template_id=template.id,
                question=question,
                sentence=instance.sentence,
                answers=(),
                polarity=NEGATIVE,
            )
        )
    examples.sort(key=lambda e: e.id)
    report.generated = len(examples)
    if report.generated < report.target:
        log.warning(
            "negative pool exhausted: requested %d, generated %d",
            report.target,
            report.generated,
        )
    return examples, report
