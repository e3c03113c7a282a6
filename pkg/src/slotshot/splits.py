"""Holdout splits that keep entities, templates, or whole relations unseen.

Each generator partitions by the thing that must be unseen, lets examples
follow their partition, then balances positives against negatives and
down-samples to the requested sizes. All sampling is driven by sub-seeds
derived from (seed, fold, ...), so a spec plus a seed fixes every fold
exactly.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import POSITIVE, Entity, RCExample, tokenize
from .errors import DataContractError
from .negatives import derive_seed
from .querify import QuestionTemplate, instantiate

log = logging.getLogger(__name__)

KINDS = ("entities", "templates", "relations")

SPLIT_NAMES = ("train", "dev", "test")


@dataclass(frozen=True)
class SplitSpec:
    """Configuration for one family of folds.

    For kinds "entities" and "relations" the three sizes are per-split
    example totals; for kind "templates" they are per-template sample counts
    (every training template contributes up to train_size examples, and the
    held-out dev/test template of each relation contributes up to
    dev_size/test_size).
    """

    kind: str
    seed: int
    folds: int = 1
    train_size: int = 20_000
    dev_size: int = 500
    test_size: int = 2_000
    ratio: float = 1.0  # positives per negative within every split
    relation_counts: tuple[int, int, int] | None = None  # kind="relations" only

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise DataContractError(f"bad split kind {self.kind!r}")
        if self.folds < 1:
            raise DataContractError("folds must be >= 1")
        if min(self.train_size, self.dev_size, self.test_size) < 1:
            raise DataContractError("split sizes must be positive")
        if self.ratio <= 0:
            raise DataContractError("ratio must be positive")


@dataclass
class FoldResult:
    fold: int
    train: list[RCExample]
    dev: list[RCExample]
    test: list[RCExample]
    seen_test: list[RCExample] | None = None
    manifest: dict = field(default_factory=dict)


def _split_polarity(examples: Sequence[RCExample]) -> tuple[list[RCExample], list[RCExample]]:
    positives = [e for e in examples if e.polarity == POSITIVE]
    negatives = [e for e in examples if e.polarity != POSITIVE]
    return positives, negatives


def balance(
    positives: Sequence[RCExample],
    negatives: Sequence[RCExample],
    ratio: float,
    seed: int,
) -> list[RCExample]:
    """Down-sample the larger side to the requested positives-per-negative
    ratio, then shuffle deterministically."""
    if ratio <= 0:
        raise DataContractError("ratio must be positive")
    if not positives or not negatives:
        raise DataContractError("balance needs both positives and negatives")
    n_neg = min(len(negatives), int(len(positives) / ratio))
    n_pos = min(len(positives), int(n_neg * ratio))
    rng = random.Random(derive_seed(seed, "balance"))
    pos = sorted(positives, key=lambda e: e.id)
    neg = sorted(negatives, key=lambda e: e.id)
    chosen = rng.sample(pos, n_pos) + rng.sample(neg, n_neg)
    rng.shuffle(chosen)
    return chosen


def _take_balanced(
    examples: Sequence[RCExample], target: int, ratio: float, seed: int
) -> tuple[list[RCExample], dict]:
    """Balanced subset of at most `target` examples; reports any shortfall."""
    positives, negatives = _split_polarity(examples)
    rng = random.Random(derive_seed(seed, "take"))
    if not positives or not negatives:
        # Nothing to balance against; take what exists, up to the target.
        only = sorted(positives or negatives, key=lambda e: e.id)
        if only:
            log.warning("balancing skipped: one polarity is absent from this split")
        chosen = rng.sample(only, min(target, len(only)))
        rng.shuffle(chosen)
        counted = _split_polarity(chosen)
        return chosen, {
            "requested": target,
            "selected": len(chosen),
            "positives": len(counted[0]),
            "negatives": len(counted[1]),
        }
    want_neg = int(round(target / (1.0 + ratio)))
    want_pos = target - want_neg
    # Respect both availability and the ratio between the two sides.
    n_pos = min(want_pos, len(positives))
    n_neg = min(want_neg, len(negatives), int(n_pos / ratio))
    n_pos = min(n_pos, int(n_neg * ratio))
    pos = sorted(positives, key=lambda e: e.id)
    neg = sorted(negatives, key=lambda e: e.id)
    chosen = rng.sample(pos, n_pos) + rng.sample(neg, n_neg)
    rng.shuffle(chosen)
    shortfall = {
        "requested": target,
        "selected": len(chosen),
        "positives": n_pos,
        "negatives": n_neg,
    }
    return chosen, shortfall


def split_unseen_entities(
    examples: Sequence[RCExample], spec: SplitSpec
) -> list[FoldResult]:
    """Assign every entity to exactly one split; examples follow entities."""
    if spec.kind != "entities":
        raise DataContractError("spec.kind must be 'entities'")
    entity_ids = sorted({e.entity_id for e in examples})
    if not entity_ids:
        raise DataContractError("no examples to split")
    folds = []
    for fold in range(spec.folds):
        rng = random.Random(derive_seed(spec.seed, "entities", fold))
        assignment = {eid: SPLIT_NAMES[rng.randrange(3)] for eid in entity_ids}
        buckets: dict[str, list[RCExample]] = {name: [] for name in SPLIT_NAMES}
        for example in examples:
            buckets[assignment[example.entity_id]].append(example)
        result = FoldResult(fold, [], [], [])
        shortfalls = {}
        for name, target in zip(
            SPLIT_NAMES, (spec.train_size, spec.dev_size, spec.test_size)
        ):
            subset, info = _take_balanced(
                buckets[name], target, spec.ratio, derive_seed(spec.seed, fold, name)
            )
            setattr(result, name, subset)
            shortfalls[name] = info
        result.manifest = {
            "kind": "entities",
            "fold": fold,
            "seed": spec.seed,
            "entities": {name: sorted(k for k, v in assignment.items() if v == name)
                         for name in SPLIT_NAMES},
            "sizes": shortfalls,
        }
        folds.append(result)
    return folds


def split_unseen_templates(
    examples: Sequence[RCExample],
    templates: Sequence[QuestionTemplate],
    spec: SplitSpec,
    entities: Mapping[str, Entity],
) -> list[FoldResult]:
    """Hold out one template per relation for test and one for dev.

    Relations with fewer than three verified templates are excluded and
    reported in the manifest. Positive examples are sampled per template
    (train_size per training template, dev_size/test_size for the held-out
    ones); negatives follow their question template at the configured ratio.
    A seen-variant test set re-asks every test example with a training
    template of the same relation.
    """
    if spec.kind != "templates":
        raise DataContractError("spec.kind must be 'templates'")
    verified: dict[str, list[QuestionTemplate]] = {}
    for template in templates:
        if template.status == "verified":
            verified.setdefault(template.relation_id, []).append(template)
    for group in verified.values():
        group.sort(key=lambda t: t.id)
    eligible = {r: ts for r, ts in verified.items() if len(ts) >= 3}
    excluded = sorted(set(verified) - set(eligible))
    if not eligible:
        raise DataContractError("no relation has three or more verified templates")

    by_template: dict[str, list[RCExample]] = {}
    for example in examples:
        by_template.setdefault(example.template_id, []).append(example)
    for group in by_template.values():
        group.sort(key=lambda e: e.id)

    folds = []
    for fold in range(spec.folds):
        rng = random.Random(derive_seed(spec.seed, "templates", fold))
        held_out: dict[str, dict[str, object]] = {}
        split_templates: dict[str, set[str]] = {name: set() for name in SPLIT_NAMES}
        for relation_id in sorted(eligible):
            order = rng.sample(eligible[relation_id], len(eligible[relation_id]))
            test_t, dev_t, train_ts = order[0], order[1], order[2:]
            held_out[relation_id] = {
                "test": test_t.id,
                "dev": dev_t.id,
                "train": sorted(t.id for t in train_ts),
            }
            split_templates["test"].add(test_t.id)
            split_templates["dev"].add(dev_t.id)
            split_templates["train"].update(t.id for t in train_ts)

        result = FoldResult(fold, [], [], [])
        shortfalls = {}
        per_split_n = {
            "train": spec.train_size,
            "dev": spec.dev_size,
            "test": spec.test_size,
        }
        for name in SPLIT_NAMES:
            positives: list[RCExample] = []
            negative_pool: list[RCExample] = []
            for template_id in sorted(split_templates[name]):
                pos, neg = _split_polarity(by_template.get(template_id, ()))
                sub_rng = random.Random(
                    derive_seed(spec.seed, fold, name, template_id)
                )
                take = min(per_split_n[name], len(pos))
                positives.extend(sub_rng.sample(pos, take))
                negative_pool.extend(neg)
            if positives and negative_pool:
                subset = balance(
                    positives,
                    negative_pool,
                    spec.ratio,
                    derive_seed(spec.seed, fold, name, "balance"),
                )
            else:
                subset = sorted(positives, key=lambda e: e.id)
                log.warning(
                    "fold %d %s: no negatives available for balancing", fold, name
                )
            setattr(result, name, subset)
            shortfalls[name] = {"selected": len(subset)}

        result.seen_test = _seen_variant(
            result.test, eligible, held_out, entities, spec.seed, fold
        )
        result.manifest = {
            "kind": "templates",
            "fold": fold,
            "seed": spec.seed,
            "held_out": held_out,
            "excluded_relations": excluded,
            "sizes": shortfalls,
        }
        folds.append(result)
    return folds


def _seen_variant(
    test: Sequence[RCExample],
    eligible: Mapping[str, list[QuestionTemplate]],
    held_out: Mapping[str, dict],
    entities: Mapping[str, Entity],
    seed: int,
    fold: int,
) -> list[RCExample]:
    """Re-ask test examples with a training template of the same relation."""
    replacement: dict[str, QuestionTemplate] = {}
    for relation_id in sorted(eligible):
        train_ids = set(held_out[relation_id]["train"])
        train_templates = [t for t in eligible[relation_id] if t.id in train_ids]
        rng = random.Random(derive_seed(seed, "seen", fold, relation_id))
        replacement[relation_id] = rng.choice(train_templates)
    variant = []
    for example in test:
        template = replacement.get(example.relation_id)
        entity = entities.get(example.entity_id)
        if template is None or entity is None:
            raise DataContractError(
                f"cannot build seen variant for example {example.id!r}"
            )
        question = tuple(t.text for t in tokenize(instantiate(template, entity)))
        variant.append(
            RCExample(
                id=example.id + "::seen",
                relation_id=example.relation_id,
                entity_id=example.entity_id,
                template_id=template.id,
                question=question,
                sentence=example.sentence,
                answers=example.answers,
                polarity=example.polarity,
            )
        )
    return variant


def _proportional_labels(counts: tuple[int, int, int]) -> list[str]:
    """Interleave train/dev/test labels so each prefix is near-proportional."""
    total = sum(counts)
    labels: list[str] = []
    filled = [0, 0, 0]
    for _ in range(total):
        # Most under-filled split relative to its quota gets the next slot.
        deficits = [
            (filled[i] / counts[i] if counts[i] else float("inf"), i)
            for i in range(3)
        ]
        _, pick = min(deficits)
        labels.append(SPLIT_NAMES[pick])
        filled[pick] += 1
    return labels


def split_unseen_relations(
    examples: Sequence[RCExample], spec: SplitSpec
) -> list[FoldResult]:
    """Partition the relation inventory; examples follow their relation.

    Relations are ordered by example count (ties broken by a seeded shuffle)
    and dealt into splits proportionally, which balances example mass.
    """
    if spec.kind != "relations":
        raise DataContractError("spec.kind must be 'relations'")
    by_relation: dict[str, list[RCExample]] = {}
    for example in examples:
        by_relation.setdefault(example.relation_id, []).append(example)
    inventory = sorted(by_relation)
    counts = spec.relation_counts
    if counts is None:
        n = len(inventory)
        n_train = round(n * 0.7)
        n_dev = max(1, round(n * 0.1))
        counts = (n_train, n_dev, n - n_train - n_dev)
    if sum(counts) != len(inventory) or min(counts) < 1:
        raise DataContractError(
            f"relation counts {counts} do not partition {len(inventory)} relations"
        )

    folds = []
    for fold in range(spec.folds):
        rng = random.Random(derive_seed(spec.seed, "relations", fold))
        shuffled = rng.sample(inventory, len(inventory))
        ordered = sorted(shuffled, key=lambda r: -len(by_relation[r]))
        labels = _proportional_labels(counts)
        assignment = dict(zip(ordered, labels))
        buckets: dict[str, list[RCExample]] = {name: [] for name in SPLIT_NAMES}
        for relation_id, examples_of in by_relation.items():
            buckets[assignment[relation_id]].extend(examples_of)
        result = FoldResult(fold, [], [], [])
        shortfalls = {}
        for name, target in zip(
            SPLIT_NAMES, (spec.train_size, spec.dev_size, spec.test_size)
        ):
            subset, info = _take_balanced(
                buckets[name], target, spec.ratio, derive_seed(spec.seed, fold, name)
            )
            setattr(result, name, subset)
            shortfalls[name] = info
        result.manifest = {
            "kind": "relations",
            "fold": fold,
            "seed": spec.seed,
            "relations": {
                name: sorted(r for r, v in assignment.items() if v == name)
                for name in SPLIT_NAMES
            },
            "sizes": shortfalls,
        }
        folds.append(result)
    return folds


def make_splits(
    examples: Sequence[RCExample],
    spec: SplitSpec,
    templates: Sequence[QuestionTemplate] | None = None,
    entities: Mapping[str, Entity] | None = None,
) -> list[FoldResult]:
    if spec.kind == "entities":
        return split_unseen_entities(examples, spec)
    if spec.kind == "relations":
        return split_unseen_relations(examples, spec)
    if templates is None or entities is None:
        raise DataContractError("template splits need the template list and entities")
    return split_unseen_templates(examples, templates, spec, entities)
