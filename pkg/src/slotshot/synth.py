"""Deterministic synthetic corpus for desk-scale experiments.

Real encyclopedic corpora are out of reach here, so this module fabricates
one: entities with a handful of facts each, a one-document-per-entity text
where every fact sentence names the entity, lexically cues its relation, and
buries the answer among distractors. Relation cue stems are pairwise
distinct, which separates a cue-aware heuristic from a random named entity
picker by a wide margin.

Runnable: python -m slotshot.synth --out DIR --seed N [--entities K]
"""

from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .builder import Fact, fact_to_dict
from .corpus import (
    Document,
    Entity,
    Relation,
    document_to_dict,
    entity_to_dict,
    make_document_from_sentences,
    relation_to_dict,
    write_jsonl,
)
from .negatives import derive_seed
from .querify import QuestionTemplate, template_to_dict

WHERE, WHO, WHEN, WHAT = "where", "who", "when", "what"


@dataclass(frozen=True)
class RelationSpec:
    id: str
    kind: str
    pattern: str  # fields: {e} entity, {a}/{a1}-{a3} answers, {d}/{g} distractors, {y} year
    templates: tuple[str, str, str]
    answer_pool: tuple[str, ...] = ()
    multi: bool = False  # three answers in one sentence


ENTITY_FIRST = (
    "Alba Boris Clara Doran Edith Felix Greta Hugo Iris Jonas "
    "Karla Lior Mira Nils Odile Pavel Rosa Sven Tessa Umar"
).split()

ENTITY_LAST = (
    "Arden Brook Calder Dray Ellison Fontaine Garrel Hollis Ingram Jarvis "
    "Keller Lindt Marsh Noble Oakes Pryor Quill Rhodes Sutter Thorne "
    "Underhill Vance Whitlock Yates Zeller"
).split()

PLACE_FIRST = (
    "Greenhill Westmoor Sunfield Kaldova Brightwater Maplecrest Eastvale "
    "Norwick Ashcombe Riverton Duskmere Felwick Glenbarr Copperline "
    "Stonegate Ferndale Harborlight Ironwood Lilyfield Oxbow"
).split()

PERSON_FIRST = (
    "Marta Viktor Elena Casimir Petra Janos Lidia Stefan Noor Tomas "
    "Vera Ilya Sofia Emil Anouk Dmitri Leila Ruben Hana Oskar"
).split()

DISTRACTORS = (
    "Dana Quent|Rex Malbec|Ines Farrow|Bruno Tasker|Willa Northrop|"
    "Cato Rimes|Selma Voss|Arno Pelle|Freya Dunmore|Milo Castellan|"
    "Juno Ashford|Tilda Mercer|Ezra Coltrane|Beatrix Hale|Orin Seaver|"
    "Nadia Wexler"
).split("|")


def _places(second: str) -> tuple[str, ...]:
    return tuple(f"{first} {second}" for first in PLACE_FIRST)


def _persons(last: str) -> tuple[str, ...]:
    return tuple(f"{first} {last}" for first in PERSON_FIRST)


RELATION_SPECS: tuple[RelationSpec, ...] = (
    # Answers two capitalized tokens; the cue verb sits next to the answer
    # and the distractors sit well outside the anchor window.
    RelationSpec(
        "studied_at", WHERE,
        "{e} studied at {a} alongside {d} and {g}.",
        ("Where did {x} study?", "Where exactly did {x} study?", "Where has {x} studied?"),
        _places("University"),
    ),
    RelationSpec(
        "born_in", WHERE,
        "{e} was born inside {a}, far beyond {d} and {g}.",
        ("Where was {x} born?", "Where exactly was {x} born?", "Where had {x} been born?"),
        _places("Hollow"),
    ),
    RelationSpec(
        "buried_in", WHERE,
        "{e} rests buried within {a}, somewhat beyond {d} and {g}.",
        ("Where is {x} buried?", "Where exactly is {x} buried?", "Where was {x} buried?"),
        _places("Cemetery"),
    ),
    RelationSpec(
        "vacationed_in", WHERE,
        "{e} vacationed around {a}, trading stories beyond {d} and {g}.",
        ("Where did {x} vacation?", "Where does {x} vacation?", "Where has {x} vacationed?"),
        _places("Island"),
    ),
    RelationSpec(
        "settled_in", WHERE,
        "{e} settled close to {a}, many ridges past {d} and {g}.",
        ("Where did {x} settle?", "Where exactly did {x} settle?", "Where has {x} settled?"),
        _places("Valley"),
    ),
    RelationSpec(
        "lectured_at", WHERE,
        "{e} lectured at {a} while touring past {d} and {g}.",
        ("Where did {x} lecture?", "Where does {x} lecture?", "Where has {x} lectured?"),
        _places("College"),
    ),
    RelationSpec(
        "performed_at", WHERE,
        "{e} performed inside {a} on evenings, accompanied by {d} and {g}.",
        ("Where did {x} perform?", "Where does {x} perform?", "Where has {x} performed?"),
        _places("Theatre"),
    ),
    RelationSpec(
        "imprisoned_at", WHERE,
        "{e} was imprisoned at {a} despite letters from {d} and {g}.",
        ("Where was {x} imprisoned?", "Where exactly was {x} imprisoned?",
         "Where had {x} been imprisoned?"),
        _places("Fortress"),
    ),
    RelationSpec(
        "married_to", WHO,
        "{e} married {a} before a crowd, next to {d} and {g}.",
        ("Whom did {x} marry?", "Who did {x} marry?", "Who was {x} married to?"),
        _persons("Okonkwo"),
    ),
    RelationSpec(
        "mentored_by", WHO,
        "{e} was mentored by {a} and never by {d} or {g}.",
        ("Who mentored {x}?", "By whom was {x} mentored?", "Who has mentored {x}?"),
        _persons("Brandt"),
    ),
    RelationSpec(
        "succeeded_by", WHO,
        "{e} was succeeded by {a} over rivals such as {d} and {g}.",
        ("Who succeeded {x}?", "By whom was {x} succeeded?", "Who eventually succeeded {x}?"),
        _persons("Soriano"),
    ),
    RelationSpec(
        "coached_by", WHO,
        "{e} was coached by {a} away from rivals like {d} and {g}.",
        ("Who coached {x}?", "By whom was {x} coached?", "Who has coached {x}?"),
        _persons("Lukic"),
    ),
    RelationSpec(
        "portrayed_by", WHO,
        "{e} was portrayed by {a} on stage, never by {d} or {g}.",
        ("Who portrayed {x}?", "By whom was {x} portrayed?", "Who has portrayed {x}?"),
        _persons("Ferro"),
    ),
    RelationSpec(
        "hired_by", WHO,
        "{e} was hired by {a} after interviews with {d} and {g}.",
        ("Who hired {x}?", "By whom was {x} hired?", "Who once hired {x}?"),
        _persons("Quastel"),
    ),
    RelationSpec(
        "nursed_by", WHO,
        "{e} was nursed by {a} through winters, aided by {d} and {g}.",
        ("Who nursed {x}?", "By whom was {x} nursed?", "Who patiently nursed {x}?"),
        _persons("Vexley"),
    ),
    RelationSpec(
        "defeated", WHO,
        "{e} defeated {a} in finals watched by {d} and {g}.",
        ("Whom did {x} defeat?", "Who did {x} defeat?", "Whom has {x} defeated?"),
        _persons("Moreno"),
    ),
    # The year sits far from the entity but right after the cue, so only a
    # matching question licenses a span.
    RelationSpec(
        "retired_in", WHEN,
        "{e}, as colleagues often recall, finally retired in {y}.",
        ("When did {x} retire?", "In which year did {x} retire?", "When exactly did {x} retire?"),
    ),
    RelationSpec(
        "debuted_in", WHEN,
        "{e}, after a string of quiet seasons, debuted in {y}.",
        ("When did {x} debut?", "In which year did {x} debut?", "When exactly did {x} debut?"),
    ),
    RelationSpec(
        "knighted_in", WHEN,
        "{e}, to the surprise of the court, was knighted in {y}.",
        ("When was {x} knighted?", "In which year was {x} knighted?",
         "When exactly was {x} knighted?"),
    ),
    RelationSpec(
        "promoted_in", WHEN,
        "{e}, despite loud and public doubts, was promoted in {y}.",
        ("When was {x} promoted?", "In which year was {x} promoted?",
         "When exactly was {x} promoted?"),
    ),
    RelationSpec(
        "widowed_in", WHEN,
        "{e}, according to several somber letters, was widowed in {y}.",
        ("When was {x} widowed?", "In which year was {x} widowed?",
         "When exactly was {x} widowed?"),
    ),
    RelationSpec(
        "naturalized_in", WHEN,
        "{e}, following a calm and orderly process, was naturalized in {y}.",
        ("When was {x} naturalized?", "In which year was {x} naturalized?",
         "When exactly was {x} naturalized?"),
    ),
    RelationSpec(
        "occupation", WHAT,
        "{e} worked as a {a1}, then {a2} and finally {a3}.",
        ("What did {x} work as?", "What does {x} work as?", "What has {x} worked as?"),
        ("carpenter", "weaver", "potter", "sailor", "chemist", "printer",
         "cooper", "tanner", "glazier", "farrier"),
        multi=True,
    ),
    RelationSpec(
        "plays_instrument", WHAT,
        "{e} plays the {a} with startling devotion.",
        ("What does {x} play?", "What did {x} play?", "What has {x} played?"),
        ("cello", "oboe", "banjo", "violin", "zither", "flute", "cornet", "lute"),
    ),
    RelationSpec(
        "signature_dish", WHAT,
        "{e} cooks {a} for the whole block on weekends.",
        ("What does {x} cook?", "What did {x} cook?", "What has {x} cooked?"),
        ("paella", "gumbo", "risotto", "goulash", "borscht", "polenta",
         "chowder", "tagine"),
    ),
    RelationSpec(
        "collects", WHAT,
        "{e} collects {a} with methodical care.",
        ("What does {x} collect?", "What did {x} collect?", "What has {x} collected?"),
        ("stamps", "fossils", "marbles", "kites", "medals", "buttons",
         "lanterns", "atlases"),
    ),
    RelationSpec(
        "brews", WHAT,
        "{e} brews {a} in the cellar every autumn.",
        ("What does {x} brew?", "What did {x} brew?", "What has {x} brewed?"),
        ("cider", "mead", "saison", "lambic", "stout", "kvass"),
    ),
    RelationSpec(
        "carves", WHAT,
        "{e} carves {a} from fallen timber all winter.",
        ("What does {x} carve?", "What did {x} carve?", "What has {x} carved?"),
        ("totems", "figurines", "spoons", "masks", "oars", "decoys"),
    ),
    RelationSpec(
        "paints", WHAT,
        "{e} paints {a} on commission for patrons abroad.",
        ("What does {x} paint?", "What did {x} paint?", "What has {x} painted?"),
        ("murals", "frescoes", "icons", "banners", "seascapes", "signs"),
    ),
    RelationSpec(
        "grows", WHAT,
        "{e} grows {a} behind the old grain store.",
        ("What does {x} grow?", "What did {x} grow?", "What has {x} grown?"),
        ("orchids", "melons", "barley", "hops", "quinces", "dahlias"),
    ),
)

_INTRO = "{e} features in many regional archives."
_OUTRO = "Records from this period remain sparse."

_ADVERSARIAL_RATE = 0.3  # chance a sentence name-drops a sibling fact's answer


@dataclass
class SynthCorpus:
    relations: list[Relation]
    entities: list[Entity]
    documents: list[Document]
    facts: list[Fact]
    templates: list[QuestionTemplate]


def _spec_by_id() -> dict[str, RelationSpec]:
    return {spec.id: spec for spec in RELATION_SPECS}


def generate_corpus(seed: int, n_entities: int = 500) -> SynthCorpus:
    if n_entities > len(ENTITY_FIRST) * len(ENTITY_LAST):
        raise ValueError("not enough distinct entity names")
    relations = [Relation(spec.id, spec.id.replace("_", " ")) for spec in RELATION_SPECS]
    templates = [
        QuestionTemplate(
            id=f"qt::{spec.id}::{k}",
            relation_id=spec.id,
            text=text,
            source="manual",
            status="verified",
        )
        for spec in RELATION_SPECS
        for k, text in enumerate(spec.templates)
    ]

    names = [f"{first} {last}" for last in ENTITY_LAST for first in ENTITY_FIRST]
    entities = [Entity(f"e{i:04d}", names[i]) for i in range(n_entities)]

    documents: list[Document] = []
    facts: list[Fact] = []
    for entity in entities:
        rng = random.Random(derive_seed(seed, "entity", entity.id))
        chosen = rng.sample(RELATION_SPECS, rng.choice((3, 4, 5)))
        chosen = sorted(chosen, key=lambda s: s.id)
        rng.shuffle(chosen)

        years = iter(rng.sample(range(1850, 2000), len(chosen)))
        rendered: list[tuple[RelationSpec, dict[str, str], str]] = []
        for spec in chosen:
            if spec.kind == WHEN:
                answers = [str(next(years))]
            elif spec.multi:
                answers = rng.sample(spec.answer_pool, 3)
            else:
                answers = [rng.choice(spec.answer_pool)]
            distractors = rng.sample(DISTRACTORS, 2)
            fields = {"e": entity.name, "d": distractors[0], "g": distractors[1]}
            if spec.kind == WHEN:
                fields["y"] = answers[0]
            elif spec.multi:
                fields.update(a1=answers[0], a2=answers[1], a3=answers[2])
            else:
                fields["a"] = answers[0]
            rendered.append((spec, fields, answers[0]))
            facts.extend(Fact(spec.id, entity.id, obj) for obj in answers)

        # A later sentence may name-drop an earlier fact's two-token answer in
        # place of its final distractor; the negatives filter must catch these.
        sentences = [_INTRO.format(e=entity.name)]
        earlier: list[str] = []
        for spec, fields, primary in rendered:
            if (
                spec.kind in (WHERE, WHO)
                and earlier
                and rng.random() < _ADVERSARIAL_RATE
            ):
                fields["g"] = rng.choice(earlier)
            if spec.kind in (WHERE, WHO):
                earlier.append(primary)
            sentences.append(spec.pattern.format(**fields))
        sentences.append(_OUTRO)
        documents.append(make_document_from_sentences(entity.id, sentences))

    return SynthCorpus(relations, entities, documents, facts, templates)


def write_corpus(out_dir: str | Path, corpus: SynthCorpus) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_jsonl(out / "relations.jsonl", (relation_to_dict(r) for r in corpus.relations))
    write_jsonl(out / "entities.jsonl", (entity_to_dict(e) for e in corpus.entities))
    write_jsonl(out / "documents.jsonl", (document_to_dict(d) for d in corpus.documents))
    write_jsonl(out / "facts.jsonl", (fact_to_dict(f) for f in corpus.facts))
    write_jsonl(out / "templates.jsonl", (template_to_dict(t) for t in corpus.templates))


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--entities", type=int, default=500)
    args = parser.parse_args(argv)
    write_corpus(args.out, generate_corpus(args.seed, args.entities))
    return 0


if __name__ == "__main__":
    sys.exit(main())
