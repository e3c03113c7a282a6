"""Corpus data model: relations, entities, tokenized sentences, answer spans.

All types are immutable. Tokenization is whitespace splitting plus peeling of
leading/trailing ASCII punctuation and the possessive marker ('s); every token
carries character offsets into its source string, so the original text can
always be recovered by slicing.
"""

from __future__ import annotations

import io
import json
import re
import string
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import DataContractError

_PUNCT = frozenset(string.punctuation)

POSITIVE = "positive"
NEGATIVE = "negative"


@dataclass(frozen=True)
class Relation:
    """A KB relation (slot type)."""

    id: str
    name: str

    def __post_init__(self) -> None:
        if not self.id or not self.name:
            raise DataContractError("relation id and name must be non-empty")


@dataclass(frozen=True)
class Entity:
    """A KB entity with a canonical name and optional aliases."""

    id: str
    name: str
    aliases: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.id or not self.name:
            raise DataContractError("entity id and name must be non-empty")
        if len(set(self.aliases)) != len(self.aliases):
            raise DataContractError(f"entity {self.id} has duplicate aliases")

    def surface_forms(self) -> tuple[str, ...]:
        return (self.name,) + self.aliases


@dataclass(frozen=True)
class Token:
    """A token with character offsets into its source string."""

    text: str
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end <= self.start:
            raise DataContractError(f"bad token offsets ({self.start}, {self.end})")


@dataclass(frozen=True)
class Sentence:
    """A tokenized sentence with document provenance.

    Token offsets are relative to ``text``; ``index`` is the sentence's
    position within its document.
    """

    document_id: str
    index: int
    text: str
    tokens: tuple[Token, ...]

    def __post_init__(self) -> None:
        if self.index < 0:
            raise DataContractError("sentence index must be >= 0")
        prev_end = -1
        for tok in self.tokens:
            if tok.start < prev_end:
                raise DataContractError("sentence tokens overlap or are out of order")
            if self.text[tok.start : tok.end] != tok.text:
                raise DataContractError(
                    f"token {tok.text!r} does not match its slice in {self.text!r}"
                )
            prev_end = tok.end

    def token_texts(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)

    def span_text(self, token_start: int, token_end: int) -> str:
        """Surface form of the inclusive token range, with original spacing."""
        if not 0 <= token_start <= token_end < len(self.tokens):
            raise DataContractError(
                f"span ({token_start}, {token_end}) out of bounds for {len(self.tokens)} tokens"
            )
        return self.text[self.tokens[token_start].start : self.tokens[token_end].end]

    @property
    def ref(self) -> tuple[str, int]:
        return (self.document_id, self.index)


@dataclass(frozen=True)
class Document:
    """One article; by construction there is one document per entity."""

    entity_id: str
    sentences: tuple[Sentence, ...]

    @property
    def id(self) -> str:
        return self.entity_id


@dataclass(frozen=True)
class AnswerSpan:
    """An inclusive token range within one sentence of one document."""

    document_id: str
    sentence_index: int
    token_start: int
    token_end: int
    text: str

    def __post_init__(self) -> None:
        if self.token_start < 0 or self.token_end < self.token_start:
            raise DataContractError(
                f"bad answer span ({self.token_start}, {self.token_end})"
            )

    @property
    def sentence_ref(self) -> tuple[str, int]:
        return (self.document_id, self.sentence_index)


@dataclass(frozen=True)
class SlotFillingInstance:
    """A (relation, entity, sentence) triple with its gold answer spans."""

    relation_id: str
    entity_id: str
    sentence: Sentence
    answers: tuple[AnswerSpan, ...]

    def __post_init__(self) -> None:
        if not self.answers:
            raise DataContractError("slot filling instance needs at least one answer")
        for span in self.answers:
            _check_span_in_sentence(span, self.sentence)

    @property
    def key(self) -> tuple[str, str, str, int]:
        return (self.relation_id, self.entity_id) + self.sentence.ref


@dataclass(frozen=True)
class RCExample:
    """A reading comprehension example: question tokens over one sentence.

    ``relation_id``, ``entity_id`` and ``template_id`` are provenance metadata
    for constructing splits; scorers never see them. Negative examples have an
    empty answer tuple.
    """

    id: str
    relation_id: str
    entity_id: str
    template_id: str
    question: tuple[str, ...]
    sentence: Sentence
    answers: tuple[AnswerSpan, ...]
    polarity: str

    def __post_init__(self) -> None:
        if self.polarity not in (POSITIVE, NEGATIVE):
            raise DataContractError(f"bad polarity {self.polarity!r}")
        if (self.polarity == POSITIVE) != bool(self.answers):
            raise DataContractError(
                "positive examples need answers and negative examples need none"
            )
        if not self.question:
            raise DataContractError("question must have at least one token")
        for span in self.answers:
            _check_span_in_sentence(span, self.sentence)


def _check_span_in_sentence(span: AnswerSpan, sentence: Sentence) -> None:
    if span.sentence_ref != sentence.ref:
        raise DataContractError(
            f"answer span references {span.sentence_ref}, sentence is {sentence.ref}"
        )
    if span.token_end >= len(sentence.tokens):
        raise DataContractError("answer span exceeds sentence length")
    if span.text != sentence.span_text(span.token_start, span.token_end):
        raise DataContractError(
            f"answer span text {span.text!r} does not match sentence surface"
        )


def tokenize(text: str) -> list[Token]:
    """Split text into tokens carrying character offsets.

    Whitespace separates chunks; leading and trailing ASCII punctuation of a
    chunk become single-character tokens and a trailing possessive 's is split
    off. The concatenation of slices always reproduces the source.
    """
    tokens: list[Token] = []
    for match in re.finditer(r"\S+", text):
        base = match.start()
        for offset, piece in _split_chunk(match.group()):
            tokens.append(Token(piece, base + offset, base + offset + len(piece)))
    return tokens


def _split_chunk(chunk: str) -> list[tuple[int, str]]:
    left: list[tuple[int, str]] = []
    i, j = 0, len(chunk)
    while i < j and chunk[i] in _PUNCT:
        left.append((i, chunk[i]))
        i += 1
    right: list[tuple[int, str]] = []
    while j > i and chunk[j - 1] in _PUNCT:
        j -= 1
        right.append((j, chunk[j]))
    right.reverse()
    core = chunk[i:j]
    middle: list[tuple[int, str]] = []
    if core:
        if len(core) > 2 and core[-2:] in ("'s", "'S"):
            middle = [(i, core[:-2]), (i + len(core) - 2, core[-2:])]
        else:
            middle = [(i, core)]
    return left + middle + right


_BOUNDARY = re.compile(r"[.!?] (?=[A-Z])")


def split_sentences(text: str) -> list[str]:
    """Split text on sentence-final punctuation followed by an uppercase letter."""
    pieces: list[str] = []
    start = 0
    for match in _BOUNDARY.finditer(text):
        pieces.append(text[start : match.start() + 1])
        start = match.end()
    tail = text[start:].strip()
    if tail:
        pieces.append(tail)
    return [p.strip() for p in pieces if p.strip()]


def make_sentence(document_id: str, index: int, text: str) -> Sentence:
    return Sentence(document_id, index, text, tuple(tokenize(text)))


def make_document(entity_id: str, text: str) -> Document:
    sentences = tuple(
        make_sentence(entity_id, i, s) for i, s in enumerate(split_sentences(text))
    )
    return Document(entity_id, sentences)


def make_document_from_sentences(entity_id: str, sentences: Sequence[str]) -> Document:
    return Document(
        entity_id,
        tuple(make_sentence(entity_id, i, s) for i, s in enumerate(sentences)),
    )


# --- JSONL serialization ----------------------------------------------------
#
# Records are written with sorted keys and no trailing whitespace so that
# identical inputs produce byte-identical files. Sentences store only their
# text; tokens are recomputed on load (tokenize is pure).


def dumps_record(record: dict) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def write_jsonl(path: str | Path, records: Iterable[dict]) -> None:
    with io.open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(dumps_record(record))
            fh.write("\n")


def read_jsonl(path: str | Path) -> Iterator[dict]:
    with io.open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataContractError(f"{path}:{line_no}: invalid JSON ({exc})") from exc


def sentence_to_dict(sentence: Sentence) -> dict:
    return {
        "document_id": sentence.document_id,
        "index": sentence.index,
        "text": sentence.text,
    }


def sentence_from_dict(record: dict) -> Sentence:
    try:
        return make_sentence(record["document_id"], record["index"], record["text"])
    except KeyError as exc:
        raise DataContractError(f"sentence record missing field {exc}") from exc


def span_to_dict(span: AnswerSpan) -> dict:
    return {
        "document_id": span.document_id,
        "sentence_index": span.sentence_index,
        "token_start": span.token_start,
        "token_end": span.token_end,
        "text": span.text,
    }


def span_from_dict(record: dict) -> AnswerSpan:
    try:
        return AnswerSpan(
            record["document_id"],
            record["sentence_index"],
            record["token_start"],
            record["token_end"],
            record["text"],
        )
    except KeyError as exc:
        raise DataContractError(f"answer span record missing field {exc}") from exc


def instance_to_dict(instance: SlotFillingInstance) -> dict:
    return {
        "relation_id": instance.relation_id,
        "entity_id": instance.entity_id,
        "sentence": sentence_to_dict(instance.sentence),
        "answers": [span_to_dict(a) for a in instance.answers],
    }


def instance_from_dict(record: dict) -> SlotFillingInstance:
    try:
        return SlotFillingInstance(
            record["relation_id"],
            record["entity_id"],
            sentence_from_dict(record["sentence"]),
            tuple(span_from_dict(a) for a in record["answers"]),
        )
    except KeyError as exc:
        raise DataContractError(f"instance record missing field {exc}") from exc


def example_to_dict(example: RCExample) -> dict:
    return {
        "id": example.id,
        "relation_id": example.relation_id,
        "entity_id": example.entity_id,
        "template_id": example.template_id,
        "question": list(example.question),
        "sentence": sentence_to_dict(example.sentence),
        "answers": [span_to_dict(a) for a in example.answers],
        "polarity": example.polarity,
    }


def example_from_dict(record: dict) -> RCExample:
    try:
        return RCExample(
            record["id"],
            record["relation_id"],
            record["entity_id"],
            record["template_id"],
            tuple(record["question"]),
            sentence_from_dict(record["sentence"]),
            tuple(span_from_dict(a) for a in record["answers"]),
            record["polarity"],
        )
    except KeyError as exc:
        raise DataContractError(f"example record missing field {exc}") from exc


def entity_to_dict(entity: Entity) -> dict:
    return {"id": entity.id, "name": entity.name, "aliases": list(entity.aliases)}


def entity_from_dict(record: dict) -> Entity:
    try:
        return Entity(record["id"], record["name"], tuple(record.get("aliases", ())))
    except KeyError as exc:
        raise DataContractError(f"entity record missing field {exc}") from exc


def relation_to_dict(relation: Relation) -> dict:
    return {"id": relation.id, "name": relation.name}


def relation_from_dict(record: dict) -> Relation:
    try:
        return Relation(record["id"], record["name"])
    except KeyError as exc:
        raise DataContractError(f"relation record missing field {exc}") from exc


def document_from_dict(record: dict) -> Document:
    if "entity_id" not in record:
        raise DataContractError("document record missing field 'entity_id'")
    if "sentences" in record:
        return make_document_from_sentences(record["entity_id"], record["sentences"])
    if "text" in record:
        return make_document(record["entity_id"], record["text"])
    raise DataContractError("document record needs either 'text' or 'sentences'")


def document_to_dict(document: Document) -> dict:
    return {
        "entity_id": document.entity_id,
        "sentences": [s.text for s in document.sentences],
    }


def load_entities(path: str | Path) -> dict[str, Entity]:
    entities: dict[str, Entity] = {}
    for record in read_jsonl(path):
        entity = entity_from_dict(record)
        if entity.id in entities:
            raise DataContractError(f"duplicate entity id {entity.id}")
        entities[entity.id] = entity
    return entities


def load_relations(path: str | Path) -> dict[str, Relation]:
    relations: dict[str, Relation] = {}
    for record in read_jsonl(path):
        relation = relation_from_dict(record)
        if relation.id in relations:
            raise DataContractError(f"duplicate relation id {relation.id}")
        relations[relation.id] = relation
    return relations


def load_documents(path: str | Path) -> dict[str, Document]:
    documents: dict[str, Document] = {}
    for record in read_jsonl(path):
        document = document_from_dict(record)
        if document.id in documents:
            raise DataContractError(f"duplicate document for entity {document.id}")
        documents[document.id] = document
    return documents
