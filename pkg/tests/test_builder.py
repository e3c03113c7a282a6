import pytest

from slotshot.builder import Fact, align_fact, build_dataset, mentions_entity
from slotshot.corpus import Entity, make_document_from_sentences
from slotshot.errors import DataContractError

ROSA = Entity("e1", "Rosa Vane", ("R. Vane",))


def doc(*sentences: str):
    return make_document_from_sentences("e1", list(sentences))


class TestAlignFact:
    def test_first_qualifying_sentence_wins(self):
        document = doc(
            "Rosa Vane studied at Briar College for years.",
            "Rosa Vane later taught at Briar College.",
        )
        result = align_fact(document, ROSA, Fact("studied_at", "e1", "Briar College"))
        assert result is not None
        sentence, span = result
        assert sentence.index == 0
        assert span.text == "Briar College"

    def test_requires_entity_mention(self):
        document = doc(
            "The school was Briar College.",
            "Rosa Vane stayed near Briar College.",
        )
        _, span = align_fact(document, ROSA, Fact("studied_at", "e1", "Briar College"))
        assert span.sentence_index == 1

    def test_alias_counts_as_mention(self):
        document = doc("R. Vane studied at Briar College.")
        result = align_fact(document, ROSA, Fact("studied_at", "e1", "Briar College"))
        assert result is not None

    def test_case_insensitive_object_match(self):
        document = doc("Rosa Vane studied at BRIAR COLLEGE.")
        _, span = align_fact(document, ROSA, Fact("studied_at", "e1", "briar college"))
        # The span records the sentence's own surface form.
        assert span.text == "BRIAR COLLEGE"

    def test_no_sentence_qualifies(self):
        document = doc("Rosa Vane lived quietly.")
        assert align_fact(document, ROSA, Fact("studied_at", "e1", "Briar College")) is None

    def test_first_occurrence_within_sentence(self):
        document = doc("Rosa Vane saw Oslo, loved Oslo.")
        _, span = align_fact(document, ROSA, Fact("visited", "e1", "Oslo"))
        assert (span.token_start, span.token_end) == (3, 3)


def test_mentions_entity_is_token_based():
    sent = doc("Rosavane is one word here.").sentences[0]
    assert not mentions_entity(sent, ROSA)
    sent2 = doc("They met rosa vane there.").sentences[0]
    assert mentions_entity(sent2, ROSA)


class TestBuildDataset:
    def test_grouping_and_report(self):
        documents = {
            "e1": doc(
                "Rosa Vane worked as a nurse and a weaver.",
                "Rosa Vane married Tomas Okonkwo in Oslo.",
            )
        }
        entities = {"e1": ROSA}
        facts = [
            Fact("occupation", "e1", "nurse"),
            Fact("occupation", "e1", "weaver"),
            Fact("spouse", "e1", "Tomas Okonkwo"),
            Fact("spouse", "e1", "nobody at all"),  # aligns nowhere
            Fact("spouse", "e9", "whoever"),  # unknown entity
        ]
        instances, report = build_dataset(documents, entities, facts)
        assert report.facts_total == 5
        assert report.facts_aligned == 3
        assert report.dropped_no_sentence == 1
        assert report.dropped_missing_entity == 1
        assert report.instances == 2
        occupation = next(i for i in instances if i.relation_id == "occupation")
        assert [a.text for a in occupation.answers] == ["nurse", "weaver"]

    def test_duplicate_facts_collapse(self):
        documents = {"e1": doc("Rosa Vane worked as a nurse.")}
        facts = [Fact("occupation", "e1", "nurse"), Fact("occupation", "e1", "nurse")]
        instances, report = build_dataset(documents, {"e1": ROSA}, facts)
        assert report.facts_aligned == 2
        assert len(instances) == 1
        assert len(instances[0].answers) == 1

    def test_missing_document_counted(self):
        _, report = build_dataset({}, {"e1": ROSA}, [Fact("r", "e1", "x")])
        assert report.dropped_missing_document == 1

    def test_output_order_deterministic(self):
        documents = {
            "e1": doc(
                "Rosa Vane worked as a nurse.",
                "Rosa Vane married Tomas Okonkwo.",
            )
        }
        facts = [
            Fact("spouse", "e1", "Tomas Okonkwo"),
            Fact("occupation", "e1", "nurse"),
        ]
        instances, _ = build_dataset(documents, {"e1": ROSA}, facts)
        assert [i.relation_id for i in instances] == ["occupation", "spouse"]


def test_fact_validation():
    with pytest.raises(DataContractError):
        Fact("", "e1", "x")
    with pytest.raises(DataContractError):
        Fact("r", "e1", "   ")
