import pytest

from slotshot.corpus import AnswerSpan, Entity, make_sentence, SlotFillingInstance
from slotshot.errors import DataContractError
from slotshot.negatives import contains_answer, derive_seed, generate_negatives
from slotshot.querify import QuestionTemplate

ROSA = Entity("e1", "Rosa Vane")


def sentence(text: str, index: int = 0):
    return make_sentence("e1", index, text)


class TestContainsAnswer:
    def test_token_subsequence_case_insensitive(self):
        sent = sentence("She saw briar college yesterday .")
        assert contains_answer(sent, ["Briar College"])
        assert not contains_answer(sent, ["Briar University"])

    def test_partial_token_is_not_a_hit(self):
        assert not contains_answer(sentence("collegeville is a town ."), ["college"])

    def test_accepts_span_objects(self):
        sent = sentence("Rosa Vane married Tomas Okonkwo .")
        span = AnswerSpan("e1", 0, 3, 4, "Tomas Okonkwo")
        assert contains_answer(sent, [span])


def test_derive_seed_stable_and_distinct():
    assert derive_seed(7, "a", 1) == derive_seed(7, "a", 1)
    assert derive_seed(7, "a", 1) != derive_seed(7, "a", 2)
    assert derive_seed(7, "a") != derive_seed(8, "a")


def make_world():
    """One entity, two relations, one sentence each; the spouse sentence
    name-drops the workplace so it must be filtered for occupation questions."""
    s_work = make_sentence("e1", 0, "Rosa Vane worked as a nurse .")
    s_married = make_sentence("e1", 1, "Rosa Vane married Tomas at the nurse station .")
    instances = [
        SlotFillingInstance(
            "occupation", "e1", s_work, (AnswerSpan("e1", 0, 5, 5, "nurse"),)
        ),
        SlotFillingInstance(
            "spouse", "e1", s_married, (AnswerSpan("e1", 1, 3, 3, "Tomas"),)
        ),
    ]
    templates = [
        QuestionTemplate("qt_occ", "occupation", "What did {x} do for a living ?", status="verified"),
        QuestionTemplate("qt_sp", "spouse", "Who did {x} marry ?", status="verified"),
    ]
    return instances, templates, {"e1": ROSA}


class TestGenerateNegatives:
    def test_contaminated_sentence_filtered(self):
        instances, templates, entities = make_world()
        negatives, report = generate_negatives(instances, templates, entities, 1.0, 3)
        # occupation question x spouse sentence contains "nurse", so the only
        # viable pairing is the spouse question over the work sentence.
        assert report.candidates == 1
        assert len(negatives) == 1
        example = negatives[0]
        assert example.relation_id == "spouse"
        assert example.sentence.index == 0
        assert example.polarity == "negative"
        assert example.answers == ()

    def test_single_relation_entity_skipped(self):
        instances, templates, entities = make_world()
        negatives, report = generate_negatives(
            instances[:1], templates, entities, 1.0, 3
        )
        assert negatives == []
        assert report.entities_skipped == 1

    def test_deterministic_under_seed(self, small_pipeline):
        p = small_pipeline
        again, _ = generate_negatives(
            p.instances, p.corpus.templates, p.entities, 1.0, 20259
        )
        assert [e.id for e in again] == [
            e.id for e in generate_negatives(
                p.instances, p.corpus.templates, p.entities, 1.0, 20259
            )[0]
        ]

    def test_different_seed_changes_sample(self, small_pipeline):
        p = small_pipeline
        a, ra = generate_negatives(p.instances, p.corpus.templates, p.entities, 2.0, 1)
        b, rb = generate_negatives(p.instances, p.corpus.templates, p.entities, 2.0, 2)
        assert ra.target == rb.target
        # Sampling half the pool twice under different seeds should not agree.
        assert [e.id for e in a] != [e.id for e in b]

    def test_no_negative_contains_its_gold(self, small_pipeline):
        p = small_pipeline
        golds: dict[tuple[str, str], set[str]] = {}
        for instance in p.instances:
            golds.setdefault((instance.relation_id, instance.entity_id), set()).update(
                a.text for a in instance.answers
            )
        assert p.negatives
        for example in p.negatives:
            answers = golds.get((example.relation_id, example.entity_id), set())
            assert not contains_answer(example.sentence, answers), example.id

    def test_ratio_controls_target(self, small_pipeline):
        p = small_pipeline
        _, r1 = generate_negatives(p.instances, p.corpus.templates, p.entities, 1.0, 5)
        _, r2 = generate_negatives(p.instances, p.corpus.templates, p.entities, 2.0, 5)
        assert r1.target == r1.positives
        assert r2.target == round(r2.positives / 2.0)

    def test_bad_ratio_rejected(self):
        instances, templates, entities = make_world()
        with pytest.raises(DataContractError):
            generate_negatives(instances, templates, entities, 0.0, 1)
