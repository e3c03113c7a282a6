import pytest
from fastapi.testclient import TestClient

from slotshot.annotation import AnnotationService
from slotshot.annotation.api import create_app

from test_annotation import build_world

STUDY_TEMPLATES = [
    "Where did {x} study?",
    "Which school did {x} attend?",
    "What did {x} read at university?",
]


@pytest.fixture()
def client():
    relations, entities, instances = build_world()
    service = AnnotationService(relations, entities, instances)
    with TestClient(create_app(service)) as c:
        yield c


def create_tasks(client, relation_id="studied_at", seed=7) -> list[str]:
    resp = client.post("/tasks/collection", json={"relation_id": relation_id, "seed": seed})
    assert resp.status_code == 201
    return resp.json()["created"]


def collect_template(client, task_id: str, annotator="a1") -> str:
    resp = client.post(
        "/responses/collection",
        json={"task_id": task_id, "annotator_id": annotator, "templates": STUDY_TEMPLATES},
    )
    assert resp.status_code == 201
    return resp.json()["stored"][0]


class TestRelations:
    def test_lists_relations_with_instance_counts(self, client):
        resp = client.get("/relations")
        assert resp.status_code == 200
        rows = resp.json()
        assert [r["id"] for r in rows] == ["spouse", "studied_at"]
        assert {r["id"]: r["instances"] for r in rows} == {"spouse": 4, "studied_at": 16}


class TestCollectionEndpoints:
    def test_create_returns_task_ids(self, client):
        created = create_tasks(client)
        assert len(created) == 6
        assert all(tid.startswith("ct::studied_at::") for tid in created)

    def test_create_twice_conflicts(self, client):
        create_tasks(client)
        resp = client.post("/tasks/collection", json={"relation_id": "studied_at", "seed": 7})
        assert resp.status_code == 409
        assert "detail" in resp.json()

    def test_unknown_relation_is_404(self, client):
        resp = client.post("/tasks/collection", json={"relation_id": "nope", "seed": 7})
        assert resp.status_code == 404

    def test_open_tasks_shape(self, client):
        create_tasks(client)
        resp = client.get("/tasks/collection", params={"annotator": "a1"})
        assert resp.status_code == 200
        tasks = resp.json()
        assert len(tasks) == 6
        for task in tasks:
            assert task["slots_remaining"] == 3
            assert "instance_keys" not in task
            shown = task["show_relation_name"]
            assert (task["relation_name"] is None) == (not shown)

    def test_annotator_query_param_is_required(self, client):
        assert client.get("/tasks/collection").status_code == 422

    def test_submit_stores_templates(self, client):
        task_id = create_tasks(client)[0]
        resp = client.post(
            "/responses/collection",
            json={"task_id": task_id, "annotator_id": "a1", "templates": STUDY_TEMPLATES},
        )
        assert resp.status_code == 201
        body = resp.json()
        assert len(body["stored"]) == 3
        assert body["merged"] == []

    def test_duplicate_submission_conflicts(self, client):
        task_id = create_tasks(client)[0]
        collect_template(client, task_id)
        resp = client.post(
            "/responses/collection",
            json={"task_id": task_id, "annotator_id": "a1", "templates": STUDY_TEMPLATES},
        )
        assert resp.status_code == 409

    def test_repeated_templates_merge(self, client):
        task_id = create_tasks(client)[0]
        collect_template(client, task_id, annotator="a1")
        resp = client.post(
            "/responses/collection",
            json={"task_id": task_id, "annotator_id": "a2", "templates": STUDY_TEMPLATES},
        )
        assert resp.status_code == 201
        body = resp.json()
        assert body["stored"] == []
        assert len(body["merged"]) == 3

    def test_wrong_template_count_is_400(self, client):
        task_id = create_tasks(client)[0]
        resp = client.post(
            "/responses/collection",
            json={
                "task_id": task_id,
                "annotator_id": "a1",
                "templates": STUDY_TEMPLATES[:2],
            },
        )
        assert resp.status_code == 400

    def test_template_without_placeholder_is_400(self, client):
        task_id = create_tasks(client)[0]
        templates = ["Where did someone study?"] + STUDY_TEMPLATES[:2]
        resp = client.post(
            "/responses/collection",
            json={"task_id": task_id, "annotator_id": "a1", "templates": templates},
        )
        assert resp.status_code == 400

    def test_empty_template_list_fails_structural_validation(self, client):
        task_id = create_tasks(client)[0]
        resp = client.post(
            "/responses/collection",
            json={"task_id": task_id, "annotator_id": "a1", "templates": []},
        )
        assert resp.status_code == 422

    def test_unknown_task_is_404(self, client):
        resp = client.post(
            "/responses/collection",
            json={"task_id": "ct::none", "annotator_id": "a1", "templates": STUDY_TEMPLATES},
        )
        assert resp.status_code == 404


class TestVerificationEndpoints:
    def start_verification(self, client) -> tuple[str, list[str]]:
        task_id = create_tasks(client)[0]
        template_id = collect_template(client, task_id)
        resp = client.post("/tasks/verification", json={"template_id": template_id, "seed": 3})
        assert resp.status_code == 201
        body = resp.json()
        return template_id, body["created"]

    def test_create_reports_pool_exhaustion(self, client):
        task_id = create_tasks(client)[0]
        template_id = collect_template(client, task_id)
        resp = client.post("/tasks/verification", json={"template_id": template_id, "seed": 3})
        # 12 of the 16 study sentences were spent on collection sets.
        assert resp.json()["report"] == {"requested": 10, "created": 4}

    def test_create_twice_conflicts(self, client):
        template_id, _ = self.start_verification(client)
        resp = client.post("/tasks/verification", json={"template_id": template_id, "seed": 3})
        assert resp.status_code == 409

    def test_unknown_template_is_404(self, client):
        resp = client.post("/tasks/verification", json={"template_id": "tpl::x", "seed": 3})
        assert resp.status_code == 404

    def test_open_tasks_never_reveal_answers(self, client):
        _, created = self.start_verification(client)
        resp = client.get("/tasks/verification", params={"annotator": "v1"})
        assert resp.status_code == 200
        tasks = resp.json()
        assert [t["id"] for t in tasks] == sorted(created)
        for task in tasks:
            assert set(task) == {"id", "template_id", "question", "sentence"}
            assert set(task["sentence"]) == {"text", "tokens"}

    def test_submit_span_and_unanswerable(self, client):
        _, created = self.start_verification(client)
        ok = client.post(
            "/responses/verification",
            json={"task_id": created[0], "annotator_id": "v1", "span": {"start": 4, "end": 5}},
        )
        assert ok.status_code == 201
        assert ok.json() == {"accepted": True}
        skip = client.post(
            "/responses/verification",
            json={"task_id": created[1], "annotator_id": "v1", "unanswerable": True},
        )
        assert skip.status_code == 201

    def test_answered_task_leaves_the_annotator_queue(self, client):
        _, created = self.start_verification(client)
        client.post(
            "/responses/verification",
            json={"task_id": created[0], "annotator_id": "v1", "span": {"start": 4, "end": 5}},
        )
        remaining = client.get("/tasks/verification", params={"annotator": "v1"}).json()
        assert created[0] not in [t["id"] for t in remaining]
        assert len(remaining) == len(created) - 1

    def test_double_answer_conflicts(self, client):
        _, created = self.start_verification(client)
        payload = {"task_id": created[0], "annotator_id": "v1", "span": {"start": 4, "end": 5}}
        assert client.post("/responses/verification", json=payload).status_code == 201
        assert client.post("/responses/verification", json=payload).status_code == 409

    def test_span_and_unanswerable_are_mutually_exclusive(self, client):
        _, created = self.start_verification(client)
        neither = client.post(
            "/responses/verification",
            json={"task_id": created[0], "annotator_id": "v1"},
        )
        assert neither.status_code == 400
        both = client.post(
            "/responses/verification",
            json={
                "task_id": created[0],
                "annotator_id": "v1",
                "span": {"start": 4, "end": 5},
                "unanswerable": True,
            },
        )
        assert both.status_code == 400

    def test_out_of_bounds_span_is_400(self, client):
        _, created = self.start_verification(client)
        resp = client.post(
            "/responses/verification",
            json={"task_id": created[0], "annotator_id": "v1", "span": {"start": 3, "end": 99}},
        )
        assert resp.status_code == 400

    def test_unknown_task_is_404(self, client):
        resp = client.post(
            "/responses/verification",
            json={"task_id": "vt::none::00", "annotator_id": "v1", "unanswerable": True},
        )
        assert resp.status_code == 404


class TestDecisionEndpoints:
    def verify_template(self, client) -> str:
        task_id = create_tasks(client)[0]
        template_id = collect_template(client, task_id)
        created = client.post(
            "/tasks/verification", json={"template_id": template_id, "seed": 3}
        ).json()["created"]
        for tid in created:
            client.post(
                "/responses/verification",
                json={"task_id": tid, "annotator_id": "v1", "span": {"start": 4, "end": 5}},
            )
        return template_id

    def test_evaluate_promotes_template(self, client):
        template_id = self.verify_template(client)
        resp = client.post(f"/templates/{template_id}/evaluate")
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "verified"
        assert body["n_trials"] == 4
        assert body["n_correct"] == 4
        assert body["mean_overlap_f1"] == pytest.approx(1.0)

    def test_evaluate_unknown_template_is_404(self, client):
        assert client.post("/templates/tpl::missing/evaluate").status_code == 404

    def test_verified_template_cannot_start_another_round(self, client):
        template_id = self.verify_template(client)
        client.post(f"/templates/{template_id}/evaluate")
        resp = client.post("/tasks/verification", json={"template_id": template_id, "seed": 9})
        assert resp.status_code == 409

    def test_template_listing_filters(self, client):
        template_id = self.verify_template(client)
        client.post(f"/templates/{template_id}/evaluate")
        verified = client.get(
            "/templates", params={"relation": "studied_at", "status": "verified"}
        ).json()
        assert [t["id"] for t in verified] == [template_id]
        everything = client.get("/templates").json()
        assert len(everything) == 3

    def test_dashboard_tracks_decisions(self, client):
        empty = client.get("/dashboard").json()
        assert empty == {"relations": [], "decided": 0, "verified": 0, "pass_rate": 0.0}
        template_id = self.verify_template(client)
        client.post(f"/templates/{template_id}/evaluate")
        board = client.get("/dashboard").json()
        assert board["decided"] == 1
        assert board["verified"] == 1
        assert board["pass_rate"] == 1.0
        row = next(r for r in board["relations"] if r["relation_id"] == "studied_at")
        assert row["verified"] == 1
        assert row["candidate"] == 2
