"""Record live annotation-service round-trips into a JSON fixture.

Drives the real service through its HTTP surface and captures one
exchange per payload shape the UI can produce, including the error
shapes. The frontend test suite replays the fixture against its own
schemas, so a drift on either side fails loudly.

Regenerate with:  python3 scripts/record_roundtrips.py
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi.testclient import TestClient

from slotshot.annotation.api import create_app
from slotshot.annotation.service import AnnotationService
from slotshot.builder import build_dataset
from slotshot.synth import generate_corpus

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "roundtrips.json"

recorded: list[dict] = []


def call(client, name, method, path, *, query=None, body=None):
    response = client.request(method, path, params=query, json=body)
    recorded.append(
        {
            "name": name,
            "request": {
                "method": method,
                "path": path,
                "query": query,
                "body": body,
            },
            "response": {
                "status": response.status_code,
                "body": response.json(),
            },
        }
    )
    return response.json()


def main() -> None:
    corpus = generate_corpus(seed=29, n_entities=120)
    documents = {d.id: d for d in corpus.documents}
    entities = {e.id: e for e in corpus.entities}
    instances, _ = build_dataset(documents, entities, corpus.facts)
    service = AnnotationService(corpus.relations, corpus.entities, instances)
    client = TestClient(create_app(service))

    relations = call(client, "list_relations", "GET", "/relations")
    relation_id = max(relations, key=lambda r: r["instances"])["id"]

    call(
        client, "create_collection_tasks", "POST", "/tasks/collection",
        body={"relation_id": relation_id, "seed": 11},
    )
    open_tasks = call(
        client, "open_collection_tasks", "GET", "/tasks/collection",
        query={"annotator": "ann-1"},
    )
    shown = next(t for t in open_tasks if t["show_relation_name"])
    hidden = next(t for t in open_tasks if not t["show_relation_name"])

    templates = [
        "What does {x} grow?",
        "Which crop is raised by {x}?",
        "What is cultivated by {x}?",
    ]
    stored = call(
        client, "submit_collection", "POST", "/responses/collection",
        body={"task_id": shown["id"], "annotator_id": "ann-1", "templates": templates},
    )["stored"]
    call(
        client, "submit_collection_repeat", "POST", "/responses/collection",
        body={"task_id": hidden["id"], "annotator_id": "ann-2", "templates": templates},
    )
    call(
        client, "collection_wrong_count", "POST", "/responses/collection",
        body={"task_id": hidden["id"], "annotator_id": "ann-3",
              "templates": templates[:2]},
    )
    call(
        client, "collection_no_placeholder", "POST", "/responses/collection",
        body={"task_id": hidden["id"], "annotator_id": "ann-3",
              "templates": ["What does x grow?", *templates[:2]]},
    )
    call(
        client, "collection_duplicate_annotator", "POST", "/responses/collection",
        body={"task_id": shown["id"], "annotator_id": "ann-1", "templates": templates},
    )

    template_id = stored[0]
    call(
        client, "create_verification_tasks", "POST", "/tasks/verification",
        body={"template_id": template_id, "seed": 23, "n_trials": 6},
    )
    open_ver = call(
        client, "open_verification_tasks", "GET", "/tasks/verification",
        query={"annotator": "ver-1"},
    )

    def gold_span(task_id):
        gold = service.verification_tasks[task_id].golds[0]
        return {"start": gold.token_start, "end": gold.token_end}

    first, second, *rest = [t["id"] for t in open_ver]
    call(
        client, "submit_verification_span", "POST", "/responses/verification",
        body={"task_id": first, "annotator_id": "ver-1",
              "span": gold_span(first), "unanswerable": False},
    )
    call(
        client, "submit_verification_unanswerable", "POST", "/responses/verification",
        body={"task_id": second, "annotator_id": "ver-1",
              "span": None, "unanswerable": True},
    )
    call(
        client, "verification_both_given", "POST", "/responses/verification",
        body={"task_id": first, "annotator_id": "ver-2",
              "span": gold_span(first), "unanswerable": True},
    )
    call(
        client, "verification_out_of_bounds", "POST", "/responses/verification",
        body={"task_id": first, "annotator_id": "ver-2",
              "span": {"start": 3, "end": 99}, "unanswerable": False},
    )
    call(
        client, "verification_unknown_task", "POST", "/responses/verification",
        body={"task_id": "vt::nope::zz::99", "annotator_id": "ver-2",
              "span": None, "unanswerable": True},
    )

    # Fill the remaining trials correctly, off the record: the fixture needs
    # one evaluate exchange with a settled verdict, not every keystroke.
    for task_id in [second, *rest]:
        client.post(
            "/responses/verification",
            json={"task_id": task_id, "annotator_id": "ver-3",
                  "span": gold_span(task_id), "unanswerable": False},
        )

    call(client, "evaluate_template", "POST", f"/templates/{template_id}/evaluate")
    call(
        client, "list_templates", "GET", "/templates",
        query={"relation": relation_id, "status": "verified"},
    )
    call(client, "dashboard", "GET", "/dashboard")

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(recorded, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(recorded)} exchanges to {OUT}")


if __name__ == "__main__":
    main()
