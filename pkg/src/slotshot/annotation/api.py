"""HTTP surface of the annotation service.

Thin layer: request bodies are validated structurally here, domain rules
live in the service. Errors map onto 400 (bad payload), 404 (unknown id),
and 409 (slot or state conflicts), always with a JSON {"detail": reason}.
"""

from __future__ import annotations

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..errors import ConflictError, NotFoundError, ServiceError, ValidationError
from .service import DEFAULT_TRIALS, AnnotationService


class SpanBody(BaseModel):
    start: int
    end: int


class CollectionCreate(BaseModel):
    relation_id: str
    seed: int


class CollectionSubmit(BaseModel):
    task_id: str
    annotator_id: str
    templates: list[str] = Field(min_length=1)


class VerificationCreate(BaseModel):
    template_id: str
    seed: int
    n_trials: int = DEFAULT_TRIALS


class VerificationSubmit(BaseModel):
    task_id: str
    annotator_id: str
    span: SpanBody | None = None
    unanswerable: bool = False


def create_app(service: AnnotationService) -> FastAPI:
    app = FastAPI(title="slotshot annotation service")
    app.state.service = service

    def _status_for(exc: ServiceError) -> int:
        if isinstance(exc, NotFoundError):
            return 404
        if isinstance(exc, ConflictError):
            return 409
        if isinstance(exc, ValidationError):
            return 400
        return 500

    @app.exception_handler(ServiceError)
    async def service_error(request: Request, exc: ServiceError) -> JSONResponse:
        return JSONResponse({"detail": str(exc)}, status_code=_status_for(exc))

    @app.get("/relations")
    def relations() -> list[dict]:
        return service.list_relations()

    @app.get("/tasks/collection")
    def collection_tasks(annotator: str = Query(min_length=1)) -> list[dict]:
        return service.open_collection_tasks(annotator)

    @app.post("/tasks/collection", status_code=201)
    def create_collection(body: CollectionCreate) -> dict:
        tasks = service.create_collection_tasks(body.relation_id, body.seed)
        return {"created": [t.id for t in tasks]}

    @app.post("/responses/collection", status_code=201)
    def submit_collection(body: CollectionSubmit) -> dict:
        return service.submit_collection(
            body.task_id, body.annotator_id, body.templates
        )

    @app.get("/tasks/verification")
    def verification_tasks(annotator: str = Query(min_length=1)) -> list[dict]:
        return service.open_verification_tasks(annotator)

    @app.post("/tasks/verification", status_code=201)
    def create_verification(body: VerificationCreate) -> dict:
        tasks, report = service.create_verification_tasks(
            body.template_id, body.seed, body.n_trials
        )
        return {"created": [t.id for t in tasks], "report": report}

    @app.post("/responses/verification", status_code=201)
    def submit_verification(body: VerificationSubmit) -> dict:
        span = None if body.span is None else {"start": body.span.start, "end": body.span.end}
        return service.submit_verification(
            body.task_id, body.annotator_id, span=span, unanswerable=body.unanswerable
        )

    @app.get("/templates")
    def templates(
        relation: str | None = None, status: str | None = None
    ) -> list[dict]:
        return service.list_templates(relation, status)

    @app.post("/templates/{template_id}/evaluate")
    def evaluate(template_id: str) -> dict:
        decision = service.evaluate_template(template_id)
        return {
            "template_id": template_id,
            "status": decision.status,
            "n_trials": decision.n_trials,
            "n_correct": decision.n_correct,
            "mean_overlap_f1": decision.mean_overlap_f1,
        }

    @app.get("/dashboard")
    def dashboard() -> dict:
        return service.dashboard()

    return app
