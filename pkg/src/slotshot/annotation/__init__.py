"""Two-phase question template annotation: collection, then verification."""

from .service import (
    AnnotationService,
    CollectionTask,
    TemplateDecision,
    VerificationTask,
    decide_template,
    mask_entity,
)

__all__ = [
    "AnnotationService",
    "CollectionTask",
    "TemplateDecision",
    "VerificationTask",
    "decide_template",
    "mask_entity",
]
