"""Slot filling by asking reading comprehension questions per relation.

The pipeline: align knowledge-base facts with sentences (builder), turn
relations into question templates and instantiate them per entity (querify,
annotation), add unanswerable pairs (negatives), split by unseen entities,
templates, or relations (splits), then decode span-or-null answers from any
scorer (engine, scorers) and evaluate with token-overlap metrics
(evaluation).
"""

from .builder import BuildReport, Fact, align_fact, build_dataset
from .corpus import (
    NEGATIVE,
    POSITIVE,
    AnswerSpan,
    Document,
    Entity,
    RCExample,
    Relation,
    Sentence,
    SlotFillingInstance,
    Token,
    make_document,
    make_sentence,
    split_sentences,
    tokenize,
)
from .engine import (
    DecodeParams,
    NullAwareDistributions,
    Prediction,
    Span,
    SpanScores,
    augment_and_normalize,
    decode,
    ensemble,
    null_probability,
    score,
    span_probability,
)
from .errors import (
    ConflictError,
    DataContractError,
    InvalidScoresError,
    MalformedTemplateError,
    NotFoundError,
    ScorerError,
    ScorerLengthMismatchError,
    ScorerProtocolError,
    ScorerTimeoutError,
    ServiceError,
    SlotshotError,
    ValidationError,
)
from .evaluation import (
    MetricsReport,
    aggregate_metrics,
    judge_instance,
    normalize_answer_tokens,
    overlap_prf,
    pr_curve,
)
from .negatives import NegativesReport, contains_answer, derive_seed, generate_negatives
from .querify import (
    PLACEHOLDER,
    QuestionTemplate,
    Verification,
    instantiate,
    join_schema,
)
from .scorers import (
    ExternalScorer,
    LexicalOverlapScorer,
    RandomNEScorer,
    detect_named_entities,
    lexical_overlap_score,
    random_ne_score,
)
from .splits import FoldResult, SplitSpec, balance, make_splits

__version__ = "0.1.0"

__all__ = [
    "AnswerSpan",
    "BuildReport",
    "ConflictError",
    "DataContractError",
    "DecodeParams",
    "Document",
    "Entity",
    "ExternalScorer",
    "Fact",
    "FoldResult",
    "InvalidScoresError",
    "LexicalOverlapScorer",
    "MalformedTemplateError",
    "MetricsReport",
    "NEGATIVE",
    "NegativesReport",
    "NotFoundError",
    "NullAwareDistributions",
    "PLACEHOLDER",
    "POSITIVE",
    "Prediction",
    "QuestionTemplate",
    "RCExample",
    "RandomNEScorer",
    "Relation",
    "ScorerError",
    "ScorerLengthMismatchError",
    "ScorerProtocolError",
    "ScorerTimeoutError",
    "Sentence",
    "ServiceError",
    "SlotFillingInstance",
    "SlotshotError",
    "Span",
    "SpanScores",
    "SplitSpec",
    "Token",
    "ValidationError",
    "Verification",
    "align_fact",
    "aggregate_metrics",
    "augment_and_normalize",
    "balance",
    "build_dataset",
    "contains_answer",
    "decode",
    "derive_seed",
    "detect_named_entities",
    "ensemble",
    "generate_negatives",
    "instantiate",
    "join_schema",
    "judge_instance",
    "lexical_overlap_score",
    "make_document",
    "make_sentence",
    "make_splits",
    "normalize_answer_tokens",
    "null_probability",
    "overlap_prf",
    "pr_curve",
    "random_ne_score",
    "score",
    "span_probability",
    "split_sentences",
    "tokenize",
]
