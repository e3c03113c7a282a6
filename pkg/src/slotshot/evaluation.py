"""Answer equality, instance judging, metric aggregation, and PR curves.

Answer texts are compared as unordered token multisets after lowercasing,
punctuation removal, and dropping of articles and "and". A returned span is
correct when its multiset equals that of any single gold answer, or the
union of all gold answers (a single span may legitimately cover several).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import AnswerSpan
from .engine import Prediction
from .errors import DataContractError
from .textnorm import normalized_tokens

TP = "TP"
FP = "FP"
FN = "FN"
TN = "TN"


def normalize_answer_tokens(text: str) -> Counter[str]:
    """Unordered multiset view of an answer string."""
    return Counter(normalized_tokens(text))


def overlap_prf(pred: Counter[str], gold: Counter[str]) -> tuple[float, float, float]:
    """Token-level precision, recall, F1 between two answer multisets.

    Two empty multisets count as a perfect match; empty against non-empty
    scores zero.
    """
    if not pred and not gold:
        return (1.0, 1.0, 1.0)
    common = sum((pred & gold).values())
    if common == 0:
        return (0.0, 0.0, 0.0)
    precision = common / sum(pred.values())
    recall = common / sum(gold.values())
    f1 = 2 * precision * recall / (precision + recall)
    return (precision, recall, f1)


@dataclass(frozen=True)
class InstanceJudgment:
    outcome: str  # TP, FP, FN, or TN
    predicted_text: str | None
    confidence: float


def _gold_texts(gold_answers: Iterable[AnswerSpan | str]) -> list[str]:
    return [a.text if isinstance(a, AnswerSpan) else a for a in gold_answers]


def judge_instance(
    prediction: Prediction, gold_answers: Sequence[AnswerSpan | str]
) -> InstanceJudgment:
    """Classify one prediction against the gold answer set.

    Abstentions are TN on negatives and FN otherwise. A span is TP when its
    normalized multiset equals a single gold answer's or the union of all of
    them; an empty normalization of a non-empty span never matches.
    """
    golds = _gold_texts(gold_answers)
    if prediction.answer is None:
        outcome = TN if not golds else FN
        return InstanceJudgment(outcome, None, prediction.probability)
    predicted = normalize_answer_tokens(prediction.answer.text)
    if not golds or not predicted:
        return InstanceJudgment(FP, prediction.answer.text, prediction.probability)
    gold_sets = [normalize_answer_tokens(g) for g in golds]
    union: Counter[str] = Counter()
    for g in gold_sets:
        union.update(g)
    if any(predicted == g for g in gold_sets) or predicted == union:
        outcome = TP
    else:
        outcome = FP
    return InstanceJudgment(outcome, prediction.answer.text, prediction.probability)


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    f1: float
    counts: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "counts": dict(self.counts),
        }


def aggregate_metrics(judgments: Sequence[InstanceJudgment]) -> MetricsReport:
    """Micro precision/recall/F1 over instance judgments.

    Precision is over returned spans, recall over instances with an answer;
    an empty denominator is vacuously 1.0, and F1 is 0 when both are 0.
    """
    counts = {TP: 0, FP: 0, FN: 0, TN: 0}
    for judgment in judgments:
        if judgment.outcome not in counts:
            raise DataContractError(f"bad judgment outcome {judgment.outcome!r}")
        counts[judgment.outcome] += 1
    tp, fp, fn = counts[TP], counts[FP], counts[FN]
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricsReport(precision, recall, f1, counts)


def _apply_threshold(prediction: Prediction, threshold: float) -> Prediction:
    if prediction.answer is not None and prediction.probability < threshold:
        return Prediction(None, prediction.null_probability, prediction.null_probability)
    return prediction


def pr_curve(
    pairs: Sequence[tuple[Prediction, Sequence[AnswerSpan | str]]],
    thresholds: Sequence[float] | None = None,
) -> list[tuple[float, float, float]]:
    """Precision/recall at increasing confidence thresholds.

    A span prediction below the threshold is re-judged as an abstention;
    abstentions stay abstentions. With thresholds=None, every distinct
    observed span probability is used, in increasing order.
    """
    if thresholds is None:
        observed = sorted({p.probability for p, _ in pairs if p.answer is not None})
        thresholds = observed if observed else [0.0]
    else:
        thresholds = sorted(thresholds)
    points = []
    for threshold in thresholds:
        judgments = [
            judge_instance(_apply_threshold(p, threshold), gold) for p, gold in pairs
        ]
        report = aggregate_metrics(judgments)
        points.append((threshold, report.precision, report.recall))
    return points
