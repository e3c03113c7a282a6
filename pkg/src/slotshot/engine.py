"""Null-aware span decoding over start/end score vectors.

A scorer assigns independent start and end scores to every sentence token.
Decoding appends a shared bias score to both vectors, takes a softmax over
each, and reads the final position of each distribution as no-answer mass.
The probability of a span is the product of its start and end probabilities;
the probability of abstaining is the product of the two no-answer masses.
The prediction is the best span unless abstaining is at least as probable or
a global confidence threshold is not met.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import numpy as np

from .corpus import Sentence
from .errors import InvalidScoresError, ScorerError, ScorerLengthMismatchError
from .textnorm import normalized_tokens

DEFAULT_MAX_SPAN_LEN = 10


@dataclass(frozen=True)
class SpanScores:
    """Raw start/end scores for one sentence, one entry per token."""

    z_start: tuple[float, ...]
    z_end: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "z_start", tuple(float(v) for v in self.z_start))
        object.__setattr__(self, "z_end", tuple(float(v) for v in self.z_end))
        if len(self.z_start) == 0:
            raise InvalidScoresError("score vectors must be non-empty")
        if len(self.z_start) != len(self.z_end):
            raise InvalidScoresError(
                f"start/end lengths differ: {len(self.z_start)} vs {len(self.z_end)}"
            )
        if not all(math.isfinite(v) for v in self.z_start + self.z_end):
            raise InvalidScoresError("score vectors must be finite")

    @property
    def n(self) -> int:
        return len(self.z_start)


@dataclass(frozen=True)
class NullAwareDistributions:
    """Softmax-normalized distributions of length n + 1.

    The final position carries the no-answer mass; each vector sums to 1.
    """

    p_start: tuple[float, ...]
    p_end: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.p_start) != len(self.p_end) or len(self.p_start) < 2:
            raise InvalidScoresError("distributions must share a length of at least 2")
        for vec in (self.p_start, self.p_end):
            if abs(sum(vec) - 1.0) > 1e-9:
                raise InvalidScoresError("distribution does not sum to 1")

    @property
    def n(self) -> int:
        return len(self.p_start) - 1


@dataclass(frozen=True)
class DecodeParams:
    """Decoding knobs: the no-answer bias, a global confidence floor, and the
    maximum span width in tokens."""

    bias: float = 0.0
    p_min: float | None = None
    max_span_len: int = DEFAULT_MAX_SPAN_LEN

    def __post_init__(self) -> None:
        if self.max_span_len < 1:
            raise InvalidScoresError("max_span_len must be >= 1")
        if self.p_min is not None and not 0.0 <= self.p_min <= 1.0:
            raise InvalidScoresError("p_min must lie in [0, 1]")


@dataclass(frozen=True)
class Span:
    """An inclusive token range with its surface text."""

    start: int
    end: int
    text: str


@dataclass(frozen=True)
class Prediction:
    """Either a span or an abstention, with the probability of whichever was
    returned and the abstention probability alongside."""

    answer: Span | None
    probability: float
    null_probability: float


def _softmax(values: np.ndarray) -> np.ndarray:
    shifted = values - values.max()
    exps = np.exp(shifted)
    return exps / exps.sum()


def augment_and_normalize(scores: SpanScores, bias: float) -> NullAwareDistributions:
    """Append the bias to both vectors and softmax each.

    The appended position becomes index n, the no-answer mass.
    """
    if not math.isfinite(bias):
        raise InvalidScoresError("bias must be finite")
    p_start = _softmax(np.array(scores.z_start + (bias,), dtype=np.float64))
    p_end = _softmax(np.array(scores.z_end + (bias,), dtype=np.float64))
    return NullAwareDistributions(tuple(p_start.tolist()), tuple(p_end.tolist()))


def span_probability(dists: NullAwareDistributions, start: int, end: int) -> float:
    """Probability that the answer is the inclusive token range [start, end]."""
    if not 0 <= start <= end < dists.n:
        raise InvalidScoresError(f"span ({start}, {end}) out of range for n={dists.n}")
    return dists.p_start[start] * dists.p_end[end]


def null_probability(dists: NullAwareDistributions) -> float:
    """Probability that the sentence does not answer the question."""
    return dists.p_start[dists.n] * dists.p_end[dists.n]


def decode(scores: SpanScores, sentence: Sentence, params: DecodeParams) -> Prediction:
    """Pick the most probable span, or abstain.

    Abstains when the no-answer probability is at least the best span's
    (ties favor abstention) or when the best span falls below p_min. Spans
    wider than max_span_len are never considered. A smaller start index, then
    a smaller end index, wins among equal-probability spans.
    """
    n = scores.n
    if n != len(sentence.tokens):
        raise InvalidScoresError(
            f"{n} scores for {len(sentence.tokens)} sentence tokens"
        )
    dists = augment_and_normalize(scores, params.bias)
    p_start, p_end = dists.p_start, dists.p_end
    best_p = -1.0
    best_ij = (0, 0)
    for i in range(n):
        ps = p_start[i]
        j_stop = min(n, i + params.max_span_len)
        for j in range(i, j_stop):
            p = ps * p_end[j]
            if p > best_p:
                best_p = p
                best_ij = (i, j)
    p_null = null_probability(dists)
    if p_null >= best_p:
        return Prediction(None, p_null, p_null)
    if params.p_min is not None and best_p < params.p_min:
        return Prediction(None, p_null, p_null)
    i, j = best_ij
    return Prediction(Span(i, j, sentence.span_text(i, j)), best_p, p_null)


def _answer_key(text: str) -> tuple[str, ...]:
    # Group key: unordered normalized tokens, matching the equality notion
    # used at evaluation time.
    return tuple(sorted(normalized_tokens(text)))


def ensemble(predictions: Sequence[tuple[str, Prediction]]) -> Prediction:
    """Combine predictions of several question phrasings for one instance.

    Span predictions are grouped by normalized answer text and their
    probabilities summed; abstentions form one group whose weight is the sum
    of their abstention probabilities. The heaviest group wins; its highest
    probability member is returned. Ties go to abstention first, then to the
    lexicographically smallest answer text.
    """
    if not predictions:
        raise InvalidScoresError("ensemble needs at least one prediction")
    groups: dict[tuple[str, ...], list[Prediction]] = {}
    null_members: list[Prediction] = []
    for _, prediction in predictions:
        if prediction.answer is None:
            null_members.append(prediction)
        else:
            groups.setdefault(_answer_key(prediction.answer.text), []).append(prediction)

    null_weight = sum(p.null_probability for p in null_members)
    best: tuple[float, str, Prediction] | None = None
    for members in groups.values():
        weight = sum(p.probability for p in members)
        representative = max(
            members, key=lambda p: (p.probability, -p.answer.start, -p.answer.end)
        )
        text = representative.answer.text
        if best is None or weight > best[0] or (weight == best[0] and text < best[1]):
            best = (weight, text, representative)

    if best is None or (null_members and null_weight >= best[0]):
        return max(null_members, key=lambda p: p.null_probability)
    return best[2]


class Scorer(Protocol):
    """Anything that maps (question tokens, sentence tokens) to scores.

    Implementations declare thread_safe; shareable scorers may be called
    concurrently from several workers.
    """

    thread_safe: bool

    def score(self, question: Sequence[str], sentence: Sequence[str]) -> SpanScores:
        ...


def score(scorer: Scorer, question: Sequence[str], sentence: Sequence[str]) -> SpanScores:
    """Invoke a scorer and enforce the output contract."""
    result = scorer.score(tuple(question), tuple(sentence))
    if result.n != len(sentence):
        raise ScorerLengthMismatchError(
            f"scorer returned {result.n} scores for {len(sentence)} tokens"
        )
    return result
