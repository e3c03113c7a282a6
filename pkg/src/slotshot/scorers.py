"""Baseline scorers and the external scorer protocol client.

Baselines emit forcing scores (+M / -M) so the decoder selects the intended
span or abstains; they exist to calibrate the evaluation pipeline, not to
be strong systems. The external client speaks line-delimited JSON over a
TCP socket or a child process's standard streams, supports pipelining, and
matches out-of-order responses by request id.
"""

from __future__ import annotations

import itertools
import json
import random
import socket
import subprocess
import threading
from concurrent.futures import Future
from concurrent.futures import TimeoutError as FutureTimeoutError
from dataclasses import dataclass
from typing import IO, Sequence

from .engine import SpanScores
from .errors import (
    ScorerError,
    ScorerLengthMismatchError,
    ScorerProtocolError,
    ScorerTimeoutError,
)
from .negatives import derive_seed
from .textnorm import find_subsequence, fold_tokens

FORCE = 20.0  # forcing magnitude; exp(-2 * FORCE) is negligible after softmax

WH_WORDS = frozenset({"who", "whom", "whose", "what", "which", "when", "where", "how"})

# Function words never used as anchors or answer candidates.
_STOP = frozenset(
    """
    a an the and or of in on at to for from by with as is was are were be been
    being did do does done has have had this that these those his her its
    their it he she they not no s
    about above across after against along among around before behind below
    beneath beside between beyond despite during into near onto over past
    through throughout toward towards under underneath until upon within
    without
    """.split()
)

_ANCHOR_WINDOW = 4
_CUE_WEIGHT = 4.0
_ENTITY_WEIGHT = 1.0
_CANDIDATE_BASE = -3.0
_BACKGROUND = -4.0
_DIGIT_BONUS = 2.0


@dataclass(frozen=True)
class NamedEntityCandidate:
    token_start: int
    token_end: int  # inclusive


def _capitalized(token: str) -> bool:
    return bool(token) and token[0].isalpha() and token[0].isupper()


def detect_named_entities(tokens: Sequence[str]) -> list[NamedEntityCandidate]:
    """Maximal runs of capitalized tokens.

    A lone capitalized sentence-initial token is ignored (it is usually just
    sentence case); a run that starts at position 0 and extends keeps it.
    """
    candidates = []
    i, n = 0, len(tokens)
    while i < n:
        if _capitalized(tokens[i]):
            j = i
            while j + 1 < n and _capitalized(tokens[j + 1]):
                j += 1
            if not (i == 0 and j == 0):
                candidates.append(NamedEntityCandidate(i, j))
            i = j + 1
        else:
            i += 1
    return candidates


def _forced_scores(n: int, start: int | None, end: int | None) -> SpanScores:
    z_start = [-FORCE] * n
    z_end = [-FORCE] * n
    if start is not None and end is not None:
        z_start[start] = FORCE
        z_end[end] = FORCE
    return SpanScores(tuple(z_start), tuple(z_end))


def random_ne_score(
    question: Sequence[str], sentence: Sequence[str], seed: int
) -> SpanScores:
    """Force a uniformly random named entity that is not part of the question.

    With no surviving candidate, every position is suppressed and decoding
    abstains. Deterministic given (question, sentence, seed).
    """
    folded_question = fold_tokens(question)
    survivors = []
    for cand in detect_named_entities(sentence):
        mention = fold_tokens(sentence[cand.token_start : cand.token_end + 1])
        if find_subsequence(folded_question, mention) < 0:
            survivors.append(cand)
    if not survivors:
        return _forced_scores(len(sentence), None, None)
    pick = random.Random(seed).choice(survivors)
    return _forced_scores(len(sentence), pick.token_start, pick.token_end)


def _stem(token: str) -> str:
    # Cheap suffix stripping, enough to line up inflection pairs such as
    # marry/married and plays/played without a real stemmer.
    for suffix in ("ies", "ied", "ing", "ed", "es", "s"):
        if token.endswith(suffix) and len(token) - len(suffix) >= 3:
            token = token[: -len(suffix)]
            if suffix in ("ies", "ied"):
                token += "y"
            break
    return token


def _match(a: str, b: str) -> bool:
    if a == b:
        return True
    sa, sb = _stem(a), _stem(b)
    if sa == sb:
        return True
    if min(len(sa), len(sb)) >= 4:
        return sa.startswith(sb) or sb.startswith(sa)
    return False


def _answer_type(folded_question: Sequence[str]) -> str:
    """"entity" wants capitalized spans, "time" digit-bearing ones, "any" all.

    "In which year ..." carries its type in "year", not the wh-word, so time
    cues take precedence over the wh-word lookup.
    """
    if "when" in folded_question or "year" in folded_question:
        return "time"
    wh = next((t for t in folded_question if t in WH_WORDS), None)
    if wh in ("who", "whom", "whose", "where", "which"):
        return "entity"
    return "any"


def _question_content(question: Sequence[str]) -> tuple[str, list[str]]:
    folded = fold_tokens(question)
    content = [
        t
        for t in folded
        if t not in _STOP and t not in WH_WORDS and any(c.isalnum() for c in t)
    ]
    return _answer_type(folded), content


def lexical_overlap_score(question: Sequence[str], sentence: Sequence[str]) -> SpanScores:
    """Deterministic heuristic favoring type-matching tokens near overlap.

    Question content words found in the sentence act as anchors; candidate
    tokens (chosen by wh-word answer type) score with the count of nearby
    anchors, cue words weighing far more than capitalized (entity) anchors.
    Under a zero bias, a cued sentence decodes to a span and an unrelated one
    abstains.
    """
    answer_type, content = _question_content(question)
    folded = fold_tokens(sentence)
    n = len(sentence)

    anchor_cue: list[bool] = [False] * n
    anchor_entity: list[bool] = [False] * n
    for i, tok in enumerate(folded):
        if tok in _STOP or not any(c.isalnum() for c in tok):
            continue
        if any(_match(tok, c) for c in content):
            if _capitalized(sentence[i]):
                anchor_entity[i] = True
            else:
                anchor_cue[i] = True

    def is_candidate(i: int) -> bool:
        tok = folded[i]
        if tok in _STOP or not any(c.isalnum() for c in tok):
            return False
        if anchor_cue[i] or anchor_entity[i]:
            return False
        if answer_type == "entity":
            return _capitalized(sentence[i])
        if answer_type == "time":
            return any(c.isdigit() for c in tok)
        return any(c.isalnum() for c in tok)

    def token_score(i: int) -> float:
        lo, hi = max(0, i - _ANCHOR_WINDOW), min(n, i + _ANCHOR_WINDOW + 1)
        cues = sum(1 for k in range(lo, hi) if anchor_cue[k])
        ents = sum(1 for k in range(lo, hi) if anchor_entity[k])
        score = _CUE_WEIGHT * cues + _ENTITY_WEIGHT * ents + _CANDIDATE_BASE
        if answer_type == "time" and any(c.isdigit() for c in folded[i]):
            score += _DIGIT_BONUS
        return score

    z_start = [_BACKGROUND] * n
    z_end = [_BACKGROUND] * n
    i = 0
    while i < n:
        if is_candidate(i):
            j = i
            while j + 1 < n and is_candidate(j + 1):
                j += 1
            run_score = max(token_score(k) for k in range(i, j + 1))
            z_start[i] = max(z_start[i], run_score)
            z_end[j] = max(z_end[j], run_score)
            i = j + 1
        else:
            i += 1
    return SpanScores(tuple(z_start), tuple(z_end))


class RandomNEScorer:
    """Scorer-contract adapter; derives a per-call seed from the inputs."""

    thread_safe = True

    def __init__(self, seed: int):
        self.seed = seed

    def score(self, question: Sequence[str], sentence: Sequence[str]) -> SpanScores:
        call_seed = derive_seed(self.seed, "random-ne", tuple(question), tuple(sentence))
        return random_ne_score(question, sentence, call_seed)


class LexicalOverlapScorer:
    thread_safe = True

    def score(self, question: Sequence[str], sentence: Sequence[str]) -> SpanScores:
        return lexical_overlap_score(question, sentence)


# --- external scorer protocol ------------------------------------------------
#
# One JSON object per line. Request:
#   {"id": "...", "question": [...], "sentence": [...]}
# Response:
#   {"id": "...", "z_start": [...], "z_end": [...]}
# Responses may arrive in any order; the id ties them back to requests.


class _Connection:
    """Reader-thread plumbing shared by the TCP and stdio transports."""

    def __init__(self, reader: IO[bytes], writer: IO[bytes]):
        self._reader = reader
        self._writer = writer
        self._write_lock = threading.Lock()
        self._pending: dict[str, Future] = {}
        self._pending_lock = threading.Lock()
        self._dead: Exception | None = None
        self._thread = threading.Thread(target=self._read_loop, daemon=True)
        self._thread.start()

    def request(self, request_id: str, payload: dict, timeout: float) -> dict:
        future: Future = Future()
        with self._pending_lock:
            if self._dead is not None:
                raise self._dead
            self._pending[request_id] = future
        line = json.dumps(payload, ensure_ascii=False) + "\n"
        try:
            with self._write_lock:
                self._writer.write(line.encode("utf-8"))
                self._writer.flush()
        except (OSError, ValueError) as exc:
            self._forget(request_id)
            raise ScorerError(f"failed to send request: {exc}") from exc
        try:
            result = future.result(timeout=timeout)
        except FutureTimeoutError:
            self._forget(request_id)
            raise ScorerTimeoutError(
                f"no response for request {request_id} within {timeout}s"
            ) from None
        if isinstance(result, Exception):
            raise result
        return result

    def _forget(self, request_id: str) -> None:
        with self._pending_lock:
            self._pending.pop(request_id, None)

    def _read_loop(self) -> None:
        try:
            for raw in self._reader:
                if not raw.strip():
                    continue
                try:
                    message = json.loads(raw.decode("utf-8"))
                    request_id = message["id"]
                except (ValueError, KeyError, UnicodeDecodeError) as exc:
                    self._fail_all(ScorerProtocolError(f"malformed response line: {exc}"))
                    return
                with self._pending_lock:
                    future = self._pending.pop(str(request_id), None)
                if future is not None:
                    future.set_result(message)
        except (OSError, ValueError):
            pass
        finally:
            self._fail_all(ScorerError("scorer connection closed"))

    def _fail_all(self, error: Exception) -> None:
        with self._pending_lock:
            if self._dead is None:
                self._dead = error
            pending, self._pending = self._pending, {}
        for future in pending.values():
            if not future.done():
                future.set_result(error)

    def close(self) -> None:
        # The caller must unblock the read loop first (socket shutdown or
        # process exit); closing a buffered stream another thread is blocked
        # reading deadlocks on the buffer lock.
        for stream in (self._writer, self._reader):
            try:
                stream.close()
            except OSError:
                pass
        self._thread.join(timeout=5)


class ExternalScorer:
    """Client for an external scoring service; safe to share across threads."""

    thread_safe = True

    def __init__(self, connection: _Connection, timeout: float = 10.0, _owned=None):
        self._connection = connection
        self._timeout = timeout
        self._owned = _owned  # subprocess handle or socket, closed with us
        self._counter = itertools.count()

    @classmethod
    def connect_tcp(cls, host: str, port: int, timeout: float = 10.0) -> "ExternalScorer":
        try:
            sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as exc:
            raise ScorerError(f"cannot connect to scorer at {host}:{port}: {exc}") from exc
        sock.settimeout(None)
        reader = sock.makefile("rb")
        writer = sock.makefile("wb")
        return cls(_Connection(reader, writer), timeout, _owned=sock)

    @classmethod
    def spawn(cls, argv: Sequence[str], timeout: float = 10.0) -> "ExternalScorer":
        try:
            proc = subprocess.Popen(
                list(argv), stdin=subprocess.PIPE, stdout=subprocess.PIPE
            )
        except OSError as exc:
            raise ScorerError(f"cannot start scorer process {argv!r}: {exc}") from exc
        assert proc.stdin is not None and proc.stdout is not None
        return cls(_Connection(proc.stdout, proc.stdin), timeout, _owned=proc)

    def score(self, question: Sequence[str], sentence: Sequence[str]) -> SpanScores:
        request_id = f"r{next(self._counter)}"
        payload = {
            "id": request_id,
            "question": list(question),
            "sentence": list(sentence),
        }
        message = self._connection.request(request_id, payload, self._timeout)
        try:
            z_start = [float(v) for v in message["z_start"]]
            z_end = [float(v) for v in message["z_end"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ScorerProtocolError(f"malformed response payload: {exc}") from exc
        if len(z_start) != len(sentence) or len(z_end) != len(sentence):
            raise ScorerLengthMismatchError(
                f"scorer returned {len(z_start)}/{len(z_end)} scores "
                f"for {len(sentence)} tokens"
            )
        return SpanScores(tuple(z_start), tuple(z_end))

    def close(self) -> None:
        owned = self._owned
        if isinstance(owned, subprocess.Popen):
            try:
                owned.terminate()
                owned.wait(timeout=5)
            except (OSError, subprocess.TimeoutExpired):
                owned.kill()
        elif owned is not None:
            try:
                owned.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
        self._connection.close()
        if owned is not None and not isinstance(owned, subprocess.Popen):
            try:
                owned.close()
            except OSError:
                pass

    def __enter__(self) -> "ExternalScorer":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()
