"""Brute-force reference implementations, kept free of package imports.

These recompute the probabilistic quantities with plain math so the tests
compare two independent derivations rather than a function against itself.
"""

import math


def softmax_with_bias(z: list[float], bias: float) -> list[float]:
    values = list(z) + [bias]
    peak = max(values)
    exps = [math.exp(v - peak) for v in values]
    total = sum(exps)
    return [e / total for e in exps]


def enumerate_decode(
    z_start: list[float],
    z_end: list[float],
    bias: float,
    p_min: float | None,
    max_span_len: int,
) -> tuple[tuple[int, int] | None, float, float]:
    """Every legal (i, j) plus null, by exhaustive comparison.

    Returns (span or None, probability of the returned outcome, null
    probability). Ties prefer null, then the smaller start, then the smaller
    end, matching the decoder's documented order.
    """
    n = len(z_start)
    p_start = softmax_with_bias(z_start, bias)
    p_end = softmax_with_bias(z_end, bias)
    p_null = p_start[n] * p_end[n]
    best = None
    best_p = -1.0
    for i in range(n):
        for j in range(i, min(n, i + max_span_len)):
            p = p_start[i] * p_end[j]
            if p > best_p:
                best, best_p = (i, j), p
    if best is None or p_null >= best_p:
        return None, p_null, p_null
    if p_min is not None and best_p < p_min:
        return None, p_null, p_null
    return best, best_p, p_null
