"""Closed-form contention model for code-expanded random access.

Each of K devices picks one of M codewords uniformly, so the number of
devices on a given codeword is Binomial(K, 1/M).  The base station infers
every codeword whose symbols were all detected; that count V drives the
allocation probability and the grant utilization.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, fields
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .code_core import CapacityError, Code
from .hypergraph import decode_bruteforce, observe

EXACT_EVALUATOR_LIMIT = 10**9
ENUMERATION_LIMIT = 10**6


def _survival(x: float, K: int) -> float:
    """``(1 - x)**K`` for ``0 <= x <= 1``, evaluated in the log domain."""
    if K == 0:
        return 1.0
    if x >= 1.0:
        return 0.0
    return math.exp(K * math.log1p(-x))


def binom_pmf(m: int, K: int, p: float) -> float:
    if K < 0 or not 0 <= m <= K:
        raise ValueError(f"need 0 <= m <= K, got m={m}, K={K}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0.0:
        return 1.0 if m == 0 else 0.0
    if p == 1.0:
        return 1.0 if m == K else 0.0
    # math.log of the exact integer coefficient avoids lgamma's cancellation error.
    log_pmf = (
        math.log(math.comb(K, m))
        + m * math.log(p)
        + (K - m) * math.log1p(-p)
    )
    return math.exp(log_pmf)


def _check_KM(K: int, M: int) -> None:
    if K < 0:
        raise ValueError(f"K must be >= 0, got {K}")
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")


def expected_selected(K: int, M: int) -> float:
    """N_C: expected number of codewords chosen by at least one device."""
    _check_KM(K, M)
    return M * (1.0 - _survival(1.0 / M, K))


def expected_singleton(K: int, M: int) -> float:
    """N_S: expected number of codewords chosen by exactly one device."""
    _check_KM(K, M)
    if K == 0:
        return 0.0
    return K * _survival(1.0 / M, K - 1)


def prob_non_collision(K: int, M: int) -> float:
    """P_N: probability that a given device shares its codeword with nobody."""
    _check_KM(K, M)
    if K == 0:
        raise ValueError("non-collision probability is undefined for K = 0")
    return _survival(1.0 / M, K - 1)


def _check_uniform(code: Code, r: int) -> None:
    target = Fraction(1, r)
    for i, row in enumerate(code.distribution):
        if any(p != target for p in row[:r]) or any(p != 0 for p in row[r:]):
            raise ValueError(f"coordinate {i + 1} is not uniform over {r} symbols")


def expected_valid_n2(K: int, M: int, r: int, code: Code | None = None) -> float:
    """Closed-form E[V] for length-2 codes whose coordinates are uniform over r symbols.

    If ``code`` is given its length and symbol distribution are checked first.
    """
    _check_KM(K, M)
    if r < 1 or M % r:
        raise ValueError(f"r={r} must divide M={M}")
    if code is not None:
        if code.n != 2:
            raise ValueError(f"closed form needs n = 2, code has n = {code.n}")
        if code.M != M:
            raise ValueError(f"code size {code.M} != M={M}")
        _check_uniform(code, r)
    one_missing = _survival(1.0 / r, K)
    both_missing = _survival(2.0 / r - 1.0 / M, K)
    return M * (1.0 - 2.0 * one_missing + both_missing)


@lru_cache(maxsize=64)
def _coverage_table(code: Code) -> tuple[np.ndarray, np.ndarray]:
    """For every codeword t and non-empty coordinate subset S, the count N_{t,S}.

    N_{t,S} is the number of codewords that agree with t somewhere in S, i.e.
    the choices that would put one of t's S-symbols on the air.  Returns
    ``(counts, signs)`` with ``counts`` of shape ``(M, 2**n - 1)``.
    """
    arr = code.as_array()
    M, n = arr.shape
    subsets = [S for size in range(1, n + 1) for S in itertools.combinations(range(n), size)]
    signs = np.array([(-1) ** (len(S) - 1) for S in subsets], dtype=float)
    counts = np.empty((M, len(subsets)), dtype=np.int64)
    chunk = max(1, 2**22 // max(1, M * n))
    for lo in range(0, M, chunk):
        hit = arr[lo : lo + chunk, None, :] == arr[None, :, :]
        for s, S in enumerate(subsets):
            counts[lo : lo + chunk, s] = hit[:, :, list(S)].any(axis=2).sum(axis=1)
    return counts, signs


def expected_valid_exact(code: Code, K: int) -> float:
    """E[V] for any code by inclusion-exclusion over coordinate subsets."""
    _check_KM(K, code.M)
    M, n = code.M, code.n
    if M * M * 2**n > EXACT_EVALUATOR_LIMIT:
        raise CapacityError(f"M^2 * 2^n = {M * M * 2**n} exceeds {EXACT_EVALUATOR_LIMIT}")
    counts, signs = _coverage_table(code)
    base = (M - counts) / M
    if K == 0:
        return 0.0
    with np.errstate(divide="ignore"):
        missing = (signs * np.exp(K * np.log(base))).sum(axis=1)
    return float(np.sum(1.0 - missing))


def expected_valid_enumerated(code: Code, K: int) -> float:
    """E[V] by summing over every one of the M**K joint device choices.

    Choices are grouped by multiset with multinomial weights; the result is
    the exact average over all ordered outcomes.  Refused above 10**6 outcomes.
    """
    _check_KM(K, code.M)
    M = code.M
    if M**K > ENUMERATION_LIMIT:
        raise CapacityError(f"M^K = {M}^{K} exceeds {ENUMERATION_LIMIT}")
    total = 0
    k_fact = math.factorial(K)
    for combo in itertools.combinations_with_replacement(range(M), K):
        weight = k_fact
        for _, grp in itertools.groupby(combo):
            weight //= math.factorial(len(list(grp)))
        total += weight * len(decode_bruteforce(code, observe(code, set(combo))))
    return float(Fraction(total, M**K))


def alloc_probability(E_V: float, R: int) -> float:
    """P_A: ``R / E[V]`` when demand exceeds the R resources, else 1."""
    if R < 1:
        raise ValueError(f"R must be >= 1, got {R}")
    if E_V < 0:
        raise ValueError(f"E[V] must be >= 0, got {E_V}")
    return R / E_V if E_V > R else 1.0


def success_probability(K: int, M: int, r: int, R: int) -> float:
    return prob_non_collision(K, M) * alloc_probability(expected_valid_n2(K, M, r), R)


def grant_utilization(K: int, M: int, r: int) -> float:
    """Ratio-of-expectations approximation N_C / E[V] of the mean grant utilization."""
    if K < 1:
        raise ValueError("grant utilization needs K >= 1")
    return expected_selected(K, M) / expected_valid_n2(K, M, r)


@dataclass(frozen=True)
class AnalyticalMetrics:
    N_C: float
    N_S: float
    P_N: float
    E_V: float
    P_A: float
    P_S: float
    eta: float


def _is_uniform_over(code: Code, r: int) -> bool:
    try:
        _check_uniform(code, r)
    except ValueError:
        return False
    return code.M % r == 0


def expected_valid(code: Code, K: int) -> float:
    """Closed form when it applies (n = 2, uniform coordinates), exact evaluator otherwise."""
    r = code.params.r
    if code.n == 2 and _is_uniform_over(code, r):
        return expected_valid_n2(K, code.M, r)
    return expected_valid_exact(code, K)


def analytical_metrics(code: Code, K: int, R: int) -> AnalyticalMetrics:
    if K < 1:
        raise ValueError("analytical metrics need K >= 1")
    M = code.M
    N_C = expected_selected(K, M)
    E_V = expected_valid(code, K)
    assert N_C <= E_V * (1 + 1e-12) + 1e-12 and E_V <= M * (1 + 1e-12), (N_C, E_V, M)
    P_N = prob_non_collision(K, M)
    P_A = alloc_probability(E_V, R)
    return AnalyticalMetrics(
        N_C=N_C,
        N_S=expected_singleton(K, M),
        P_N=P_N,
        E_V=E_V,
        P_A=P_A,
        P_S=P_N * P_A,
        eta=N_C / E_V,
    )


@dataclass(frozen=True)
class MetricsRow:
    """One CSV record: analytical or simulated metrics at a (scheme, M, K, R) point."""

    scheme: str
    n: int
    q: int
    M: int
    K: int
    R: int
    method: str
    P_N: float
    P_A: float
    P_S: float
    E_V: float
    eta: float
    iterations: int | None = None
    seed: int | None = None
    ci_P_S: float | None = None
    ci_E_V: float | None = None
    ci_eta: float | None = None

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def analytical_row(code: Code, K: int, R: int) -> MetricsRow:
    m = analytical_metrics(code, K, R)
    return MetricsRow(
        scheme=code.scheme,
        n=code.n,
        q=code.q,
        M=code.M,
        K=K,
        R=R,
        method="analytical",
        P_N=m.P_N,
        P_A=m.P_A,
        P_S=m.P_S,
        E_V=m.E_V,
        eta=m.eta,
    )
