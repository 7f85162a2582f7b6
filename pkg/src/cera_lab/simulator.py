"""Monte Carlo simulation of CeRA superframes.

Per superframe: K devices each pick a codeword, the base station detects the
per-subframe preamble sets, infers the valid codewords, and grants R
resources to a uniformly random subset of them.  A device succeeds when its
codeword was picked by nobody else and received a grant.
"""

from __future__ import annotations

import logging
import math
import os
import warnings
import zlib
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .analytics import MetricsRow, analytical_row
from .code_core import Code
from .hypergraph import CodeHypergraph, build_hypergraph, decode, decode_batch, observe
from .optcera import MULTIPREAMBLE, OPTCERA, build_code

log = logging.getLogger(__name__)

BATCH_SIZE = 10_000
Z95 = 1.959963984540054
METRICS = ("P_S", "E_V", "eta", "P_N", "P_A")
THREADS_ENV = "CERA_LAB_THREADS"
MODES = ("analytical", "simulate", "both")


class GridWarning(UserWarning):
    """A sweep grid cell could not be evaluated and was skipped."""


@dataclass(frozen=True)
class SuperframeOutcome:
    transmitted: tuple[int, ...]
    valid: tuple[int, ...]
    granted: tuple[int, ...]
    used: int
    successes: int

    @property
    def V(self) -> int:
        return len(self.valid)

    @property
    def G(self) -> int:
        return len(self.granted)


@dataclass(frozen=True)
class SimEstimate:
    mean: float
    half_width_95: float
    iterations: int
    seed: int


def run_superframe(
    code: Code,
    K: int,
    R: int,
    rng: np.random.Generator,
    hypergraph: CodeHypergraph | None = None,
    transmitted: Sequence[int] | None = None,
) -> SuperframeOutcome:
    """Simulate one superframe.

    ``transmitted`` overrides the devices' random choices (one index per
    device); ``hypergraph`` lets callers reuse a prebuilt decoder structure.
    """
    if R < 1:
        raise ValueError(f"R must be >= 1, got {R}")
    if transmitted is None:
        if K < 0:
            raise ValueError(f"K must be >= 0, got {K}")
        transmitted = rng.integers(code.M, size=K).tolist()
    else:
        transmitted = [int(t) for t in transmitted]
    h = hypergraph if hypergraph is not None else build_hypergraph(code)
    valid = decode(h, observe(code, transmitted))
    chosen = Counter(transmitted)
    G = min(R, len(valid))
    # Partial Fisher-Yates: the first G slots end up a uniform sample without replacement.
    pool = list(valid)
    for i in range(G):
        j = i + int(rng.integers(len(pool) - i))
        pool[i], pool[j] = pool[j], pool[i]
    granted = tuple(sorted(pool[:G]))
    used = sum(1 for t in granted if chosen[t] >= 1)
    successes = sum(1 for t in granted if chosen[t] == 1)
    return SuperframeOutcome(tuple(transmitted), tuple(valid), granted, used, successes)


@dataclass
class _Moments:
    """Running sum / sum of squares / count for one metric."""

    total: float = 0.0
    sq: float = 0.0
    count: int = 0

    def add(self, values: np.ndarray) -> None:
        self.total += float(values.sum())
        self.sq += float(np.square(values).sum())
        self.count += int(values.size)

    def merge(self, other: "_Moments") -> None:
        self.total += other.total
        self.sq += other.sq
        self.count += other.count

    def estimate(self, seed: int) -> SimEstimate:
        if self.count == 0:
            return SimEstimate(math.nan, math.nan, 0, seed)
        mean = self.total / self.count
        if self.count > 1:
            var = max(0.0, (self.sq - self.count * mean * mean) / (self.count - 1))
            hw = Z95 * math.sqrt(var / self.count)
        else:
            hw = 0.0
        return SimEstimate(mean, hw, self.count, seed)


def _simulate_batch(
    words: np.ndarray, q: int, K: int, R: int, size: int, rng: np.random.Generator
) -> dict[str, _Moments]:
    """Simulate ``size`` superframes at once and return per-metric moments.

    Grants are a uniform random subset of the valid codewords, so given V,
    the number of granted chosen codewords is hypergeometric, and so is the
    number of granted singletons among those; both are drawn directly.
    """
    M = words.shape[0]
    out = {m: _Moments() for m in METRICS}
    if K == 0:
        zeros = np.zeros(size)
        out["E_V"].add(zeros)
        return out
    picks = rng.integers(M, size=(size, K))
    flat = picks + (np.arange(size, dtype=np.int64) * M)[:, None]
    counts = np.bincount(flat.ravel(), minlength=size * M).reshape(size, M)
    chosen = (counts > 0).sum(axis=1)
    single = (counts == 1).sum(axis=1)
    V = decode_batch(words, q, picks).sum(axis=1)
    G = np.minimum(V, R)
    used = rng.hypergeometric(chosen, V - chosen, G)
    succ = rng.hypergeometric(single, chosen - single, used)

    out["P_S"].add(succ / K)
    out["P_N"].add(single / K)
    out["E_V"].add(V.astype(float))
    has_grant = G > 0
    out["eta"].add(used[has_grant] / G[has_grant])
    out["P_A"].add(G[has_grant] / V[has_grant])
    return out


def _thread_count(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", THREADS_ENV, env)
    return os.cpu_count() or 1


def estimate(
    code: Code,
    K: int,
    R: int,
    iterations: int,
    seed: int,
    metrics: Iterable[str] = ("P_S", "E_V", "eta"),
    threads: int | None = 1,
) -> dict[str, SimEstimate]:
    """Monte Carlo estimates of the requested metrics over ``iterations`` superframes.

    Work is cut into fixed-size batches, each with its own child of
    ``SeedSequence(seed)``; results are merged in batch order, so the output
    does not depend on ``threads``.
    """
    metrics = tuple(metrics)
    unknown = set(metrics) - set(METRICS)
    if unknown:
        raise ValueError(f"unknown metrics {sorted(unknown)}; choose from {METRICS}")
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    if R < 1:
        raise ValueError(f"R must be >= 1, got {R}")
    if K < 0:
        raise ValueError(f"K must be >= 0, got {K}")
    if K == 0 and {"P_S", "P_N"} & set(metrics):
        raise ValueError("success and non-collision probabilities are undefined for K = 0")

    words = code.as_array()
    n_batches = -(-iterations // BATCH_SIZE)
    sizes = [BATCH_SIZE] * (n_batches - 1) + [iterations - BATCH_SIZE * (n_batches - 1)]
    children = np.random.SeedSequence(seed).spawn(n_batches)

    def work(b: int) -> dict[str, _Moments]:
        return _simulate_batch(words, code.q, K, R, sizes[b], np.random.default_rng(children[b]))

    workers = min(_thread_count(threads), n_batches)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(work, range(n_batches)))
    else:
        parts = [work(b) for b in range(n_batches)]

    merged = {m: _Moments() for m in METRICS}
    for part in parts:
        for m in METRICS:
            merged[m].merge(part[m])
    return {m: merged[m].estimate(seed) for m in metrics}


def grid_seed(master: int, scheme: str, M: int, K: int) -> int:
    """Stable 64-bit sub-seed for one grid point."""
    ss = np.random.SeedSequence(master, spawn_key=(zlib.crc32(scheme.encode()), M, K))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def simulated_row(code: Code, K: int, R: int, iterations: int, master_seed: int,
                  threads: int | None = 1) -> MetricsRow:
    sub = grid_seed(master_seed, code.scheme, code.M, K)
    est = estimate(code, K, R, iterations, sub, metrics=METRICS, threads=threads)
    return MetricsRow(
        scheme=code.scheme,
        n=code.n,
        q=code.q,
        M=code.M,
        K=K,
        R=R,
        method="simulated",
        P_N=est["P_N"].mean,
        P_A=est["P_A"].mean,
        P_S=est["P_S"].mean,
        E_V=est["E_V"].mean,
        eta=est["eta"].mean,
        iterations=iterations,
        seed=master_seed,
        ci_P_S=est["P_S"].half_width_95,
        ci_E_V=est["E_V"].half_width_95,
        ci_eta=est["eta"].half_width_95,
    )


@dataclass
class SweepSpec:
    """A grid of (scheme, size parameter) codes crossed with device loads.

    ``size_params`` maps a scheme name to its k values (OptCeRA) or a values
    (multipreamble).
    """

    size_params: dict[str, list[int]]
    K_values: list[int]
    n: int = 2
    q: int = 64
    R: int = 100
    iterations: int = 100_000
    seed: int = 0
    mode: str = "both"
    threads: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode != "analytical" and self.iterations < 1:
            raise ValueError("iterations must be >= 1 when simulating")
        if self.R < 1:
            raise ValueError(f"R must be >= 1, got {self.R}")


def paper_grid(K_values: Sequence[int] = (50, 100, 150, 200), **kw) -> SweepSpec:
    """The evaluation grid: a in 8..23 for multipreamble, k in 1..8 for OptCeRA."""
    return SweepSpec(
        size_params={MULTIPREAMBLE: list(range(8, 24)), OPTCERA: list(range(1, 9))},
        K_values=list(K_values),
        **kw,
    )


_METHOD_ORDER = {"analytical": 0, "simulated": 1}


def sweep(spec: SweepSpec) -> list[MetricsRow]:
    """Evaluate every feasible grid point; infeasible cells raise a :class:`GridWarning`."""
    codes: list[Code] = []
    for scheme, params in spec.size_params.items():
        for p in params:
            try:
                codes.append(build_code(scheme, spec.n, spec.q, p))
            except ValueError as exc:
                warnings.warn(f"skipping {scheme} size parameter {p}: {exc}", GridWarning, stacklevel=2)

    tasks = []
    for code in codes:
        for K in spec.K_values:
            if K < 1:
                warnings.warn(f"skipping {code.scheme} M={code.M} K={K}: need K >= 1",
                              GridWarning, stacklevel=2)
                continue
            tasks.append((code, K))

    rows: list[MetricsRow] = []
    if spec.mode in ("analytical", "both"):
        rows += [analytical_row(code, K, spec.R) for code, K in tasks]
    if spec.mode in ("simulate", "both"):
        def sim(task):
            code, K = task
            return simulated_row(code, K, spec.R, spec.iterations, spec.seed)

        workers = min(_thread_count(spec.threads), max(1, len(tasks)))
        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                rows += list(pool.map(sim, tasks))
        else:
            rows += [sim(t) for t in tasks]
    rows.sort(key=lambda r: (r.scheme, r.M, r.K, _METHOD_ORDER[r.method]))
    return rows
