"""Hypergraph view of a code and superframe decoding.

Vertices are ``(i, j)`` pairs: preamble ``j`` in RA subframe ``i`` (1-based).
Each codeword is a hyperedge holding one vertex per subframe.  The base
station decodes by keeping the hyperedges whose vertices were all detected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .code_core import Code

Vertex = tuple[int, int]


@dataclass(frozen=True)
class CodeHypergraph:
    n: int
    q: int
    r: int
    partitions: tuple[tuple[Vertex, ...], ...]
    hyperedges: tuple[tuple[Vertex, ...], ...]
    incidence: dict[Vertex, tuple[int, ...]]

    @property
    def M(self) -> int:
        return len(self.hyperedges)

    def incident(self, vertex: Vertex) -> tuple[int, ...]:
        return self.incidence.get(vertex, ())


@dataclass(frozen=True)
class DetectedSets:
    """Preambles detected per subframe; ``per_subframe[i]`` is Y_{i+1}."""

    per_subframe: tuple[frozenset[int], ...]
    q: int

    def __post_init__(self):
        for ys in self.per_subframe:
            if any(not 0 <= s < self.q for s in ys):
                raise ValueError(f"detected preamble outside 0..{self.q - 1}: {sorted(ys)}")

    @classmethod
    def of(cls, sets: Sequence[Iterable[int]], q: int) -> "DetectedSets":
        return cls(tuple(frozenset(s) for s in sets), q)

    @property
    def n(self) -> int:
        return len(self.per_subframe)

    def vertices(self) -> set[Vertex]:
        return {(i + 1, j) for i, ys in enumerate(self.per_subframe) for j in ys}


def build_hypergraph(code: Code) -> CodeHypergraph:
    n, r = code.n, code.params.r
    partitions = tuple(tuple((i, j) for j in range(r)) for i in range(1, n + 1))
    edges = tuple(tuple((i + 1, s) for i, s in enumerate(w)) for w in code.words)
    incidence: dict[Vertex, list[int]] = {}
    for t, edge in enumerate(edges):
        for v in edge:
            incidence.setdefault(v, []).append(t)
    return CodeHypergraph(
        n=n,
        q=code.q,
        r=r,
        partitions=partitions,
        hyperedges=edges,
        incidence={v: tuple(ts) for v, ts in incidence.items()},
    )


def _check_indices(code: Code, transmitted: Iterable[int]) -> list[int]:
    idx = [int(t) for t in transmitted]
    bad = [t for t in idx if not 0 <= t < code.M]
    if bad:
        raise ValueError(f"codeword indices out of range 0..{code.M - 1}: {bad}")
    return idx


def observe(code: Code, transmitted: Iterable[int]) -> DetectedSets:
    """Perfect detection: Y_i is the union of the i-th symbols of the sent codewords."""
    idx = _check_indices(code, transmitted)
    sets = [set() for _ in range(code.n)]
    for t in idx:
        for i, s in enumerate(code.words[t]):
            sets[i].add(s)
    return DetectedSets.of(sets, code.q)


def decode(h: CodeHypergraph, y: DetectedSets) -> list[int]:
    """Hyperedges of the subhypergraph induced by the detected vertices.

    Each detected vertex bumps a counter on every hyperedge through it; a
    hyperedge is covered once its counter reaches n.
    """
    if y.n != h.n:
        raise ValueError(f"detected sets cover {y.n} subframes, hypergraph has {h.n}")
    hits = [0] * h.M
    covered = []
    for v in y.vertices():
        for t in h.incident(v):
            hits[t] += 1
            if hits[t] == h.n:
                covered.append(t)
    return sorted(covered)


def decode_bruteforce(code: Code, y: DetectedSets) -> list[int]:
    """Scan every codeword and keep those whose symbols were all detected."""
    if y.n != code.n:
        raise ValueError(f"detected sets cover {y.n} subframes, code has length {code.n}")
    return [
        t
        for t, w in enumerate(code.words)
        if all(s in y.per_subframe[i] for i, s in enumerate(w))
    ]


def decode_batch(words: np.ndarray, q: int, transmitted: np.ndarray) -> np.ndarray:
    """Vectorised decode of many superframes at once.

    ``words`` is the ``(M, n)`` code array, ``transmitted`` a ``(B, K)`` array
    of codeword indices.  Returns a ``(B, M)`` boolean mask of inferred valid
    codewords.
    """
    B = transmitted.shape[0]
    M, n = words.shape
    valid = np.ones((B, M), dtype=bool)
    if transmitted.shape[1] == 0:
        valid[:] = False
        return valid
    rows = np.arange(B)[:, None]
    for i in range(n):
        detected = np.zeros((B, q), dtype=bool)
        detected[rows, words[transmitted, i]] = True
        valid &= detected[:, words[:, i]]
    return valid
