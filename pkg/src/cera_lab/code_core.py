"""Words, codes and average-Hamming-distance machinery over Z_q.

A codeword is stored as a tuple indexed by RA subframe: ``word[0]`` is the
symbol sent in subframe 1.  When rendered as text the order is reversed
(``c_n ... c_1``), so the tuple ``(1, 2)`` prints as ``"21"``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Codeword = tuple[int, ...]

# Refuse exhaustive searches beyond these sizes (C(16, 8) = 12870 subsets).
MAX_BRUTE_FORCE_WORDS = 16
MAX_BRUTE_FORCE_M = 8


class CapacityError(RuntimeError):
    """An exhaustive computation was asked for an instance too large to enumerate."""


@dataclass(frozen=True)
class CodeParams:
    n: int
    q: int
    r: int
    M: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"block length n must be >= 1, got {self.n}")
        if self.q < 2:
            raise ValueError(f"alphabet size q must be >= 2, got {self.q}")
        if not 1 <= self.r <= self.q:
            raise ValueError(f"used symbols r must satisfy 1 <= r <= q, got r={self.r}, q={self.q}")
        if not 1 <= self.M <= self.r**self.n:
            raise ValueError(f"code size M must satisfy 1 <= M <= r^n, got M={self.M}")


def format_word(word: Sequence[int], q: int | None = None) -> str:
    """Render ``word`` as ``c_n ... c_1``.

    Symbols are concatenated when every symbol is a single digit (``q <= 10``),
    otherwise they are separated by spaces.
    """
    rev = reversed(word)
    if q is not None and q <= 10:
        return "".join(str(s) for s in rev)
    return " ".join(str(s) for s in rev)


def parse_word(text: str) -> Codeword:
    """Inverse of :func:`format_word`; ``"21"`` -> ``(1, 2)``."""
    text = text.strip()
    parts = text.split() if " " in text else list(text)
    return tuple(int(p) for p in reversed(parts))


@dataclass(frozen=True)
class Code:
    """An immutable set of distinct codewords with its symbol distribution.

    ``words`` keeps construction order; index ``t`` of a codeword is its
    position in that tuple.
    """

    params: CodeParams
    words: tuple[Codeword, ...]
    scheme: str = ""
    _distribution: tuple[tuple[Fraction, ...], ...] = field(
        init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        n, q = self.params.n, self.params.q
        if len(self.words) != self.params.M:
            raise ValueError(f"expected {self.params.M} codewords, got {len(self.words)}")
        for w in self.words:
            if len(w) != n:
                raise ValueError(f"codeword {w!r} has length {len(w)}, expected {n}")
            if any(not 0 <= s < q for s in w):
                raise ValueError(f"codeword {w!r} has a symbol outside Z_{q}")
        if len(set(self.words)) != len(self.words):
            raise ValueError("codewords must be pairwise distinct")
        counts = [[0] * q for _ in range(n)]
        for w in self.words:
            for i, s in enumerate(w):
                counts[i][s] += 1
        M = self.params.M
        dist = tuple(tuple(Fraction(c, M) for c in row) for row in counts)
        object.__setattr__(self, "_distribution", dist)

    @classmethod
    def from_words(
        cls, words: Iterable[Sequence[int]], q: int, r: int | None = None, scheme: str = ""
    ) -> "Code":
        words = tuple(tuple(int(s) for s in w) for w in words)
        if not words:
            raise ValueError("a code needs at least one codeword")
        n = len(words[0])
        if r is None:
            r = max(2, max(max(w) for w in words) + 1)
        return cls(CodeParams(n=n, q=q, r=r, M=len(words)), words, scheme)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def q(self) -> int:
        return self.params.q

    @property
    def M(self) -> int:
        return self.params.M

    @property
    def distribution(self) -> tuple[tuple[Fraction, ...], ...]:
        """``distribution[i][j]`` is the exact fraction of codewords with symbol j at coordinate i+1."""
        return self._distribution

    def as_array(self) -> np.ndarray:
        """``(M, n)`` integer array of the codewords."""
        return np.asarray(self.words, dtype=np.int64).reshape(self.M, self.n)

    def __len__(self) -> int:
        return self.M

    def __iter__(self):
        return iter(self.words)


def hamming_distance(x: Sequence[int], y: Sequence[int]) -> int:
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} != {len(y)}")
    return sum(1 for a, b in zip(x, y) if a != b)


def average_hamming_distance(code: Code | Sequence[Sequence[int]]) -> float:
    """Mean distance over all ordered pairs of codewords, self-pairs included."""
    words = code.words if isinstance(code, Code) else tuple(code)
    if len(words) == 0:
        raise ValueError("average distance of an empty code is undefined")
    arr = np.asarray(words, dtype=np.int64)
    if arr.ndim == 1:
        arr = arr.reshape(len(words), -1)
    total = 0
    # Row-by-row keeps memory at O(M * n) for large codes.
    for row in arr:
        total += int(np.count_nonzero(arr != row))
    return total / len(words) ** 2


def avg_distance_via_distribution(code: Code) -> float:
    """Average distance computed from per-coordinate symbol frequencies alone."""
    return float(_avg_distance_exact(code))


def _avg_distance_exact(code: Code) -> Fraction:
    return sum((1 - sum(p * p for p in row) for row in code.distribution), Fraction(0))


def mad_upper_bound(n: int, q: int) -> float:
    return n * (1 - 1 / q)


def is_mad(code: Code) -> bool:
    """True iff ``M`` is a multiple of ``q`` and every coordinate is exactly uniform over Z_q."""
    q = code.q
    if code.M % q:
        return False
    target = Fraction(1, q)
    return all(p == target for row in code.distribution for p in row)


def all_words(q: int, n: int) -> list[Codeword]:
    """A_q^n in the natural order of the integer each rendered word represents."""
    return [tuple(reversed(w)) for w in itertools.product(range(q), repeat=n)]


def brute_force_mad(q: int, n: int, M: int) -> tuple[float, Code]:
    """Exhaustively solve the size-M maximum-average-distance subset problem.

    Returns the optimum and the first optimal subset in lexicographic order
    of the enumeration of A_q^n.  Raises :class:`CapacityError` when
    ``q**n > 16`` or ``M > 8``.
    """
    N = q**n
    if N > MAX_BRUTE_FORCE_WORDS or M > MAX_BRUTE_FORCE_M:
        raise CapacityError(
            f"instance q={q}, n={n}, M={M} too large to enumerate "
            f"(limits q^n <= {MAX_BRUTE_FORCE_WORDS}, M <= {MAX_BRUTE_FORCE_M})"
        )
    if not 1 <= M <= N:
        raise ValueError(f"M must lie in 1..{N}, got {M}")
    universe = all_words(q, n)
    dist = [[hamming_distance(x, y) for y in universe] for x in universe]
    best_sum, best_subset = -1, None
    for subset in itertools.combinations(range(N), M):
        s = sum(dist[a][b] for a in subset for b in subset)
        if s > best_sum:
            best_sum, best_subset = s, subset
    witness = Code.from_words([universe[i] for i in best_subset], q=q, r=q, scheme="brute-force")
    return best_sum / M**2, witness


def dump_code(code: Code) -> str:
    """Plain-text form: header ``n q r M`` then one ``c_n ... c_1`` line per codeword."""
    p = code.params
    lines = [f"{p.n} {p.q} {p.r} {p.M}"]
    lines += [" ".join(str(s) for s in reversed(w)) for w in code.words]
    return "\n".join(lines) + "\n"


def load_code(text: str, scheme: str = "") -> Code:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty code file")
    try:
        n, q, r, M = (int(x) for x in lines[0].split())
    except ValueError as exc:
        raise ValueError(f"bad header line {lines[0]!r}; expected 'n q r M'") from exc
    words = []
    for ln in lines[1:]:
        syms = [int(x) for x in ln.split()]
        if len(syms) != n:
            raise ValueError(f"line {ln!r} has {len(syms)} symbols, expected {n}")
        words.append(tuple(reversed(syms)))
    return Code(CodeParams(n=n, q=q, r=r, M=M), tuple(words), scheme)
