"""OptCeRA and multipreamble code construction, and device-side encoding."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .code_core import Code, CodeParams, Codeword, format_word

OPTCERA = "optcera"
MULTIPREAMBLE = "multipreamble"


@dataclass(frozen=True)
class QaryDigits:
    """q-ary digits of an integer, most significant first: ``(a_n, ..., a_1)``."""

    digits: tuple[int, ...]
    q: int

    def __post_init__(self):
        if any(not 0 <= a < self.q for a in self.digits):
            raise ValueError(f"digits {self.digits} not in Z_{self.q}")

    @property
    def n(self) -> int:
        return len(self.digits)

    @property
    def value(self) -> int:
        t = 0
        for a in self.digits:
            t = t * self.q + a
        return t

    def low_first(self) -> tuple[int, ...]:
        """Digits as ``(a_1, ..., a_n)``."""
        return tuple(reversed(self.digits))


@dataclass(frozen=True)
class PreambleSchedule:
    codeword_index: int
    per_subframe: tuple[int, ...]


def qary_digits(t: int, q: int, n: int) -> QaryDigits:
    if q < 2 or n < 1:
        raise ValueError(f"need q >= 2 and n >= 1, got q={q}, n={n}")
    if not 0 <= t < q**n:
        raise ValueError(f"t={t} outside 0..{q**n - 1}")
    low = []
    for _ in range(n):
        t, a = divmod(t, q)
        low.append(a)
    return QaryDigits(tuple(reversed(low)), q)


def map_digits_to_codeword(d: QaryDigits) -> Codeword:
    """Prefix sums mod q: ``c_i = a_1 + ... + a_i (mod q)``."""
    word, acc = [], 0
    for a in d.low_first():
        acc = (acc + a) % d.q
        word.append(acc)
    return tuple(word)


def codeword_to_digits(word: Codeword, q: int) -> QaryDigits:
    """First differences mod q, the inverse of :func:`map_digits_to_codeword`."""
    prev, low = 0, []
    for c in word:
        low.append((c - prev) % q)
        prev = c
    return QaryDigits(tuple(reversed(low)), q)


def build_optcera_code(n: int, q: int, k: int) -> Code:
    """The (n, q, k)-OptCeRA code of size ``k*q``, codewords ordered by index t."""
    if n < 1 or q < 2:
        raise ValueError(f"need n >= 1 and q >= 2, got n={n}, q={q}")
    if not 1 <= k <= q ** (n - 1):
        raise ValueError(f"k must lie in 1..q^(n-1)={q ** (n - 1)}, got {k}")
    M = k * q
    words = tuple(map_digits_to_codeword(qary_digits(t, q, n)) for t in range(M))
    return Code(CodeParams(n=n, q=q, r=q, M=M), words, OPTCERA)


def build_multipreamble_code(n: int, a: int, q: int) -> Code:
    """All ``a**n`` words over the first ``a`` preambles (CeRA baseline)."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not 2 <= a <= q:
        raise ValueError(f"need 2 <= a <= q, got a={a}, q={q}")
    words = tuple(tuple(reversed(w)) for w in itertools.product(range(a), repeat=n))
    return Code(CodeParams(n=n, q=q, r=a, M=a**n), words, MULTIPREAMBLE)


def build_code(scheme: str, n: int, q: int, size_param: int) -> Code:
    """Dispatch on scheme name; ``size_param`` is k for OptCeRA and a for multipreamble."""
    if scheme == OPTCERA:
        return build_optcera_code(n, q, size_param)
    if scheme == MULTIPREAMBLE:
        return build_multipreamble_code(n, size_param, q)
    raise ValueError(f"unknown scheme {scheme!r}")


def encode_random(code: Code, rng: np.random.Generator) -> PreambleSchedule:
    t = int(rng.integers(code.M))
    return PreambleSchedule(t, code.words[t])


def code_table(n: int, q: int, k: int) -> str:
    """Three-column listing: codeword index, q-ary digits, OptCeRA codeword."""
    code = build_optcera_code(n, q, k)
    lines = [f"CW Z_{q}^{n} OptCeRA"]
    sep = "" if q <= 10 else ","
    for t, word in enumerate(code.words):
        digits = sep.join(str(a) for a in qary_digits(t, q, n).digits)
        cw = format_word(word, q) if q <= 10 else ",".join(str(s) for s in reversed(word))
        lines.append(f"{t} {digits} {cw}")
    return "\n".join(lines) + "\n"
