import itertools
from pathlib import Path

import numpy as np
import pytest

from cera_lab.code_core import (
    average_hamming_distance,
    format_word,
    is_mad,
    mad_upper_bound,
)
from cera_lab.optcera import (
    build_multipreamble_code,
    build_optcera_code,
    code_table,
    codeword_to_digits,
    encode_random,
    map_digits_to_codeword,
    qary_digits,
)

DATA = Path(__file__).parent / "data"

TABLE_II = "00 11 22 33 44 55 66 77 10 21 32 43 54 65 76 07".split()


@pytest.mark.parametrize("t, digits", [(9, (1, 1)), (0, (0, 0)), (15, (1, 7))])
def test_qary_digits_table_rows(t, digits):
    d = qary_digits(t, 8, 2)
    assert d.digits == digits
    assert d.value == t


def test_qary_digits_range():
    with pytest.raises(ValueError):
        qary_digits(64, 8, 2)
    with pytest.raises(ValueError):
        qary_digits(-1, 8, 2)


@pytest.mark.parametrize("t, word", [(9, "21"), (15, "07"), (0, "00")])
def test_prefix_sum_mapping(t, word):
    assert format_word(map_digits_to_codeword(qary_digits(t, 8, 2)), 8) == word


def test_mapping_zero_case():
    assert map_digits_to_codeword(qary_digits(0, 5, 4)) == (0, 0, 0, 0)


@pytest.mark.parametrize("q, n", [(2, 3), (3, 3), (4, 4), (8, 4), (16, 3), (64, 2)])
def test_mapping_is_a_bijection(q, n):
    assert q**n <= 4096
    images = set()
    for t in range(q**n):
        d = qary_digits(t, q, n)
        w = map_digits_to_codeword(d)
        assert codeword_to_digits(w, q) == d
        assert codeword_to_digits(w, q).value == t
        images.add(w)
    assert len(images) == q**n


def test_table_ii_code():
    assert [format_word(w, 8) for w in build_optcera_code(2, 8, 2).words] == TABLE_II
    assert [format_word(w, 8) for w in build_optcera_code(2, 8, 1).words] == TABLE_II[:8]


def test_n1_code_is_identity():
    code = build_optcera_code(1, 5, 1)
    assert code.words == tuple((s,) for s in range(5))


def test_k_range_enforced():
    build_optcera_code(2, 8, 8)
    for k in (0, 9):
        with pytest.raises(ValueError):
            build_optcera_code(2, 8, k)


@pytest.mark.parametrize(
    "n, q, k", [(n, q, k) for n in (2, 3) for q in (4, 8, 64) for k in range(1, 9) if k <= q ** (n - 1)]
)
def test_optcera_is_mad(n, q, k):
    code = build_optcera_code(n, q, k)
    assert code.M == k * q and code.params.r == q
    assert len(set(code.words)) == code.M
    assert is_mad(code)
    assert abs(average_hamming_distance(code) - mad_upper_bound(n, q)) <= 1e-12


def test_multipreamble_examples():
    assert [format_word(w, 8) for w in build_multipreamble_code(2, 2, 8).words] == ["00", "01", "10", "11"]
    full = build_multipreamble_code(2, 8, 8)
    assert set(full.words) == set(itertools.product(range(8), repeat=2))
    fig1a = build_multipreamble_code(2, 4, 8)
    assert fig1a.M == 16 and fig1a.params.r == 4
    assert all(s < 4 for w in fig1a.words for s in w)
    with pytest.raises(ValueError):
        build_multipreamble_code(2, 9, 8)


@pytest.mark.parametrize("n, a, q", [(2, 4, 8), (3, 3, 7), (2, 23, 64)])
def test_multipreamble_distribution(n, a, q):
    from fractions import Fraction

    code = build_multipreamble_code(n, a, q)
    for row in code.distribution:
        assert row == tuple(Fraction(1, a) if j < a else Fraction(0) for j in range(q))


def test_encode_random_is_seed_deterministic():
    code = build_optcera_code(2, 8, 2)
    a = encode_random(code, np.random.default_rng(2024))
    b = encode_random(code, np.random.default_rng(2024))
    assert a == b
    assert a.per_subframe == code.words[a.codeword_index]


def test_encode_random_single_codeword():
    from cera_lab.code_core import Code

    code = Code.from_words([(3, 1)], q=4)
    rng = np.random.default_rng(0)
    assert all(encode_random(code, rng).codeword_index == 0 for _ in range(20))


def test_encode_random_is_uniform():
    code = build_optcera_code(2, 8, 2)
    rng = np.random.default_rng(11)
    draws = 100_000
    counts = np.bincount([encode_random(code, rng).codeword_index for _ in range(draws)], minlength=16)
    p = 1 / code.M
    sigma = np.sqrt(draws * p * (1 - p))
    assert np.all(np.abs(counts - draws * p) <= 5 * sigma)


def test_code_table_golden():
    assert code_table(2, 8, 2) == (DATA / "table2_k2.txt").read_text()
    assert code_table(2, 8, 2).splitlines()[-1] == "15 17 07"
    assert len(code_table(2, 8, 1).splitlines()) == 1 + 8
    assert code_table(1, 4, 1).splitlines()[1:] == ["0 0 0", "1 1 1", "2 2 2", "3 3 3"]
