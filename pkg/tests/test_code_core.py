import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cera_lab.code_core import (
    CapacityError,
    Code,
    CodeParams,
    all_words,
    average_hamming_distance,
    avg_distance_via_distribution,
    brute_force_mad,
    dump_code,
    format_word,
    hamming_distance,
    is_mad,
    load_code,
    mad_upper_bound,
    parse_word,
)
from cera_lab.optcera import build_multipreamble_code, build_optcera_code


def code_of(*texts, q):
    return Code.from_words([parse_word(t) for t in texts], q=q)


@pytest.mark.parametrize(
    "x, y, d",
    [("00", "00", 0), ("21", "11", 1), ("07", "70", 2)],
)
def test_hamming_distance_examples(x, y, d):
    assert hamming_distance(parse_word(x), parse_word(y)) == d


def test_hamming_distance_length_mismatch():
    with pytest.raises(ValueError):
        hamming_distance((0, 1), (0, 1, 2))


words3 = st.lists(st.integers(0, 5), min_size=4, max_size=4).map(tuple)


@given(words3, words3, words3)
def test_hamming_is_a_metric(x, y, z):
    assert hamming_distance(x, y) == hamming_distance(y, x)
    assert (hamming_distance(x, y) == 0) == (x == y)
    assert hamming_distance(x, z) <= hamming_distance(x, y) + hamming_distance(y, z)


def test_word_rendering_is_reversed():
    assert parse_word("21") == (1, 2)
    assert format_word((1, 2), q=8) == "21"
    assert format_word((1, 12), q=64) == "12 1"
    assert parse_word("12 1") == (1, 12)


def test_average_distance_examples():
    assert average_hamming_distance(code_of("00", q=2)) == 0
    assert average_hamming_distance(code_of("00", "11", q=2)) == 1
    assert average_hamming_distance(Code.from_words(all_words(2, 2), q=2)) == 1


def test_average_distance_empty():
    with pytest.raises(ValueError):
        average_hamming_distance([])


def test_distribution_formula_examples():
    assert avg_distance_via_distribution(code_of("00", "11", q=2)) == 1
    degenerate = code_of("00", "01", q=2)
    assert degenerate.distribution[0] == (Fraction(1, 2), Fraction(1, 2))
    assert degenerate.distribution[1] == (Fraction(1), Fraction(0))
    assert avg_distance_via_distribution(degenerate) == 0.5
    assert average_hamming_distance(degenerate) == 0.5
    full = Code.from_words(all_words(8, 2), q=8)
    assert avg_distance_via_distribution(full) == pytest.approx(1.75, abs=1e-12)


@pytest.mark.parametrize("n, q, bound", [(2, 8, 1.75), (2, 64, 1.96875), (1, 2, 0.5)])
def test_mad_upper_bound(n, q, bound):
    assert mad_upper_bound(n, q) == bound


def random_codes():
    @st.composite
    def build(draw):
        q = draw(st.integers(2, 5))
        n = draw(st.integers(1, 3))
        universe = all_words(q, n)
        idx = draw(st.sets(st.integers(0, len(universe) - 1), min_size=1, max_size=len(universe)))
        return Code.from_words([universe[i] for i in sorted(idx)], q=q, r=q)

    return build()


@settings(max_examples=200)
@given(random_codes())
def test_double_sum_matches_distribution_formula(code):
    direct = average_hamming_distance(code)
    via = avg_distance_via_distribution(code)
    assert abs(direct - via) <= 1e-12
    bound = mad_upper_bound(code.n, code.q)
    assert -1e-12 <= direct <= bound + 1e-12
    if code.M % code.q == 0:
        # Bound attained exactly iff every coordinate is uniform.
        assert is_mad(code) == (abs(via - bound) <= 1e-12)
    else:
        assert not is_mad(code)


def test_is_mad_examples():
    assert is_mad(build_optcera_code(2, 8, 1))
    assert not is_mad(build_multipreamble_code(2, 4, 8))
    assert is_mad(Code.from_words(all_words(3, 2), q=3))


@pytest.mark.parametrize(
    "q, n, M, best",
    [(2, 2, 2, Fraction(1)), (2, 2, 4, Fraction(1)), (3, 2, 3, Fraction(4, 3))],
)
def test_brute_force_examples(q, n, M, best):
    value, witness = brute_force_mad(q, n, M)
    assert value == pytest.approx(float(best), abs=1e-12)
    assert witness.M == M
    assert average_hamming_distance(witness) == pytest.approx(value, abs=1e-12)


def test_brute_force_tie_break_is_lexicographic():
    _, witness = brute_force_mad(2, 2, 2)
    # ("00","11") and ("01","10") both reach 1; the first in enumeration order wins.
    assert [format_word(w, 2) for w in witness.words] == ["00", "11"]


def test_brute_force_against_independent_enumeration():
    q, n, M = 3, 2, 3
    universe = list(itertools.product(range(q), repeat=n))
    best = max(
        Fraction(sum(hamming_distance(x, y) for x in s for y in s), M * M)
        for s in itertools.combinations(universe, M)
    )
    assert brute_force_mad(q, n, M)[0] == pytest.approx(float(best), abs=1e-12)


def test_brute_force_refuses_large_instances():
    with pytest.raises(CapacityError):
        brute_force_mad(5, 2, 4)
    with pytest.raises(CapacityError):
        brute_force_mad(2, 4, 9)


def test_code_invariants():
    with pytest.raises(ValueError):
        Code.from_words([(0, 0), (0, 0)], q=2)
    with pytest.raises(ValueError):
        Code.from_words([(0, 2)], q=2)
    with pytest.raises(ValueError):
        Code.from_words([(0, 0), (1,)], q=2)
    with pytest.raises(ValueError):
        CodeParams(n=2, q=4, r=5, M=1)


def test_distribution_rows_sum_to_one():
    code = build_multipreamble_code(3, 3, 5)
    for row in code.distribution:
        assert sum(row) == 1


def test_text_round_trip():
    code = build_optcera_code(2, 8, 2)
    text = dump_code(code)
    assert text.splitlines()[0] == "2 8 8 16"
    assert text.splitlines()[10] == "2 1"
    back = load_code(text, scheme=code.scheme)
    assert back == code


def test_load_rejects_bad_lines():
    with pytest.raises(ValueError):
        load_code("2 8 8 1\n1 2 3\n")
    with pytest.raises(ValueError):
        load_code("nonsense\n")
