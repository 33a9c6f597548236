import math

import pytest
from hypothesis import given, settings, strategies as st

from oracles import crt_by_scan
from wheelforge.errors import UsageError
from wheelforge.histogram import GapHistogram
from wheelforge.levels import WheelLevel
from wheelforge.residues import (
    ResidueVector,
    central_residue_table,
    count_gap,
    enclosing_gap,
    extremal_candidates,
    from_residues,
    is_rprime,
    max_skip_lower_bound,
    multiplicity_recurrence_check,
    multiplicity_small_gaps,
    next_rprime_gap,
    to_residues,
)
from wheelforge.wheel import pattern_build, pattern_sieve_oracle

levels = st.integers(min_value=1, max_value=14).map(WheelLevel)


def rv(coords):
    return ResidueVector(WheelLevel(len(coords)), tuple(coords))


def test_to_residues_examples():
    assert to_residues(1, 4).coords == (1, 1, 1, 1)
    assert to_residues(15, 3).coords == (1, 0, 0)
    assert to_residues(25, 3).coords == (1, 1, 0)


def test_from_residues_examples():
    assert from_residues(rv((1, 0, 0))) == 15
    assert from_residues(rv((1, 1, 1))) == 1
    assert from_residues(rv((0, 2, 4))) == crt_by_scan((0, 2, 4), (2, 3, 5))[0] == 14


def test_residue_vector_validates():
    with pytest.raises(UsageError):
        rv((2, 0, 0))
    with pytest.raises(UsageError):
        ResidueVector(WheelLevel(3), (1, 1))


@given(levels, st.integers(min_value=0, max_value=2**64))
def test_round_trip(level, x):
    L = level.primorial
    assert from_residues(to_residues(x, level)) == x % L


@given(levels, st.integers(min_value=0, max_value=2**63))
def test_rprime_agrees_with_gcd(level, x):
    assert is_rprime(to_residues(x, level)) == (math.gcd(x, level.primorial) == 1)


@given(levels, st.integers(min_value=1, max_value=2**62))
def test_mirror_residue_symmetry(level, x):
    L = level.primorial
    x %= L
    assert is_rprime(to_residues(x, level)) == is_rprime(to_residues(L - x, level))


def test_is_rprime_examples():
    assert is_rprime(rv((1, 1, 1)))
    assert not is_rprime(rv((1, 1, 0)))
    assert is_rprime(rv((1, 2, 2, 2)))


def test_small_gap_multiplicity():
    assert multiplicity_small_gaps(3) == 3
    assert multiplicity_small_gaps(4) == 15
    hist = pattern_sieve_oracle(5).histogram()
    assert multiplicity_small_gaps(5) == hist.count(2) == 135
    with pytest.raises(UsageError):
        multiplicity_small_gaps(1)


def test_count_gap():
    assert count_gap(pattern_build(3), 6) == 2
    assert count_gap(pattern_build(3), 8) == 0
    assert count_gap(pattern_build(4), 2) == 15
    assert count_gap(GapHistogram({2: 5}), 2) == 5


@pytest.mark.parametrize("k", range(2, 9))
def test_histogram_small_gaps_and_parity(k):
    hist = pattern_build(k).histogram()
    n = multiplicity_small_gaps(k)
    assert hist.count(2) == hist.count(4) == n
    assert n % 2 == 1
    assert hist.odd_multiplicities() == []
    assert hist.total_count == pattern_build(k).period
    assert hist.total_length == pattern_build(k).length


def test_max_skip_lower_bound():
    assert max_skip_lower_bound(6) == 22
    assert max_skip_lower_bound(9) == 38
    assert max_skip_lower_bound(2) == 4 == int(pattern_build(2).gaps.max())


def test_extremal_candidates_examples():
    assert set(extremal_candidates(6)) == {20580, 9450}
    a, b = extremal_candidates(3)
    assert {a, b} == {26, 4}
    assert a + b == 30
    with pytest.raises(UsageError):
        extremal_candidates(2)


@pytest.mark.parametrize("k", range(3, 15))
def test_extremal_candidates_are_composite_and_mirrored(k):
    a, b = extremal_candidates(k)
    assert a != b
    assert a + b == WheelLevel(k).primorial
    assert not is_rprime(to_residues(a, k)) and not is_rprime(to_residues(b, k))


def test_next_rprime_gap_examples():
    assert next_rprime_gap(1, 3) == (7, 6)
    assert next_rprime_gap(29, 3) == (31, 2)
    assert next_rprime_gap(113, 4) == (121, 8)
    with pytest.raises(UsageError):
        next_rprime_gap(25, 3)


@pytest.mark.parametrize("k", [3, 5])
def test_next_rprime_gap_walks_the_pattern(k):
    x = 1
    for g in pattern_build(k).gaps.tolist():
        y, gap = next_rprime_gap(x, k)
        assert gap == g
        x = y


def test_enclosing_gap():
    assert enclosing_gap(26, 3) == (23, 29)
    with pytest.raises(UsageError):
        enclosing_gap(23, 3)


@pytest.mark.parametrize("k", range(2, 10))
def test_central_table(k):
    rows = central_residue_table(k)
    primes = WheelLevel(k).primes
    assert [r["rprime"] for r in rows] == [True, False, False, False, True]
    for r in rows:
        o = r["offset"]
        expected = tuple(((1 + o) if i == 0 else o) % p for i, p in enumerate(primes))
        assert r["coords"] == expected
    assert rows[2]["value"] * 2 == WheelLevel(k).primorial


def test_recurrence_examples():
    h = {k: pattern_build(k).histogram() for k in (3, 4, 5)}
    chk = multiplicity_recurrence_check(3, h[3], h[4])
    assert (chk.t_k, chk.t_next, chk.period_k) == (3, 15, 8)
    assert chk.both == (True, True)
    chk = multiplicity_recurrence_check(4, h[4], h[5])
    assert chk.t_next == 135 and chk.t_k * chk.p_next - chk.period_k == 117
    assert chk.both == (True, True)


def test_recurrence_scans_when_not_given():
    assert multiplicity_recurrence_check(2).both == (True, True)


@settings(max_examples=50)
@given(st.dictionaries(st.integers(1, 40).map(lambda g: 2 * g), st.integers(1, 100)),
       st.dictionaries(st.integers(1, 40).map(lambda g: 2 * g), st.integers(1, 100)))
def test_histogram_merge_commutes(a, b):
    ha, hb = GapHistogram(a), GapHistogram(b)
    assert ha + hb == hb + ha
    assert (ha + hb).total_count == ha.total_count + hb.total_count


def test_histogram_csv_round_trip():
    hist = pattern_build(4).histogram()
    text = hist.to_csv()
    assert text.splitlines()[:2] == ["gap,count", "2,15"]
    assert GapHistogram.from_csv(text) == hist
