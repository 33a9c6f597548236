import os

import pytest
from hypothesis import given, settings, strategies as st

from wheelforge.engine import ScanConfig, defect, max_skip, scan_level
from wheelforge.histogram import GapHistogram
from wheelforge.errors import ResourceCapError, UsageError
from wheelforge.levels import WheelLevel
from wheelforge.wheel import euler_period, pattern_build, primorial


def test_scan_p5():
    res = scan_level(ScanConfig(WheelLevel(3)))
    assert res.histogram.entries == {2: 3, 4: 3, 6: 2}
    assert res.gap_count == 8
    assert res.max_gap == 6
    assert res.max_gap_positions == [1, 23]


def test_scan_subrange_carries_last_survivor():
    res = scan_level(ScanConfig(WheelLevel(4), range=(1, 31)))
    assert res.first_survivor == 1
    assert res.last_survivor == 29
    assert res.histogram.entries == {10: 1, 2: 2, 4: 2, 6: 1}
    assert res.gap_count == 6


@pytest.mark.parametrize("k", range(2, 8))
def test_scan_matches_pattern_histogram(k):
    res = scan_level(ScanConfig(WheelLevel(k)))
    pat = pattern_build(k)
    assert res.histogram == pat.histogram()
    assert res.survivor_count == euler_period(k) + 1  # closing survivor L+1 included
    assert res.histogram.total_length == primorial(k)


@pytest.mark.parametrize("k", range(3, 9))
def test_max_gap_multiplicity_even(k):
    res = scan_level(ScanConfig(WheelLevel(k)))
    assert res.max_gap > 4
    assert res.max_gap_multiplicity % 2 == 0


def test_max_skip_examples():
    assert max_skip(6)[:2] == (22, 2)
    assert max_skip(2)[:2] == (4, 1)


def test_positions_are_capped_but_count_exact():
    res = scan_level(ScanConfig(WheelLevel(5), positions_cap=1))
    assert res.max_gap_multiplicity == 2
    assert len(res.max_gap_positions) == 1


@settings(max_examples=25, deadline=None)
@given(k=st.integers(2, 6), seg=st.integers(0, 5000), workers=st.integers(1, 3))
def test_segmentation_invariance(k, seg, workers):
    level = WheelLevel(k)
    base = scan_level(ScanConfig(level))
    seg = 2 * level.largest + seg
    other = scan_level(ScanConfig(level, segment_length=seg, worker_count=workers, positions_cap=64))
    assert other == base


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 30032))
def test_split_ranges_stitch_back(cut):
    level = WheelLevel(6)
    L = level.primorial
    left = scan_level(ScanConfig(level, range=(1, cut)))
    right = scan_level(ScanConfig(level, range=(cut, L + 2)))
    merged = left.histogram + right.histogram
    if left.last_survivor is not None and right.first_survivor is not None:
        merged = merged + GapHistogram({right.first_survivor - left.last_survivor: 1})
    assert merged == scan_level(ScanConfig(level)).histogram


def test_config_validation():
    with pytest.raises(UsageError):
        ScanConfig(WheelLevel(4), segment_length=13)
    with pytest.raises(UsageError):
        ScanConfig(WheelLevel(1))
    with pytest.raises(UsageError):
        ScanConfig(WheelLevel(3), range=(0, 10))
    with pytest.raises(UsageError):
        ScanConfig(WheelLevel(3), range=(1, 40))


def test_long_run_guard():
    with pytest.raises(ResourceCapError):
        scan_level(ScanConfig(WheelLevel(11)))
    # a short window at a large level is cheap and allowed
    res = scan_level(ScanConfig(WheelLevel(11), range=(1, 1000)))
    assert res.first_survivor == 1 and res.histogram.count(2) > 0


def test_defect():
    assert defect(9, 40) == 2
    assert defect(6, 22) == 0
    assert defect(15, 100) == 14
    assert defect(39, 510) == 184


@pytest.mark.skipif(not os.environ.get("WHEELFORGE_SLOW"), reason="set WHEELFORGE_SLOW=1 (about a minute)")
def test_k10_max_skip_comes_in_a_pair():
    res = scan_level(ScanConfig(WheelLevel(10)))
    assert (res.max_gap, res.max_gap_multiplicity) == (46, 2)
    assert res.histogram.mode() == 6
