import math
import random
from datetime import datetime, timezone

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from intersection_analyzer import (
    ClassifiedCount,
    DayFilter,
    SignalCycleRecord,
    WindowedAverage,
    five_number,
    pairwise_z_matrix,
    peak_window,
    window_cycle_lengths,
    z_test,
)
from intersection_analyzer.errors import (
    EmptyInput,
    InsufficientWindows,
    NoTimestamps,
    TooFewSamples,
)
from intersection_analyzer.stats import P_VALUE_FLOOR


def ts(day: str, hh: int, mm: int) -> float:
    stamp = datetime.strptime(day, "%Y-%m-%d").replace(
        hour=hh, minute=mm, tzinfo=timezone.utc)
    return stamp.timestamp()


def record(cycle: float, timestamp: float | None = None) -> SignalCycleRecord:
    counts = ClassifiedCount("A1", {}, timestamp)
    return SignalCycleRecord("A1", cycle, 0.0, 0.0, counts)


def two_tailed_oracle(z: float) -> float:
    """Independent normal tail mass via arbitrary-precision erfc."""
    with mpmath.workdps(50):
        return float(mpmath.erfc(abs(z) / mpmath.sqrt(2)))


MON, TUE = "2022-03-07", "2022-03-08"
SAT, SUN = "2022-03-12", "2022-03-13"


# --- windowing ---------------------------------------------------------------

def test_window_mean_of_two_records():
    records = [record(150.0, ts(TUE, 11, 5)), record(154.0, ts(TUE, 11, 20))]
    windows = window_cycle_lengths(records, 1800.0)
    assert len(windows) == 26  # 08:00..21:00 in half hours
    eleven = [w for w in windows if w.window_start == 11 * 3600][0]
    assert eleven.mean_cycle_length == pytest.approx(152.0)
    assert eleven.sample_count == 2
    empty = [w for w in windows if w.sample_count == 0]
    assert all(w.mean_cycle_length is None for w in empty)


def test_empty_records_empty_output():
    assert window_cycle_lengths([], 1800.0) == []


def test_missing_timestamps_raise():
    with pytest.raises(NoTimestamps):
        window_cycle_lengths([record(150.0, None)], 1800.0)


def test_day_filter():
    records = [
        record(140.0, ts(MON, 9, 0)),
        record(100.0, ts(SAT, 9, 0)),
        record(80.0, ts(SUN, 9, 0)),
    ]
    for day, expected in ((DayFilter.WEEKDAY, 140.0),
                          (DayFilter.SATURDAY, 100.0),
                          (DayFilter.SUNDAY, 80.0)):
        windows = window_cycle_lengths(records, 1800.0, day)
        nine = [w for w in windows if w.window_start == 9 * 3600][0]
        assert nine.mean_cycle_length == expected
        assert nine.sample_count == 1
    nine_all = [w for w in window_cycle_lengths(records, 1800.0)
                if w.window_start == 9 * 3600][0]
    assert nine_all.sample_count == 3


def test_records_outside_operating_span_ignored():
    records = [record(150.0, ts(TUE, 7, 30)), record(90.0, ts(TUE, 9, 0))]
    windows = window_cycle_lengths(records, 1800.0)
    assert sum(w.sample_count for w in windows) == 1


def test_elevated_midday_block_lands_in_exactly_four_windows():
    records = []
    for hh in range(8, 21):
        for mm in (0, 30):
            elevated = 11 * 3600 <= hh * 3600 + mm * 60 < 13 * 3600
            records.append(record(160.0 if elevated else 100.0, ts(TUE, hh, mm)))
    windows = window_cycle_lengths(records, 1800.0)
    elevated_starts = [w.window_start for w in windows
                       if w.mean_cycle_length == 160.0]
    assert elevated_starts == [39600.0, 41400.0, 43200.0, 45000.0]


# --- peak window -------------------------------------------------------------

def make_windows(means, start=8 * 3600, width=1800.0):
    return [
        WindowedAverage(start + i * width, width, m, 0 if m is None else 1)
        for i, m in enumerate(means)
    ]


def test_peak_unique_maximum_run():
    windows = make_windows([100, 100, 160, 160, 160, 160, 100])
    start, end = peak_window(windows, 4)
    assert start == windows[2].window_start
    assert end == windows[5].window_start + 1800.0


def test_peak_tie_breaks_to_earliest():
    windows = make_windows([5, 5, 5, 5])
    start, end = peak_window(windows, 2)
    assert start == windows[0].window_start
    assert end == windows[1].window_start + 1800.0


def test_peak_insufficient_windows():
    with pytest.raises(InsufficientWindows):
        peak_window(make_windows([1, 2]), 3)
    with pytest.raises(InsufficientWindows):
        peak_window(make_windows([1, None, 2]), 2)


def test_peak_on_synthetic_week_fixture(week_records):
    windows = window_cycle_lengths(week_records, 1800.0, DayFilter.WEEKDAY)
    start, end = peak_window(windows, 4)
    assert (start, end) == (11 * 3600, 13 * 3600)


def test_peak_invariant_under_uniform_scaling():
    means = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0]
    base = peak_window(make_windows(means), 3)
    scaled = peak_window(make_windows([m * 17.5 for m in means]), 3)
    assert base == scaled


def test_peak_matches_exhaustive_scan_oracle():
    rng = random.Random(20220307)
    for _ in range(50):
        n = rng.randint(6, 26)
        means = [float(rng.randint(80, 200)) for _ in range(n)]
        span = rng.randint(1, n)
        windows = make_windows(means)
        start, end = peak_window(windows, span)
        # oracle: scan every run, exact integer sums, first maximal run wins
        sums = [sum(means[i:i + span]) for i in range(n - span + 1)]
        best = sums.index(max(sums))
        assert start == windows[best].window_start
        assert end == windows[best + span - 1].window_start + 1800.0


# --- z test ------------------------------------------------------------------

def test_identical_samples_give_p_one():
    sample = [1.0, 2.0, 3.0, 4.0]
    outcome = z_test(sample, list(sample))
    assert outcome.z_statistic == 0.0
    assert outcome.p_value == 1.0


def test_separated_means_fixture():
    # mean 0 vs mean 1, sample variance exactly 1, n = 100 each
    c = math.sqrt(0.99)  # 100 * c^2 / 99 = 1
    a = [-c, c] * 50
    b = [x + 1.0 for x in a]
    outcome = z_test(a, b)
    expected_z = -1.0 / math.sqrt(2 / 100)
    assert outcome.z_statistic == pytest.approx(expected_z, rel=1e-12)
    assert outcome.z_statistic == pytest.approx(-7.07, abs=2e-3)
    assert outcome.p_value == pytest.approx(two_tailed_oracle(expected_z), rel=1e-10)
    assert outcome.p_value < 1e-11


def test_p_value_matches_independent_oracle_on_grid():
    for z in (0.0, 0.5, 1.0, 1.6448536269514722, 2.5, 4.0, 7.0, 12.0, 30.0):
        sample_a = [-1.0, 1.0] * 50
        scale = z * math.sqrt(2 * (100 / 99) / 100)
        sample_b = [x - scale for x in sample_a]
        outcome = z_test(sample_a, sample_b)
        assert outcome.z_statistic == pytest.approx(z, rel=1e-9, abs=1e-12)
        assert outcome.p_value == pytest.approx(
            max(two_tailed_oracle(outcome.z_statistic), P_VALUE_FLOOR), rel=1e-9)


def test_too_few_samples():
    with pytest.raises(TooFewSamples):
        z_test([1.0], [1.0, 2.0])


def test_zero_variance_conventions():
    same = z_test([5.0, 5.0], [5.0, 5.0])
    assert same.z_statistic == 0.0 and same.p_value == 1.0
    apart = z_test([5.0, 5.0], [7.0, 7.0])
    assert apart.p_value == P_VALUE_FLOOR
    assert apart.z_statistic == -math.inf


def test_antisymmetry_exact():
    a = [3.0, 1.0, 4.0, 1.5]
    b = [2.0, 7.0, 1.0, 8.0, 2.0]
    ab = z_test(a, b)
    ba = z_test(b, a)
    assert ba.z_statistic == -ab.z_statistic
    assert ba.p_value == ab.p_value


def test_location_invariance_fixed_case():
    a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    b = [3.0, 3.0, 4.0, 5.0, 5.0, 6.0]
    base = z_test(a, b)
    shifted = z_test([x + 100.0 for x in a], [x + 100.0 for x in b])
    assert shifted.z_statistic == pytest.approx(base.z_statistic, abs=1e-12)
    assert shifted.p_value == pytest.approx(base.p_value, rel=1e-12)


samples = st.lists(st.integers(min_value=-1000, max_value=1000).map(float),
                   min_size=2, max_size=40)


@given(samples, samples)
def test_antisymmetry_property(a, b):
    ab = z_test(a, b)
    ba = z_test(b, a)
    assert ba.z_statistic == -ab.z_statistic
    assert ba.p_value == ab.p_value


@given(samples, samples, st.integers(min_value=-1000, max_value=1000).map(float))
def test_location_invariance_property(a, b, shift):
    base = z_test(a, b)
    moved = z_test([x + shift for x in a], [x + shift for x in b])
    assert moved.z_statistic == pytest.approx(base.z_statistic, rel=1e-9, abs=1e-9)
    assert moved.p_value == pytest.approx(base.p_value, rel=1e-8, abs=1e-15)


# --- pairwise matrix ---------------------------------------------------------

def test_pairwise_identical_pair():
    matrix = pairwise_z_matrix({"A": [1.0, 2.0, 3.0], "B": [1.0, 2.0, 3.0]})
    assert matrix == {("B", "A"): 1.0}


def test_pairwise_three_approaches_one_separated():
    near_a = [10.0, 11.0, 10.5, 9.5, 10.0, 10.6]
    near_b = [10.2, 10.9, 10.4, 9.8, 10.1, 10.5]
    far = [500.0, 501.0, 499.5, 500.5, 500.2, 499.8]
    matrix = pairwise_z_matrix({"A": near_a, "B": near_b, "C": far})
    assert len(matrix) == 3
    assert matrix[("C", "A")] < 1e-4
    assert matrix[("C", "B")] < 1e-4
    assert matrix[("B", "A")] > 0.05
    # entries agree with direct tests regardless of argument order
    assert matrix[("B", "A")] == z_test(near_a, near_b).p_value


def test_pairwise_entry_count():
    data = {f"A{i}": [float(i), float(i + 1), float(i) + 0.5] for i in range(6)}
    matrix = pairwise_z_matrix(data)
    assert len(matrix) == 6 * 5 // 2


def test_pairwise_needs_two():
    with pytest.raises(TooFewSamples):
        pairwise_z_matrix({"A": [1.0, 2.0]})


# --- five number -------------------------------------------------------------

def test_five_number_examples():
    s = five_number([1, 2, 3, 4, 5])
    assert (s.minimum, s.q1, s.median, s.q3, s.maximum) == (1, 2, 3, 4, 5)
    singleton = five_number([7])
    assert (singleton.minimum, singleton.q1, singleton.median,
            singleton.q3, singleton.maximum) == (7, 7, 7, 7, 7)


def test_five_number_empty():
    with pytest.raises(EmptyInput):
        five_number([])


def test_five_number_uniform_draws():
    rng = random.Random(12345)
    values = [rng.random() for _ in range(1000)]
    s = five_number(values)
    assert abs(s.q1 - 0.25) < 0.05
    assert abs(s.median - 0.5) < 0.05
    assert abs(s.q3 - 0.75) < 0.05


@given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=2, max_size=60))
def test_five_number_matches_numpy_inclusive(values):
    s = five_number(values)
    q1, q2, q3 = np.percentile(values, [25, 50, 75], method="linear")
    assert s.q1 == pytest.approx(q1, rel=1e-12, abs=1e-9)
    assert s.median == pytest.approx(q2, rel=1e-12, abs=1e-9)
    assert s.q3 == pytest.approx(q3, rel=1e-12, abs=1e-9)
    assert s.minimum <= s.q1 <= s.median <= s.q3 <= s.maximum
