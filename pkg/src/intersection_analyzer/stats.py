"""Windowed cycle-length aggregation, peak detection, z-tests and summaries.

All functions are pure over immutable inputs.  Record timestamps are
interpreted as UTC; the analysis day spans 08:00 to 21:00 wall clock and
windows are half-open [start, start + window) anchored at 08:00.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Mapping, Sequence

from .errors import (
    EmptyInput,
    InsufficientWindows,
    InvariantViolation,
    NoTimestamps,
    TooFewSamples,
)
from .model import DayFilter, SignalCycleRecord

DAY_START_S = 8 * 3600
DAY_END_S = 21 * 3600

# Two-tailed p-values are floored here so log-scale reports never see zero.
P_VALUE_FLOOR = 1e-300

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class WindowedAverage:
    """Mean cycle length in one time-of-day window, across the filtered days.

    ``window_start`` is seconds since midnight.  An empty window keeps
    ``mean_cycle_length`` as None, never zero.
    """

    window_start: float
    window_length: float
    mean_cycle_length: float | None
    sample_count: int


@dataclass(frozen=True)
class ZTestResult:
    z_statistic: float
    p_value: float
    mean_a: float
    mean_b: float
    n_a: int
    n_b: int


@dataclass(frozen=True)
class FiveNumberSummary:
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float

    def __post_init__(self):
        ordered = (self.minimum, self.q1, self.median, self.q3, self.maximum)
        if any(a > b for a, b in zip(ordered, ordered[1:])):
            raise InvariantViolation(f"five-number summary out of order: {ordered}")


def _weekday(timestamp: float) -> int:
    return datetime.fromtimestamp(timestamp, tz=timezone.utc).weekday()


def _matches_day(timestamp: float, day_filter: DayFilter) -> bool:
    if day_filter is DayFilter.ALL:
        return True
    weekday = _weekday(timestamp)
    if day_filter is DayFilter.WEEKDAY:
        return weekday < 5
    if day_filter is DayFilter.SATURDAY:
        return weekday == 5
    return weekday == 6


def _seconds_since_midnight(timestamp: float) -> float:
    dt = datetime.fromtimestamp(timestamp, tz=timezone.utc)
    return dt.hour * 3600 + dt.minute * 60 + dt.second + dt.microsecond / 1e6


def window_cycle_lengths(
    records: Sequence[SignalCycleRecord],
    window: float = 1800.0,
    day_filter: DayFilter = DayFilter.ALL,
) -> list[WindowedAverage]:
    """Average cycle length per time-of-day window over the selected days.

    Returns one entry for every window intersecting the 08:00-21:00
    operating span, in time order.  No surviving records means no output.
    """
    if window <= 0:
        raise ValueError(f"window must be > 0, got {window}")
    if not records:
        return []
    missing = sum(1 for r in records if r.timestamp is None)
    if missing:
        raise NoTimestamps(f"{missing} of {len(records)} records carry no timestamp")

    kept = [r for r in records if _matches_day(r.timestamp, day_filter)]
    if not kept:
        return []

    starts: list[float] = []
    start = float(DAY_START_S)
    while start < DAY_END_S:
        starts.append(start)
        start += window

    sums = [0.0] * len(starts)
    counts = [0] * len(starts)
    for record in kept:
        tod = _seconds_since_midnight(record.timestamp)
        if tod < DAY_START_S:
            continue
        index = int((tod - DAY_START_S) // window)
        if index >= len(starts):
            continue
        sums[index] += record.cycle_length
        counts[index] += 1

    return [
        WindowedAverage(
            window_start=starts[i],
            window_length=window,
            mean_cycle_length=(sums[i] / counts[i]) if counts[i] else None,
            sample_count=counts[i],
        )
        for i in range(len(starts))
    ]


def peak_window(averages: Sequence[WindowedAverage], span: int) -> tuple[float, float]:
    """Start and end (seconds since midnight) of the run of ``span``
    consecutive windows with the largest summed mean; ties go to the
    earliest start.  Runs containing an empty window are not eligible.
    """
    if span < 1:
        raise ValueError(f"span must be >= 1, got {span}")
    if len(averages) < span:
        raise InsufficientWindows(
            f"need at least {span} windows, have {len(averages)}")

    best_index: int | None = None
    best_sum = -math.inf
    for i in range(len(averages) - span + 1):
        run = averages[i:i + span]
        if any(w.mean_cycle_length is None for w in run):
            continue
        total = sum(w.mean_cycle_length for w in run)
        if total > best_sum:
            best_sum = total
            best_index = i
    if best_index is None:
        raise InsufficientWindows(
            f"no run of {span} consecutive windows has data")

    first = averages[best_index]
    last = averages[best_index + span - 1]
    return first.window_start, last.window_start + last.window_length


def normal_two_tailed_p(z: float) -> float:
    """Two-tailed standard-normal tail mass 2*(1 - Phi(|z|)).

    Evaluated as erfc(|z|/sqrt(2)) via the platform's rational erfc
    approximation (relative error well under 1e-10), so extreme statistics
    keep full precision and fixture p-values are portable.
    """
    return math.erfc(abs(z) / _SQRT2)


def z_test(sample_a: Sequence[float], sample_b: Sequence[float]) -> ZTestResult:
    """Two-sample z-test with unequal variances, two-tailed.

    z = (mean_a - mean_b) / sqrt(s_a^2/n_a + s_b^2/n_b) with sample
    variances.  Both variances zero is handled by convention: equal means
    give p = 1, unequal means give the p floor.
    """
    n_a, n_b = len(sample_a), len(sample_b)
    if n_a < 2 or n_b < 2:
        raise TooFewSamples(
            f"z-test needs at least 2 observations per sample, got {n_a} and {n_b}")
    mean_a = statistics.fmean(sample_a)
    mean_b = statistics.fmean(sample_b)
    var_a = statistics.variance(sample_a)
    var_b = statistics.variance(sample_b)

    if var_a == 0.0 and var_b == 0.0:
        if mean_a == mean_b:
            return ZTestResult(0.0, 1.0, mean_a, mean_b, n_a, n_b)
        z = math.copysign(math.inf, mean_a - mean_b)
        return ZTestResult(z, P_VALUE_FLOOR, mean_a, mean_b, n_a, n_b)

    z = (mean_a - mean_b) / math.sqrt(var_a / n_a + var_b / n_b)
    p = max(normal_two_tailed_p(z), P_VALUE_FLOOR)
    return ZTestResult(z, p, mean_a, mean_b, n_a, n_b)


def pairwise_z_matrix(
    samples: Mapping[str, Sequence[float]],
) -> dict[tuple[str, str], float]:
    """Lower-triangular map of two-tailed p-values over every unordered pair.

    Keys are (later_id, earlier_id) in sorted id order, matching the usual
    triangular table layout; exactly k(k-1)/2 entries for k approaches.
    """
    if len(samples) < 2:
        raise TooFewSamples(f"need at least 2 approaches, got {len(samples)}")
    ids = sorted(samples)
    matrix: dict[tuple[str, str], float] = {}
    for i, row_id in enumerate(ids):
        for col_id in ids[:i]:
            matrix[(row_id, col_id)] = z_test(samples[row_id], samples[col_id]).p_value
    return matrix


def five_number(values: Iterable[float]) -> FiveNumberSummary:
    """Min, quartiles and max with inclusive linear interpolation."""
    data = sorted(values)
    if not data:
        raise EmptyInput("five-number summary over empty data")
    if len(data) == 1:
        v = float(data[0])
        return FiveNumberSummary(v, v, v, v, v)
    q1, q2, q3 = statistics.quantiles(data, n=4, method="inclusive")
    return FiveNumberSummary(float(data[0]), q1, q2, q3, float(data[-1]))
