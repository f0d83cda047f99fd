"""Level-of-service banding for control delay and volume-to-capacity values.

Two delay standards ship by default: one calibrated for heterogeneous
(non-lane-based) traffic and the stricter uniform-traffic one.  Delay bands
are upper-inclusive ("up to 10 s" is still grade A); V/C bands are
lower-inclusive with an open-ended F at 1.0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvariantViolation

GRADES = ("A", "B", "C", "D", "E", "F")


@dataclass(frozen=True)
class LosResult:
    grade: str
    standard: str
    classified_value: float


@dataclass(frozen=True)
class LosBandTable:
    """Ordered (upper_bound, grade) bands; the last band is unbounded (None)."""

    standard: str
    bands: tuple[tuple[float | None, str], ...]
    upper_inclusive: bool = True

    def __post_init__(self):
        grades = tuple(grade for _, grade in self.bands)
        if grades != GRADES:
            raise InvariantViolation(
                f"bands must cover grades A..F exactly once in order, got {grades}")
        bounds = [b for b, _ in self.bands[:-1]]
        if self.bands[-1][0] is not None:
            raise InvariantViolation("the F band must be open-ended (bound None)")
        if any(b is None for b in bounds):
            raise InvariantViolation("only the final band may be unbounded")
        if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
            raise InvariantViolation(f"bounds must be strictly increasing, got {bounds}")

    def classify(self, value: float) -> LosResult:
        if value < 0:
            raise ValueError(f"classified value must be >= 0, got {value}")
        for upper, grade in self.bands:
            if upper is None:
                return LosResult(grade, self.standard, value)
            if (value <= upper) if self.upper_inclusive else (value < upper):
                return LosResult(grade, self.standard, value)
        raise AssertionError("unreachable: final band is open-ended")


DELAY_HETEROGENEOUS = LosBandTable(
    standard="delay_heterogeneous",
    bands=((10.0, "A"), (45.0, "B"), (65.0, "C"), (100.0, "D"), (135.0, "E"), (None, "F")),
    upper_inclusive=True,
)

DELAY_HCM = LosBandTable(
    standard="delay_hcm",
    bands=((10.0, "A"), (20.0, "B"), (35.0, "C"), (55.0, "D"), (80.0, "E"), (None, "F")),
    upper_inclusive=True,
)

VC_RATIO_BANDS = LosBandTable(
    standard="vc_ratio",
    bands=((0.60, "A"), (0.70, "B"), (0.80, "C"), (0.90, "D"), (1.00, "E"), (None, "F")),
    upper_inclusive=False,
)

DEFAULT_TABLES = {
    table.standard: table
    for table in (DELAY_HETEROGENEOUS, DELAY_HCM, VC_RATIO_BANDS)
}


def classify_los(value: float, table: LosBandTable) -> LosResult:
    return table.classify(value)
