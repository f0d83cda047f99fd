"""Flow-side computations: hourly volume, V/C ratio, saturation flow, green use.

Everything returns full-precision floats; report emitters round (volumes
and saturation flows to integers, ratios to two decimals).
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Sequence

from .errors import (
    EmptyIntersection,
    InvariantViolation,
    NonPositiveWidth,
    UnknownLaneConfig,
    ZeroCycle,
    ZeroEffectiveGreen,
    ZeroGreen,
)
from .model import ApproachConfig, Directionality, SignalCycleRecord

# Discharge rate supported per metre of approach width, PCU per hour.
WIDTH_FLOW_RATE = 525.0


@dataclass(frozen=True)
class CapacityTable:
    """Capacity in PCU/hour keyed by (lane count, directionality)."""

    capacities: Mapping[tuple[int, Directionality], float]

    def __post_init__(self):
        table: dict[tuple[int, Directionality], float] = {}
        for key, value in self.capacities.items():
            if value <= 0:
                raise InvariantViolation(f"capacity for {key} must be > 0, got {value}")
            table[key] = float(value)
        object.__setattr__(self, "capacities", MappingProxyType(table))

    def capacity_for(self, config: ApproachConfig) -> float:
        key = (config.lane_count, config.directionality)
        if key not in self.capacities:
            raise UnknownLaneConfig(
                f"no capacity entry for {config.lane_count}-lane "
                f"{config.directionality.value} (approach {config.approach_id})")
        return self.capacities[key]


DEFAULT_CAPACITY_TABLE = CapacityTable({
    (3, Directionality.ONE_WAY): 3600.0,
    (2, Directionality.ONE_WAY): 2400.0,
    (1, Directionality.TWO_WAY): 2400.0,
    (1, Directionality.ONE_WAY): 1500.0,
})


@dataclass(frozen=True)
class FlowReport:
    """Volume, capacity and saturation-flow figures for one approach.

    ``sf_discharge`` is absent when no discharge observations (exited PCU
    over effective green) exist; ``sf_difference`` follows it.
    """

    approach_id: str
    hourly_volume: float
    capacity: float
    vc_ratio: float
    sf_width: float
    sf_discharge: float | None = None
    sf_difference: float | None = None

    def __post_init__(self):
        if self.vc_ratio < 0:
            raise InvariantViolation("vc_ratio must be >= 0")
        if self.sf_discharge is not None:
            expected = self.sf_discharge - self.sf_width
            if self.sf_difference is None or abs(self.sf_difference - expected) > 1e-9:
                raise InvariantViolation(
                    "sf_difference must equal sf_discharge - sf_width")
        elif self.sf_difference is not None:
            raise InvariantViolation("sf_difference given without sf_discharge")


@dataclass(frozen=True)
class GreenReport:
    """Green-time allocation and utilization figures for one approach."""

    approach_id: str
    pcu_per_cycle: float
    green_share: float | None = None
    green_to_pcu_ratio: float | None = None
    wastage: float | None = None


def hourly_volume(pcu_per_cycle: float, cycle_length: float) -> float:
    """Extrapolate one cycle's PCU to an hourly flow: pcu * 3600 / cycle."""
    if cycle_length <= 0:
        raise ZeroCycle(f"cycle_length must be > 0, got {cycle_length}")
    if pcu_per_cycle < 0:
        raise ValueError(f"pcu_per_cycle must be >= 0, got {pcu_per_cycle}")
    return pcu_per_cycle * 3600.0 / cycle_length


def vc_ratio(volume: float, config: ApproachConfig,
             table: CapacityTable = DEFAULT_CAPACITY_TABLE) -> float:
    if volume < 0:
        raise ValueError(f"volume must be >= 0, got {volume}")
    return volume / table.capacity_for(config)


def saturation_flow_discharge(exited_pcu: float, effective_green: float) -> float:
    """Saturation flow from observed discharge: N / g_e * 3600 (PCU/hour)."""
    if effective_green <= 0:
        raise ZeroEffectiveGreen(
            f"effective green must be > 0, got {effective_green}")
    if exited_pcu < 0:
        raise ValueError(f"exited_pcu must be >= 0, got {exited_pcu}")
    return exited_pcu / effective_green * 3600.0


def saturation_flow_width(width: float) -> float:
    """Saturation flow from geometry alone: 525 * width (PCU/hour)."""
    if width <= 0:
        raise NonPositiveWidth(f"width must be > 0, got {width}")
    return WIDTH_FLOW_RATE * width


def green_splits(
    records_by_approach: Mapping[str, Sequence[SignalCycleRecord]],
) -> dict[str, float]:
    """Share of the intersection's total green allocated to each approach.

    Computed from mean green per approach; shares sum to 1 and any subset's
    combined share is the plain sum of its members.
    """
    if not records_by_approach:
        raise EmptyIntersection("no approaches with records")
    means: dict[str, float] = {}
    for approach_id in sorted(records_by_approach):
        records = records_by_approach[approach_id]
        if not records:
            raise EmptyIntersection(f"approach {approach_id!r} has no records")
        means[approach_id] = statistics.fmean(r.green_time for r in records)
    total = sum(means.values())
    if total <= 0:
        raise ZeroGreen("total green time across the intersection is zero")
    return {approach_id: mean / total for approach_id, mean in means.items()}


def green_utilization(record: SignalCycleRecord, pcu_per_cycle: float) -> GreenReport:
    """Green seconds spent per PCU served, and the wasted green fraction.

    The ratio is absent when no PCU crossed; wastage (g - g_e)/g is absent
    without an effective-green observation.
    """
    if record.green_time <= 0:
        raise ZeroGreen(
            f"approach {record.approach_id!r}: green_time must be > 0")
    ratio = record.green_time / pcu_per_cycle if pcu_per_cycle > 0 else None
    wastage = None
    if record.effective_green is not None:
        wastage = (record.green_time - record.effective_green) / record.green_time
    return GreenReport(
        approach_id=record.approach_id,
        pcu_per_cycle=pcu_per_cycle,
        green_to_pcu_ratio=ratio,
        wastage=wastage,
    )
