"""End-to-end analysis: records + approach geometry + config -> reports.

Per-approach figures aggregate over however many cycles were recorded for
that approach (single-row aggregate datasets reduce to the plain per-cycle
formulas).  Orchestration is deterministic: approaches and intersections
are processed in sorted id order.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Mapping, Sequence

from .config import COUNTS_VEHICLES, AnalysisConfig
from .delay import DelayInputs, DelayPolicy, control_delay, intersection_delay
from .emissions import (
    CityEstimate,
    EmissionReport,
    co2_from_fuel,
    idle_fuel,
    scale_emissions,
)
from .errors import EmptyTraffic, NoData, NoMajorApproaches, UnknownApproach
from .flow import (
    FlowReport,
    GreenReport,
    green_splits,
    hourly_volume,
    saturation_flow_discharge,
    saturation_flow_width,
    vc_ratio,
)
from .los import LosResult
from .model import ApproachConfig, SignalCycleRecord, VehicleClass
from .pcu import composition_shares, to_pcu
from .report import round_half_up

VC_STANDARD = "vc_ratio"


@dataclass(frozen=True)
class ApproachReport:
    """Computed bundle for one approach."""

    approach_id: str
    intersection_id: str
    lane_count: int
    directionality: str
    width: float
    record_count: int
    mean_cycle_length: float
    mean_green: float
    mean_effective_green: float | None
    mean_exited_pcu: float | None
    composition: Mapping[VehicleClass, float]
    flow: FlowReport
    green: GreenReport
    platoon_ratio: float
    delay_s: float
    delay_clamped: bool
    los: Mapping[str, LosResult]


@dataclass(frozen=True)
class IntersectionReport:
    intersection_id: str
    approach_ids: tuple[str, ...]
    major_approach_ids: tuple[str, ...]
    mean_delay_all: float
    mean_delay_major: float | None
    los_all: Mapping[str, LosResult]
    los_major: Mapping[str, LosResult] | None
    emissions: EmissionReport
    emission_delay_s: float
    notes: tuple[str, ...]


@dataclass(frozen=True)
class AnalysisResult:
    approaches: tuple[ApproachReport, ...]
    intersections: tuple[IntersectionReport, ...]
    study_total_co2_kg_per_hour: float
    city: CityEstimate


def _mean_optional(values: Sequence[float | None]) -> float | None:
    present = [v for v in values if v is not None]
    return statistics.fmean(present) if present else None


def _approach_pcu_per_cycle(
    records: Sequence[SignalCycleRecord],
    intersection_shares: Mapping[VehicleClass, float] | None,
    config: AnalysisConfig,
) -> float:
    if config.counts_unit == COUNTS_VEHICLES:
        shares = intersection_shares or {}
        return statistics.fmean(
            to_pcu(r.counts, shares, config.pcu_factors) for r in records)
    return statistics.fmean(r.counts.total() for r in records)


def _hourly_class_counts(
    records: Sequence[SignalCycleRecord],
) -> dict[VehicleClass, float]:
    total_cycle_time = sum(r.cycle_length for r in records)
    counts = {cls: 0 for cls in VehicleClass}
    for record in records:
        for cls, n in record.counts.counts.items():
            counts[cls] += n
    return {cls: counts[cls] * 3600.0 / total_cycle_time for cls in VehicleClass}


def analyze_records(
    records: Sequence[SignalCycleRecord],
    approaches: Mapping[str, ApproachConfig],
    config: AnalysisConfig,
    emission_policy: DelayPolicy = DelayPolicy.ALL_APPROACHES,
) -> AnalysisResult:
    """Run the full pipeline over validated records."""
    if not records:
        raise NoData("no cycle records to analyze")

    by_approach: dict[str, list[SignalCycleRecord]] = {}
    for record in records:
        if record.approach_id not in approaches:
            raise UnknownApproach(
                f"approach {record.approach_id!r} has no configuration")
        by_approach.setdefault(record.approach_id, []).append(record)

    by_intersection: dict[str, list[str]] = {}
    for approach_id in sorted(by_approach):
        intersection_id = approaches[approach_id].intersection_id
        by_intersection.setdefault(intersection_id, []).append(approach_id)

    approach_reports: list[ApproachReport] = []
    intersection_reports: list[IntersectionReport] = []

    for intersection_id in sorted(by_intersection):
        approach_ids = by_intersection[intersection_id]
        grouped = {a: by_approach[a] for a in approach_ids}

        intersection_shares: Mapping[VehicleClass, float] | None = None
        if config.counts_unit == COUNTS_VEHICLES:
            all_counts = [r.counts for a in approach_ids for r in grouped[a]]
            intersection_shares = composition_shares(all_counts)

        shares_by_approach = green_splits(grouped)

        local_reports: list[ApproachReport] = []
        for approach_id in approach_ids:
            geometry = approaches[approach_id]
            recs = grouped[approach_id]
            mean_cycle = statistics.fmean(r.cycle_length for r in recs)
            mean_green = statistics.fmean(r.green_time for r in recs)
            mean_ge = _mean_optional([r.effective_green for r in recs])
            mean_n = _mean_optional([r.exited_pcu for r in recs])

            try:
                composition = composition_shares([r.counts for r in recs])
            except EmptyTraffic:
                composition = {cls: 0.0 for cls in VehicleClass}

            pcu_per_cycle = _approach_pcu_per_cycle(recs, intersection_shares, config)
            volume = hourly_volume(pcu_per_cycle, mean_cycle)
            capacity = config.capacity_table.capacity_for(geometry)
            x = vc_ratio(volume, geometry, config.capacity_table)

            sf_width = saturation_flow_width(geometry.width)
            sf_discharge = None
            sf_difference = None
            if mean_ge is not None and mean_n is not None and mean_ge > 0:
                sf_discharge = saturation_flow_discharge(mean_n, mean_ge)
                sf_difference = sf_discharge - sf_width

            ratio = mean_green / pcu_per_cycle if pcu_per_cycle > 0 else None
            wastage = None
            if mean_ge is not None and mean_green > 0:
                wastage = (mean_green - mean_ge) / mean_green

            r_p = config.platoon_ratio_for(approach_id)
            estimate = control_delay(
                DelayInputs(mean_cycle, mean_green, x, platoon_ratio=r_p))

            # Grade at report precision so the emitted 2-decimal V/C and its
            # grade can never disagree.
            los: dict[str, LosResult] = {}
            for name, table in config.los_tables.items():
                value = round_half_up(x, 2) if name == VC_STANDARD else estimate.seconds
                los[name] = table.classify(value)

            local_reports.append(ApproachReport(
                approach_id=approach_id,
                intersection_id=intersection_id,
                lane_count=geometry.lane_count,
                directionality=geometry.directionality.value,
                width=geometry.width,
                record_count=len(recs),
                mean_cycle_length=mean_cycle,
                mean_green=mean_green,
                mean_effective_green=mean_ge,
                mean_exited_pcu=mean_n,
                composition=composition,
                flow=FlowReport(
                    approach_id=approach_id,
                    hourly_volume=volume,
                    capacity=capacity,
                    vc_ratio=x,
                    sf_width=sf_width,
                    sf_discharge=sf_discharge,
                    sf_difference=sf_difference,
                ),
                green=GreenReport(
                    approach_id=approach_id,
                    pcu_per_cycle=pcu_per_cycle,
                    green_share=shares_by_approach[approach_id],
                    green_to_pcu_ratio=ratio,
                    wastage=wastage,
                ),
                platoon_ratio=r_p,
                delay_s=estimate.seconds,
                delay_clamped=estimate.clamped,
                los=los,
            ))

        approach_reports.extend(local_reports)
        intersection_reports.append(_intersection_report(
            intersection_id, local_reports, grouped, approaches, config,
            emission_policy))

    totals = [r.emissions.total_co2_per_hour for r in intersection_reports]
    city = scale_emissions(
        totals,
        config.city.intersection_count,
        config.city.active_hours_per_day,
        config.city.co2_kg_per_hour,
    )
    return AnalysisResult(
        approaches=tuple(approach_reports),
        intersections=tuple(intersection_reports),
        study_total_co2_kg_per_hour=sum(totals),
        city=city,
    )


def _intersection_report(
    intersection_id: str,
    local_reports: Sequence[ApproachReport],
    grouped: Mapping[str, Sequence[SignalCycleRecord]],
    approaches: Mapping[str, ApproachConfig],
    config: AnalysisConfig,
    emission_policy: DelayPolicy,
) -> IntersectionReport:
    delays = {r.approach_id: r.delay_s for r in local_reports}
    major_ids = tuple(
        r.approach_id for r in local_reports if approaches[r.approach_id].is_major)
    mean_all = intersection_delay(delays, DelayPolicy.ALL_APPROACHES, approaches)
    try:
        mean_major = intersection_delay(delays, DelayPolicy.MAJOR_ONLY, approaches)
    except NoMajorApproaches:
        mean_major = None

    delay_tables = {
        name: table for name, table in config.los_tables.items()
        if name != VC_STANDARD
    }
    los_all = {name: table.classify(mean_all) for name, table in delay_tables.items()}
    los_major = None
    if mean_major is not None:
        los_major = {name: table.classify(mean_major) for name, table in delay_tables.items()}

    notes = list(_intersection_notes(local_reports, mean_all, mean_major))

    if emission_policy is DelayPolicy.MAJOR_ONLY and mean_major is None:
        raise NoMajorApproaches(
            f"intersection {intersection_id!r} has no major approaches for "
            f"the requested emission delay policy")
    emission_delay = mean_major if emission_policy is DelayPolicy.MAJOR_ONLY else mean_all

    hourly_counts = {cls: 0.0 for cls in VehicleClass}
    for approach_id in sorted(grouped):
        per_approach = _hourly_class_counts(grouped[approach_id])
        for cls in VehicleClass:
            hourly_counts[cls] += per_approach[cls]

    fuel = idle_fuel(hourly_counts, emission_delay, config.idle_rates)
    emissions = co2_from_fuel(fuel, config.emission_factors)

    return IntersectionReport(
        intersection_id=intersection_id,
        approach_ids=tuple(r.approach_id for r in local_reports),
        major_approach_ids=major_ids,
        mean_delay_all=mean_all,
        mean_delay_major=mean_major,
        los_all=los_all,
        los_major=los_major,
        emissions=emissions,
        emission_delay_s=emission_delay,
        notes=tuple(notes),
    )


def _intersection_notes(
    local_reports: Sequence[ApproachReport],
    mean_all: float,
    mean_major: float | None,
) -> list[str]:
    notes: list[str] = []
    vc_grades = {
        r.approach_id: r.los[VC_STANDARD].grade
        for r in local_reports if VC_STANDARD in r.los
    }
    if vc_grades:
        listing = ", ".join(f"{a}={g}" for a, g in sorted(vc_grades.items()))
        notes.append(
            f"per-approach V/C grades: {listing}; no intersection-level V/C "
            f"grade is computed (no aggregation rule is defined)")
        if len(set(vc_grades.values())) > 1:
            grades = sorted(set(vc_grades.values()))
            notes.append(
                f"V/C grades differ across approaches ({grades[0]} to {grades[-1]}); "
                f"any single intersection-level V/C grade would be a judgement call")
    if mean_major is not None and abs(mean_major - mean_all) > 0.005:
        notes.append(
            f"mean delay depends on the aggregation policy: "
            f"all-approach {mean_all:.2f} s vs major-only {mean_major:.2f} s")
    return notes
