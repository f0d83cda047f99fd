"""CSV ingestion, validation and serialization for cycle and approach records.

Row numbers in errors are file line numbers (header = line 1).  Missing
count columns read as zero; a negative count is a schema violation, not an
invariant violation, so it is caught before a record is built.
"""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Mapping, Sequence, TextIO

from .errors import AnalyzerError, InputError, SchemaViolation, UnknownApproach
from .model import (
    ApproachConfig,
    ClassifiedCount,
    Directionality,
    SignalCycleRecord,
    VehicleClass,
)

CYCLE_REQUIRED = ("approach_id", "cycle_length_s", "red_s", "green_s")
CYCLE_COUNT_COLUMNS = tuple(cls.value for cls in VehicleClass)
CYCLE_OPTIONAL = ("effective_green_s", "exited_pcu", "timestamp")
CYCLE_COLUMNS = CYCLE_REQUIRED + CYCLE_COUNT_COLUMNS + CYCLE_OPTIONAL

APPROACH_COLUMNS = (
    "approach_id", "intersection_id", "lanes", "directionality",
    "width_m", "free_left", "is_major",
)

_CLASS_BY_COLUMN = {cls.value: cls for cls in VehicleClass}


def _header(row: Sequence[str], allowed: Sequence[str], required: Sequence[str]) -> list[str]:
    names = [cell.strip() for cell in row]
    unknown = [n for n in names if n not in allowed]
    if unknown:
        raise SchemaViolation(f"unknown column(s): {', '.join(unknown)}", row=1)
    seen: set[str] = set()
    for n in names:
        if n in seen:
            raise SchemaViolation(f"duplicate column {n!r}", row=1)
        seen.add(n)
    missing = [n for n in required if n not in seen]
    if missing:
        raise SchemaViolation(f"missing required column(s): {', '.join(missing)}", row=1)
    return names


def _float_cell(value: str, column: str, row: int) -> float:
    try:
        number = float(value)
    except ValueError:
        raise SchemaViolation(f"column {column!r}: not a number: {value!r}", row=row) from None
    if not math.isfinite(number):
        raise SchemaViolation(f"column {column!r}: non-finite value {value!r}", row=row)
    return number


def _int_cell(value: str, column: str, row: int) -> int:
    try:
        n = int(value)
    except ValueError:
        raise SchemaViolation(f"column {column!r}: not an integer: {value!r}", row=row) from None
    if n < 0:
        raise SchemaViolation(f"column {column!r}: negative count {n}", row=row)
    return n


def scan_cycles(
    source: TextIO | Iterable[str],
    configs: Mapping[str, ApproachConfig] | None = None,
) -> tuple[list[SignalCycleRecord], list[InputError]]:
    """Parse a cycle CSV stream, collecting every row-level problem.

    Returns the records that parsed cleanly and the full list of errors.
    With ``configs`` given, approach ids must resolve; without, that check
    is skipped.
    """
    reader = csv.reader(source)
    records: list[SignalCycleRecord] = []
    errors: list[InputError] = []

    try:
        first = next(reader)
    except StopIteration:
        return [], []
    try:
        names = _header(first, CYCLE_COLUMNS, CYCLE_REQUIRED)
    except SchemaViolation as err:
        return [], [err]

    for line, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            records.append(_parse_cycle_row(names, row, line, configs))
        except InputError as err:
            if err.row is None:
                err.row = line
            errors.append(err)
    return records, errors


def _parse_cycle_row(
    names: Sequence[str],
    row: Sequence[str],
    line: int,
    configs: Mapping[str, ApproachConfig] | None,
) -> SignalCycleRecord:
    if len(row) != len(names):
        raise SchemaViolation(
            f"expected {len(names)} fields, got {len(row)}", row=line)
    cells = {name: cell.strip() for name, cell in zip(names, row)}

    approach_id = cells.get("approach_id", "")
    if not approach_id:
        raise SchemaViolation("empty approach_id", row=line)
    if configs is not None and approach_id not in configs:
        raise UnknownApproach(f"approach {approach_id!r} has no configuration", row=line)

    cycle = _float_cell(cells["cycle_length_s"], "cycle_length_s", line)
    red = _float_cell(cells["red_s"], "red_s", line)
    green = _float_cell(cells["green_s"], "green_s", line)

    counts: dict[VehicleClass, int] = {}
    for column, cls in _CLASS_BY_COLUMN.items():
        raw = cells.get(column, "")
        counts[cls] = _int_cell(raw, column, line) if raw else 0

    def optional_float(column: str) -> float | None:
        raw = cells.get(column, "")
        return _float_cell(raw, column, line) if raw else None

    effective_green = optional_float("effective_green_s")
    exited_pcu = optional_float("exited_pcu")
    timestamp = optional_float("timestamp")

    try:
        classified = ClassifiedCount(approach_id, counts, timestamp)
        return SignalCycleRecord(
            approach_id=approach_id,
            cycle_length=cycle,
            red_time=red,
            green_time=green,
            counts=classified,
            effective_green=effective_green,
            exited_pcu=exited_pcu,
        )
    except InputError as err:
        err.row = line
        raise


def ingest_cycles(
    source: TextIO | Iterable[str],
    configs: Mapping[str, ApproachConfig],
) -> list[SignalCycleRecord]:
    """Parse and validate a cycle CSV stream, failing on the first bad row."""
    records, errors = scan_cycles(source, configs)
    if errors:
        raise errors[0]
    return records


def ingest_approaches(source: TextIO | Iterable[str]) -> dict[str, ApproachConfig]:
    reader = csv.reader(source)
    try:
        first = next(reader)
    except StopIteration:
        raise SchemaViolation("approach file is empty", row=1) from None
    names = _header(first, APPROACH_COLUMNS, APPROACH_COLUMNS)

    configs: dict[str, ApproachConfig] = {}
    for line, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(names):
            raise SchemaViolation(f"expected {len(names)} fields, got {len(row)}", row=line)
        cells = {name: cell.strip() for name, cell in zip(names, row)}
        approach_id = cells["approach_id"]
        if not approach_id:
            raise SchemaViolation("empty approach_id", row=line)
        if approach_id in configs:
            raise SchemaViolation(f"duplicate approach {approach_id!r}", row=line)
        try:
            directionality = Directionality(cells["directionality"])
        except ValueError:
            raise SchemaViolation(
                f"directionality must be 'oneway' or 'twoway', got {cells['directionality']!r}",
                row=line) from None
        try:
            lanes = int(cells["lanes"])
        except ValueError:
            raise SchemaViolation(f"lanes: not an integer: {cells['lanes']!r}", row=line) from None
        width = _float_cell(cells["width_m"], "width_m", line)
        flags = {}
        for column in ("free_left", "is_major"):
            if cells[column] not in ("0", "1"):
                raise SchemaViolation(f"column {column!r} must be 0 or 1", row=line)
            flags[column] = cells[column] == "1"
        try:
            configs[approach_id] = ApproachConfig(
                approach_id=approach_id,
                intersection_id=cells["intersection_id"],
                lane_count=lanes,
                directionality=directionality,
                width=width,
                free_left=flags["free_left"],
                is_major=flags["is_major"],
            )
        except AnalyzerError as err:
            err.row = line
            raise
    return configs


def _format_number(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def cycles_to_csv(records: Iterable[SignalCycleRecord]) -> str:
    """Serialize records to the cycle CSV schema; re-ingesting yields equal records."""
    records = list(records)
    with_optional = {
        "effective_green_s": any(r.effective_green is not None for r in records),
        "exited_pcu": any(r.exited_pcu is not None for r in records),
        "timestamp": any(r.timestamp is not None for r in records),
    }
    columns = list(CYCLE_REQUIRED + CYCLE_COUNT_COLUMNS)
    columns += [name for name in CYCLE_OPTIONAL if with_optional[name]]

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for r in records:
        cells: list[str] = [
            r.approach_id,
            _format_number(r.cycle_length),
            _format_number(r.red_time),
            _format_number(r.green_time),
        ]
        cells += [str(r.counts.counts[cls]) for cls in VehicleClass]
        optional_values = {
            "effective_green_s": r.effective_green,
            "exited_pcu": r.exited_pcu,
            "timestamp": r.timestamp,
        }
        for name in CYCLE_OPTIONAL:
            if with_optional[name]:
                value = optional_values[name]
                cells.append("" if value is None else _format_number(value))
        writer.writerow(cells)
    return buffer.getvalue()
