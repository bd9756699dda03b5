"""Cycling observations: records, CSV ingestion and emission, min-max
normalization, and the even/odd-rank train/test split."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    CsvFormatError,
    DegenerateRangeError,
    ExtrapolationWarning,
    RangeWarning,
    ValidationError,
)

TARGETS = ("rc", "eodv")

CSV_HEADER = "temperature_c,dod_pct,cycle,rc_pct,eodv_v"

# variable identifiers accepted by normalize/denormalize
VARIABLES = ("temperature_c", "dod_pct", "cycle", "target")


@dataclass(frozen=True)
class CyclingRecord:
    """One observation of a cell at a (temperature, depth-of-discharge,
    cycle) point. Either measurement may be absent."""

    temperature_c: float
    dod_pct: float
    cycle: int
    rc_pct: float | None = None
    eodv_v: float | None = None


def target_value(record: CyclingRecord, target: str) -> float | None:
    if target == "rc":
        return record.rc_pct
    if target == "eodv":
        return record.eodv_v
    raise ValidationError(f"unknown target {target!r}, expected one of {TARGETS}")


def _check_record(record: CyclingRecord) -> None:
    # structural invariants; physical plausibility is handled separately
    if not isinstance(record.cycle, int) or isinstance(record.cycle, bool):
        raise ValidationError(f"cycle must be an integer, got {record.cycle!r}")
    if record.cycle < 0:
        raise ValidationError(f"cycle must be >= 0, got {record.cycle}")
    for name in ("temperature_c", "dod_pct", "rc_pct", "eodv_v"):
        value = getattr(record, name)
        if value is not None and not math.isfinite(value):
            raise ValidationError(f"{name} must be finite, got {value!r}")


def _plausibility_problems(records) -> list[str]:
    rc_bad = sum(1 for r in records
                 if r.rc_pct is not None and not 0.0 <= r.rc_pct <= 120.0)
    eodv_bad = sum(1 for r in records if r.eodv_v is not None and r.eodv_v <= 0.0)
    problems = []
    if rc_bad:
        problems.append(f"{rc_bad} record(s) have rc_pct outside [0, 120]")
    if eodv_bad:
        problems.append(f"{eodv_bad} record(s) have eodv_v <= 0")
    return problems


@dataclass(frozen=True)
class CyclingDataset:
    """Records sorted by (temperature_c, dod_pct, cycle), no duplicates."""

    records: tuple[CyclingRecord, ...]
    settings: tuple[tuple[float, float], ...]
    source: str

    @staticmethod
    def build(records, source: str) -> "CyclingDataset":
        records = list(records)
        for r in records:
            _check_record(r)
        records.sort(key=lambda r: (r.temperature_c, r.dod_pct, r.cycle))
        seen = set()
        for r in records:
            key = (r.temperature_c, r.dod_pct, r.cycle)
            if key in seen:
                raise ValidationError(f"duplicate (temperature_c, dod_pct, cycle) {key}")
            seen.add(key)
        settings = tuple(sorted({(r.temperature_c, r.dod_pct) for r in records}))
        return CyclingDataset(tuple(records), settings, source)

    def __len__(self) -> int:
        return len(self.records)


def _format_number(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return repr(value)  # shortest string that round-trips binary64


def write_csv(dataset: CyclingDataset, path) -> None:
    lines = [CSV_HEADER]
    for r in dataset.records:
        lines.append(",".join([
            _format_number(r.temperature_c),
            _format_number(r.dod_pct),
            _format_number(r.cycle),
            _format_number(r.rc_pct),
            _format_number(r.eodv_v),
        ]))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def _parse_float(field: str, name: str, lineno: int) -> float:
    try:
        value = float(field)
    except ValueError:
        raise CsvFormatError(f"line {lineno}: {name} is not a number: {field!r}") from None
    if not math.isfinite(value):
        raise CsvFormatError(f"line {lineno}: {name} must be finite, got {field!r}")
    return value


def _parse_optional(field: str, name: str, lineno: int) -> float | None:
    if field == "":
        return None
    return _parse_float(field, name, lineno)


def read_csv(path) -> CyclingDataset:
    """Parse a dataset CSV, validating structure line by line.

    Values outside physically plausible ranges do not fail ingestion; they
    are reported once as a RangeWarning.
    """
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e}") from e
    lines = text.splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise CsvFormatError(f"line 1: expected header {CSV_HEADER!r}")
    records = []
    seen = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if line.strip() == "":
            continue
        fields = line.split(",")
        if len(fields) != 5:
            raise CsvFormatError(f"line {lineno}: expected 5 fields, got {len(fields)}")
        t = _parse_float(fields[0], "temperature_c", lineno)
        dod = _parse_float(fields[1], "dod_pct", lineno)
        try:
            cycle = int(fields[2])
        except ValueError:
            raise CsvFormatError(
                f"line {lineno}: cycle is not an integer: {fields[2]!r}") from None
        if cycle < 0:
            raise CsvFormatError(f"line {lineno}: cycle must be >= 0, got {cycle}")
        rc = _parse_optional(fields[3], "rc_pct", lineno)
        eodv = _parse_optional(fields[4], "eodv_v", lineno)
        key = (t, dod, cycle)
        if key in seen:
            raise CsvFormatError(
                f"line {lineno}: duplicate (temperature_c, dod_pct, cycle) {key}")
        seen.add(key)
        records.append(CyclingRecord(t, dod, cycle, rc, eodv))
    problems = _plausibility_problems(records)
    if problems:
        warnings.warn(RangeWarning(f"{path}: " + "; ".join(problems)), stacklevel=2)
    return CyclingDataset.build(records, source=str(path))


def split_even_odd(dataset: CyclingDataset) -> tuple[CyclingDataset, CyclingDataset]:
    """Split by cycle rank within each (temperature, DOD) group.

    Ranks 0, 2, 4, ... of the cycle-sorted group go to the first dataset,
    ranks 1, 3, 5, ... to the second. Union is the input, intersection empty.
    """
    if not dataset.records:
        raise ValidationError("cannot split an empty dataset")
    even, odd = [], []
    group_key = None
    rank = 0
    for r in dataset.records:  # already sorted by (t, dod, cycle)
        key = (r.temperature_c, r.dod_pct)
        if key != group_key:
            group_key = key
            rank = 0
        (even if rank % 2 == 0 else odd).append(r)
        rank += 1
    return (
        CyclingDataset.build(even, source=dataset.source),
        CyclingDataset.build(odd, source=dataset.source),
    )


@dataclass(frozen=True)
class NormalizationSpec:
    """Affine min-max maps for the three inputs and the target variable.

    Maps [min, max] onto [output_low, output_high]; values outside the
    fitted range extrapolate linearly rather than clamp.
    """

    temperature_min: float
    temperature_max: float
    dod_min: float
    dod_max: float
    cycle_min: float
    cycle_max: float
    target_min: float
    target_max: float
    output_low: float = 0.1
    output_high: float = 0.9

    def __post_init__(self):
        for name in ("temperature", "dod", "cycle", "target"):
            mn = getattr(self, f"{name}_min")
            mx = getattr(self, f"{name}_max")
            if not (math.isfinite(mn) and math.isfinite(mx)):
                raise ValidationError(f"{name} range must be finite")
            if not mx > mn:
                raise DegenerateRangeError(f"{name} range is degenerate: min {mn!r}, max {mx!r}")
        if not (math.isfinite(self.output_low) and math.isfinite(self.output_high)):
            raise ValidationError("output bounds must be finite")
        # a sigmoid output layer cannot reach 0 or 1, so the scaled range
        # must sit strictly inside (0, 1)
        if not 0.0 < self.output_low < self.output_high < 1.0:
            raise ValidationError(
                f"output bounds must satisfy 0 < low < high < 1, "
                f"got ({self.output_low!r}, {self.output_high!r})")


def _bounds(spec: NormalizationSpec, variable: str) -> tuple[float, float]:
    if variable == "temperature_c":
        return spec.temperature_min, spec.temperature_max
    if variable == "dod_pct":
        return spec.dod_min, spec.dod_max
    if variable == "cycle":
        return spec.cycle_min, spec.cycle_max
    if variable == "target":
        return spec.target_min, spec.target_max
    raise ValidationError(f"unknown variable {variable!r}, expected one of {VARIABLES}")


def normalize(spec: NormalizationSpec, value: float, variable: str) -> float:
    """Map value from [min, max] to [output_low, output_high].

    Out-of-range values extrapolate linearly and emit ExtrapolationWarning
    (static message per variable, so repeated queries warn once).
    """
    mn, mx = _bounds(spec, variable)
    if value < mn or value > mx:
        warnings.warn(
            ExtrapolationWarning(
                f"{variable} outside fitted range [{mn!r}, {mx!r}], extrapolating"),
            stacklevel=2)
    scale = (spec.output_high - spec.output_low) / (mx - mn)
    return spec.output_low + (value - mn) * scale


def denormalize(spec: NormalizationSpec, value: float, variable: str) -> float:
    """Inverse of normalize, to last-place rounding at the scale of the range."""
    mn, mx = _bounds(spec, variable)
    scale = (spec.output_high - spec.output_low) / (mx - mn)
    return mn + (value - spec.output_low) / scale


def fit_normalization(dataset: CyclingDataset, target: str,
                      output_low: float = 0.1,
                      output_high: float = 0.9) -> NormalizationSpec:
    """Compute per-variable min/max over the dataset for the given target."""
    if target not in TARGETS:
        raise ValidationError(f"unknown target {target!r}, expected one of {TARGETS}")
    if not dataset.records:
        raise ValidationError("cannot fit normalization on an empty dataset")
    targets = []
    for i, r in enumerate(dataset.records):
        y = target_value(r, target)
        if y is None:
            raise ValidationError(f"record {i} has no {target} value")
        targets.append(y)
    return NormalizationSpec(
        temperature_min=min(r.temperature_c for r in dataset.records),
        temperature_max=max(r.temperature_c for r in dataset.records),
        dod_min=min(r.dod_pct for r in dataset.records),
        dod_max=max(r.dod_pct for r in dataset.records),
        cycle_min=float(min(r.cycle for r in dataset.records)),
        cycle_max=float(max(r.cycle for r in dataset.records)),
        target_min=min(targets),
        target_max=max(targets),
        output_low=output_low,
        output_high=output_high,
    )
