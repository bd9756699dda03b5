"""Method-comparison statistics for observed vs predicted series:
average absolute percentage error, Pearson correlation, coefficient of
variation, identity-line export, and Bland-Altman agreement analysis."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import StatisticUndefinedError, ValidationError

BA_ABSOLUTE = "absolute"
BA_PERCENT = "percent"  # differences as percent of the pairwise mean
BA_MODES = (BA_ABSOLUTE, BA_PERCENT)

LOA_MULTIPLIER = 1.96  # conventional 95% limits of agreement


@dataclass(frozen=True)
class PairedSeries:
    """Observed/predicted pairs in identical units."""

    pairs: tuple[tuple[float, float], ...]
    label: str = ""
    units: str = ""

    def __post_init__(self):
        for i, (o, p) in enumerate(self.pairs):
            if not (math.isfinite(o) and math.isfinite(p)):
                raise ValidationError(f"pair {i} is not finite: ({o!r}, {p!r})")

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class BlandAltmanStats:
    mode: str
    points: tuple[tuple[float, float], ...]  # (pairwise mean, difference)
    bias: float
    sd_diff: float
    loa_low: float
    loa_high: float
    min_diff: float
    max_diff: float


@dataclass(frozen=True)
class ComparisonReport:
    """All statistics over one series; fields a sub-statistic could not
    produce are None with the reason in `unavailable`."""

    n: int
    aape_pct: float | None
    pearson_r: float | None
    r_squared: float | None
    cv: float | None
    bland_altman: BlandAltmanStats | None
    unavailable: dict[str, str]
    label: str = ""
    units: str = ""


def aape(series: PairedSeries) -> float:
    """Mean of |observed - predicted| / |observed| * 100."""
    if not series.pairs:
        raise StatisticUndefinedError("empty series")
    for i, (o, _) in enumerate(series.pairs):
        if o == 0.0:
            raise StatisticUndefinedError(
                f"pair {i}: observed value is 0, percentage error undefined")
    total = math.fsum(abs(o - p) / abs(o) for o, p in series.pairs)
    return total / len(series.pairs) * 100.0


def pearson(series: PairedSeries) -> tuple[float, float]:
    """Sample Pearson r and r squared. r is clamped to [-1, 1] to absorb
    last-bit rounding on perfectly collinear data."""
    n = len(series.pairs)
    if n < 2:
        raise StatisticUndefinedError("correlation needs at least 2 pairs")
    mean_o = math.fsum(o for o, _ in series.pairs) / n
    mean_p = math.fsum(p for _, p in series.pairs) / n
    cov = math.fsum((o - mean_o) * (p - mean_p) for o, p in series.pairs)
    var_o = math.fsum((o - mean_o) ** 2 for o, _ in series.pairs)
    var_p = math.fsum((p - mean_p) ** 2 for _, p in series.pairs)
    if var_o == 0.0:
        raise StatisticUndefinedError("observed series is constant, correlation undefined")
    if var_p == 0.0:
        raise StatisticUndefinedError("predicted series is constant, correlation undefined")
    denom_sq = var_o * var_p
    if 0.0 < denom_sq < math.inf:
        r = cov / math.sqrt(denom_sq)
    else:
        # the product under- or overflowed even though both factors are
        # normal floats; dividing by each root separately stays finite
        r = cov / math.sqrt(var_o) / math.sqrt(var_p)
    r = max(-1.0, min(1.0, r))
    return r, r * r


def coefficient_of_variation(series: PairedSeries) -> float:
    """RMSE of (predicted - observed) divided by the mean observed value."""
    if not series.pairs:
        raise StatisticUndefinedError("empty series")
    n = len(series.pairs)
    mean_o = math.fsum(o for o, _ in series.pairs) / n
    if mean_o == 0.0:
        raise StatisticUndefinedError("observed mean is 0, CV undefined")
    sq = math.fsum((p - o) ** 2 for o, p in series.pairs)
    return math.sqrt(sq / n) / mean_o


def bland_altman(series: PairedSeries, mode: str = BA_ABSOLUTE) -> BlandAltmanStats:
    """Pairwise (mean, difference) points with bias and limits of agreement.

    difference = predicted - observed (positive bias means over-prediction),
    or 100 * that / pairwise mean in percent mode. sd uses n-1; limits are
    bias +/- 1.96 sd.
    """
    if mode not in BA_MODES:
        raise ValidationError(f"unknown mode {mode!r}, expected one of {BA_MODES}")
    n = len(series.pairs)
    if n < 2:
        raise StatisticUndefinedError("Bland-Altman needs at least 2 pairs")
    points = []
    for i, (o, p) in enumerate(series.pairs):
        mean = (o + p) / 2.0
        if mode == BA_PERCENT:
            if mean == 0.0:
                raise StatisticUndefinedError(
                    f"pair {i}: pairwise mean is 0, percent difference undefined")
            diff = 100.0 * (p - o) / mean
        else:
            diff = p - o
        points.append((mean, diff))
    diffs = [d for _, d in points]
    bias = math.fsum(diffs) / n
    # the true mean lies in [min, max]; the two roundings above can leave
    # the computed one a last place outside, so pin it back like the
    # correlation clamp to [-1, 1]
    bias = min(max(bias, min(diffs)), max(diffs))
    var = math.fsum((d - bias) ** 2 for d in diffs)
    sd = math.sqrt(var / (n - 1))
    return BlandAltmanStats(
        mode=mode,
        points=tuple(points),
        bias=bias,
        sd_diff=sd,
        loa_low=bias - LOA_MULTIPLIER * sd,
        loa_high=bias + LOA_MULTIPLIER * sd,
        min_diff=min(diffs),
        max_diff=max(diffs),
    )


def comparison_report(series: PairedSeries, ba_mode: str = BA_ABSOLUTE) -> ComparisonReport:
    """Assemble every statistic; sub-statistic failures become None fields
    with the reason recorded instead of failing the whole report."""
    unavailable: dict[str, str] = {}
    aape_pct = pearson_r = r_squared = cv = None
    ba = None
    try:
        aape_pct = aape(series)
    except StatisticUndefinedError as e:
        unavailable["aape_pct"] = str(e)
    try:
        pearson_r, r_squared = pearson(series)
    except StatisticUndefinedError as e:
        unavailable["pearson_r"] = str(e)
        unavailable["r_squared"] = str(e)
    try:
        cv = coefficient_of_variation(series)
    except StatisticUndefinedError as e:
        unavailable["cv"] = str(e)
    try:
        ba = bland_altman(series, ba_mode)
    except StatisticUndefinedError as e:
        unavailable["bland_altman"] = str(e)
    return ComparisonReport(
        n=len(series.pairs),
        aape_pct=aape_pct,
        pearson_r=pearson_r,
        r_squared=r_squared,
        cv=cv,
        bland_altman=ba,
        unavailable=unavailable,
        label=series.label,
        units=series.units,
    )


def one_to_one_export(series: PairedSeries) -> list[tuple[float, float, str]]:
    """Rows for an identity-line comparison plot: every (observed,
    predicted) point plus the two identity-line endpoints spanning the
    data range. Empty series exports no rows."""
    rows = [(o, p, "point") for o, p in series.pairs]
    if series.pairs:
        values = [v for pair in series.pairs for v in pair]
        lo, hi = min(values), max(values)
        rows.append((lo, lo, "identity"))
        rows.append((hi, hi, "identity"))
    return rows


def report_to_dict(report: ComparisonReport) -> dict:
    """JSON-ready view of a ComparisonReport (documented in docs/formats.md)."""
    ba = None
    if report.bland_altman is not None:
        s = report.bland_altman
        ba = {
            "mode": s.mode,
            "bias": s.bias,
            "sd_diff": s.sd_diff,
            "loa_low": s.loa_low,
            "loa_high": s.loa_high,
            "min_diff": s.min_diff,
            "max_diff": s.max_diff,
        }
    return {
        "n": report.n,
        "label": report.label,
        "units": report.units,
        "aape_pct": report.aape_pct,
        "pearson_r": report.pearson_r,
        "r_squared": report.r_squared,
        "cv": report.cv,
        "bland_altman": ba,
        "unavailable": report.unavailable,
    }
