"""Least-squares fits of the affine degradation form: an intercept plus
temperature, depth-of-discharge, and cycle terms."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dataset import CyclingDataset, target_value
from .errors import (
    DegenerateRangeError,
    ModelFileError,
    RankDeficiencyError,
    ValidationError,
)
from .kvconfig import as_float, as_int, read_kv, require, write_kv

_COLUMNS = ("intercept", "temperature_c", "dod_pct", "cycle")
_RANK_TOL = 1e-10
_RANGE_VARS = ("temperature", "dod", "cycle")


class ResidualStats(NamedTuple):
    rmse: float
    max_abs_residual: float
    n: int


@dataclass(frozen=True)
class LinearModel:
    """Fitted affine model. Coefficients are signed (a falling variable has
    a negative slope). train_ranges, when present, records the fitted data's
    per-variable (min, max) so prediction can flag extrapolation."""

    intercept: float
    coeff_t: float
    coeff_dod: float
    coeff_cycle: float
    target: str
    residual_stats: ResidualStats
    train_ranges: dict[str, tuple[float, float]] | None = None


def fit_ols(dataset: CyclingDataset, target: str) -> LinearModel:
    """Ordinary least squares via Householder QR.

    Columns are scaled to unit norm before factorization; cycle counts in
    the tens of thousands next to a unit intercept column would otherwise
    hurt conditioning. A column whose orthogonalized norm falls below 1e-10
    of its original norm raises RankDeficiencyError naming it.
    """
    rows = []
    ys = []
    for r in dataset.records:
        y = target_value(r, target)
        if y is None:
            raise ValidationError(
                f"record at ({r.temperature_c}, {r.dod_pct}, {r.cycle}) "
                f"has no {target} value")
        rows.append((1.0, r.temperature_c, r.dod_pct, float(r.cycle)))
        ys.append(y)
    n = len(rows)
    if n < 4:
        raise ValidationError(f"need at least 4 records to fit 4 parameters, got {n}")

    design = np.array(rows, dtype=np.float64)
    y = np.array(ys, dtype=np.float64)
    norms = np.sqrt((design * design).sum(axis=0))
    for j, norm in enumerate(norms):
        if norm == 0.0:
            raise RankDeficiencyError(_COLUMNS[j])
    scaled = design / norms
    q, r = np.linalg.qr(scaled)
    diag = np.abs(np.diag(r))
    for j, d in enumerate(diag):
        # scaled columns have unit norm, so this is the original-norm ratio
        if d < _RANK_TOL:
            raise RankDeficiencyError(_COLUMNS[j])
    coeffs = np.linalg.solve(r, q.T @ y) / norms

    residuals = y - design @ coeffs
    stats = ResidualStats(
        rmse=float(np.sqrt(np.mean(residuals * residuals))),
        max_abs_residual=float(np.max(np.abs(residuals))),
        n=n,
    )
    ranges = {
        "temperature": (min(r.temperature_c for r in dataset.records),
                        max(r.temperature_c for r in dataset.records)),
        "dod": (min(r.dod_pct for r in dataset.records),
                max(r.dod_pct for r in dataset.records)),
        "cycle": (float(min(r.cycle for r in dataset.records)),
                  float(max(r.cycle for r in dataset.records))),
    }
    return LinearModel(
        intercept=float(coeffs[0]),
        coeff_t=float(coeffs[1]),
        coeff_dod=float(coeffs[2]),
        coeff_cycle=float(coeffs[3]),
        target=target,
        residual_stats=stats,
        train_ranges=ranges,
    )


def predict_linear(model: LinearModel, t: float, dod: float, cycle: float) -> float:
    return (model.intercept + model.coeff_t * t
            + model.coeff_dod * dod + model.coeff_cycle * cycle)


def effect_ranking(model: LinearModel,
                   ranges: dict[str, tuple[float, float]]) -> list[tuple[str, float]]:
    """Range-scaled effect sizes: |coefficient| times the variable's span.

    Raw slopes of differently scaled variables are not comparable; spans
    make them so. Ties keep the input order (temperature, DOD, cycle).
    """
    coeffs = {
        "temperature_c": model.coeff_t,
        "dod_pct": model.coeff_dod,
        "cycle": model.coeff_cycle,
    }
    range_keys = {"temperature_c": "temperature", "dod_pct": "dod", "cycle": "cycle"}
    effects = []
    for name, coeff in coeffs.items():
        key = range_keys[name]
        if key not in ranges:
            raise ValidationError(f"missing range for {key!r}")
        mn, mx = ranges[key]
        if not mx > mn:
            raise DegenerateRangeError(f"{key} range is degenerate: ({mn!r}, {mx!r})")
        effects.append((name, abs(coeff) * (mx - mn)))
    effects.sort(key=lambda pair: -pair[1])  # stable, preserves input order on ties
    return effects


def format_equation(model: LinearModel) -> str:
    terms = [f"{model.intercept:.6g}"]
    for coeff, name in ((model.coeff_t, "temperature_c"),
                        (model.coeff_dod, "dod_pct"),
                        (model.coeff_cycle, "cycle")):
        sign = "-" if coeff < 0 else "+"
        terms.append(f"{sign} {abs(coeff):.6g}*{name}")
    return f"{model.target} = " + " ".join(terms)


def save_linear_model(model: LinearModel, path) -> None:
    pairs = {
        "schema_version": "1",
        "kind": "linear",
        "target": model.target,
        "intercept": repr(model.intercept),
        "coeff_t": repr(model.coeff_t),
        "coeff_dod": repr(model.coeff_dod),
        "coeff_cycle": repr(model.coeff_cycle),
        "rmse": repr(model.residual_stats.rmse),
        "max_abs_residual": repr(model.residual_stats.max_abs_residual),
        "n": str(model.residual_stats.n),
    }
    if model.train_ranges is not None:
        for var in _RANGE_VARS:
            mn, mx = model.train_ranges[var]
            pairs[f"train_{var}_min"] = repr(mn)
            pairs[f"train_{var}_max"] = repr(mx)
    write_kv(path, pairs)


def load_linear_model(path) -> LinearModel:
    pairs = read_kv(path)
    version = require(pairs, "schema_version")
    if version != "1":
        raise ModelFileError(f"unsupported schema_version {version!r}")
    kind = require(pairs, "kind")
    if kind != "linear":
        raise ModelFileError(f"expected kind=linear, got {kind!r}")
    target = require(pairs, "target")
    if target not in ("rc", "eodv"):
        raise ModelFileError(f"unknown target {target!r}")
    values = {key: as_float(pairs, key)
              for key in ("intercept", "coeff_t", "coeff_dod", "coeff_cycle",
                          "rmse", "max_abs_residual")}
    for key, v in values.items():
        if not math.isfinite(v):
            raise ModelFileError(f"non-finite value for {key!r}")
    n = as_int(pairs, "n")

    range_keys = [f"train_{var}_{end}" for var in _RANGE_VARS for end in ("min", "max")]
    present = [k for k in range_keys if k in pairs]
    if present and len(present) != len(range_keys):
        missing = sorted(set(range_keys) - set(present))
        raise ModelFileError(f"incomplete train range block, missing: {', '.join(missing)}")
    ranges = None
    if present:
        ranges = {var: (as_float(pairs, f"train_{var}_min"),
                        as_float(pairs, f"train_{var}_max"))
                  for var in _RANGE_VARS}
    return LinearModel(
        intercept=values["intercept"],
        coeff_t=values["coeff_t"],
        coeff_dod=values["coeff_dod"],
        coeff_cycle=values["coeff_cycle"],
        target=target,
        residual_stats=ResidualStats(values["rmse"], values["max_abs_residual"], n),
        train_ranges=ranges,
    )
