"""Synthetic cycling data from affine degradation models.

The default coefficients reproduce the estimated retained-capacity and
end-of-discharge-voltage models this package is built around; Gaussian
noise and an optional piecewise-linear early-fade mode are available for
robustness experiments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import NamedTuple

from .dataset import CyclingDataset, CyclingRecord
from .errors import ValidationError
from .kvconfig import as_float
from .rng import Xoshiro256StarStar

# the six (temperature_c, dod_pct) cell test settings
DEFAULT_SETTINGS = ((10.0, 10.0), (10.0, 20.0), (20.0, 20.0),
                    (10.0, 30.0), (20.0, 30.0), (30.0, 30.0))

DEFAULT_RC_FLOOR = 40.0     # percent retained capacity
DEFAULT_EODV_FLOOR = 2.5    # volts


@dataclass(frozen=True)
class DegradationModelParams:
    """Coefficients of the two affine models.

    Stored as the positive magnitudes that are subtracted:
    value = intercept - coeff_t*T - coeff_dod*DOD - coeff_cycle*C.
    """

    rc_intercept: float = 110.29
    rc_coeff_t: float = 0.7551
    rc_coeff_dod: float = 0.2977
    rc_coeff_cycle: float = 0.0014
    eodv_intercept: float = 4.3156
    eodv_coeff_t: float = 0.1297
    eodv_coeff_dod: float = 0.0093
    eodv_coeff_cycle: float = 7.1705e-06

    def __post_init__(self):
        for f in fields(self):
            if not math.isfinite(getattr(self, f.name)):
                raise ValidationError(f"{f.name} must be finite")


DEFAULT_PARAMS = DegradationModelParams()


def eval_rc(params: DegradationModelParams, t: float, dod: float, cycle: float) -> float:
    """Retained capacity in percent; unclamped affine evaluation."""
    return (params.rc_intercept - params.rc_coeff_t * t
            - params.rc_coeff_dod * dod - params.rc_coeff_cycle * cycle)


def eval_eodv(params: DegradationModelParams, t: float, dod: float, cycle: float) -> float:
    """End-of-discharge voltage in volts; unclamped affine evaluation."""
    return (params.eodv_intercept - params.eodv_coeff_t * t
            - params.eodv_coeff_dod * dod - params.eodv_coeff_cycle * cycle)


@dataclass(frozen=True)
class SimulationPlan:
    """What to generate: settings, cycle progression, noise, seed.

    rc_knee_cycle/rc_knee_multiplier enable a piecewise-linear retained
    capacity fade (steeper before the knee); both default off.
    """

    settings: tuple[tuple[float, float], ...] = DEFAULT_SETTINGS
    cycle_start: int = 0
    cycle_end: int = 25000
    cycle_step: int = 1000
    noise_sd_rc: float = 0.0
    noise_sd_eodv: float = 0.0
    seed: int = 0
    rc_knee_cycle: int | None = None
    rc_knee_multiplier: float = 1.0

    def __post_init__(self):
        if not self.settings:
            raise ValidationError("plan needs at least one (temperature, DOD) setting")
        if len(set(self.settings)) != len(self.settings):
            raise ValidationError("duplicate settings in plan")
        for t, dod in self.settings:
            if not (math.isfinite(t) and math.isfinite(dod)):
                raise ValidationError("settings must be finite")
        if self.cycle_step <= 0:
            raise ValidationError(f"cycle_step must be > 0, got {self.cycle_step}")
        if self.cycle_end < self.cycle_start:
            raise ValidationError("cycle_end must be >= cycle_start")
        if self.cycle_start < 0:
            raise ValidationError("cycle_start must be >= 0")
        if self.noise_sd_rc < 0 or self.noise_sd_eodv < 0:
            raise ValidationError("noise standard deviations must be >= 0")
        if self.rc_knee_cycle is not None:
            if self.rc_knee_cycle <= 0:
                raise ValidationError("rc_knee_cycle must be > 0")
            if not math.isfinite(self.rc_knee_multiplier) or self.rc_knee_multiplier < 0:
                raise ValidationError("rc_knee_multiplier must be >= 0 and finite")


def _rc_cycle_coordinate(plan: SimulationPlan, cycle: int) -> float:
    # piecewise-linear fade: pre-knee cycles count rc_knee_multiplier times
    if plan.rc_knee_cycle is None:
        return float(cycle)
    knee = plan.rc_knee_cycle
    return plan.rc_knee_multiplier * float(min(cycle, knee)) + float(max(cycle - knee, 0))


def generate(plan: SimulationPlan,
             params: DegradationModelParams = DEFAULT_PARAMS) -> CyclingDataset:
    """One record per (setting, cycle), deterministic in the plan seed.

    Each setting consumes its own generator substream (numbered by position
    in sorted setting order); every record draws one RC noise value then one
    EODV noise value even when a standard deviation is zero, so the streams
    stay aligned across noise configurations.
    """
    cycles = range(plan.cycle_start, plan.cycle_end + 1, plan.cycle_step)
    records = []
    for stream, (t, dod) in enumerate(sorted(plan.settings)):
        rng = Xoshiro256StarStar(plan.seed, stream=stream)
        for cycle in cycles:
            rc = (eval_rc(params, t, dod, _rc_cycle_coordinate(plan, cycle))
                  + plan.noise_sd_rc * rng.normal())
            eodv = eval_eodv(params, t, dod, cycle) + plan.noise_sd_eodv * rng.normal()
            records.append(CyclingRecord(t, dod, cycle, rc_pct=rc, eodv_v=eodv))
    return CyclingDataset.build(records, source=f"synthetic(seed={plan.seed})")


class CycleLifeResult(NamedTuple):
    cycle: int | None   # None: no failure within the horizon
    criterion: str | None  # "rc" or "eodv"; rc wins ties


def _first_below(initial: float, slope: float, floor: float, max_cycle: int) -> int | None:
    """Smallest integer cycle in [0, max_cycle] where initial - slope*c < floor."""
    if initial < floor:
        return 0
    if slope <= 0.0:
        return None  # value never decreases below its starting point
    if initial - slope * max_cycle >= floor:
        return None  # still at or above the floor at the horizon
    span = (initial - floor) / slope
    # span can round to inf when slope is subnormal; the horizon check above
    # already proved a crossing exists, so fall back to the horizon itself
    candidate = math.ceil(span) if math.isfinite(span) else max_cycle
    c = max(0, min(candidate, max_cycle) - 3)
    # the closed form is exact up to float rounding; settle the boundary
    # with the same evaluations a brute-force scan would use
    while c <= max_cycle and initial - slope * c >= floor:
        c += 1
    if c > max_cycle:
        return None
    while c > 0 and initial - slope * (c - 1) < floor:
        c -= 1
    return c


def cycle_life(params: DegradationModelParams, t: float, dod: float,
               rc_floor: float = DEFAULT_RC_FLOOR,
               eodv_floor: float = DEFAULT_EODV_FLOOR,
               max_cycle: int = 100000) -> CycleLifeResult:
    """First cycle where either model value drops below its floor.

    Closed-form solve of the two affine inequalities, cross-checked against
    exact model evaluations at the boundary. Ties report the retained
    capacity criterion.
    """
    if not (math.isfinite(rc_floor) and math.isfinite(eodv_floor)):
        raise ValidationError("floors must be finite")
    if max_cycle < 0:
        raise ValidationError("max_cycle must be >= 0")
    rc_cross = _first_below(eval_rc(params, t, dod, 0), params.rc_coeff_cycle,
                            rc_floor, max_cycle)
    eodv_cross = _first_below(eval_eodv(params, t, dod, 0), params.eodv_coeff_cycle,
                              eodv_floor, max_cycle)
    if rc_cross is None and eodv_cross is None:
        return CycleLifeResult(None, None)
    if eodv_cross is None or (rc_cross is not None and rc_cross <= eodv_cross):
        return CycleLifeResult(rc_cross, "rc")
    return CycleLifeResult(eodv_cross, "eodv")


_PARAM_KEYS = tuple(f.name for f in fields(DegradationModelParams))


def params_to_kv(params: DegradationModelParams) -> dict[str, str]:
    return {name: repr(getattr(params, name)) for name in _PARAM_KEYS}


def params_from_kv(pairs: dict[str, str],
                   base: DegradationModelParams = DEFAULT_PARAMS) -> DegradationModelParams:
    """Overlay key-value pairs on base params; unknown keys are errors."""
    unknown = set(pairs) - set(_PARAM_KEYS)
    if unknown:
        raise ValidationError(
            f"unknown model parameter key(s): {', '.join(sorted(unknown))}")
    values = {name: getattr(base, name) for name in _PARAM_KEYS}
    for name in pairs:
        values[name] = as_float(pairs, name)
    return DegradationModelParams(**values)
