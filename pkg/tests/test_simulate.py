import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leocell.errors import ValidationError
from leocell.rng import Xoshiro256StarStar
from leocell.simulate import (
    DEFAULT_PARAMS,
    DEFAULT_SETTINGS,
    CycleLifeResult,
    DegradationModelParams,
    SimulationPlan,
    cycle_life,
    eval_eodv,
    eval_rc,
    generate,
    params_from_kv,
    params_to_kv,
)


# ------------------------------------------------------- model evaluation

def test_eval_rc_worked_values():
    p = DEFAULT_PARAMS
    assert eval_rc(p, 0.0, 0.0, 0.0) == 110.29
    # 110.29 - 7.551 - 2.977 = 99.762
    assert eval_rc(p, 10.0, 10.0, 0.0) == pytest.approx(99.762, abs=1e-12)
    # fade over 25000 cycles is exactly 35.0 percentage points
    assert eval_rc(p, 10.0, 10.0, 25000.0) == pytest.approx(64.762, abs=1e-12)


def test_eval_eodv_worked_values():
    p = DEFAULT_PARAMS
    assert eval_eodv(p, 0.0, 0.0, 0.0) == 4.3156
    assert eval_eodv(p, 10.0, 10.0, 0.0) == pytest.approx(2.9256, abs=1e-12)
    assert eval_eodv(p, 10.0, 10.0, 25000.0) == pytest.approx(2.7463375, abs=1e-12)


def test_eval_is_affine_in_each_variable():
    p = DEFAULT_PARAMS
    base = eval_rc(p, 15.0, 25.0, 4000.0)
    assert eval_rc(p, 16.0, 25.0, 4000.0) - base == pytest.approx(-0.7551, rel=1e-9)
    assert eval_rc(p, 15.0, 26.0, 4000.0) - base == pytest.approx(-0.2977, rel=1e-9)
    assert eval_rc(p, 15.0, 25.0, 4001.0) - base == pytest.approx(-0.0014, rel=1e-6)


def test_params_validation():
    with pytest.raises(ValidationError, match="finite"):
        DegradationModelParams(rc_intercept=float("inf"))


# --------------------------------------------------------------- generate

def test_default_plan_produces_canonical_grid():
    ds = generate(SimulationPlan())
    assert len(ds) == 156  # 6 settings x 26 cycle points
    assert ds.settings == tuple(sorted(DEFAULT_SETTINGS))
    cycles = sorted({r.cycle for r in ds.records})
    assert cycles == list(range(0, 25001, 1000))


def test_noise_free_generation_equals_model_exactly():
    ds = generate(SimulationPlan())
    for r in ds.records:
        assert r.rc_pct == eval_rc(DEFAULT_PARAMS, r.temperature_c, r.dod_pct, r.cycle)
        assert r.eodv_v == eval_eodv(DEFAULT_PARAMS, r.temperature_c, r.dod_pct, r.cycle)


def test_generation_is_reproducible():
    a = generate(SimulationPlan(noise_sd_rc=0.5, noise_sd_eodv=0.01, seed=9))
    b = generate(SimulationPlan(noise_sd_rc=0.5, noise_sd_eodv=0.01, seed=9))
    assert a.records == b.records


def test_seed_changes_noise():
    a = generate(SimulationPlan(noise_sd_rc=0.5, seed=1))
    b = generate(SimulationPlan(noise_sd_rc=0.5, seed=2))
    assert a.records != b.records


def test_noise_draw_order_contract():
    # setting k (in sorted order) uses substream k; each record draws one
    # RC normal then one EODV normal, even at zero standard deviation
    plan = SimulationPlan(settings=((20.0, 30.0), (10.0, 10.0)),
                          cycle_start=0, cycle_end=2000, cycle_step=1000,
                          noise_sd_rc=0.5, noise_sd_eodv=0.01, seed=77)
    ds = generate(plan)
    expected = {}
    for stream, (t, dod) in enumerate(sorted(plan.settings)):
        rng = Xoshiro256StarStar(77, stream=stream)
        for cycle in (0, 1000, 2000):
            rc = eval_rc(DEFAULT_PARAMS, t, dod, cycle) + 0.5 * rng.normal()
            eodv = eval_eodv(DEFAULT_PARAMS, t, dod, cycle) + 0.01 * rng.normal()
            expected[(t, dod, cycle)] = (rc, eodv)
    for r in ds.records:
        rc, eodv = expected[(r.temperature_c, r.dod_pct, r.cycle)]
        assert r.rc_pct == rc
        assert r.eodv_v == eodv


def test_streams_alignment_across_noise_configs():
    # turning one noise channel off must not shift the other channel's draws
    both = generate(SimulationPlan(noise_sd_rc=0.5, noise_sd_eodv=0.01, seed=3))
    rc_only = generate(SimulationPlan(noise_sd_rc=0.5, noise_sd_eodv=0.0, seed=3))
    for a, b in zip(both.records, rc_only.records):
        assert a.rc_pct == b.rc_pct


def test_noise_statistics():
    import statistics
    plan = SimulationPlan(settings=((10.0, 10.0),), cycle_start=0,
                          cycle_end=200000, cycle_step=10, noise_sd_rc=0.5, seed=5)
    ds = generate(plan)
    residuals = [r.rc_pct - eval_rc(DEFAULT_PARAMS, r.temperature_c, r.dod_pct, r.cycle)
                 for r in ds.records]
    assert abs(statistics.fmean(residuals)) < 0.01
    assert abs(statistics.stdev(residuals) - 0.5) < 0.01


def test_knee_steepens_early_fade():
    plan = SimulationPlan(settings=((10.0, 10.0),), cycle_end=10000,
                          rc_knee_cycle=5000, rc_knee_multiplier=3.0)
    ds = generate(plan)
    by_cycle = {r.cycle: r.rc_pct for r in ds.records}
    p = DEFAULT_PARAMS
    # pre-knee: cycles count triple
    assert by_cycle[2000] == eval_rc(p, 10.0, 10.0, 6000.0)
    # post-knee: knee cycles count triple, remainder counts once
    assert by_cycle[8000] == eval_rc(p, 10.0, 10.0, 3.0 * 5000.0 + 3000.0)
    # voltage channel is unaffected by the capacity knee
    for r in ds.records:
        assert r.eodv_v == eval_eodv(p, r.temperature_c, r.dod_pct, r.cycle)


def test_plan_validation():
    with pytest.raises(ValidationError, match="setting"):
        SimulationPlan(settings=())
    with pytest.raises(ValidationError, match="duplicate"):
        SimulationPlan(settings=((10.0, 10.0), (10.0, 10.0)))
    with pytest.raises(ValidationError, match="cycle_step"):
        SimulationPlan(cycle_step=0)
    with pytest.raises(ValidationError, match="cycle_end"):
        SimulationPlan(cycle_start=100, cycle_end=50)
    with pytest.raises(ValidationError, match="noise"):
        SimulationPlan(noise_sd_rc=-0.1)
    with pytest.raises(ValidationError, match="rc_knee_cycle"):
        SimulationPlan(rc_knee_cycle=0)


# ------------------------------------------------------------- cycle life

def _brute_force(params, t, dod, rc_floor, eodv_floor, max_cycle):
    for c in range(0, max_cycle + 1):
        if eval_rc(params, t, dod, c) < rc_floor:
            return CycleLifeResult(c, "rc")
        if eval_eodv(params, t, dod, c) < eodv_floor:
            return CycleLifeResult(c, "eodv")
    return CycleLifeResult(None, None)


def test_cycle_life_worked_example():
    # capacity crosses 40% at ceil(59.762/0.0014) = 42688, well before the
    # voltage floor (2.9256 V reaches 2.5 V near cycle 59355)
    assert cycle_life(DEFAULT_PARAMS, 10.0, 10.0) == CycleLifeResult(42688, "rc")


def test_cycle_life_worked_example_against_brute_force():
    got = cycle_life(DEFAULT_PARAMS, 10.0, 10.0)
    assert got == _brute_force(DEFAULT_PARAMS, 10.0, 10.0, 40.0, 2.5, 100000)


def test_cycle_life_eodv_criterion():
    # raise the voltage floor until it binds first
    got = cycle_life(DEFAULT_PARAMS, 10.0, 10.0, rc_floor=40.0, eodv_floor=2.9)
    want = _brute_force(DEFAULT_PARAMS, 10.0, 10.0, 40.0, 2.9, 100000)
    assert got == want
    assert got.criterion == "eodv"


def test_cycle_life_immediate_failure_at_cycle_zero():
    # at 20 C the affine voltage model starts below 2.5 V
    assert cycle_life(DEFAULT_PARAMS, 20.0, 20.0) == CycleLifeResult(0, "eodv")


def test_cycle_life_no_failure_within_horizon():
    got = cycle_life(DEFAULT_PARAMS, 10.0, 10.0, max_cycle=1000)
    assert got == CycleLifeResult(None, None)


def test_cycle_life_tie_reports_rc():
    # both floors cross at the same cycle by construction: floors sit one
    # half-step above the value at cycle 10
    p = DegradationModelParams(rc_intercept=100.0, rc_coeff_t=0.0,
                               rc_coeff_dod=0.0, rc_coeff_cycle=1.0,
                               eodv_intercept=4.0, eodv_coeff_t=0.0,
                               eodv_coeff_dod=0.0, eodv_coeff_cycle=0.1)
    got = cycle_life(p, 0.0, 0.0, rc_floor=90.5, eodv_floor=3.05)
    assert got == CycleLifeResult(10, "rc")


def test_cycle_life_non_decaying_model():
    p = DegradationModelParams(rc_coeff_cycle=0.0, eodv_coeff_cycle=0.0)
    assert cycle_life(p, 10.0, 10.0) == CycleLifeResult(None, None)


def test_cycle_life_validation():
    with pytest.raises(ValidationError, match="finite"):
        cycle_life(DEFAULT_PARAMS, 10.0, 10.0, rc_floor=float("nan"))
    with pytest.raises(ValidationError, match="max_cycle"):
        cycle_life(DEFAULT_PARAMS, 10.0, 10.0, max_cycle=-1)


@given(
    rc_intercept=st.floats(min_value=80.0, max_value=120.0),
    rc_slope=st.floats(min_value=0.0, max_value=0.01),
    eodv_intercept=st.floats(min_value=2.4, max_value=4.5),
    eodv_slope=st.floats(min_value=0.0, max_value=1e-4),
    t=st.floats(min_value=0.0, max_value=30.0),
    dod=st.floats(min_value=0.0, max_value=30.0),
    rc_floor=st.floats(min_value=30.0, max_value=90.0),
    eodv_floor=st.floats(min_value=2.0, max_value=3.0),
)
@settings(max_examples=40, deadline=None)
def test_cycle_life_matches_brute_force(rc_intercept, rc_slope, eodv_intercept,
                                        eodv_slope, t, dod, rc_floor, eodv_floor):
    params = DegradationModelParams(
        rc_intercept=rc_intercept, rc_coeff_cycle=rc_slope,
        eodv_intercept=eodv_intercept, eodv_coeff_cycle=eodv_slope)
    max_cycle = 30000
    got = cycle_life(params, t, dod, rc_floor, eodv_floor, max_cycle)
    assert got == _brute_force(params, t, dod, rc_floor, eodv_floor, max_cycle)


# ----------------------------------------------------------------- params

def test_params_kv_round_trip():
    p = DegradationModelParams(rc_intercept=105.5, eodv_coeff_cycle=1.25e-06)
    assert params_from_kv(params_to_kv(p)) == p


def test_params_from_kv_overlays_defaults():
    p = params_from_kv({"rc_intercept": "100.0"})
    assert p.rc_intercept == 100.0
    assert p.rc_coeff_t == DEFAULT_PARAMS.rc_coeff_t


def test_params_from_kv_rejects_unknown_keys():
    with pytest.raises(ValidationError, match="unknown model parameter.*rc_slope"):
        params_from_kv({"rc_slope": "1.0"})


def test_params_from_kv_rejects_non_numeric():
    with pytest.raises(ValidationError, match="not a number"):
        params_from_kv({"rc_intercept": "big"})
