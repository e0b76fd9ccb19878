"""Harness behavior: determinism, telemetry contract, RMSE, config loading."""
import json
import math
from dataclasses import replace

import pytest

from bicoptersim.config import dump_scenario, load_scenario, scenario_from_dict
from bicoptersim.dynamics import MODE_TESTBED, RigidBodyState
from bicoptersim.scenario import (
    CSV_HEADER,
    Scenario,
    ScenarioError,
    ScheduleEntry,
    compute_report,
    presets,
    rmse,
    run_scenario,
    write_csv,
)
from bicoptersim.sensing import NoiseModel
from bicoptersim.wind import WindSpec

QUIET = NoiseModel(accel_std=0.0, gyro_std=0.0)


def quiet_testbed(**kw) -> Scenario:
    base = dict(
        name="quiet",
        mode=MODE_TESTBED,
        duration=1.0,
        gains="testbed",
        estimator="cf",
        noise=QUIET,
        wind=WindSpec(speed_knots=0.0, gust_std=0.0),
        seed=1,
    )
    base.update(kw)
    return Scenario(**base)


# --- rmse --------------------------------------------------------------------


def test_rmse_constant_error():
    assert rmse([1.0] * 10, [0.0] * 10) == 1.0


def test_rmse_hand_value():
    assert rmse([3.0, 4.0], [0.0, 0.0]) == pytest.approx(math.sqrt(12.5))


def test_rmse_zero_when_equal():
    assert rmse([0.5, -0.25], [0.5, -0.25]) == 0.0


def test_rmse_sign_flip_invariant():
    a = [1.0, -2.0, 3.0]
    z = [0.0, 0.0, 0.0]
    assert rmse(a, z) == rmse([-x for x in a], z)


def test_rmse_empty_rejected():
    with pytest.raises(ValueError):
        rmse([], [])


# --- equilibrium and schedules ---------------------------------------------------


def test_quiet_level_testbed_stays_at_zero():
    res = run_scenario(quiet_testbed())
    assert not res.diverged
    for r in res.records:
        assert abs(r.phi_true) < 1e-6
        assert abs(r.theta_true) < 1e-6
        assert abs(r.psi_true) < 1e-6


def test_schedule_changes_setpoint():
    s = quiet_testbed(
        duration=3.0,
        schedule=(ScheduleEntry(t=1.0, roll=math.radians(4.0)),),
    )
    res = run_scenario(s)
    before = [r for r in res.records if r.t < 1.0]
    after = [r for r in res.records if r.t > 2.0]
    assert all(r.phi_sp == 0.0 for r in before)
    assert all(r.phi_sp == pytest.approx(4.0) for r in after)
    assert after[-1].phi_true == pytest.approx(4.0, abs=0.2)


def test_schedule_must_be_sorted():
    with pytest.raises(ScenarioError):
        quiet_testbed(schedule=(ScheduleEntry(t=2.0), ScheduleEntry(t=1.0)))


def test_tick_count_and_time_base():
    s = quiet_testbed(duration=0.028)
    res = run_scenario(s)
    assert len(res.records) == 10
    for k, r in enumerate(res.records):
        assert r.k == k
        assert r.t == k * s.dt


# --- telemetry CSV -----------------------------------------------------------------


def test_csv_header_contract(tmp_path):
    path = tmp_path / "t.csv"
    write_csv([], str(path))
    assert path.read_text() == CSV_HEADER + "\n"
    assert CSV_HEADER.count(",") == 20  # 21 columns


def test_csv_row_shape(tmp_path):
    res = run_scenario(quiet_testbed(duration=0.01))
    path = tmp_path / "t.csv"
    write_csv(res.records, str(path))
    lines = path.read_text().splitlines()
    assert len(lines) == 1 + len(res.records)
    for line in lines[1:]:
        assert len(line.split(",")) == 21


def test_csv_deterministic_across_runs(tmp_path):
    s = presets()["testbed-8kn"]
    s = replace(s, duration=2.0)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(run_scenario(s).records, str(a))
    write_csv(run_scenario(s).records, str(b))
    assert a.read_bytes() == b.read_bytes()


def test_different_seed_changes_output(tmp_path):
    s = replace(presets()["testbed-8kn"], duration=1.0)
    s2 = replace(s, seed=43)
    a = run_scenario(s).records[-1]
    b = run_scenario(s2).records[-1]
    assert a != b


# --- divergence ---------------------------------------------------------------------


def test_saturated_instability_stays_finite():
    # absurd authority chatters on the actuator clamps but cannot blow up
    s = quiet_testbed(
        duration=2.0,
        roll_authority=5e4,
        initial=RigidBodyState(roll=math.radians(10.0)),
    )
    res = run_scenario(s)
    assert not res.diverged
    assert any(r.sat_flags for r in res.records)


def test_divergence_reports_partial_telemetry():
    # a non-finite state is the one way the integrator can fail
    s = quiet_testbed(duration=1.0, initial=RigidBodyState(roll_rate=float("nan")))
    res = run_scenario(s)
    assert res.diverged
    assert res.diagnostic is not None and "tick 0" in res.diagnostic
    assert len(res.records) < s.n_ticks()


def test_static_pose_estimation_error_under_default_noise():
    # fused roll/pitch vs truth on the quiet test bed stays under a degree
    s = Scenario(name="static", mode=MODE_TESTBED, duration=10.0, gains="testbed",
                 estimator="cf", seed=5)
    res = run_scenario(s)
    err_roll = rmse([r.phi_est for r in res.records], [r.phi_true for r in res.records])
    err_pitch = rmse(
        [r.theta_est for r in res.records], [r.theta_true for r in res.records]
    )
    assert err_roll < 1.0
    assert err_pitch < 1.0


def test_quaternion_estimator_static_error_under_default_noise():
    s = Scenario(name="static-q", mode=MODE_TESTBED, duration=10.0, gains="testbed",
                 estimator="quaternion", seed=5)
    res = run_scenario(s)
    err_roll = rmse([r.phi_est for r in res.records], [r.phi_true for r in res.records])
    assert err_roll < 1.0


# --- reports ------------------------------------------------------------------------


def test_report_window_and_fields():
    s = quiet_testbed(duration=1.0)
    res = run_scenario(s)
    rep = compute_report(res.records, s, window=(0.5, 1.0))
    assert rep.window == (0.5, 1.0)
    assert rep.preset == "quiet"
    assert rep.seed == 1
    assert set(rep.rmse_deg) == {"roll", "pitch", "yaw"}
    d = rep.as_dict()
    json.dumps(d)  # serializable


# --- presets ------------------------------------------------------------------------


def test_preset_names():
    names = list(presets())
    assert names == ["testbed-8kn", "testbed-9kn", "testbed-10kn", "flight-indoor"]


def test_wind_presets_reproduce_experiment_protocol():
    for name, knots in (("testbed-8kn", 8), ("testbed-9kn", 9), ("testbed-10kn", 10)):
        s = presets()[name]
        assert s.mode == "testbed"
        assert s.duration == 28.0
        assert s.dt == 0.0028
        assert s.n_ticks() == 10000
        assert s.gains == "testbed"
        assert s.wind.speed_knots == knots


# --- JSON config ----------------------------------------------------------------------


def minimal_config() -> dict:
    return {"version": 1, "name": "t", "mode": "testbed", "duration_s": 0.028}


def test_config_round_trip(tmp_path):
    s = presets()["testbed-9kn"]
    d = dump_scenario(s)
    s2 = scenario_from_dict(d)
    assert s2.wind == s.wind
    assert s2.duration == s.duration
    assert s2.gains == s.gains
    assert s2.seed == s.seed


def test_config_load_from_file(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(minimal_config()))
    s = load_scenario(str(p))
    assert s.name == "t"
    assert s.n_ticks() == 10


def test_config_requires_version():
    with pytest.raises(ScenarioError, match="version"):
        scenario_from_dict({"name": "x"})


def test_config_rejects_unknown_top_level():
    cfg = minimal_config()
    cfg["windspeed"] = 3
    with pytest.raises(ScenarioError, match="unknown field"):
        scenario_from_dict(cfg)


def test_config_rejects_unknown_nested():
    cfg = minimal_config()
    cfg["wind"] = {"speed_knots": 8, "gusty": True}
    with pytest.raises(ScenarioError, match="gusty"):
        scenario_from_dict(cfg)


def test_config_rejects_wrong_type():
    cfg = minimal_config()
    cfg["duration_s"] = "long"
    with pytest.raises(ScenarioError, match="duration_s"):
        scenario_from_dict(cfg)


def test_config_angles_in_degrees():
    cfg = minimal_config()
    cfg["initial"] = {"roll_deg": 10.0}
    cfg["schedule"] = [[0.5, 1.0, 2.0, 3.0, -1.0]]
    s = scenario_from_dict(cfg)
    assert s.initial.roll == pytest.approx(math.radians(10.0))
    assert s.schedule[0].pitch == pytest.approx(math.radians(2.0))
    assert s.schedule[0].altitude == -1.0


def test_config_explicit_gains():
    cfg = minimal_config()
    cfg["gains"] = {"roll": [1, 0.1, 2], "pitch": [1, 0.1, 2], "yaw": [3, 0, 0]}
    s = scenario_from_dict(cfg)
    assert s.gains["yaw"].kp == 3.0


def test_config_explicit_gains_must_cover_axes():
    cfg = minimal_config()
    cfg["gains"] = {"roll": [1, 0.1, 2]}
    with pytest.raises(ScenarioError, match="cover"):
        scenario_from_dict(cfg)


def test_config_unknown_preset_rejected():
    cfg = minimal_config()
    cfg["gains"] = "aggressive"
    with pytest.raises(ScenarioError, match="preset"):
        scenario_from_dict(cfg)


def test_config_params_override():
    cfg = minimal_config()
    cfg["params"] = {"m": 1.0}
    s = scenario_from_dict(cfg)
    assert s.params.m == 1.0
    assert s.params.L == 0.225
