"""IMU simulation and the two attitude estimators."""
import math
import statistics

import pytest

from bicoptersim.rotation import EulerAngles, euler_to_quat, quat_to_gravity
from bicoptersim.sensing import (
    ComplementaryFilter,
    FilterConfig,
    ImuSample,
    ImuSimulator,
    NoiseModel,
    QuaternionFusion,
    accel_to_angles,
    alpha_from_cutoff,
    body_rates_from_euler,
    hpf_step,
    lpf_step,
)

DT = 0.0028


# --- smoothing factor -------------------------------------------------------


def test_alpha_high_cutoff_limit():
    assert alpha_from_cutoff(1e9, DT) > 0.9999


def test_alpha_reference_value():
    # RC = 1/(2 pi 5) = 0.0318310, alpha = 0.0028/(RC + 0.0028) = 0.0808524
    assert alpha_from_cutoff(5.0, DT) == pytest.approx(0.08085244203840047, abs=1e-9)


def test_alpha_half_when_rc_equals_dt():
    f_c = 1.0 / (2.0 * math.pi * DT)
    assert alpha_from_cutoff(f_c, DT) == pytest.approx(0.5, rel=1e-12)


def test_alpha_rejects_nonpositive():
    with pytest.raises(ValueError):
        alpha_from_cutoff(0.0, DT)
    with pytest.raises(ValueError):
        alpha_from_cutoff(5.0, -1.0)


# --- low-pass ----------------------------------------------------------------


def test_lpf_passthrough_at_alpha_one():
    assert lpf_step(3.25, -1.0, 1.0) == 3.25


def test_lpf_geometric_series():
    y = 0.0
    for k in range(1, 11):
        y = lpf_step(1.0, y, 0.5)
        assert y == pytest.approx(1.0 - 2.0**-k)


def test_lpf_dc_gain_unity():
    alpha = 0.08
    y = 0.0
    for _ in range(int(10 / alpha)):
        y = lpf_step(5.0, y, alpha)
    assert y == pytest.approx(5.0, rel=0.02)


# --- high-pass ----------------------------------------------------------------


def test_hpf_blocks_dc():
    y, x_prev = 0.7, 2.0
    for _ in range(200):
        y = hpf_step(2.0, x_prev, y, 0.9)
        x_prev = 2.0
    assert abs(y) < 1e-8


def test_hpf_unit_step_decay():
    # step at k=0 from 0: y_k = 0.9^(k+1)
    alpha = 0.9
    y = hpf_step(1.0, 0.0, 0.0, alpha)
    assert y == pytest.approx(0.9)
    for k in range(2, 12):
        y = hpf_step(1.0, 1.0, y, alpha)
        assert y == pytest.approx(0.9**k)


def test_hpf_zero_alpha_kills_output():
    assert hpf_step(10.0, -4.0, 3.0, 0.0) == 0.0


# --- tilt from specific force ---------------------------------------------------


def test_accel_level():
    roll, pitch = accel_to_angles((0.0, 0.0, 1.0))
    assert roll == 0.0 and pitch == pytest.approx(0.0)


def test_accel_pure_roll():
    a = math.radians(10)
    roll, pitch = accel_to_angles((0.0, math.sin(a), math.cos(a)))
    assert roll == pytest.approx(a)
    assert pitch == pytest.approx(0.0, abs=1e-12)


def test_accel_pure_pitch():
    a = math.radians(20)
    roll, pitch = accel_to_angles((-math.sin(a), 0.0, math.cos(a)))
    assert pitch == pytest.approx(a)
    assert roll == pytest.approx(0.0, abs=1e-12)


def test_accel_free_fall_rejected():
    with pytest.raises(ValueError, match="unreliable tilt"):
        accel_to_angles((0.01, 0.0, 0.05))


# --- complementary filter ---------------------------------------------------------


def level_sample(t=0.0):
    return ImuSample(accel=(0.0, 0.0, 1.0), gyro=(0.0, 0.0, 0.0), t=t)


def test_cf_static_level_stays_zero():
    cf = ComplementaryFilter(FilterConfig(5.0, DT))
    for k in range(500):
        roll, pitch, yaw = cf.update(level_sample(k * DT))
    assert roll == 0.0 and pitch == 0.0 and yaw == 0.0


def test_cf_converges_to_constant_tilt():
    cf = ComplementaryFilter(FilterConfig(5.0, DT))
    cf.reset()  # start from level belief, then feed a 10 deg roll
    a = math.radians(10)
    sample = ImuSample((0.0, math.sin(a), math.cos(a)), (0.0, 0.0, 0.0), 0.0)
    alpha = cf.config.alpha
    n = int(5.0 / (alpha / DT) / DT)  # 5 blend time constants
    for _ in range(n):
        roll, _, _ = cf.update(sample)
    assert math.degrees(abs(roll - a)) < 0.1


def test_cf_gyro_bias_bounded_offset():
    cf = ComplementaryFilter(FilterConfig(5.0, DT))
    cf.reset()
    bias = 1.0  # deg/s
    sample = ImuSample((0.0, 0.0, 1.0), (bias, 0.0, 0.0), 0.0)
    for _ in range(20000):
        roll, _, _ = cf.update(sample)
    alpha = cf.config.alpha
    expected = math.radians(bias) * DT * (1.0 - alpha) / alpha
    assert roll == pytest.approx(expected, rel=1e-3)


def test_cf_alpha_one_reproduces_accel_angles_exactly():
    cf = ComplementaryFilter(FilterConfig(5.0, DT), alpha=1.0)
    cf.reset(0.5, -0.4, 0.0)
    a = math.radians(25)
    sample = ImuSample((0.0, math.sin(a), math.cos(a)), (3.0, -2.0, 1.0), 0.0)
    roll, pitch, _ = cf.update(sample)
    r_acc, p_acc = accel_to_angles(sample.accel)
    assert roll == r_acc and pitch == p_acc


def test_cf_alpha_zero_reproduces_gyro_integration_exactly():
    cf = ComplementaryFilter(FilterConfig(5.0, DT), alpha=0.0)
    cf.reset()
    gyro = (4.0, -3.0, 2.0)
    ref_roll = ref_pitch = ref_yaw = 0.0
    for k in range(100):
        sample = ImuSample((0.0, 0.1, 0.99), gyro, k * DT)
        roll, pitch, yaw = cf.update(sample)
        ref_roll = ref_roll + math.radians(gyro[0]) * DT
        ref_pitch = ref_pitch + math.radians(gyro[1]) * DT
        ref_yaw = ref_yaw + math.radians(gyro[2]) * DT
        assert roll == ref_roll and pitch == ref_pitch and yaw == ref_yaw


# --- quaternion fusion -------------------------------------------------------------


def test_fusion_static_pose_constant():
    qf = QuaternionFusion(gain=0.02, dt=DT)
    qf.reset(0.0, 0.0, 0.0)
    for k in range(200):
        roll, pitch, yaw = qf.update(level_sample(k * DT))
    assert abs(roll) < 1e-12 and abs(pitch) < 1e-12 and abs(yaw) < 1e-12


def test_fusion_initial_error_decays_geometrically():
    qf = QuaternionFusion(gain=0.02, dt=DT)
    qf.reset(math.radians(20), 0.0, 0.0)  # wrong by 20 deg, truth is level
    t = 0.0
    while t < 2.0:
        roll, _, _ = qf.update(level_sample(t))
        t += DT
    assert math.degrees(abs(roll)) < 1.0


def test_fusion_zero_gain_is_pure_gyro_integration():
    from bicoptersim.rotation import Quaternion, integrate_gyro

    qf = QuaternionFusion(gain=0.0, dt=DT)
    qf.reset(0.0, 0.0, 0.0)
    q_ref = euler_to_quat(EulerAngles(0, 0, 0))
    gyro = (30.0, -20.0, 10.0)
    for k in range(300):
        qf.update(ImuSample((0.0, 0.0, 1.0), gyro, k * DT))
        q_ref = integrate_gyro(q_ref, tuple(math.radians(g) for g in gyro), DT)
    assert qf.q == q_ref


def test_fusion_gain_validated():
    with pytest.raises(ValueError):
        QuaternionFusion(gain=1.5)


# --- IMU simulation -----------------------------------------------------------------


def test_imu_hover_reads_plus_one_g():
    sim = ImuSimulator(noise=NoiseModel(accel_std=0.0, gyro_std=0.0))
    s = sim.sample((0.0, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0), 0.0)
    assert s.accel == pytest.approx((0.0, 0.0, 1.0))
    assert s.gyro == pytest.approx((0.0, 0.0, 0.0))


def test_imu_tilted_reads_gravity_direction():
    sim = ImuSimulator(noise=NoiseModel(accel_std=0.0, gyro_std=0.0))
    att = (math.radians(15), math.radians(-25), math.radians(40))
    s = sim.sample(att, (0.0, 0.0, 0.0), (0.0, 0.0, 0.0), 0.0)
    g = quat_to_gravity(euler_to_quat(EulerAngles(*att)))
    assert s.accel == pytest.approx((g.x, g.y, g.z), abs=1e-12)


def test_imu_free_fall_reads_zero():
    sim = ImuSimulator(noise=NoiseModel(accel_std=0.0, gyro_std=0.0))
    s = sim.sample((0.0, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, 9.81), 0.0)
    assert s.accel == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)


def test_imu_noise_statistics():
    sim = ImuSimulator(noise=NoiseModel(accel_std=0.01, gyro_std=0.0, seed=9))
    xs = [
        sim.sample((0, 0, 0), (0, 0, 0), (0, 0, 0), 0.0).accel[0] for _ in range(100000)
    ]
    assert statistics.stdev(xs) == pytest.approx(0.01, rel=0.05)
    assert statistics.mean(xs) == pytest.approx(0.0, abs=0.001)


def test_imu_full_scale_clipping():
    sim = ImuSimulator(noise=NoiseModel(accel_std=0.0, gyro_std=0.0))
    # 3 g upward world acceleration drives the z axis past the +-2 g range
    s = sim.sample((0.0, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, -2.5 * 9.81), 0.0)
    assert s.accel[2] == 2.0
    s = sim.sample((0.0, 0.0, 0.0), (0.0, 0.0, 20.0), (0.0, 0.0, 0.0), 0.0)
    assert s.gyro[2] == 250.0


def test_imu_deterministic_per_seed():
    a = ImuSimulator(noise=NoiseModel(seed=1234))
    b = ImuSimulator(noise=NoiseModel(seed=1234))
    for k in range(100):
        sa = a.sample((0.1, 0.2, 0.3), (0.5, -0.5, 0.1), (0, 0, 0), k * DT)
        sb = b.sample((0.1, 0.2, 0.3), (0.5, -0.5, 0.1), (0, 0, 0), k * DT)
        assert sa == sb


def test_imu_bias_applied():
    sim = ImuSimulator(
        noise=NoiseModel(accel_std=0.0, gyro_std=0.0, gyro_bias=(1.0, 0.0, 0.0))
    )
    s = sim.sample((0, 0, 0), (0, 0, 0), (0, 0, 0), 0.0)
    assert s.gyro[0] == 1.0


# --- Euler-rate to body-rate map ----------------------------------------------------


def test_body_rates_identity_at_level():
    assert body_rates_from_euler((0, 0, 0), (0.1, 0.2, 0.3)) == pytest.approx(
        (0.1, 0.2, 0.3)
    )


def test_body_rates_pitch_couples_yaw():
    p, q, r = body_rates_from_euler((0.0, math.radians(30), 0.0), (0.0, 0.0, 1.0))
    assert p == pytest.approx(-math.sin(math.radians(30)))
    assert r == pytest.approx(math.cos(math.radians(30)))
