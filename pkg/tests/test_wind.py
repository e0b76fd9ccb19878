"""Wind model: drag law, OU gusts, determinism."""
import math
import statistics

import pytest

from bicoptersim.wind import KNOT, WindField, WindSpec, drag_force


def test_calm_is_zero_force():
    field = WindField(WindSpec(speed_knots=0.0, gust_std=0.0), seed=1)
    s = field.step(0.0028)
    assert s.velocity == (0.0, 0.0, 0.0)
    assert s.force == (0.0, 0.0, 0.0)


def test_mean_speed_conversion():
    assert WindSpec(speed_knots=8.0).mean_speed() == pytest.approx(4.1156, abs=1e-4)


def test_drag_at_ten_knots_default_area():
    spec = WindSpec(speed_knots=10.0, gust_std=0.0)
    field = WindField(spec, seed=0)
    s = field.step(0.0028)
    # 0.5 * 1.225 * 0.02 * (5.1444)^2
    assert s.force[0] == pytest.approx(0.3242, abs=1e-4)
    assert s.force[1] == 0.0 and s.force[2] == 0.0
    assert s.speed == pytest.approx(10 * KNOT)


def test_drag_is_quadratic_vector_law():
    spec = WindSpec(speed_knots=0.0)
    f = drag_force(spec, (3.0, 4.0, 0.0))
    k = 0.5 * 1.225 * 0.02 * 5.0
    assert f == pytest.approx((k * 3.0, k * 4.0, 0.0))


def test_gust_statistics_match_spec():
    spec = WindSpec(speed_knots=0.0, gust_std=0.5, gust_correlation_time=0.5)
    field = WindField(spec, seed=7)
    xs = [field.step(0.01).velocity[0] for _ in range(200000)]
    assert statistics.stdev(xs) == pytest.approx(0.5, rel=0.05)
    # autocorrelation at one correlation time ~ 1/e
    n = int(0.5 / 0.01)
    mean = statistics.mean(xs)
    num = sum((xs[i] - mean) * (xs[i + n] - mean) for i in range(len(xs) - n))
    den = sum((x - mean) ** 2 for x in xs)
    assert num / den == pytest.approx(math.exp(-1.0), abs=0.05)


def test_determinism_per_seed():
    a = WindField(WindSpec(8.0, gust_std=0.4), seed=99)
    b = WindField(WindSpec(8.0, gust_std=0.4), seed=99)
    for _ in range(1000):
        assert a.step(0.0028) == b.step(0.0028)


def test_speed_change_preserves_gust_state():
    field = WindField(WindSpec(8.0, gust_std=0.3), seed=5)
    for _ in range(100):
        field.step(0.0028)
    gust_before = list(field._gust)
    field.set_speed_knots(10.0)
    assert field._gust == gust_before
    assert field.spec.speed_knots == 10.0


def test_direction_must_be_unit():
    with pytest.raises(ValueError):
        WindSpec(direction=(1.0, 1.0, 0.0))
