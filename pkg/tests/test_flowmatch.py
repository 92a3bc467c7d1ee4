import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from sketchforge.errors import NonFiniteState, ShapeMismatch, TOutOfRange
from sketchforge.flowmatch import (
    euler_sample, exact_velocity, fm_loss, interpolate, train_step_oracle, velocity_target,
)


def test_interpolation_endpoints_and_midpoint():
    x0, eps = np.array([1.0, -2.0]), np.array([3.0, 4.0])
    np.testing.assert_array_equal(interpolate(x0, eps, 0.0), x0)
    np.testing.assert_array_equal(interpolate(x0, eps, 1.0), eps)
    np.testing.assert_allclose(interpolate(x0, eps, 0.5), [2.0, 1.0])
    for t in (-0.1, 1.1):
        with pytest.raises(TOutOfRange):
            interpolate(x0, eps, t)
    with pytest.raises(ShapeMismatch):
        interpolate(x0, np.zeros(3), 0.5)


def test_target_and_loss():
    x0, eps = np.zeros((2, 2)), np.ones((2, 2))
    v = velocity_target(x0, eps)
    np.testing.assert_array_equal(v, 1.0)
    assert fm_loss(v, v) == 0.0
    assert fm_loss(np.zeros_like(v), v) == 1.0
    xt, target, loss = train_step_oracle(x0, "token", (eps, 0.3))
    np.testing.assert_allclose(xt, 0.3)
    assert loss == 1.0


finite = st.floats(-100, 100, allow_nan=False)


@given(hnp.arrays(np.float64, (3, 4), elements=finite), hnp.arrays(np.float64, (3, 4), elements=finite),
       st.floats(0.01, 0.99))
def test_velocity_is_path_derivative(x0, eps, t):
    h = 1e-6
    fd = (interpolate(x0, eps, t + h) - interpolate(x0, eps, t - h)) / (2 * h)
    np.testing.assert_allclose(fd, velocity_target(x0, eps), atol=1e-6 * (1 + np.abs(x0).max() + np.abs(eps).max()))


@given(hnp.arrays(np.float64, (2, 3), elements=finite), hnp.arrays(np.float64, (2, 3), elements=finite),
       st.floats(0, 1), st.floats(0, 1))
def test_path_consistency(x0, eps, s, t):
    # every point on the path maps back to x0 along the constant velocity
    xt = interpolate(x0, eps, t)
    np.testing.assert_allclose(xt - t * velocity_target(x0, eps), x0, atol=1e-9 * (1 + np.abs(eps).max()))


@pytest.mark.parametrize("shape", [(), (5,), (4, 8, 8)])
@pytest.mark.parametrize("steps", [1, 7, 50])
def test_exact_velocity_recovers_data(shape, steps, rng):
    x0, eps = rng.normal(size=shape), rng.normal(size=shape)
    out = euler_sample(exact_velocity(x0, eps), eps, steps)
    assert np.abs(out - x0).max() <= 1e-12


def test_euler_converges_at_first_order():
    # dx/dt = -x integrated backwards from t=1: exact x(0) = e * x(1)
    vfn = lambda x, t, c: -x  # noqa: E731
    errs = [abs(euler_sample(vfn, 1.0, n) - np.e) for n in (10, 20, 40, 80)]
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert all(abs(r - 2) <= 0.2 for r in ratios)


def test_euler_errors():
    with pytest.raises(ValueError):
        euler_sample(lambda x, t, c: x, np.zeros(2), 0)
    with pytest.raises(NonFiniteState):
        euler_sample(lambda x, t, c: np.full_like(x, np.inf), np.zeros(2), 3)
    with pytest.raises(ShapeMismatch):
        euler_sample(lambda x, t, c: np.zeros(3), np.zeros(2), 3)


def test_euler_time_grid():
    seen = []
    euler_sample(lambda x, t, c: seen.append((t, c)) or np.zeros_like(x), np.zeros(1), 4, cond="y")
    assert seen == [(1.0, "y"), (0.75, "y"), (0.5, "y"), (0.25, "y")]


def test_scalar_hand_values():
    assert interpolate(2.0, -1.0, 0.5) == 0.5
    assert velocity_target(2.0, -1.0) == -3.0
    np.testing.assert_array_equal(velocity_target(np.ones(3), np.ones(3)), 0.0)
    assert fm_loss(np.full(4, 3.0), np.ones(4)) == 4.0
    a, b = np.array([1.0, 2.0]), np.array([0.5, -1.0])
    assert fm_loss(a, b) == fm_loss(b, a)
    xt, target, loss = train_step_oracle(1.0, None, (3.0, 0.25))
    assert (xt, target, loss) == (1.5, 2.0, 4.0)
    xt, target, loss = train_step_oracle(np.ones(2), None, (np.ones(2), 0.7))
    assert loss == 0.0 and not target.any()


def test_zero_field_is_identity(rng):
    x = rng.normal(size=(3, 3))
    np.testing.assert_array_equal(euler_sample(lambda x, t, c: np.zeros_like(x), x, 9), x)


def test_finite_difference_at_spec_point(rng):
    x0, eps = rng.normal(size=6), rng.normal(size=6)
    h = 1e-6
    fd = (interpolate(x0, eps, 0.3 + h) - interpolate(x0, eps, 0.3)) / h
    np.testing.assert_allclose(fd, velocity_target(x0, eps), atol=1e-4)
