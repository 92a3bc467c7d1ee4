"""Rectified-flow arithmetic in float64, with pluggable velocity functions.

Data x0 and noise eps are joined by the straight path
``x_t = (1 - t) x0 + t eps``, whose velocity ``eps - x0`` is the regression
target. Sampling integrates ``dx/dt = v(x, t)`` from t = 1 back to t = 0.
No network is involved; callers supply the velocity function.
"""

from __future__ import annotations

from typing import Any, Callable

import numpy as np

from .errors import NonFiniteState, ShapeMismatch, TOutOfRange

VelocityFn = Callable[[np.ndarray, float, Any], np.ndarray]


def _f64(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


def _same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes differ: {a.shape} vs {b.shape}")


def interpolate(x0, eps, t: float) -> np.ndarray:
    x0, eps = _f64(x0), _f64(eps)
    _same_shape(x0, eps)
    if not 0.0 <= t <= 1.0:
        raise TOutOfRange(f"t={t} outside [0, 1]")
    if t == 0.0:
        return x0.copy()
    if t == 1.0:
        return eps.copy()
    return (1.0 - t) * x0 + t * eps


def velocity_target(x0, eps) -> np.ndarray:
    x0, eps = _f64(x0), _f64(eps)
    _same_shape(x0, eps)
    return eps - x0


def fm_loss(pred, target) -> float:
    """Mean squared error between predicted and target velocity."""
    pred, target = _f64(pred), _f64(target)
    _same_shape(pred, target)
    return float(np.mean((pred - target) ** 2))


def euler_sample(vfn: VelocityFn, xT, steps: int, cond: Any = None) -> np.ndarray:
    """Explicit Euler from t = 1 to t = 0 in ``steps`` uniform steps."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    x = _f64(xT).copy()
    h = 1.0 / steps
    for k in range(steps):
        t = 1.0 - k / steps
        v = _f64(vfn(x, t, cond))
        _same_shape(v, x)
        x = x - h * v
        if not np.isfinite(x).all():
            raise NonFiniteState(f"non-finite state after step {k + 1} (t={t})")
    return x


def train_step_oracle(x0, cond: Any, draws: tuple) -> tuple[np.ndarray, np.ndarray, float]:
    """Data path of one training step given the (eps, t) draws.

    Returns (x_t, velocity target, loss of the all-zero predictor).
    ``cond`` is carried for interface parity and unused.
    """
    eps, t = draws
    x_t = interpolate(x0, eps, t)
    target = velocity_target(x0, eps)
    return x_t, target, fm_loss(np.zeros_like(target), target)


def exact_velocity(x0, eps) -> VelocityFn:
    """Velocity field that ignores its input and returns eps - x0."""
    v = velocity_target(x0, eps)
    return lambda x, t, cond: v
