import numpy as np
import pytest

from pilotwave.errors import StepFailure
from pilotwave.integrators import integrate_adaptive, integrate_fixed, rk45_step
from oracles import rk4_fixed


def test_exact_on_constant_velocity():
    f = lambda t, y: np.array([1.0, -2.0])
    out = integrate_adaptive(f, 0.0, np.zeros(2), [0.0, 3.0, 7.0])
    assert np.allclose(out[-1], [7.0, -14.0], atol=1e-12)


def test_exponential_decay_accuracy():
    f = lambda t, y: -y
    out = integrate_adaptive(f, 0.0, np.array([1.0]), np.linspace(0, 5, 11),
                             rtol=1e-10, atol=1e-13)
    expect = np.exp(-np.linspace(0, 5, 11))
    assert np.max(np.abs(out[:, 0] - expect)) < 1e-9


def test_output_points_hit_exactly():
    f = lambda t, y: np.array([np.cos(t)])
    t_out = np.array([0.0, 0.37, 1.114, 2.0])
    out = integrate_adaptive(f, 0.0, np.zeros(1), t_out, rtol=1e-11, atol=1e-14)
    assert np.max(np.abs(out[:, 0] - np.sin(t_out))) < 1e-10


def test_fixed_step_order_is_five():
    # nonlinear scalar problem with a smooth solution
    f = lambda t, y: np.array([np.sin(t) * y[0] + 0.1 * y[0] ** 2])
    y0 = np.array([0.7])
    ref = rk4_fixed(f, 0.0, y0, 2.0, 40000)
    errs = []
    for steps in (40, 80):
        val = integrate_fixed(f, 0.0, y0, 2.0, steps)
        errs.append(abs(val[0] - ref[0]))
    slope = np.log2(errs[0] / errs[1])
    assert abs(slope - 5.0) <= 0.5


def test_rk45_step_error_estimate_scales():
    f = lambda t, y: np.array([y[0] * np.cos(t)])
    y0 = np.array([1.0])
    _, err1, _ = rk45_step(f, 0.0, y0, 0.1)
    _, err2, _ = rk45_step(f, 0.0, y0, 0.05)
    # local error estimate is O(h^5)
    ratio = abs(err1[0]) / abs(err2[0])
    assert 20 < ratio < 45


def test_step_failure_on_budget_exhaustion():
    f = lambda t, y: np.array([1.0 / (1.0 - t + 1e-16)])
    with pytest.raises(StepFailure):
        integrate_adaptive(f, 0.0, np.zeros(1), [0.0, 2.0], max_steps=50)
