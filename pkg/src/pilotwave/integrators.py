"""Explicit embedded Runge-Kutta integration (Dormand-Prince 5(4)).

The fifth-order solution is propagated; the embedded fourth-order solution
provides the local error estimate for adaptive step control.  A fixed-step
mode drives the same stages, which is what the order-measurement tests use.
Output points are hit exactly by clamping the step to each requested time,
so no interpolation error enters sampled trajectories.
"""
from __future__ import annotations

import numpy as np

from .errors import StepFailure

# Butcher tableau, Dormand & Prince (1980)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
                187 / 2100, 1 / 40])

ORDER = 5
_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


def _stages(f, t, y, h, k1):
    k = [k1]
    for i in range(1, 7):
        yi = y + h * sum(a * ki for a, ki in zip(_A[i], k))
        k.append(np.asarray(f(t + _C[i] * h, yi), dtype=float))
    return k


def rk45_step(f, t, y, h, k1=None):
    """One Dormand-Prince step: returns (y5, error_vector, k7).

    k7 equals f at the new point (FSAL), reusable as the next k1.
    """
    if k1 is None:
        k1 = np.asarray(f(t, y), dtype=float)
    k = _stages(f, t, y, h, k1)
    y5 = y + h * sum(b * ki for b, ki in zip(_B5, k) if b != 0.0)
    err = h * sum((b5 - b4) * ki for b5, b4, ki in zip(_B5, _B4, k))
    return y5, err, k[6]


def integrate_fixed(f, t0, y0, t1, steps):
    """Propagate with a fixed step; returns the state at t1."""
    y = np.asarray(y0, dtype=float)
    h = (t1 - t0) / steps
    t = t0
    k1 = np.asarray(f(t, y), dtype=float)
    for _ in range(steps):
        y, _, k1 = rk45_step(f, t, y, h, k1)
        t += h
    return y


def integrate_adaptive(f, t0, y0, t_out, rtol=1e-9, atol=1e-12,
                       max_step=np.inf, first_step=None, max_steps=1_000_000,
                       step_callback=None):
    """Adaptive integration returning the states at every time in t_out.

    ``t_out`` must be increasing and start at or after t0.  The controller
    is the standard PI-free elementary one: accept when the weighted RMS
    error is at most 1, grow/shrink by err^(-1/5) within [0.2, 5].
    ``step_callback(t, y)`` runs after every accepted step (used for node
    detection).
    """
    t_out = np.asarray(t_out, dtype=float)
    y = np.asarray(y0, dtype=float)
    t = float(t0)
    out = np.empty((t_out.size, y.size))
    idx = 0
    if t_out.size and np.isclose(t_out[0], t, rtol=0.0, atol=1e-14):
        out[0] = y
        idx = 1
    span = t_out[-1] - t0 if t_out.size else 0.0
    h = first_step if first_step is not None else min(max_step, abs(span) * 1e-3 + 1e-12)
    k1 = np.asarray(f(t, y), dtype=float)
    n_steps = 0
    while idx < t_out.size:
        if n_steps >= max_steps:
            raise StepFailure(f"gave up after {max_steps} steps at t = {t:.6g}")
        h = min(h, max_step, t_out[-1] - t)
        target = t_out[idx]
        clamped = False
        if t + h >= target - 1e-14 * max(1.0, abs(target)):
            h = target - t
            clamped = True
        if h <= 0:
            raise StepFailure(f"step underflow at t = {t:.6g}")
        y_new, err, k7 = rk45_step(f, t, y, h, k1)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))
        n_steps += 1
        if err_norm <= 1.0:
            t = target if clamped else t + h
            y = y_new
            k1 = k7
            if step_callback is not None:
                step_callback(t, y)
            if clamped:
                out[idx] = y
                idx += 1
            factor = _MAX_FACTOR if err_norm == 0.0 else min(
                _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err_norm ** (-1.0 / ORDER)))
            h = h * factor
        else:
            h = h * max(_MIN_FACTOR, _SAFETY * err_norm ** (-1.0 / ORDER))
            if h < 1e-14 * max(1.0, abs(t)):
                raise StepFailure(f"error control failed near t = {t:.6g}")
    return out
