"""Independent numerical oracles for cross-checking the library.

Everything here recomputes results through a route different from the
implementation under test: whole-bracket nested finite differencing,
cofactor determinant expansion, a plain fixed-step RK4, and a geodesic
integrator driven by Christoffel symbols from its own metric differencing.
"""
import numpy as np


def cofactor_det(a):
    """Determinant by recursive cofactor expansion along the first row."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if n == 1:
        return a[0, 0]
    total = 0.0
    for j in range(n):
        minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
        total += (-1.0) ** j * a[0, j] * cofactor_det(minor)
    return total


def nested_divergence(vector_fn, x, h=1e-5):
    """d_M F^M by shifting the whole bracket, no reused factor derivatives."""
    x = np.asarray(x, dtype=float)
    total = 0.0
    for m in range(x.size):
        xp = np.array(x)
        xm = np.array(x)
        xp[m] += h
        xm[m] -= h
        total = total + (vector_fn(xp)[m] - vector_fn(xm)[m]) / (2.0 * h)
    return total


def nested_gradient(f, x, h=1e-5):
    x = np.asarray(x, dtype=float)
    out = []
    for m in range(x.size):
        xp = np.array(x)
        xm = np.array(x)
        xp[m] += h
        xm[m] -= h
        out.append((f(xp) - f(xm)) / (2.0 * h))
    return np.array(out)


def rk4_fixed(f, t0, y0, t1, steps):
    """Classic fixed-step RK4; returns the state at t1."""
    y = np.asarray(y0, dtype=float)
    h = (t1 - t0) / steps
    t = t0
    for _ in range(steps):
        k1 = np.asarray(f(t, y))
        k2 = np.asarray(f(t + h / 2, y + h / 2 * k1))
        k3 = np.asarray(f(t + h / 2, y + h / 2 * k2))
        k4 = np.asarray(f(t + h, y + h * k3))
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y


def rk4_path(f, t0, y0, t_grid):
    """RK4 states at each time of t_grid (64 substeps per interval)."""
    out = [np.asarray(y0, dtype=float)]
    for a, b in zip(t_grid[:-1], t_grid[1:]):
        out.append(rk4_fixed(f, a, out[-1], b, 64))
    return np.array(out)


def christoffel(metric_fn, x, h=1e-6):
    """Gamma^M_NP from central differences of the metric."""
    x = np.asarray(x, dtype=float)
    d = x.size
    dg = np.empty((d, d, d))
    for m in range(d):
        xp = np.array(x)
        xm = np.array(x)
        xp[m] += h
        xm[m] -= h
        dg[m] = (np.asarray(metric_fn(xp)) - np.asarray(metric_fn(xm))) / (2.0 * h)
    ginv = np.linalg.inv(np.asarray(metric_fn(x)))
    # Gamma^m_np = (1/2) g^{ms} (d_n g_sp + d_p g_sn - d_s g_np)
    return 0.5 * np.einsum("ms,nsp->mnp",
                           ginv, dg + dg.transpose(2, 1, 0) - dg.transpose(1, 0, 2))


def integrate_geodesic(metric_fn, x0, u0, tau_grid):
    """Affinely parametrized geodesic through (x0, u0), sampled on tau_grid.

    Solves xddot^M = -Gamma^M_NP xdot^N xdot^P with RK4 at 64 substeps per
    output interval; independent of the guidance-law machinery.
    """
    d = np.asarray(x0).size

    def rhs(_tau, y):
        x, u = y[:d], y[d:]
        gam = christoffel(metric_fn, x)
        acc = -np.einsum("mnp,n,p->m", gam, u, u)
        return np.concatenate([u, acc])

    y0 = np.concatenate([np.asarray(x0, dtype=float), np.asarray(u0, dtype=float)])
    states = rk4_path(rhs, tau_grid[0], y0, tau_grid)
    return states[:, :d]
