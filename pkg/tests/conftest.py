import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from pilotwave.fields import polar_field
from pilotwave.geometry import BackgroundRel
from pilotwave.nc_geometry import NCBackground

settings.register_profile(
    "suite", max_examples=25, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")


def make_wavy_rel(dim=2, eps=0.08, seed=3, mass=1.0, charge=0.3):
    """Smooth non-flat Lorentzian background with analytic derivatives."""
    rng = np.random.default_rng(seed)
    eta = np.diag([-1.0] + [1.0] * (dim - 1))
    nterms = 2
    cs = rng.normal(size=(nterms, dim, dim))
    cs = 0.5 * (cs + cs.transpose(0, 2, 1))
    ws = rng.normal(size=(nterms, dim))
    phases = rng.uniform(0, 2 * np.pi, size=nterms)
    a_amp = rng.normal(size=dim) * 0.3
    a_vec = rng.normal(size=dim)

    def metric(x):
        g = eta.copy()
        for c, w, ph in zip(cs, ws, phases):
            g = g + eps * c * np.sin(w @ x + ph)
        return g

    def dmetric(x):
        out = np.zeros((dim, dim, dim))
        for c, w, ph in zip(cs, ws, phases):
            out += eps * np.einsum("m,ab->mab", w, c) * np.cos(w @ x + ph)
        return out

    def gauge(x):
        return a_amp * np.cos(a_vec @ x)

    def dgauge(x):
        return -np.outer(a_vec, a_amp) * np.sin(a_vec @ x)

    return BackgroundRel(dim=dim, metric=metric, gauge=gauge, mass=mass,
                         charge=charge, dmetric=dmetric, dgauge=dgauge)


def make_wavy_polar(dim=2, seed=5):
    """Smooth positive density and phase with analytic derivatives."""
    rng = np.random.default_rng(seed)
    r_vec = rng.normal(size=dim)
    u_vec = rng.normal(size=dim)
    p_vec = rng.normal(size=dim)
    a, b = 0.3, 0.25

    def g_fun(x):
        return a * np.sin(r_vec @ x + 0.4)

    def rho(x):
        return float(np.exp(g_fun(x)))

    def drho(x):
        return rho(x) * a * np.cos(r_vec @ x + 0.4) * r_vec

    def d2rho(x):
        dg = a * np.cos(r_vec @ x + 0.4) * r_vec
        d2g = -a * np.sin(r_vec @ x + 0.4) * np.outer(r_vec, r_vec)
        return rho(x) * (np.outer(dg, dg) + d2g)

    def s_fun(x):
        return float(p_vec @ x + b * np.cos(u_vec @ x))

    def ds_fun(x):
        return p_vec - b * np.sin(u_vec @ x) * u_vec

    def d2s_fun(x):
        return -b * np.cos(u_vec @ x) * np.outer(u_vec, u_vec)

    return polar_field(rho=rho, S=s_fun, drho=drho, d2rho=d2rho,
                       dS=ds_fun, d2S=d2s_fun)


def make_wavy_nc(dim=2, seed=7, mass=1.0, charge=0.4):
    """Smoothly varying NC data; derivatives fall back to the FD provider."""
    rng = np.random.default_rng(seed)
    w1 = rng.normal(size=dim)
    w2 = rng.normal(size=dim)
    w3 = rng.normal(size=dim)

    def tau(x):
        t = np.zeros(dim)
        t[0] = 1.0 + 0.1 * np.sin(w1 @ x)
        t[1] = 0.05 * np.cos(w2 @ x)
        return t

    def vierbein(x):
        v = np.zeros((dim, dim - 1))
        for a in range(dim - 1):
            v[0, a] = 0.06 * np.sin(w2 @ x + a)
            v[1 + a, a] = 1.0 + 0.1 * np.cos(w3 @ x + a)
        return v

    def m_field(x):
        return 0.2 * np.sin(w3 @ x) * np.ones(dim) * np.linspace(1.0, 0.5, dim)

    def gauge_bar(x):
        return 0.15 * np.cos(w1 @ x) * np.linspace(0.5, 1.0, dim)

    def phi(x):
        return 0.1 * np.sin(w2 @ x + 0.3)

    return NCBackground(dim=dim, tau=tau, vierbein=vierbein, m_field=m_field,
                        gauge_bar=gauge_bar, phi=phi, mass=mass, charge=charge)


@pytest.fixture
def wavy_rel():
    return make_wavy_rel()


@pytest.fixture
def wavy_polar():
    return make_wavy_polar()


@pytest.fixture
def wavy_nc():
    return make_wavy_nc()


@pytest.fixture
def sample_points():
    rng = np.random.default_rng(11)
    return rng.uniform(-0.8, 0.8, size=(6, 2))
