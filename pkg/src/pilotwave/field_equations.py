"""Pointwise residuals of every field-level equation of the engine.

Relativistic side (Lorentzian background, signature -,+,...,+):

    classical HJ     (dS - qA) g^{-1} (dS - qA) + m^2
    current          J^M = rho sqrt(-g) g^{MN} (d_N S - q A_N)
    continuity       d_M J^M
    quantum potential  Q = -(1/4 rho^2) g^{MN} d_M rho d_N rho
                         - (1/sqrt(-g)) d_M [sqrt(-g) g^{MN} d_N rho / (2 rho)]
    quantum HJ       classical + Q
    linear wave      (1/sqrt(-g)) D_M [sqrt(-g) g^{MN} D_N psi] - m^2 psi
    nonlinear classical wave equation for psi_clas = sqrt(rho) e^{iS}

Newton-Cartan side (frame data as in nc_geometry, w = m - q phi):

    classical HJ     2 w vhat.(dS - qA) - (dS - qA) h (dS - qA) - 2 w^2 Phi
    quantum potential  Q = (1/4 rho^2) h drho drho
                         + (1/2e) d_mu [(1/rho) e h^{mu nu} d_nu rho]
    quantum HJ       classical + Q
    continuity       d_mu [e w rho vhat^mu] - d_mu [e rho h^{mu nu}(d_nu S - q A_nu)]
    linear wave      variational equation of the quadratic psi action

All divergences are expanded by the product rule through the derivative
providers, so each residual here has an independent nested-finite-difference
oracle (evaluate the whole bracket at shifted points) to test against.

The ``*_printed`` variants reproduce equation forms that fail their own
consistency checks (a factor slip in the relativistic quantum potential's
divergence term, a phase-covariance typo and mass-sign flip in the
nonlinear classical wave equation, a missing density factor in the complex
form of the nonrelativistic classical action).  They are kept callable so
the discrepancy can be reported rather than silently patched; the operating
forms are the ones that make polar and complex descriptions equivalent.
"""
from __future__ import annotations

import numpy as np

from .errors import NodeEncountered
from .fields import EPS_NODE, ComplexField, PolarField
from .geometry import (BackgroundRel, check_point, inverse_metric_derivative,
                       metric_inverse, volume_element, volume_element_derivative)
from .nc_geometry import NCBackground, derive_nc, derive_nc_partials

Array = np.ndarray


# ---------------------------------------------------------------------------
# relativistic backgrounds
# ---------------------------------------------------------------------------

def _rel_point_data(bg: BackgroundRel, x):
    """Metric data bundle reused by the relativistic residuals."""
    pt = check_point(x, bg.dim)
    g = bg.metric_at(pt)
    ginv = metric_inverse(bg, pt)
    dg = bg.metric_derivative_at(pt)
    vol = volume_element(bg, pt)
    dvol = volume_element_derivative(bg, pt, ginv=ginv, dg=dg)
    dginv = inverse_metric_derivative(bg, pt, ginv=ginv, dg=dg)
    return pt, g, ginv, vol, dvol, dginv


def momentum_covector(bg: BackgroundRel, f: PolarField, x) -> Array:
    """k_M = d_M S - q A_M."""
    pt = check_point(x, bg.dim)
    return np.asarray(f.dS(pt), dtype=float) - bg.charge * bg.gauge_at(pt)


def classical_hj_residual_rel(bg: BackgroundRel, f: PolarField, x) -> float:
    """(dS - qA) g^{-1} (dS - qA) + m^2 at x."""
    pt = check_point(x, bg.dim)
    ginv = metric_inverse(bg, pt)
    k = momentum_covector(bg, f, pt)
    return float(k @ ginv @ k + bg.mass**2)


def ensemble_current(bg: BackgroundRel, f: PolarField, x) -> Array:
    """J^M = rho sqrt(-g) g^{MN}(d_N S - q A_N)."""
    pt = check_point(x, bg.dim)
    ginv = metric_inverse(bg, pt)
    vol = volume_element(bg, pt)
    k = momentum_covector(bg, f, pt)
    return float(f.rho(pt)) * vol * (ginv @ k)


def continuity_residual_rel(bg: BackgroundRel, f: PolarField, x) -> float:
    """d_M [rho sqrt(-g) g^{MN}(d_N S - q A_N)] by the product rule."""
    pt, _, ginv, vol, dvol, dginv = _rel_point_data(bg, x)
    k = momentum_covector(bg, f, pt)
    rho = float(f.rho(pt))
    drho = np.asarray(f.drho(pt), dtype=float)
    dk = np.asarray(f.d2S(pt), dtype=float) - bg.charge * bg.gauge_derivative_at(pt)
    gk = ginv @ k
    term = drho @ gk * vol
    term += rho * (dvol @ gk)
    term += rho * vol * np.einsum("mmn,n->", dginv, k)
    term += rho * vol * np.einsum("mn,mn->", ginv, dk)
    return float(term)


def _quantum_potential_rel(bg, f, x, bracket_coeff):
    pt, _, ginv, vol, dvol, dginv = _rel_point_data(bg, x)
    rho = f.rho_checked(pt)
    drho = np.asarray(f.drho(pt), dtype=float)
    d2rho = np.asarray(f.d2rho(pt), dtype=float)
    first = -(drho @ ginv @ drho) / (4.0 * rho**2)
    # d_M [sqrt(-g) g^{MN} c * drho_N / rho] expanded through the providers
    a = bracket_coeff * drho / rho
    da = bracket_coeff * (d2rho / rho - np.outer(drho, drho) / rho**2)
    div = dvol @ (ginv @ a)
    div += vol * np.einsum("mmn,n->", dginv, a)
    div += vol * np.einsum("mn,mn->", ginv, da)
    return float(first - div / vol)


def quantum_potential_rel(bg: BackgroundRel, f: PolarField, x) -> float:
    """Relativistic quantum potential (variationally consistent form).

    Q = -(1/4 rho^2) g drho drho - (1/sqrt(-g)) d[sqrt(-g) g drho/(2 rho)],
    which equals -box(sqrt rho)/sqrt(rho).  Vanishes for constant rho.
    """
    return _quantum_potential_rel(bg, f, x, bracket_coeff=0.5)


def quantum_potential_rel_printed(bg: BackgroundRel, f: PolarField, x) -> float:
    """Variant with drho/(4 rho) inside the divergence bracket.

    Kept for comparison: it breaks the equivalence between the linear wave
    equation and the quantum HJ + continuity pair whenever drho != 0.
    """
    return _quantum_potential_rel(bg, f, x, bracket_coeff=0.25)


def quantum_hj_residual_rel(bg: BackgroundRel, f: PolarField, x) -> float:
    """(dS - qA) g^{-1} (dS - qA) + m^2 + Q."""
    return classical_hj_residual_rel(bg, f, x) + quantum_potential_rel(bg, f, x)


def _covariant_derivative_data(bg, cf, pt):
    """psi, Dpsi_N and d_M(Dpsi_N) at pt, with D = d - i q A."""
    psi = complex(cf.psi(pt))
    dpsi = np.asarray(cf.dpsi(pt), dtype=complex)
    d2psi = np.asarray(cf.d2psi(pt), dtype=complex)
    a_cov = bg.gauge_at(pt)
    da = bg.gauge_derivative_at(pt)
    q = bg.charge
    dcov = dpsi - 1j * q * a_cov * psi
    # d_M (Dpsi)_N = d2psi_MN - i q (dA_MN psi + A_N dpsi_M)
    ddcov = d2psi - 1j * q * (da * psi + np.outer(dpsi, a_cov))
    return psi, dcov, ddcov, a_cov, q


def _gauged_divergence(vec, dvec_diag, a_cov, q, charge_sign=+1):
    """D_M V^M = d_M V^M - i q s A_M V^M for a charge-s vector density."""
    return dvec_diag - 1j * q * charge_sign * (a_cov @ vec)


def linear_kg_residual(bg: BackgroundRel, cf: ComplexField, x) -> complex:
    """(1/sqrt(-g)) D_M [sqrt(-g) g^{MN} D_N psi] - m^2 psi.

    Density-normalized so plane-wave checks read the same on any
    background.
    """
    pt, _, ginv, vol, dvol, dginv = _rel_point_data(bg, x)
    psi, dcov, ddcov, a_cov, q = _covariant_derivative_data(bg, cf, pt)
    vec = vol * (ginv @ dcov)
    dvec_diag = (dvol @ (ginv @ dcov)
                 + vol * np.einsum("mmn,n->", dginv, dcov)
                 + vol * np.einsum("mn,mn->", ginv, ddcov))
    div = _gauged_divergence(vec, dvec_diag, a_cov, q)
    return complex(div / vol - bg.mass**2 * psi)


def _classical_field_terms(bg, cf, x, printed):
    pt, _, ginv, vol, dvol, dginv = _rel_point_data(bg, x)
    psi, dcov, ddcov, a_cov, q = _covariant_derivative_data(bg, cf, pt)
    if abs(psi) ** 2 <= EPS_NODE:
        raise NodeEncountered(f"|psi|^2 = {abs(psi)**2:.3e} below node threshold")
    psis = np.conj(psi)
    dcov_c = np.conj(dcov)
    ddcov_c = np.conj(ddcov)
    m2 = bg.mass**2

    # T1 = (1/2) D_M [sqrt(-g) g^{MN} D_N psi]
    vec1 = vol * (ginv @ dcov)
    dvec1 = (dvol @ (ginv @ dcov)
             + vol * np.einsum("mmn,n->", dginv, dcov)
             + vol * np.einsum("mn,mn->", ginv, ddcov))
    t1 = 0.5 * _gauged_divergence(vec1, dvec1, a_cov, q)

    t2 = vol / (4.0 * psi) * (dcov @ ginv @ dcov)

    if printed:
        t3 = m2 * vol * psi
        t4 = -(vol * psi / (4.0 * psis)) * (dcov_c @ ginv @ dcov_c)
    else:
        t3 = -m2 * vol * psi
        t4 = -(vol * psi / (4.0 * psis**2)) * (dcov_c @ ginv @ dcov_c)

    # T5 = -(1/2) D_M [(psi/psi*) sqrt(-g) g^{MN} (D_N psi)*]
    ratio = psi / psis
    dratio = np.asarray(cf.dpsi(pt), dtype=complex) / psis \
        - psi * np.conj(np.asarray(cf.dpsi(pt), dtype=complex)) / psis**2
    w_vec = vol * (ginv @ dcov_c)
    dw_diag = (dvol @ (ginv @ dcov_c)
               + vol * np.einsum("mmn,n->", dginv, dcov_c)
               + vol * np.einsum("mn,mn->", ginv, ddcov_c))
    interior = ratio * w_vec
    dinterior_diag = dratio @ w_vec + ratio * dw_diag
    t5 = -0.5 * _gauged_divergence(interior, dinterior_diag, a_cov, q)

    return (t1 + t2 + t3 + t4 + t5) / vol


def classical_field_residual(bg: BackgroundRel, cf: ComplexField, x) -> complex:
    """Nonlinear classical wave residual for psi_clas, density-normalized.

    Derived term by term from the (rho, S) classical ensemble action, so it
    vanishes exactly when the polar data satisfies classical HJ plus
    continuity:

        residual = psi [ -classical_hj + i continuity/(rho sqrt(-g)) ].

    Superpositions of distinct solutions do not satisfy it: the equation is
    not linear.
    """
    return complex(_classical_field_terms(bg, cf, x, printed=False))


def classical_field_residual_printed(bg: BackgroundRel, cf: ComplexField, x) -> complex:
    """Literal transcription variant of the nonlinear classical equation.

    Differs from classical_field_residual in the sign of the mass term and
    a psi*^2 -> psi* slip that breaks phase covariance; it does not vanish
    even on single classical solutions.  Exposed so the discrepancy can be
    reported.
    """
    return complex(_classical_field_terms(bg, cf, x, printed=True))


def classical_field_equation_report(bg: BackgroundRel, cf: ComplexField, points):
    """Compare the operating and literal forms over sample points.

    Returns reports for both forms plus their pointwise difference; the
    difference is the documented discrepancy of the literal transcription.
    """
    from .report import ResidualReport

    pts = np.atleast_2d(np.asarray(points, dtype=float))
    derived = [classical_field_residual(bg, cf, p) for p in pts]
    printed = [classical_field_residual_printed(bg, cf, p) for p in pts]
    diff = [abs(a - b) for a, b in zip(printed, derived)]
    return {
        "derived": ResidualReport.from_samples("classical-field-derived", pts, derived),
        "printed": ResidualReport.from_samples("classical-field-printed", pts, printed),
        "discrepancy": ResidualReport.from_samples("classical-field-printed-discrepancy",
                                                   pts, diff),
    }


# ---------------------------------------------------------------------------
# Newton-Cartan backgrounds
# ---------------------------------------------------------------------------

FORM_AGREEMENT_TOL = 1e-10


def _nc_point_data(nc: NCBackground, x):
    pt = check_point(x, nc.dim)
    der = derive_nc(nc, pt)
    w = nc.mass - nc.charge * float(nc.phi(pt))
    return pt, der, w


def nc_momentum_covector(nc: NCBackground, f: PolarField, x) -> Array:
    """k_mu = d_mu S - q A_mu with the reduced gauge field A = Abar - phi M."""
    pt = check_point(x, nc.dim)
    return np.asarray(f.dS(pt), dtype=float) - nc.charge * nc.reduced_gauge_at(pt)


def nc_classical_hj_forms(nc: NCBackground, f: PolarField, x) -> tuple[float, float]:
    """Both algebraic forms of the classical HJ expression.

    The boost-invariant form uses (vhat, Phi); the frame form uses (v, M)
    with K = k + w M, oriented to match.  They agree identically.
    """
    pt, der, w = _nc_point_data(nc, x)
    k = nc_momentum_covector(nc, f, pt)
    vhat_form = 2.0 * w * (der.v_hat @ k) - k @ der.h_up @ k - 2.0 * w**2 * der.Phi
    m = np.asarray(nc.m_field(pt), dtype=float)
    big_k = k + w * m
    vm_form = 2.0 * w * (der.v @ big_k) - big_k @ der.h_up @ big_k
    return float(vhat_form), float(vm_form)


def nc_classical_hj_residual(nc: NCBackground, f: PolarField, x) -> float:
    """2 w vhat.k - k h k - 2 w^2 Phi with k = dS - qA.

    Also evaluates the equivalent (v, M) form and refuses to return if the
    two disagree beyond tolerance.
    """
    vhat_form, vm_form = nc_classical_hj_forms(nc, f, x)
    scale = max(1.0, abs(vhat_form), abs(vm_form))
    if abs(vhat_form - vm_form) > FORM_AGREEMENT_TOL * scale:
        raise RuntimeError(
            f"HJ form mismatch: {vhat_form!r} vs {vm_form!r}")
    return vhat_form


def nc_quantum_potential(nc: NCBackground, f: PolarField, x) -> float:
    """Q = (1/4 rho^2) h drho drho + (1/2e) d_mu[(1/rho) e h^{mu nu} d_nu rho]."""
    pt, der, _ = _nc_point_data(nc, x)
    parts = derive_nc_partials(nc, pt)
    rho = f.rho_checked(pt)
    drho = np.asarray(f.drho(pt), dtype=float)
    d2rho = np.asarray(f.d2rho(pt), dtype=float)
    first = (drho @ der.h_up @ drho) / (4.0 * rho**2)
    hdr = der.h_up @ drho
    div = -(drho @ hdr) / rho**2
    div += (parts["vol"] @ hdr) / (rho * der.vol)
    div += np.einsum("mmn,n->", parts["h_up"], drho) / rho
    div += np.einsum("mn,mn->", der.h_up, d2rho) / rho
    return float(first + 0.5 * div)


def nc_quantum_hj_residual(nc: NCBackground, f: PolarField, x) -> float:
    """Classical NC HJ residual plus the quantum potential."""
    return nc_classical_hj_residual(nc, f, x) + nc_quantum_potential(nc, f, x)


def nc_continuity_residual(nc: NCBackground, f: PolarField, x) -> float:
    """d_mu[e w rho vhat^mu] - d_mu[e rho h^{mu nu} k_nu], product rule."""
    pt, der, w = _nc_point_data(nc, x)
    parts = derive_nc_partials(nc, pt)
    rho = float(f.rho(pt))
    drho = np.asarray(f.drho(pt), dtype=float)
    k = nc_momentum_covector(nc, f, pt)
    dk = np.asarray(f.d2S(pt), dtype=float) - nc.charge * nc.reduced_gauge_derivative_at(pt)
    e = der.vol
    de = parts["vol"]
    dw = parts["w"]

    t1 = (de @ der.v_hat) * w * rho
    t1 += e * rho * (dw @ der.v_hat)
    t1 += e * w * (drho @ der.v_hat)
    t1 += e * w * rho * np.einsum("mm->", parts["v_hat"])

    hk = der.h_up @ k
    t2 = (de @ hk) * rho
    t2 += e * (drho @ hk)
    t2 += e * rho * np.einsum("mmn,n->", parts["h_up"], k)
    t2 += e * rho * np.einsum("mn,mn->", der.h_up, dk)
    return float(t1 - t2)


def nc_schrodinger_residual(nc: NCBackground, cf: ComplexField, x) -> complex:
    """Variational residual of the quadratic wave action on NC data.

    In flat data with w = m this reduces to 2 i m d_t psi + laplacian(psi),
    i.e. 2m times the free Schrodinger operator; the residual here is
    divided by the volume element e so that normalization carries over to
    curved data.  Linear in psi by construction.
    """
    pt, der, w = _nc_point_data(nc, x)
    parts = derive_nc_partials(nc, pt)
    psi = complex(cf.psi(pt))
    dpsi = np.asarray(cf.dpsi(pt), dtype=complex)
    d2psi = np.asarray(cf.d2psi(pt), dtype=complex)
    a_red = nc.reduced_gauge_at(pt)
    da_red = nc.reduced_gauge_derivative_at(pt)
    q = nc.charge
    e = der.vol
    de = parts["vol"]
    dw = parts["w"]
    dvhat_trace = np.einsum("mm->", parts["v_hat"])

    dcov = dpsi - 1j * q * a_red * psi
    ddcov = d2psi - 1j * q * (da_red * psi + np.outer(dpsi, a_red))

    # -i e w vhat^mu D_mu psi
    r = -1j * e * w * (der.v_hat @ dcov)
    # -i D_mu[ e w vhat^mu psi ]
    div_evp = ((de @ der.v_hat) * w * psi
               + e * (dw @ der.v_hat) * psi
               + e * w * dvhat_trace * psi
               + e * w * (der.v_hat @ dpsi))
    r += -1j * div_evp - q * (a_red @ der.v_hat) * e * w * psi
    # + D_nu[ e h^{nu mu} D_mu psi ]
    hdc = der.h_up @ dcov
    div_h = ((de @ hdc)
             + e * np.einsum("mmn,n->", parts["h_up"], dcov)
             + e * np.einsum("mn,mn->", der.h_up, ddcov))
    r += div_h - 1j * q * (a_red @ hdc) * e
    # - 2 e Phi w^2 psi
    r += -2.0 * e * der.Phi * w**2 * psi
    return complex(r / e)


def nc_classical_action_density_polar(nc: NCBackground, f: PolarField, x) -> float:
    """Integrand of the classical ensemble action in (rho, S) variables:
    e (2 w rho vhat.k - 2 Phi w^2 rho - rho h k k)."""
    pt, der, w = _nc_point_data(nc, x)
    rho = float(f.rho(pt))
    k = nc_momentum_covector(nc, f, pt)
    val = 2.0 * w * rho * (der.v_hat @ k) - 2.0 * der.Phi * w**2 * rho \
        - rho * (k @ der.h_up @ k)
    return float(der.vol * val)


def nc_classical_action_density_complex_printed(nc: NCBackground, cf: ComplexField,
                                                x) -> complex:
    """Literal complex form of the classical action integrand.

    The nonlinear terms carry 1/(psi psi) and 1/(psi* psi*) denominators as
    transcribed; the polar form above is the arbiter, and the two differ by
    a missing |psi|^2 factor in those terms whenever rho != 1 (see
    nc_classical_action_equivalence_report).
    """
    pt, der, w = _nc_point_data(nc, x)
    psi = complex(cf.psi(pt))
    if abs(psi) ** 2 <= EPS_NODE:
        raise NodeEncountered("node in classical action density")
    dpsi = np.asarray(cf.dpsi(pt), dtype=complex)
    a_red = nc.reduced_gauge_at(pt)
    q = nc.charge
    dcov = dpsi - 1j * q * a_red * psi
    dcov_c = np.conj(dcov)
    psis = np.conj(psi)
    h = der.h_up
    val = 1j * w * (der.v_hat @ (psi * dcov_c - psis * dcov))
    val += -2.0 * der.Phi * w**2 * psi * psis
    val += -0.5 * (dcov @ h @ dcov_c)
    val += 0.25 * (dcov @ h @ dcov) / (psi * psi)
    val += 0.25 * (dcov_c @ h @ dcov_c) / (psis * psis)
    return complex(der.vol * val)


def nc_classical_action_equivalence_report(nc: NCBackground, f: PolarField, points):
    """Pointwise gap between the polar and literal-complex action densities."""
    from .fields import complex_view
    from .report import ResidualReport

    cf = complex_view(f)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    gaps = [abs(nc_classical_action_density_complex_printed(nc, cf, p)
                - nc_classical_action_density_polar(nc, f, p)) for p in pts]
    return ResidualReport.from_samples("nc-classical-action-form-gap", pts, gaps)
