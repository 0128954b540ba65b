"""Guidance trajectories, particle Lagrangians and constraint monitoring.

Velocity laws through a fixed wave field (the field is never back-reacted):

    relativistic    u^M = g^{MN}(d_N S - q A_N) / m      (proper time,
                    u.g.u = -1 whenever classical HJ holds)
    Newton-Cartan   Xdot ~ w vhat^mu - h^{mu nu}(d_nu S - q A_nu),
                    normalized so tau_mu Xdot^mu = 1     (absolute time)

Lagrangians:

    L_Q = -sqrt(m^2 + Q) sqrt(-Xdot.g.Xdot) + q A.Xdot
    L_nc = w/(2 tau.Xdot) Xdot hbar Xdot + q A.Xdot  [+ Q tau.Xdot/(2w)]

Both carry the coefficients that survive a Legendre-transform round trip:
eliminating the constraint multiplier from the quantum Hamiltonian gives a
unit coefficient on the relativistic square root (so Q = 0 recovers
-m sqrt(-Xdot.g.Xdot)) and Q tau.Xdot/(2w) on the Newton-Cartan quantum
term (so finite-difference momenta reproduce dS on guidance trajectories).
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateVelocity, ImaginaryMass, MassSingular,
                     NodeEncountered, TachyonicInput)
from .field_equations import (momentum_covector, nc_momentum_covector,
                              nc_quantum_potential, nc_quantum_hj_residual,
                              nc_classical_hj_residual, classical_hj_residual_rel,
                              quantum_hj_residual_rel, quantum_potential_rel)
from .fields import EPS_NODE, PolarField
from .geometry import BackgroundRel, check_point, metric_inverse
from .integrators import integrate_adaptive
from .nc_geometry import NCBackground, derive_nc
from .report import ResidualReport, format_float

Array = np.ndarray

MASS_FLOOR = 1e-12


def guidance_velocity_rel(bg: BackgroundRel, f: PolarField, x) -> Array:
    """u^M = g^{MN}(d_N S - q A_N)/m; unit timelike on the mass shell."""
    if bg.mass <= MASS_FLOOR:
        raise MassSingular("relativistic guidance needs a positive mass")
    pt = check_point(x, bg.dim)
    ginv = metric_inverse(bg, pt)
    return ginv @ momentum_covector(bg, f, pt) / bg.mass


def guidance_velocity_nc(nc: NCBackground, f: PolarField, x) -> Array:
    """NC guidance velocity normalized to absolute time, tau.Xdot = 1.

    Proportional to w vhat^mu - h^{mu nu} k_nu; the normalization factor is
    -1/w, so Xdot = -vhat + h k / w.
    """
    pt = check_point(x, nc.dim)
    der = derive_nc(nc, pt)
    w = nc.mass - nc.charge * float(nc.phi(pt))
    if abs(w) <= MASS_FLOOR:
        raise MassSingular(f"effective mass m - q phi = {w:.3e} vanishes")
    k = nc_momentum_covector(nc, f, pt)
    return -der.v_hat + der.h_up @ k / w


@dataclass(frozen=True)
class GuidanceField:
    """A background plus a polar field with a velocity-law selector.

    The law follows the background kind; ``quantum`` picks whether sample
    constraint residuals include the quantum potential.
    """

    background: object
    field: PolarField
    quantum: bool = True

    @property
    def kind(self) -> str:
        if isinstance(self.background, BackgroundRel):
            return "relativistic"
        if isinstance(self.background, NCBackground):
            return "newton-cartan"
        raise TypeError(f"unsupported background {type(self.background)!r}")

    def velocity(self, x) -> Array:
        if self.kind == "relativistic":
            return guidance_velocity_rel(self.background, self.field, x)
        return guidance_velocity_nc(self.background, self.field, x)

    def constraint_residual(self, x) -> float:
        bg, f = self.background, self.field
        if self.kind == "relativistic":
            if self.quantum:
                return quantum_hj_residual_rel(bg, f, x)
            return classical_hj_residual_rel(bg, f, x)
        if self.quantum:
            return nc_quantum_hj_residual(bg, f, x)
        return nc_classical_hj_residual(bg, f, x)

    @property
    def parametrization(self) -> str:
        return "proper_time" if self.kind == "relativistic" else "coordinate_time"


@dataclass(frozen=True)
class Trajectory:
    """Sampled worldline with recorded momenta and constraint defects."""

    parametrization: str
    lambdas: Array          # (K,), strictly increasing
    points: Array           # (K, D)
    momenta: Array          # (K, D), p_M = d_M S at each sample
    constraint: Array       # (K,)

    def __post_init__(self):
        if np.any(np.diff(self.lambdas) <= 0):
            raise ValueError("trajectory parameter must be strictly increasing")
        k = self.lambdas.size
        if self.points.shape[0] != k or self.momenta.shape != self.points.shape \
                or self.constraint.shape != (k,):
            raise ValueError("trajectory arrays disagree in shape")

    def __len__(self) -> int:
        return int(self.lambdas.size)

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def to_csv(self) -> str:
        d = self.dim
        header = ["lambda"] + [f"X{i}" for i in range(d)] \
            + [f"p{i}" for i in range(d)] + ["constraint_residual"]
        lines = [",".join(header)]
        for k in range(len(self)):
            row = [self.lambdas[k], *self.points[k], *self.momenta[k], self.constraint[k]]
            lines.append(",".join(format_float(v) for v in row))
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "parametrization": self.parametrization,
            "lambda": [float(v) for v in self.lambdas],
            "X": [[float(c) for c in p] for p in self.points],
            "p": [[float(c) for c in p] for p in self.momenta],
            "constraint_residual": [float(v) for v in self.constraint],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=1)


def integrate_trajectory(gf: GuidanceField, x0, lambda_span, steps: int = 101,
                         rtol: float = 1e-9, atol: float = 1e-12,
                         max_step_frac: float = 1e-2) -> Trajectory:
    """Integrate the guidance law from x0 over lambda_span.

    ``steps`` is the number of output samples (lambda values, uniformly
    spaced, endpoints included).  Adaptive Dormand-Prince sub-stepping runs
    between samples with relative/absolute tolerances as given and maximum
    step max_step_frac * span.  Raises NodeEncountered (with the partial
    trajectory attached) if the density falls to the node threshold, and
    StepFailure if error control cannot proceed.
    """
    bg = gf.background
    x0 = check_point(x0, bg.dim)
    l0, lf = float(lambda_span[0]), float(lambda_span[1])
    if not lf > l0:
        raise ValueError("lambda span must be increasing")
    if steps < 2:
        raise ValueError("need at least 2 samples")
    gf.field.rho_checked(x0)

    def rhs(_lam, y):
        return gf.velocity(y)

    def node_guard(_lam, y):
        if float(gf.field.rho(y)) <= EPS_NODE:
            raise NodeEncountered(f"density hit node threshold at lambda={_lam:.6g}")

    lambdas = np.linspace(l0, lf, steps)
    span = lf - l0
    samples = [x0]
    try:
        for k in range(1, steps):
            out = integrate_adaptive(rhs, lambdas[k - 1], samples[-1], lambdas[k:k + 1],
                                     rtol=rtol, atol=atol,
                                     max_step=max_step_frac * span,
                                     step_callback=node_guard)
            samples.append(out[0])
    except NodeEncountered as exc:
        if len(samples) >= 2:
            done = len(samples)
            exc.partial = _assemble_trajectory(gf, lambdas[:done], np.array(samples))
        raise
    return _assemble_trajectory(gf, lambdas, np.array(samples))


def _assemble_trajectory(gf: GuidanceField, lambdas, points) -> Trajectory:
    momenta = np.array([gf.field.dS(y) for y in points])
    constraint = np.array([gf.constraint_residual(y) for y in points])
    return Trajectory(parametrization=gf.parametrization, lambdas=lambdas,
                      points=points, momenta=momenta, constraint=constraint)


# ---------------------------------------------------------------------------
# Lagrangians and Legendre checks
# ---------------------------------------------------------------------------

def lagrangian_quantum_rel(bg: BackgroundRel, f: PolarField | None, x, xdot,
                           Q: float | None = None) -> float:
    """L_Q = -sqrt(m^2 + Q) sqrt(-Xdot.g.Xdot) + q A.Xdot.

    Q is evaluated from the field unless supplied directly.
    """
    pt = check_point(x, bg.dim)
    xdot = np.asarray(xdot, dtype=float)
    g = bg.metric_at(pt)
    speed2 = float(xdot @ g @ xdot)
    if speed2 >= 0.0:
        raise TachyonicInput(f"Xdot.g.Xdot = {speed2:.3e} is not timelike")
    if Q is None:
        Q = quantum_potential_rel(bg, f, pt)
    m2q = bg.mass**2 + Q
    if m2q <= 0.0:
        raise ImaginaryMass(f"m^2 + Q = {m2q:.3e} is not positive")
    return float(-np.sqrt(m2q) * np.sqrt(-speed2) + bg.charge * (bg.gauge_at(pt) @ xdot))


def momentum_quantum_rel(bg: BackgroundRel, f: PolarField | None, x, xdot,
                         Q: float | None = None) -> Array:
    """Conjugate momenta of L_Q: sqrt(m^2+Q) g Xdot / sqrt(-Xdot.g.Xdot) + qA."""
    pt = check_point(x, bg.dim)
    xdot = np.asarray(xdot, dtype=float)
    g = bg.metric_at(pt)
    speed2 = float(xdot @ g @ xdot)
    if speed2 >= 0.0:
        raise TachyonicInput("momenta need a timelike velocity")
    if Q is None:
        Q = quantum_potential_rel(bg, f, pt)
    m2q = bg.mass**2 + Q
    if m2q <= 0.0:
        raise ImaginaryMass(f"m^2 + Q = {m2q:.3e} is not positive")
    return np.sqrt(m2q) * (g @ xdot) / np.sqrt(-speed2) + bg.charge * bg.gauge_at(pt)


def lagrangian_nc(nc: NCBackground, f: PolarField | None, x, xdot,
                  quantum: bool = False, Q: float | None = None) -> float:
    """Newton-Cartan particle Lagrangian, classical or quantum.

    Classical: w/(2 tau.Xdot) Xdot hbar Xdot + q A.Xdot.  The quantum flag
    adds Q tau.Xdot / (2 w).  Inputs with tau.Xdot <= 0 are rejected: the
    absolute-time gauge does not extend to backward-in-time motion.
    """
    pt = check_point(x, nc.dim)
    xdot = np.asarray(xdot, dtype=float)
    der = derive_nc(nc, pt)
    tau = np.asarray(nc.tau(pt), dtype=float)
    tdot = float(tau @ xdot)
    if tdot <= MASS_FLOOR:
        raise DegenerateVelocity(f"tau.Xdot = {tdot:.3e} must be positive")
    w = nc.mass - nc.charge * float(nc.phi(pt))
    if abs(w) <= MASS_FLOOR:
        raise MassSingular(f"effective mass m - q phi = {w:.3e} vanishes")
    a_red = nc.reduced_gauge_at(pt)
    val = w / (2.0 * tdot) * float(xdot @ der.hbar_down @ xdot) \
        + nc.charge * float(a_red @ xdot)
    if quantum:
        if Q is None:
            Q = nc_quantum_potential(nc, f, pt)
        val += Q * tdot / (2.0 * w)
    return float(val)


def momentum_nc_classical(nc: NCBackground, x, xdot) -> Array:
    """Conjugate momenta of the classical NC Lagrangian:

    p_mu = -w/(2 (tau.Xdot)^2) tau_mu (Xdot hbar Xdot)
           + w hbar_{mu nu} Xdot^nu / (tau.Xdot) + q A_mu.
    """
    pt = check_point(x, nc.dim)
    xdot = np.asarray(xdot, dtype=float)
    der = derive_nc(nc, pt)
    tau = np.asarray(nc.tau(pt), dtype=float)
    tdot = float(tau @ xdot)
    if tdot <= MASS_FLOOR:
        raise DegenerateVelocity(f"tau.Xdot = {tdot:.3e} must be positive")
    w = nc.mass - nc.charge * float(nc.phi(pt))
    hbx = der.hbar_down @ xdot
    return (-w / (2.0 * tdot**2) * float(xdot @ hbx) * tau
            + w * hbx / tdot + nc.charge * nc.reduced_gauge_at(pt))


def hamiltonian_constraint_residual(traj: Trajectory, gf: GuidanceField) -> ResidualReport:
    """Constraint defect at every trajectory sample.

    Relativistic: (p - qA) g^{-1} (p - qA) + m^2 + Q;
    Newton-Cartan: 2 w vhat.(p - qA) - (p - qA) h (p - qA) - 2 Phi w^2 + Q,
    with p the recorded sample momenta (Q dropped when gf.quantum is off).
    """
    bg = gf.background
    values = []
    for pt, p in zip(traj.points, traj.momenta):
        if gf.kind == "relativistic":
            k = p - bg.charge * bg.gauge_at(pt)
            ginv = metric_inverse(bg, pt)
            val = float(k @ ginv @ k + bg.mass**2)
            if gf.quantum:
                val += quantum_potential_rel(bg, gf.field, pt)
        else:
            der = derive_nc(bg, pt)
            w = bg.mass - bg.charge * float(bg.phi(pt))
            k = p - bg.charge * bg.reduced_gauge_at(pt)
            val = float(2.0 * w * (der.v_hat @ k) - k @ der.h_up @ k
                        - 2.0 * der.Phi * w**2)
            if gf.quantum:
                val += nc_quantum_potential(bg, gf.field, pt)
        values.append(val)
    return ResidualReport.from_samples("hamiltonian-constraint", traj.points, values)
