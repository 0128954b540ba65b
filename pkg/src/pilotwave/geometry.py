"""Lorentzian spacetime backgrounds: metric, gauge field, derivatives.

A background packages the covariant metric g_MN, the gauge covector A_M and
the particle parameters (mass, charge).  Everything is a pure function of
the coordinate point, so backgrounds are safe to share between workers.
Signature convention is mostly-plus (-, +, ..., +); units are hbar = c = 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import SignatureViolation, SingularMetric
from .stencils import DEFAULT_FIRST, DerivativeStencil, jacobian

Array = np.ndarray

SYMMETRY_TOL = 1e-12
DET_FLOOR = 1e-14
INVERSE_TOL = 1e-10


def check_point(x, dim: int | None = None) -> Array:
    """Validate a coordinate point and return it as a float array."""
    pt = np.asarray(x, dtype=float)
    if pt.ndim != 1:
        raise ValueError(f"point must be one-dimensional, got shape {pt.shape}")
    if pt.size < 2:
        raise ValueError("points live in spacetime: need at least 2 coordinates")
    if dim is not None and pt.size != dim:
        raise ValueError(f"point has dimension {pt.size}, expected {dim}")
    if not np.all(np.isfinite(pt)):
        raise ValueError("point has non-finite coordinates")
    return pt


@dataclass(frozen=True)
class BackgroundRel:
    """D-dimensional Lorentzian background with particle parameters.

    ``metric(x)`` returns the covariant components g_MN and ``gauge(x)`` the
    covector A_M.  Analytic derivative closures are optional; when absent,
    central differences with ``first_stencil`` are used.  Index convention
    for the derivative arrays: axis 0 is the derivative direction, i.e.
    ``dmetric(x)[M] = d_M g`` and ``dgauge(x)[M, N] = d_M A_N``.
    """

    dim: int
    metric: Callable[[Array], Array]
    gauge: Callable[[Array], Array]
    mass: float = 1.0
    charge: float = 0.0
    dmetric: Callable[[Array], Array] | None = None
    dgauge: Callable[[Array], Array] | None = None
    first_stencil: DerivativeStencil = DEFAULT_FIRST

    @classmethod
    def minkowski(cls, dim: int = 4, mass: float = 1.0, charge: float = 0.0,
                  gauge: Callable[[Array], Array] | None = None,
                  dgauge: Callable[[Array], Array] | None = None) -> "BackgroundRel":
        eta = np.diag([-1.0] + [1.0] * (dim - 1))
        zero_dg = np.zeros((dim, dim, dim))
        if gauge is None:
            gauge = lambda x: np.zeros(dim)
            dgauge = lambda x: np.zeros((dim, dim))
        return cls(dim=dim, metric=lambda x: eta.copy(), gauge=gauge,
                   mass=mass, charge=charge,
                   dmetric=lambda x: zero_dg.copy(), dgauge=dgauge)

    @classmethod
    def constant(cls, g, A=None, mass: float = 1.0, charge: float = 0.0) -> "BackgroundRel":
        g = np.asarray(g, dtype=float)
        dim = g.shape[0]
        A = np.zeros(dim) if A is None else np.asarray(A, dtype=float)
        zero_dg = np.zeros((dim, dim, dim))
        zero_da = np.zeros((dim, dim))
        return cls(dim=dim, metric=lambda x: g.copy(), gauge=lambda x: A.copy(),
                   mass=mass, charge=charge,
                   dmetric=lambda x: zero_dg.copy(), dgauge=lambda x: zero_da.copy())

    def metric_at(self, x) -> Array:
        pt = check_point(x, self.dim)
        g = np.asarray(self.metric(pt), dtype=float)
        if g.shape != (self.dim, self.dim):
            raise ValueError(f"metric has shape {g.shape}, expected {(self.dim, self.dim)}")
        if np.max(np.abs(g - g.T)) >= SYMMETRY_TOL:
            raise ValueError("metric is not symmetric at the sampled point")
        return g

    def gauge_at(self, x) -> Array:
        pt = check_point(x, self.dim)
        return np.asarray(self.gauge(pt), dtype=float)

    def metric_derivative_at(self, x) -> Array:
        """Full derivative stack, shape (D, D, D): out[M] = d_M g."""
        pt = check_point(x, self.dim)
        if self.dmetric is not None:
            return np.asarray(self.dmetric(pt), dtype=float)
        return jacobian(self.metric, pt, self.first_stencil)

    def gauge_derivative_at(self, x) -> Array:
        pt = check_point(x, self.dim)
        if self.dgauge is not None:
            return np.asarray(self.dgauge(pt), dtype=float)
        return jacobian(self.gauge, pt, self.first_stencil)


def lorentz_signature_count(g: Array) -> int:
    """Number of negative eigenvalues of a symmetric matrix."""
    return int(np.sum(np.linalg.eigvalsh(g) < 0.0))


def metric_inverse(bg: BackgroundRel, x) -> Array:
    """Contravariant metric g^{MN} at x.

    Raises SingularMetric when |det g| is below the floor (or the inverse
    fails its own residual check) and SignatureViolation when the metric
    does not have exactly one negative eigenvalue.
    """
    g = bg.metric_at(x)
    det = np.linalg.det(g)
    if abs(det) < DET_FLOOR:
        raise SingularMetric(f"|det g| = {abs(det):.3e} below {DET_FLOOR:.0e}")
    if lorentz_signature_count(g) != 1:
        raise SignatureViolation("metric must have exactly one negative eigenvalue")
    ginv = np.linalg.inv(g)
    ginv = 0.5 * (ginv + ginv.T)
    residual = np.max(np.abs(g @ ginv - np.eye(bg.dim)))
    if residual >= INVERSE_TOL:
        raise SingularMetric(f"inverse residual {residual:.3e} exceeds {INVERSE_TOL:.0e}")
    return ginv


def volume_element(bg: BackgroundRel, x) -> float:
    """sqrt(-det g); requires det g < 0."""
    g = bg.metric_at(x)
    det = np.linalg.det(g)
    if det >= 0.0:
        raise SignatureViolation(f"det g = {det:.3e} is not negative")
    return float(np.sqrt(-det))


def metric_derivative(bg: BackgroundRel, x, m: int) -> Array:
    """d_m g at x, analytic when a closure is supplied, else central FD."""
    if not 0 <= m < bg.dim:
        raise ValueError(f"derivative index {m} out of range for D={bg.dim}")
    return bg.metric_derivative_at(x)[m]


def inverse_metric_derivative(bg: BackgroundRel, x, ginv: Array | None = None,
                              dg: Array | None = None) -> Array:
    """d_M g^{PQ} = -(g^{-1} d_M g g^{-1}), stacked on axis 0."""
    if ginv is None:
        ginv = metric_inverse(bg, x)
    if dg is None:
        dg = bg.metric_derivative_at(x)
    return -np.einsum("pa,mab,bq->mpq", ginv, dg, ginv)


def volume_element_derivative(bg: BackgroundRel, x, ginv: Array | None = None,
                              dg: Array | None = None) -> Array:
    """d_M sqrt(-g) = (1/2) sqrt(-g) tr(g^{-1} d_M g), shape (D,)."""
    if ginv is None:
        ginv = metric_inverse(bg, x)
    if dg is None:
        dg = bg.metric_derivative_at(x)
    vol = volume_element(bg, x)
    return 0.5 * vol * np.einsum("ab,mba->m", ginv, dg)
