"""Inverse-linear metric paths phi_t = (I - t psi)^-1 and their curvature.

kappa(t) is the unnormalised curvature of phi_t^-1 X and phi_t^-1 Y in the
metric phi_t. It has two independent evaluations here: ``kappa_direct``
runs the general curvature formula, ``kappa_closed_form`` uses the cubic
polynomial plus the collapsed tail -3/4 t^4 <phi_t D, D>.
"""

import math
from dataclasses import dataclass

import numpy as np

from .algebra import LieAlgebra
from .curvature import puttmann_curvature
from .errors import OutOfDomain
from .numerics import check_symmetric, require_positive_definite, spd_inverse, sym_eigen

GRID_FRACTION = 0.9


@dataclass(frozen=True, eq=False)
class InverseLinearPath:
    psi: np.ndarray
    t_min: float  # open lower end, -inf allowed
    t_max: float  # open upper end, +inf allowed
    eigenvalues: np.ndarray = None

    @property
    def domain(self):
        return (self.t_min, self.t_max)

    def contains(self, t: float) -> bool:
        if not (self.t_min < t < self.t_max):
            return False
        w = self.eigenvalues if self.eigenvalues is not None else sym_eigen(self.psi).eigenvalues
        return bool(np.all(1.0 - t * w > 0.0))

    def require(self, t: float) -> None:
        if not self.contains(t):
            raise OutOfDomain(f"t={float(t)!r} outside path domain ({float(self.t_min)}, {float(self.t_max)})")


def path_from_psi(psi) -> InverseLinearPath:
    psi = check_symmetric(psi)
    psi = 0.5 * (psi + psi.T)
    w = sym_eigen(psi).eigenvalues
    t_max = 1.0 / w[-1] if w[-1] > 0 else math.inf
    t_min = 1.0 / w[0] if w[0] < 0 else -math.inf
    return InverseLinearPath(psi, t_min, t_max, w)


def path_from_metric(phi) -> InverseLinearPath:
    """The unique path with phi_0 = I and phi_1 = phi, i.e. psi = I - phi^-1."""
    phi = require_positive_definite(phi, name="phi")
    return path_from_psi(np.eye(phi.shape[0]) - spd_inverse(phi))


def _as_path(path_or_psi) -> InverseLinearPath:
    if isinstance(path_or_psi, InverseLinearPath):
        return path_or_psi
    return path_from_psi(path_or_psi)


def phi_at(path, t: float) -> np.ndarray:
    path = _as_path(path)
    path.require(t)
    n = path.psi.shape[0]
    phi = np.linalg.solve(np.eye(n) - t * path.psi, np.eye(n))
    return 0.5 * (phi + phi.T)


def default_grid(path, count: int = 50, fraction: float = GRID_FRACTION) -> np.ndarray:
    """Grid from 0 to ``fraction`` of the upper domain bound (to 1 if unbounded)."""
    path = _as_path(path)
    stop = fraction * path.t_max if math.isfinite(path.t_max) else 1.0
    return np.linspace(0.0, stop, count)


# --- bracket quantities and Taylor coefficients -----------------------------


@dataclass(frozen=True)
class BracketQuantities:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray


@dataclass(frozen=True)
class TaylorCoefficients:
    alpha: float
    beta: float
    gamma: float
    delta: float

    def as_tuple(self):
        return (self.alpha, self.beta, self.gamma, self.delta)


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def bracket_quantities(algebra: LieAlgebra, psi, X, Y) -> BracketQuantities:
    """A = [psi X, Y] + [X, psi Y], B = [psi X, psi Y], C = [psi X, Y] + [psi Y, X],
    D = psi^2 [X, Y] - psi A + B. Broadcasts over leading axes."""
    psi = np.asarray(psi, dtype=float)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    br = algebra.bracket
    PX, PY = X @ psi, Y @ psi
    XY = br(X, Y)
    A = br(PX, Y) + br(X, PY)
    B = br(PX, PY)
    C = br(PX, Y) + br(PY, X)
    D = XY @ psi @ psi - A @ psi + B
    return BracketQuantities(A, B, C, D)


def coefficients_with_quantities(algebra, psi, X, Y):
    """(alpha, beta, gamma, delta, BracketQuantities), broadcasting over pairs."""
    psi = np.asarray(psi, dtype=float)
    br = algebra.bracket
    q = bracket_quantities(algebra, psi, X, Y)
    A, B, C = q.A, q.B, q.C
    PX, PY = X @ psi, Y @ psi
    XY = br(X, Y)
    P1 = XY @ psi
    P2 = P1 @ psi
    P3 = P2 @ psi
    U = br(PX, X)
    V = br(PY, Y)
    alpha = 0.25 * _dot(XY, XY)
    beta = -0.75 * _dot(P1, XY)
    gamma = (
        -0.75 * _dot(P1, P1)
        + 1.5 * _dot(P1, A)
        - 0.5 * _dot(XY, B)
        - 0.25 * _dot(A, A)
        + 0.25 * _dot(C, C)
        - _dot(U, V)
    )
    delta = (
        -0.75 * _dot(P3, XY)
        + 1.5 * _dot(P2, A)
        - 1.5 * _dot(P1, B)
        - 0.75 * _dot(A @ psi, A)
        - 0.25 * _dot(C @ psi, C)
        + _dot(U @ psi, V)
        + _dot(A, B)
    )
    return alpha, beta, gamma, delta, q


def taylor_coefficients(algebra: LieAlgebra, psi, X, Y) -> TaylorCoefficients:
    """Coefficients of the cubic part of kappa(t); note kappa'''(0) = 6 delta."""
    a, b, g, d, _ = coefficients_with_quantities(algebra, psi, np.asarray(X, float), np.asarray(Y, float))
    if np.ndim(a) == 0:
        return TaylorCoefficients(float(a), float(b), float(g), float(d))
    return TaylorCoefficients(a, b, g, d)


def kappa_closed_form(algebra: LieAlgebra, psi, X, Y, t: float) -> float:
    path = _as_path(psi)
    path.require(t)
    a, b, g, d, q = coefficients_with_quantities(algebra, path.psi, np.asarray(X, float), np.asarray(Y, float))
    n = path.psi.shape[0]
    phiD = np.linalg.solve(np.eye(n) - t * path.psi, q.D)
    tail = -0.75 * t**4 * float(phiD @ q.D)
    return float(a + b * t + g * t**2 + d * t**3 + tail)


def kappa_direct(algebra: LieAlgebra, psi, X, Y, t: float) -> float:
    path = _as_path(psi)
    path.require(t)
    n = path.psi.shape[0]
    phi_inv = np.eye(n) - t * path.psi
    phi = phi_at(path, t)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    return puttmann_curvature(algebra, phi, X @ phi_inv, Y @ phi_inv, phi_inv=phi_inv)


def kappa_curve(algebra: LieAlgebra, psi, X, Y, ts):
    """Rows ``(t, closed, direct, |closed - direct|)`` over a grid."""
    path = _as_path(psi)
    rows = []
    for t in ts:
        t = float(t)
        kc = kappa_closed_form(algebra, path, X, Y, t)
        kd = kappa_direct(algebra, path, X, Y, t)
        rows.append((t, kc, kd, abs(kc - kd)))
    return rows
