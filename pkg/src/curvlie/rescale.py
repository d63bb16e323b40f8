"""Changing the bi-invariant reference metric from h0 to lam * h0.

A fixed target metric h has matrix phi against h0 and phi / lam against
lam * h0, so the deformation becomes upsilon = (1 - lam) I + lam psi.
Curvature quantities of the upsilon path are measured with lam * h0; each of
them is therefore lam times the corresponding h0-based value.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import LieAlgebra
from .errors import NonPositiveLambda, OutOfDomain
from .numerics import check_symmetric
from .paths import coefficients_with_quantities, kappa_direct, path_from_psi


def rescaled_deformation(psi, lam: float) -> np.ndarray:
    if not lam > 0:
        raise NonPositiveLambda(f"scale factor must be positive, got {lam!r}")
    psi = check_symmetric(psi)
    return (1.0 - lam) * np.eye(psi.shape[0]) + lam * psi


def reparametrize(lam: float, t):
    """t -> lam t / (1 - (1 - lam) t), a self-map of [0, 1] fixing both ends."""
    t = np.asarray(t, dtype=float)
    return lam * t / (1.0 - (1.0 - lam) * t)


def rescaled_coefficients(algebra: LieAlgebra, psi, lam: float, X, Y):
    """(alpha, beta, gamma, delta) and D of the upsilon path, against lam * h0."""
    ups = rescaled_deformation(psi, lam)
    a, b, g, d, q = coefficients_with_quantities(algebra, ups, X, Y)
    return lam * a, lam * b, lam * g, lam * d, q.D


@dataclass(frozen=True)
class CoefficientRelations:
    alpha: float
    beta: float
    gamma: float
    delta: float
    D: float  # |D_upsilon - lam^2 D_psi|

    def max(self) -> float:
        return max(abs(self.alpha), abs(self.beta), abs(self.gamma), abs(self.delta))

    def to_json(self):
        return {k: float(getattr(self, k)) for k in ("alpha", "beta", "gamma", "delta", "D")}


def coefficient_relations(algebra: LieAlgebra, psi, lam: float, X, Y) -> CoefficientRelations:
    """Residuals of the linear relations expressing upsilon's Taylor
    coefficients through psi's."""
    a, b, g, d, q = coefficients_with_quantities(algebra, check_symmetric(psi), X, Y)
    au, bu, gu, du, Du = rescaled_coefficients(algebra, psi, lam, X, Y)
    m = 1.0 - lam
    return CoefficientRelations(
        float(au - lam * a),
        float(bu - (-3 * m * lam * a + lam**2 * b)),
        float(gu - (3 * m**2 * lam * a - 2 * m * lam**2 * b + lam**3 * g)),
        float(du - (-(m**3) * lam * a + m**2 * lam**2 * b - m * lam**3 * g + lam**4 * d)),
        float(np.linalg.norm(Du - lam**2 * q.D)),
    )


def kappa_rescaled(algebra: LieAlgebra, psi, lam: float, X, Y, t: float) -> float:
    """Curvature along the upsilon path, measured against lam * h0."""
    return lam * kappa_direct(algebra, rescaled_deformation(psi, lam), X, Y, t)


def verify_curve_relation(algebra: LieAlgebra, psi, lam: float, X, Y, t_grid) -> float:
    """Largest |kappa_ups(t) - lam (1-(1-lam)t)^3 kappa_psi(s(t))| over the grid.

    Both sides are evaluated from the curvature formula directly.
    """
    ups = rescaled_deformation(psi, lam)
    ts = np.asarray(t_grid, dtype=float)
    if np.any(ts < 0) or np.any(ts > 1):
        raise OutOfDomain("grid must lie in [0, 1]")
    ends = reparametrize(lam, [0.0, 1.0])
    if abs(ends[0]) > 1e-15 or abs(ends[1] - 1.0) > 1e-14:
        raise AssertionError(f"reparametrisation moved an endpoint: {ends}")
    left, right = path_from_psi(ups), path_from_psi(psi)
    worst = 0.0
    for t in map(float, ts):
        s = float(reparametrize(lam, t))
        if not left.contains(t):
            raise OutOfDomain(f"rescaled side: t={t!r} outside {left.domain}")
        if not right.contains(s):
            raise OutOfDomain(f"original side: s={s!r} (from t={t!r}) outside {right.domain}")
        lhs = lam * kappa_direct(algebra, left, X, Y, t)
        rhs = lam * (1.0 - (1.0 - lam) * t) ** 3 * kappa_direct(algebra, right, X, Y, s)
        worst = max(worst, abs(lhs - rhs))
    return worst
