"""Enlarging a subalgebra h: psi = orthogonal projection onto h.

Along phi_t = (I - t psi)^-1 vectors of h are stretched by 1/(1 - t), so a
scale factor lam corresponds to t = 1 - 1/lam.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import LieAlgebra, Subalgebra, derived_algebra, is_abelian, project
from .curvature import sphere_descent
from .errors import OutOfDomain, SubalgebraNotAbelian
from .numerics import random_unit_vectors, sym_eigen
from .paths import phi_at

STRETCH_LIMIT = 4.0 / 3.0
STRETCH_SLACK = 1e-12
COMMUTE_TOL = 1e-12
NONZERO_TOL = 1e-6


def scaling_deformation(algebra: LieAlgebra, sub: Subalgebra) -> np.ndarray:
    return sub.projector.copy()


def factor_to_t(lam: float) -> float:
    return 1.0 - 1.0 / lam


def t_to_factor(t: float) -> float:
    return 1.0 / (1.0 - t)


def _require_t_below_one(t):
    if not t < 1.0:
        raise OutOfDomain(f"t={t!r} must be < 1 when scaling a subalgebra")


def _require_abelian(algebra, sub):
    if not is_abelian(algebra, sub):
        raise SubalgebraNotAbelian("subalgebra is not abelian")


def abelian_kappa(algebra: LieAlgebra, sub: Subalgebra, X, Y, t: float) -> float:
    _require_abelian(algebra, sub)
    _require_t_below_one(t)
    XY = algebra.bracket(X, Y)
    XYh, _ = project(algebra, sub, XY)
    return float(0.25 * XY @ XY - 0.75 * (XYh @ XYh) * t / (1.0 - t))


def nonabelian_kappa(algebra: LieAlgebra, sub: Subalgebra, X, Y, t: float) -> float:
    _require_t_below_one(t)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    Xh, Xp = project(algebra, sub, X)
    Yh, Yp = project(algebra, sub, Y)
    XY = algebra.bracket(X, Y)
    XYh, _ = project(algebra, sub, XY)
    B = algebra.bracket(Xh, Yh)
    Ph, _ = project(algebra, sub, algebra.bracket(Xp, Yp))
    b2 = float(B @ B)
    return float(
        0.25 * XY @ XY
        - 0.75 * (XYh @ XYh) * t
        + 0.75 * b2 * t**2
        - 0.25 * b2 * t**3
        - 0.75 * (Ph @ Ph) * t**2 / (1.0 - t)
    )


@dataclass(frozen=True)
class StretchResult:
    preserves: bool
    max_stretch: float  # max over unit Z in [g, g] of |Z|^2_{h_t}
    witness: Optional[np.ndarray] = None

    @property
    def kind(self) -> str:
        return "Preserves" if self.preserves else "Fails"

    def to_json(self):
        out = {"verdict": self.kind, "max_stretch": float(self.max_stretch)}
        if self.witness is not None:
            out["witness"] = [float(z) for z in self.witness]
        return out


def max_stretch_check(algebra: LieAlgebra, sub: Subalgebra, t: float) -> StretchResult:
    """Scaling an abelian h keeps nonnegative curvature iff no unit vector of
    [g, g] has squared h_t-norm above 4/3."""
    _require_abelian(algebra, sub)
    _require_t_below_one(t)
    D = derived_algebra(algebra)
    if D.shape[0] == 0:
        return StretchResult(True, 0.0)
    phi = phi_at(scaling_deformation(algebra, sub), t)
    spec = sym_eigen(D @ phi @ D.T)
    top = float(spec.eigenvalues[-1])
    if top <= STRETCH_LIMIT + STRETCH_SLACK:
        return StretchResult(True, top)
    return StretchResult(False, top, spec.eigenvectors[:, -1] @ D)


@dataclass(frozen=True)
class BracketRatioResult:
    bounded: bool
    c: float  # largest observed ratio; a lower estimate of the constant
    witness: Optional[tuple] = None  # (X, Y) when unbounded

    @property
    def kind(self) -> str:
        return "BoundedBy" if self.bounded else "UnboundedWitness"

    def to_json(self):
        out = {"verdict": self.kind, "c": float(self.c) if self.bounded else None}
        if self.witness is not None:
            out["witness"] = {"X": [float(v) for v in self.witness[0]], "Y": [float(v) for v in self.witness[1]]}
        return out


def bracket_ratio_sup(algebra: LieAlgebra, sub: Subalgebra, budget: int = 10000, seed: int = 42) -> BracketRatioResult:
    """Probe sup |[X^h, Y^h]| / |[X, Y]| over unit pairs.

    A commuting pair whose projections do not commute makes the ratio
    unbounded; basis pairs and centralizer samples are tried for that first.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    n = algebra.dim
    P = sub.projector
    rng = np.random.default_rng(seed)

    def numer(X, Y):
        return np.linalg.norm(algebra.bracket(X @ P, Y @ P), axis=-1)

    def denom(X, Y):
        return np.linalg.norm(algebra.bracket(X, Y), axis=-1)

    eye = np.eye(n)
    commuting = [(eye[i], eye[j]) for i in range(n) for j in range(i + 1, n)
                 if denom(eye[i], eye[j]) <= COMMUTE_TOL]
    for X in random_unit_vectors(rng, min(budget, 200), n):
        K = algebra.centralizer(X)
        K = K - np.outer(X, X @ K)
        for j in range(K.shape[1]):
            if np.linalg.norm(K[:, j]) > 1e-8:
                commuting.append((X, K[:, j] / np.linalg.norm(K[:, j])))
    for X, Y in commuting:
        if denom(X, Y) <= COMMUTE_TOL and numer(X, Y) >= NONZERO_TOL:
            return BracketRatioResult(False, np.inf, (X.copy(), Y.copy()))

    X = random_unit_vectors(rng, budget, n)
    Y = random_unit_vectors(rng, budget, n)
    ratio = numer(X, Y) / np.maximum(denom(X, Y), 1e-300)
    best = float(np.max(ratio))
    top = np.argsort(-ratio, kind="stable")[:5]

    def negratio(Xs, Ys):
        return -numer(Xs, Ys) / np.maximum(denom(Xs, Ys), 1e-300)

    for i in top:
        x, y, v = sphere_descent(negratio, X[i], Y[i])
        if denom(x, y) <= COMMUTE_TOL and numer(x, y) >= NONZERO_TOL:
            return BracketRatioResult(False, np.inf, (x, y))
        best = max(best, -v)
    return BracketRatioResult(True, best)
