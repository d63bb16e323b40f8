"""Unnormalised sectional curvature of left-invariant metrics.

A left-invariant metric is encoded by a positive-definite ``phi`` with
h(X, Y) = <phi X, Y>. Curvature values are numerators only: k(X, Y) is not
divided by |X|^2 |Y|^2 - <X, Y>^2.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import LieAlgebra
from .numerics import random_unit_vectors, require_positive_definite, spd_inverse

SEARCH_BATCH = 4096
REFINE_TOP = 5
REFINE_STEPS = 200
INITIAL_STEP = 0.1


@dataclass(frozen=True)
class Witness:
    X: np.ndarray
    Y: np.ndarray
    value: float
    t: Optional[float] = None

    def to_json(self):
        out = {"X": [float(x) for x in self.X], "Y": [float(y) for y in self.Y], "value": float(self.value)}
        if self.t is not None:
            out["t"] = float(self.t)
        return out


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def _puttmann(c, phi, phi_inv, Z1, Z2):
    def br(x, y):
        return np.einsum("...i,...j,ijk->...k", x, y, c)

    P1 = Z1 @ phi
    P2 = Z2 @ phi
    b = br(Z1, Z2)
    S = br(Z1, P2) + br(Z2, P1)
    return (
        0.5 * _dot(br(P1, Z2) + br(Z1, P2), b)
        - 0.75 * _dot(b @ phi, b)
        + 0.25 * _dot(S, S @ phi_inv)
        - _dot(br(Z1, P1), br(Z2, P2) @ phi_inv)
    )


def puttmann_curvature(algebra: LieAlgebra, phi, Z1, Z2, phi_inv=None):
    """Unnormalised sectional curvature k_h(Z1, Z2) of the metric <phi ., .>.

    Broadcasts over leading axes of ``Z1``/``Z2``. ``phi_inv`` may be passed
    when the inverse is known in closed form.
    """
    phi = require_positive_definite(phi, name="phi")
    if phi_inv is None:
        phi_inv = spd_inverse(phi)
    val = _puttmann(algebra.structure, phi, np.asarray(phi_inv, dtype=float),
                    np.asarray(Z1, dtype=float), np.asarray(Z2, dtype=float))
    return float(val) if np.ndim(val) == 0 else val


def _normalize(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def sphere_descent(objective, x, y, steps=REFINE_STEPS, step=INITIAL_STEP):
    """Greedy coordinate moves on a product of unit spheres.

    Every round tries +-step along each coordinate of x and y, keeps the best
    improving move, and halves the step when nothing improves.
    """
    n = x.size
    eye = np.eye(n)
    best = float(objective(x[None], y[None])[0])
    for _ in range(steps):
        if step < 1e-13:
            break
        moves = np.concatenate([eye * step, -eye * step])
        cx = np.concatenate([_normalize(x + moves), np.broadcast_to(x, moves.shape)])
        cy = np.concatenate([np.broadcast_to(y, moves.shape), _normalize(y + moves)])
        vals = objective(cx, cy)
        i = int(np.argmin(vals))
        if vals[i] < best:
            best = float(vals[i])
            x, y = cx[i].copy(), cy[i].copy()
        else:
            step *= 0.5
    return x, y, best


def min_curvature_search(algebra: LieAlgebra, phi, budget: int = 10000, seed: int = 42):
    """Seeded search for the smallest curvature over unit pairs.

    Samples ``budget`` uniform unit pairs, then polishes the five lowest by
    coordinate descent. Returns ``(min_value, Witness)``.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    phi = require_positive_definite(phi, name="phi")
    phi_inv = spd_inverse(phi)
    c = algebra.structure

    def objective(X, Y):
        return _puttmann(c, phi, phi_inv, X, Y)

    rng = np.random.default_rng(seed)
    n = algebra.dim
    X = random_unit_vectors(rng, budget, n)
    Y = random_unit_vectors(rng, budget, n)
    vals = np.concatenate([objective(X[i:i + SEARCH_BATCH], Y[i:i + SEARCH_BATCH])
                           for i in range(0, budget, SEARCH_BATCH)])
    order = np.argsort(vals, kind="stable")[:REFINE_TOP]
    best = None
    for i in order:
        x, y, v = sphere_descent(objective, X[i], Y[i])
        if best is None or v < best[2]:
            best = (x, y, v)
    x, y, v = best
    return v, Witness(x, y, v)


@dataclass(frozen=True)
class NonnegVerdict:
    """Outcome of a nonnegativity probe.

    ``refuted`` is a certificate (the witness plane has curvature below
    ``-tol``). A non-refuted verdict only means the search found nothing.
    """

    refuted: bool
    min_value: float
    witness: Witness
    budget: int
    seed: int

    @property
    def kind(self) -> str:
        return "Refuted" if self.refuted else "NoWitnessFound"

    def to_json(self):
        return {
            "verdict": self.kind,
            "min_value": float(self.min_value),
            "witness": self.witness.to_json(),
            "budget": self.budget,
            "seed": self.seed,
        }


def assert_nonneg(algebra: LieAlgebra, phi, tol: float = 1e-9, budget: int = 10000, seed: int = 42) -> NonnegVerdict:
    v, w = min_curvature_search(algebra, phi, budget, seed)
    return NonnegVerdict(v < -tol, v, w, budget, seed)
