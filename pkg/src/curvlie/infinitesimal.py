"""Infinitesimal nonnegativity of a deformation psi, probed on commuting pairs.

For commuting X, Y the cubic coefficient delta and the vector D decide the
question: psi is infinitesimally nonnegative iff every commuting pair has
delta > 0, or delta = 0 and D = 0. Searches here can certify a violation;
a pass is only evidence, since the quantifier ranges over a continuum.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import LieAlgebra
from .numerics import (
    KERNEL_TOL,
    check_symmetric,
    eigenspaces,
    random_unit_vectors,
    require_positive_definite,
    spd_inverse,
    sym_eigen,
)
from .paths import coefficients_with_quantities

COMMUTE_TOL = 1e-12
REFINE_TOP = 5
REFINE_STEPS = 200


@dataclass(frozen=True)
class CommutingPair:
    X: np.ndarray
    Y: np.ndarray


@dataclass(frozen=True)
class PairWitness:
    X: np.ndarray
    Y: np.ndarray
    delta: float
    D_norm: float

    def to_json(self):
        return {
            "X": [float(v) for v in self.X],
            "Y": [float(v) for v in self.Y],
            "delta": float(self.delta),
            "D_norm": float(self.D_norm),
        }


@dataclass(frozen=True)
class InfNonnegVerdict:
    """``Passed`` is evidence from a finite search, never a proof."""

    kind: str  # "Passed" | "Refuted"
    min_delta: float
    max_D_norm: float  # over pairs with |delta| <= tol
    budget: int
    seed: int
    witness: Optional[PairWitness] = None
    reason: Optional[str] = None  # "delta" or "D" when refuted

    @property
    def refuted(self) -> bool:
        return self.kind == "Refuted"

    def to_json(self):
        out = {"verdict": self.kind}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.reason is not None:
            out["reason"] = self.reason
        out.update(
            min_delta=float(self.min_delta),
            max_D_norm=float(self.max_D_norm),
            budget=self.budget,
            seed=self.seed,
        )
        return out


# --- sampling ---------------------------------------------------------------


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _factor_directions(algebra: LieAlgebra, rng, count):
    """One random unit direction per factor, embedded: shape (count, nf, dim)."""
    slices = algebra.factor_slices()
    U = np.zeros((count, len(slices), algebra.dim))
    for f, s in enumerate(slices):
        U[:, f, s] = random_unit_vectors(rng, count, s.stop - s.start)
    return U


def _sample_arrays(algebra: LieAlgebra, n: int, rng):
    if algebra.factors is not None:
        U = _factor_directions(algebra, rng, n)
        s = rng.standard_normal((n, U.shape[1]))
        r = rng.standard_normal((n, U.shape[1]))
        X = _unit(np.einsum("bf,bfi->bi", s, U))
        Y = _unit(np.einsum("bf,bfi->bi", r, U))
        return X, Y
    X = random_unit_vectors(rng, n, algebra.dim)
    Y = np.empty_like(X)
    for i in range(n):
        K = algebra.centralizer(X[i], KERNEL_TOL)
        K = K - np.outer(X[i], X[i] @ K)
        Kb = K[:, np.linalg.norm(K, axis=0) > 1e-8]
        if Kb.shape[1] == 0:
            Y[i] = X[i] * np.sign(rng.standard_normal() or 1.0)
        else:
            Y[i] = _unit(Kb @ rng.standard_normal(Kb.shape[1]))
    return X, Y


def sample_commuting_pairs(algebra: LieAlgebra, n: int, seed: int = 42):
    """Seeded unit pairs with [X, Y] = 0.

    With factors declared, X and Y are combinations of one direction per
    factor (for so(3)-type factors this is every commuting pair). Otherwise
    Y is drawn from the numerical kernel of ad(X).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    X, Y = _sample_arrays(algebra, n, np.random.default_rng(seed))
    return [CommutingPair(x, y) for x, y in zip(X, Y)]


# --- the delta / D criterion ------------------------------------------------


def _delta_and_D(algebra, psi, X, Y):
    _, _, _, d, q = coefficients_with_quantities(algebra, psi, X, Y)
    return d, np.linalg.norm(q.D, axis=-1)


def _block_descent(objective, blocks, steps=REFINE_STEPS, step=0.1):
    """Coordinate descent where each block of coordinates stays on a unit sphere."""
    x = np.concatenate(blocks)
    cuts = np.cumsum([len(b) for b in blocks])[:-1]

    def renorm(v):
        return np.concatenate([_unit(p) for p in np.split(v, cuts, axis=-1)], axis=-1)

    eye = np.eye(x.size)
    best = float(objective(x[None])[0])
    for _ in range(steps):
        if step < 1e-13:
            break
        cand = renorm(np.concatenate([x + step * eye, x - step * eye]))
        vals = objective(cand)
        i = int(np.argmin(vals))
        if vals[i] < best:
            best, x = float(vals[i]), cand[i].copy()
        else:
            step *= 0.5
    return np.split(x, cuts), best


def _refine_factor_pair(algebra, psi, X, Y):
    """Polish delta over the per-factor directions of a sampled commuting pair."""
    slices = algebra.factor_slices()
    s = np.array([np.linalg.norm(X[sl]) for sl in slices])
    r = np.array([np.linalg.norm(Y[sl]) for sl in slices])
    blocks = []
    for f, sl in enumerate(slices):
        src = X[sl] if s[f] >= r[f] else Y[sl]
        blocks.append(_unit(src))
    sX = np.array([np.sign(X[sl] @ b) if s[f] > 0 else 0.0 for f, (sl, b) in enumerate(zip(slices, blocks))]) * s
    sY = np.array([np.sign(Y[sl] @ b) if r[f] > 0 else 0.0 for f, (sl, b) in enumerate(zip(slices, blocks))]) * r

    def embed(flat):
        flat = np.atleast_2d(flat)
        Xs = np.zeros((flat.shape[0], algebra.dim))
        Ys = np.zeros_like(Xs)
        off = 0
        for f, sl in enumerate(slices):
            k = sl.stop - sl.start
            Xs[:, sl] = sX[f] * flat[:, off:off + k]
            Ys[:, sl] = sY[f] * flat[:, off:off + k]
            off += k
        return _unit(Xs), _unit(Ys)

    def objective(flat):
        Xs, Ys = embed(flat)
        return _delta_and_D(algebra, psi, Xs, Ys)[0]

    blocks, _ = _block_descent(objective, blocks)
    Xs, Ys = embed(np.concatenate(blocks))
    return Xs[0], Ys[0]


def check_inf_nonneg(algebra: LieAlgebra, psi, tol: float = 1e-9, budget: int = 10000, seed: int = 42) -> InfNonnegVerdict:
    """Search commuting pairs for delta < -tol, or |delta| <= tol with |D| > sqrt(tol)."""
    psi = check_symmetric(psi)
    psi = 0.5 * (psi + psi.T)
    rng = np.random.default_rng(seed)
    X, Y = _sample_arrays(algebra, budget, rng)
    delta, Dn = _delta_and_D(algebra, psi, X, Y)

    if algebra.factors is not None:
        order = np.argsort(delta, kind="stable")[:REFINE_TOP]
        refined = [_refine_factor_pair(algebra, psi, X[i], Y[i]) for i in order]
        RX = np.array([p[0] for p in refined])
        RY = np.array([p[1] for p in refined])
        rd, rD = _delta_and_D(algebra, psi, RX, RY)
        X, Y = np.concatenate([X, RX]), np.concatenate([Y, RY])
        delta, Dn = np.concatenate([delta, rd]), np.concatenate([Dn, rD])

    i_min = int(np.argmin(delta))
    min_delta = float(delta[i_min])
    near = np.abs(delta) <= tol
    max_D = float(np.max(Dn[near])) if near.any() else 0.0

    def witness(i):
        return PairWitness(X[i].copy(), Y[i].copy(), float(delta[i]), float(Dn[i]))

    if min_delta < -tol:
        return InfNonnegVerdict("Refuted", min_delta, max_D, budget, seed, witness(i_min), "delta")
    if max_D > math.sqrt(tol):
        i_D = int(np.flatnonzero(near)[np.argmax(Dn[near])])
        return InfNonnegVerdict("Refuted", min_delta, max_D, budget, seed, witness(i_D), "D")
    return InfNonnegVerdict("Passed", min_delta, max_D, budget, seed)


# --- rigidity ---------------------------------------------------------------


@dataclass(frozen=True)
class RigidityVerdict:
    kind: str  # "Violated" | "NoViolationFound"
    max_residual: float
    witness: Optional[tuple] = None  # (X, Y, residual)

    @property
    def violated(self) -> bool:
        return self.kind == "Violated"


def check_rigidity(
    algebra: LieAlgebra,
    M,
    mode: str = "psi",
    tol: float = 1e-9,
    budget: int = 1000,
    seed: int = 42,
) -> RigidityVerdict:
    """Check that [X, op Y] stays in p0 for X in p0 and Y commuting with X.

    ``mode="psi"``: M is psi, op = psi, p0 its lowest eigenspace.
    ``mode="phi"``: M is a metric phi, op = phi^-1, p0 the lowest eigenspace
    of phi (equivalently of psi = I - phi^-1).
    """
    if mode == "psi":
        M = check_symmetric(M)
        op = M
    elif mode == "phi":
        M = require_positive_definite(M, name="phi")
        op = spd_inverse(M)
    else:
        raise ValueError(f"mode must be 'psi' or 'phi', got {mode!r}")
    P0 = eigenspaces(sym_eigen(M))[0][1]
    Q = np.eye(algebra.dim) - P0 @ P0.T
    rng = np.random.default_rng(seed)

    candidates = [P0[:, j] for j in range(P0.shape[1])]
    candidates += [_unit(P0 @ rng.standard_normal(P0.shape[1])) for _ in range(budget)]
    worst = (0.0, None)
    for X in candidates:
        K = algebra.centralizer(X)
        Ys = [K[:, j] for j in range(K.shape[1])]
        Ys.append(_unit(K @ rng.standard_normal(K.shape[1])))
        for Y in Ys:
            res = float(np.linalg.norm(Q @ algebra.bracket(X, op @ Y)))
            if res > worst[0]:
                worst = (res, (X.copy(), Y.copy(), res))
    if worst[0] > tol:
        return RigidityVerdict("Violated", worst[0], worst[1])
    return RigidityVerdict("NoViolationFound", worst[0], worst[1])
