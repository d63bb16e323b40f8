"""Metric Lie algebras given by structure constants.

All vectors handled by the rest of the package are coordinate arrays in an
h0-orthonormal working basis, so the inner product is the plain dot product.
When an algebra is built from a non-orthonormal metric, the constructor
changes basis once and records the change in ``basis_change``.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    AntisymmetryViolation,
    FactorViolation,
    JacobiViolation,
    MetricNotAdInvariant,
    MetricNotPositiveDefinite,
    NotSymmetric,
    SubalgebraNotClosed,
)
from .numerics import KERNEL_TOL, null_space, orthonormal_basis, sym_eigen

VALIDATION_TOL = 1e-12
SUBALGEBRA_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    structure: np.ndarray  # c[i, j, k]: [e_i, e_j] = sum_k c[i, j, k] e_k
    factors: Optional[tuple] = None  # ((lo, hi), ...) inclusive index ranges
    names: Optional[tuple] = None
    basis_change: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.structure.shape[0]

    def basis(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e

    def vector(self, name: str) -> np.ndarray:
        """Basis vector by name, e.g. ``"A1"`` on so(4) or ``"e3"`` on so(3)."""
        return self.basis(self.names.index(name))

    def bracket(self, X, Y) -> np.ndarray:
        """Lie bracket; broadcasts over leading axes."""
        return np.einsum("...i,...j,ijk->...k", X, Y, self.structure)

    def ad(self, X) -> np.ndarray:
        """Matrix of ad(X) acting on column vectors."""
        return np.einsum("i,ijk->kj", np.asarray(X, dtype=float), self.structure)

    def factor_slices(self):
        if self.factors is None:
            return None
        return [slice(lo, hi + 1) for lo, hi in self.factors]

    def centralizer(self, X, tol: float = KERNEL_TOL) -> np.ndarray:
        """Orthonormal basis (columns) of {Y : [X, Y] = 0}."""
        return null_space(self.ad(X), tol)

    def to_working(self, coords) -> np.ndarray:
        """Convert coordinates in the input basis to the working basis."""
        coords = np.asarray(coords, dtype=float)
        if self.basis_change is None:
            return coords
        return np.linalg.solve(self.basis_change, coords.T).T


@dataclass(frozen=True, eq=False)
class Subalgebra:
    basis: np.ndarray  # rows, h0-orthonormal

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis


# --- construction -----------------------------------------------------------


def _so3_table() -> np.ndarray:
    c = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c[i, j, k] = 1.0
        c[j, i, k] = -1.0
    return c


def build_so3() -> LieAlgebra:
    """so(3) with [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2 and h0 = identity."""
    return LieAlgebra(_so3_table(), names=("e1", "e2", "e3"))


def build_so4() -> LieAlgebra:
    """so(4) = so(3) + so(3), basis A1, A2, A3, B1, B2, B3."""
    c = np.zeros((6, 6, 6))
    c[:3, :3, :3] = _so3_table()
    c[3:, 3:, 3:] = _so3_table()
    return LieAlgebra(c, factors=((0, 2), (3, 5)), names=("A1", "A2", "A3", "B1", "B2", "B3"))


def _dense_structure(dim: int, structure) -> np.ndarray:
    if isinstance(structure, np.ndarray) and structure.shape == (dim, dim, dim):
        return structure.astype(float)
    c = np.zeros((dim, dim, dim))
    for entry in structure:
        i, j, k, val = entry
        i, j, k = int(i), int(j), int(k)
        if not all(0 <= x < dim for x in (i, j, k)):
            raise IndexError(f"structure entry {entry} out of range for dim {dim}")
        c[i, j, k] = float(val)
    return c


def _worst(arr: np.ndarray):
    idx = np.unravel_index(np.argmax(np.abs(arr)), arr.shape)
    return tuple(int(i) for i in idx), float(abs(arr[idx]))


def check_antisymmetry(c: np.ndarray, tol: float = VALIDATION_TOL) -> None:
    triple, resid = _worst(c + c.transpose(1, 0, 2))
    if resid > tol:
        raise AntisymmetryViolation(
            f"c[{triple[0]}][{triple[1]}][{triple[2]}] + c[{triple[1]}][{triple[0]}][{triple[2]}] = {resid:.3e}",
            triple=triple,
            residual=resid,
        )


def jacobi_residual(c: np.ndarray) -> np.ndarray:
    """J[i, j, k, m]: m-th coordinate of the Jacobiator of (e_i, e_j, e_k)."""
    # [e_i, [e_j, e_k]] = sum_l c[j,k,l] c[i,l,m]
    t = np.einsum("jkl,ilm->ijkm", c, c)
    return t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)


def check_jacobi(c: np.ndarray, tol: float = VALIDATION_TOL) -> None:
    J = jacobi_residual(c)
    idx, resid = _worst(J)
    scale = max(1.0, float(np.max(np.abs(c))) ** 2)
    if resid > tol * scale:
        raise JacobiViolation(
            f"Jacobi identity fails on basis triple {idx[:3]} (residual {resid:.3e})",
            triple=idx[:3],
            residual=resid,
        )


def ad_invariance_residual(c: np.ndarray, G: np.ndarray) -> np.ndarray:
    """R[i, j, k] = <[e_i, e_j], e_k> + <e_j, [e_i, e_k]> under the metric G."""
    first = np.einsum("ijl,lk->ijk", c, G)
    second = np.einsum("ikl,jl->ijk", c, G)
    return first + second


def check_ad_invariance(c: np.ndarray, G: np.ndarray, tol: float = VALIDATION_TOL) -> None:
    triple, resid = _worst(ad_invariance_residual(c, G))
    scale = max(1.0, float(np.max(np.abs(c))) * float(np.max(np.abs(G))))
    if resid > tol * scale:
        raise MetricNotAdInvariant(
            f"<[e{triple[0]},e{triple[1]}],e{triple[2]}> + <e{triple[1]},[e{triple[0]},e{triple[2]}]> = {resid:.3e}",
            triple=triple,
            residual=resid,
        )


def _check_factors(c, G, factors, tol):
    slices = [slice(lo, hi + 1) for lo, hi in factors]
    dim = c.shape[0]
    covered = np.zeros(dim, dtype=int)
    for s in slices:
        covered[s] += 1
    if np.any(covered > 1):
        raise FactorViolation("factor index ranges overlap")
    for a, sa in enumerate(slices):
        for b, sb in enumerate(slices):
            if a == b:
                continue
            cross = np.abs(c[sa, sb, :])
            if cross.size and cross.max() > tol:
                raise FactorViolation(f"brackets between factors {a} and {b} do not vanish")
            g = np.abs(G[sa, sb])
            if g.size and g.max() > tol:
                raise FactorViolation(f"factors {a} and {b} are not h0-orthogonal")


def build_from_structure_constants(
    dim: int,
    structure,
    metric="identity",
    factors: Optional[Sequence] = None,
    names: Optional[Sequence[str]] = None,
    tol: float = VALIDATION_TOL,
) -> LieAlgebra:
    """Validate a structure table and metric, then return a LieAlgebra.

    ``structure`` is either a dense ``(dim, dim, dim)`` array or a list of
    ``(i, j, k, value)`` entries, taken literally (both orderings of each
    bracket must be listed). The returned algebra lives in an
    h0-orthonormal basis.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    c = _dense_structure(dim, structure)
    if isinstance(metric, str):
        if metric != "identity":
            raise ValueError(f"unknown metric keyword {metric!r}")
        G = np.eye(dim)
    else:
        G = np.asarray(metric, dtype=float)
        if G.shape != (dim, dim):
            raise ValueError(f"metric must be {dim}x{dim}")
        if np.max(np.abs(G - G.T)) > tol * max(1.0, np.max(np.abs(G))):
            raise NotSymmetric("metric is not symmetric")
        G = 0.5 * (G + G.T)

    check_antisymmetry(c, tol)
    check_jacobi(c, tol)
    lo = sym_eigen(G).eigenvalues[0]
    if lo <= tol:
        raise MetricNotPositiveDefinite(f"metric has eigenvalue {lo:.3e}", eigenvalue=float(lo))
    check_ad_invariance(c, G, tol)
    if factors is not None:
        factors = tuple((int(a), int(b)) for a, b in factors)
        _check_factors(c, G, factors, tol)

    basis_change = None
    if not np.array_equal(G, np.eye(dim)):
        # columns of M are the new orthonormal basis in input coordinates
        L = np.linalg.cholesky(G)
        M = np.linalg.inv(L).T
        Minv = L.T
        c = np.einsum("ia,jb,ijk,ck->abc", M, M, c, Minv)
        basis_change = M
    if names is None:
        names = tuple(f"e{i + 1}" for i in range(dim))
    return LieAlgebra(c, factors=factors, names=tuple(names), basis_change=basis_change)


# --- subalgebras ------------------------------------------------------------


def make_subalgebra(algebra: LieAlgebra, vectors, tol: float = SUBALGEBRA_TOL) -> Subalgebra:
    """Orthonormalise ``vectors`` and check the span is closed under bracket."""
    B = orthonormal_basis(np.atleast_2d(np.asarray(vectors, dtype=float)))
    P = B.T @ B
    for a in range(B.shape[0]):
        for b in range(a + 1, B.shape[0]):
            z = algebra.bracket(B[a], B[b])
            resid = np.linalg.norm(z - P @ z)
            if resid > tol:
                raise SubalgebraNotClosed(f"bracket of basis vectors {a},{b} leaves the span by {resid:.3e}")
    return Subalgebra(B)


def is_abelian(algebra: LieAlgebra, sub: Subalgebra, tol: float = SUBALGEBRA_TOL) -> bool:
    B = sub.basis
    if B.shape[0] < 2:
        return True
    br = algebra.bracket(B[:, None, :], B[None, :, :])
    return bool(np.max(np.linalg.norm(br, axis=-1)) <= tol)


def project(algebra: LieAlgebra, sub: Subalgebra, Z):
    """Split ``Z`` into its components in ``sub`` and in the h0-complement."""
    Z = np.asarray(Z, dtype=float)
    Zh = (Z @ sub.basis.T) @ sub.basis
    return Zh, Z - Zh


def derived_algebra(algebra: LieAlgebra, tol: float = KERNEL_TOL) -> np.ndarray:
    """Orthonormal basis (rows) of [g, g]."""
    n = algebra.dim
    brackets = algebra.structure.reshape(n * n, n)
    return orthonormal_basis(brackets, tol)


def factor_projection(algebra: LieAlgebra, index: int) -> np.ndarray:
    s = algebra.factor_slices()[index]
    P = np.zeros((algebra.dim, algebra.dim))
    P[s, s] = np.eye(s.stop - s.start)
    return P
