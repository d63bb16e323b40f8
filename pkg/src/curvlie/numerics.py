"""Small dense linear-algebra kernel.

Everything here works on matrices of dimension <= 8, so clarity beats speed:
the eigensolver is a plain cyclic Jacobi iteration.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainTooSmall, NotPositiveDefinite, NotSymmetric, OutOfDomain

SYMMETRY_TOL = 1e-12
EIGEN_GROUP_RTOL = 1e-8
KERNEL_TOL = 1e-10

_JACOBI_RTOL = 1e-14
_JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # orthonormal columns
    operator_norm: float

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


def check_symmetric(M, tol: float = SYMMETRY_TOL) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {M.shape}")
    scale = max(1.0, float(np.max(np.abs(M))) if M.size else 0.0)
    resid = float(np.max(np.abs(M - M.T))) if M.size else 0.0
    if resid > tol * scale:
        raise NotSymmetric(f"symmetry residual {resid:.3e} exceeds {tol:.1e}")
    return M


def _canonical_signs(V: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of each column made positive (first index on ties)
    idx = np.argmax(np.abs(V) - 1e-12 * np.arange(V.shape[0])[:, None], axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def sym_eigen(M) -> SpectralData:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Eigenvalues come back ascending; eigenvector signs are normalised so
    the output is a deterministic function of the input.
    """
    A = check_symmetric(M).copy()
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    V = np.eye(n)
    norm = np.linalg.norm(A)
    if n == 0:
        return SpectralData(np.zeros(0), np.zeros((0, 0)), 0.0)
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(_JACOBI_MAX_SWEEPS):
        # summed directly; |A|^2 - |diag|^2 cancels catastrophically
        off = np.sqrt(np.sum(A[offdiag] ** 2))
        if off <= _JACOBI_RTOL * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                diff = A[q, q] - A[p, p]
                if abs(apq) < 1e-150 * abs(diff):
                    t = apq / diff  # theta*theta would overflow
                else:
                    theta = diff / (2.0 * apq)
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta == 0.0:
                        t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                Ap, Aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap, Aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                A[p, q] = A[q, p] = 0.0
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    V = _canonical_signs(V[:, order])
    return SpectralData(w, V, float(np.max(np.abs(w))))


def eigenspaces(spec: SpectralData, rtol: float = EIGEN_GROUP_RTOL):
    """Group numerically equal eigenvalues.

    Returns a list of ``(value, basis)`` with ``basis`` an ``(n, m)`` array of
    orthonormal columns, ordered by ascending eigenvalue.
    """
    w, V = spec.eigenvalues, spec.eigenvectors
    gap = rtol * max(1.0, spec.operator_norm)
    groups = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > gap:
            groups.append((float(np.mean(w[start:i])), V[:, start:i]))
            start = i
    return groups


def smallest_eigenspace(M, rtol: float = EIGEN_GROUP_RTOL) -> np.ndarray:
    return eigenspaces(sym_eigen(M), rtol)[0][1]


def is_positive_definite(M, tol: float = 1e-12) -> bool:
    return bool(sym_eigen(M).eigenvalues[0] > tol)


def require_positive_definite(M, tol: float = 1e-12, name: str = "matrix") -> np.ndarray:
    M = check_symmetric(M)
    try:
        # fast path; the shift keeps the tol semantics
        np.linalg.cholesky(M - tol * np.eye(M.shape[0]))
        return M
    except np.linalg.LinAlgError:
        pass
    lo = sym_eigen(M).eigenvalues[0]
    if not lo > tol:
        raise NotPositiveDefinite(f"{name} is not positive definite (min eigenvalue {lo:.3e})")
    return M


def spd_inverse(M) -> np.ndarray:
    """Inverse of a symmetric positive-definite matrix, symmetrised."""
    M = require_positive_definite(M)
    inv = np.linalg.solve(M, np.eye(M.shape[0]))
    return 0.5 * (inv + inv.T)


def null_space(M, tol: float = KERNEL_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of ``M``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    _, s, vt = np.linalg.svd(M)
    scale = max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol * scale))
    return vt[rank:].T.copy()


def orthonormal_basis(vectors, tol: float = KERNEL_TOL) -> np.ndarray:
    """Orthonormal basis (rows) of the span of the given row vectors."""
    A = np.atleast_2d(np.asarray(vectors, dtype=float))
    if A.size == 0:
        return np.zeros((0, A.shape[-1]))
    _, s, vt = np.linalg.svd(A, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return vt[:rank].copy()


def random_unit_vectors(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    v = rng.standard_normal((count, dim))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def random_orthogonal(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


# --- finite differences -----------------------------------------------------

FD_STEPS = (1e-2, 5e-3, 2.5e-3)

# central stencils on offsets -2..2, error expansion in even powers of h
_STENCILS = {
    1: np.array([0.0, -0.5, 0.0, 0.5, 0.0]),
    2: np.array([0.0, 1.0, -2.0, 1.0, 0.0]),
    3: np.array([-0.5, 1.0, 0.0, -1.0, 0.5]),
    4: np.array([1.0, -4.0, 6.0, -4.0, 1.0]),
}


@dataclass(frozen=True)
class FDResult:
    derivatives: np.ndarray  # f', f'', ... up to max_order
    errors: np.ndarray  # matching error estimates


def fd_derivatives(
    f: Callable[[float], float],
    t0: float,
    max_order: int = 4,
    steps=FD_STEPS,
    domain: Optional[tuple] = None,
) -> FDResult:
    """Estimate f^(1)..f^(max_order) at ``t0``.

    Central differences on three halving steps, combined by two rounds of
    Richardson extrapolation. Each tableau entry gets an error estimate
    (distance to its neighbour plus a rounding bound); the entry with the
    smallest estimate is returned. This lets low-degree polynomials fall
    back on the widest step, where rounding is smallest.
    """
    if not 1 <= max_order <= 4:
        raise ValueError("max_order must be between 1 and 4")
    h0 = max(steps)
    if domain is not None:
        lo, hi = domain
        if not (lo < t0 - 2 * h0 and t0 + 2 * h0 < hi):
            raise DomainTooSmall(f"stencil [{t0 - 2 * h0}, {t0 + 2 * h0}] leaves {domain}")

    values = []
    for h in steps:
        row = []
        for j in (-2, -1, 0, 1, 2):
            try:
                v = float(f(t0 + j * h))
            except (OutOfDomain, ArithmeticError) as exc:
                raise DomainTooSmall(f"f undefined at t={t0 + j * h}: {exc}") from exc
            if not np.isfinite(v):
                raise DomainTooSmall(f"f not finite at t={t0 + j * h}")
            row.append(v)
        values.append(np.array(row))
    fmax = max(1e-300, max(float(np.max(np.abs(r))) for r in values))
    eps = np.finfo(float).eps

    derivs = np.zeros(max_order)
    errs = np.zeros(max_order)
    for k in range(1, max_order + 1):
        st = _STENCILS[k]
        T = [float(st @ r) / h**k for r, h in zip(values, steps)]
        rnd = [eps * fmax * float(np.sum(np.abs(st))) / h**k for h in steps]
        R1 = [(4 * T[i + 1] - T[i]) / 3 for i in range(2)]
        r1 = [(4 * rnd[i + 1] + rnd[i]) / 3 for i in range(2)]
        R2 = (16 * R1[1] - R1[0]) / 15
        r2 = (16 * r1[1] + r1[0]) / 15
        candidates = [
            (T[0], abs(T[0] - T[1]) + rnd[0]),
            (T[1], abs(T[1] - T[2]) + rnd[1]),
            (R1[1], abs(R1[1] - R1[0]) + r1[1]),
            (R2, abs(R2 - R1[1]) + r2),
        ]
        best = min(candidates, key=lambda c: c[1])
        derivs[k - 1], errs[k - 1] = best
    return FDResult(derivs, errs)
