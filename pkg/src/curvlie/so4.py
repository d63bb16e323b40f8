"""Normal forms for left-invariant metrics on SO(4).

so(4) = g1 + g2 with both factors copies of so(3). A basis of a factor is
"quaternion compatible" when it is orthonormal and [first, second] is a
positive multiple of the third, i.e. it behaves like i, j, k.

Two normal forms are recognised:

* torus form, in the basis {A1, A2, A3, B1, B2, B3}: phi = c on A1, A2,
  d on B2, B3, and a symmetric 2x2 block (a1, a3; a3, a2) on the plane
  tau = span{A3, B1};
* block form, in the basis {A1, B1, A2, B2, A3, B3}: span{A1, B1} is
  invariant and the only couplings across factors inside the complement sit
  on (A2, B2) and (A3, B3), see ``BLOCK_ZEROS``.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import least_squares

from .algebra import LieAlgebra, Subalgebra, build_so4, is_abelian
from .curvature import puttmann_curvature, sphere_descent
from .errors import FactorsMissing, PlaneNotInvariant, PlaneNotSplit
from .numerics import check_symmetric, eigenspaces, null_space, random_unit_vectors, sym_eigen

PSD_SLACK = 1e-12
TORUS_SLOTS = (2, 3)  # A3, B1 in the torus-form basis
# index pairs that must vanish in the block-form basis {A1,B1,A2,B2,A3,B3}
BLOCK_ZEROS = tuple(
    [(i, j) for i in (0, 1) for j in (2, 3, 4, 5)] + [(2, 5), (3, 4)]
)


def _so4(algebra):
    algebra = build_so4() if algebra is None else algebra
    if algebra.factors is None or len(algebra.factors) != 2:
        raise FactorsMissing("so(4) routines need an algebra with two declared factors")
    for lo, hi in algebra.factors:
        if hi - lo != 2:
            raise FactorsMissing("both factors must be three-dimensional")
    return algebra


def _embed(algebra, f, coords):
    s = algebra.factor_slices()[f]
    out = np.zeros(algebra.dim)
    out[s] = coords
    return out


def oriented_triple(algebra: LieAlgebra, f: int, vec, slot: int) -> np.ndarray:
    """Quaternion-compatible orthonormal basis of factor ``f`` (rows, working
    coordinates) with the unit vector ``vec`` placed at position ``slot``."""
    s = algebra.factor_slices()[f]
    u = np.asarray(vec, dtype=float)[s]
    u = u / np.linalg.norm(u)
    comp = null_space(u[None, :])  # 3 x 2, deterministic
    a, b = comp[:, 0], comp[:, 1]
    # cyclic order starting at slot: (slot, slot+1, slot+2)
    trip = [None, None, None]
    trip[slot] = u
    trip[(slot + 1) % 3] = a
    trip[(slot + 2) % 3] = b
    rows = np.array([_embed(algebra, f, v) for v in trip])
    if algebra.bracket(rows[0], rows[1]) @ rows[2] < 0:
        # flip the vector that is not pinned
        k = (slot + 2) % 3
        rows[k] = -rows[k]
    return rows


# --- singular eigenvectors and products ------------------------------------


def singular_eigenvector(phi, tol: float = 1e-9, algebra: Optional[LieAlgebra] = None):
    """A unit eigenvector of ``phi`` lying in one factor, or None.

    Whole eigenspaces are intersected with each factor, so singular vectors
    hidden inside a repeated eigenvalue are found as well.
    """
    algebra = _so4(algebra)
    phi = check_symmetric(phi)
    slices = algebra.factor_slices()
    for _, V in eigenspaces(sym_eigen(phi)):
        for f, s in enumerate(slices):
            other = np.ones(algebra.dim, dtype=bool)
            other[s] = False
            K = null_space(V[other, :], tol)
            if K.shape[1]:
                w = V @ K[:, 0]
                w[other] = 0.0
                w /= np.linalg.norm(w)
                if w[np.argmax(np.abs(w))] < 0:
                    w = -w
                return w + 0.0  # no negative zeros in reports
    return None


def detect_product(phi, tol: float = 1e-9, algebra: Optional[LieAlgebra] = None):
    """The two diagonal blocks if phi preserves both factors, else None."""
    algebra = _so4(algebra)
    phi = check_symmetric(phi)
    s1, s2 = algebra.factor_slices()
    if np.linalg.norm(phi[s1, s2]) > tol:
        return None
    return phi[s1, s1].copy(), phi[s2, s2].copy()


# --- torus form -------------------------------------------------------------


@dataclass(frozen=True)
class TorusForm:
    c: float
    d: float
    tau_block: np.ndarray  # [[a1, a3], [a3, a2]] on (A3, B1)
    basis: np.ndarray  # columns A1, A2, A3, B1, B2, B3 in working coordinates
    residual: float = 0.0

    def matrix(self) -> np.ndarray:
        """The metric in the adapted basis."""
        M = np.diag([self.c, self.c, 0.0, 0.0, self.d, self.d])
        M[2:4, 2:4] = self.tau_block
        return M

    def phi(self) -> np.ndarray:
        return self.basis @ self.matrix() @ self.basis.T

    def bound_matrix(self) -> np.ndarray:
        return (4.0 / 3.0) * np.diag([self.c, self.d])

    @property
    def bound_satisfied(self) -> bool:
        gap = self.bound_matrix() - self.tau_block
        return bool(sym_eigen(0.5 * (gap + gap.T)).eigenvalues[0] >= -PSD_SLACK)

    def to_json(self):
        return {
            "c": float(self.c),
            "d": float(self.d),
            "tau_block": self.tau_block.tolist(),
            "basis": self.basis.T.tolist(),
            "bound": self.bound_satisfied,
            "residual": float(self.residual),
        }


def torus_form_metric(c: float, d: float, tau_block, algebra: Optional[LieAlgebra] = None) -> np.ndarray:
    """phi in the standard basis A1..B3 with the given torus-form entries."""
    algebra = _so4(algebra)
    M = np.diag([c, c, 0.0, 0.0, d, d])
    M[2:4, 2:4] = np.asarray(tau_block, dtype=float)
    return M


def _torus_candidate(algebra, phi, u, v, tol):
    A = oriented_triple(algebra, 0, u, 2)
    B = oriented_triple(algebra, 1, v, 0)
    basis = np.concatenate([A, B]).T
    M = basis.T @ phi @ basis
    c = 0.5 * (M[0, 0] + M[1, 1])
    d = 0.5 * (M[4, 4] + M[5, 5])
    tau = 0.5 * (M[2:4, 2:4] + M[2:4, 2:4].T)
    form = TorusForm(c, d, tau, basis)
    resid = float(np.max(np.abs(M - form.matrix())))
    if resid > tol:
        return None
    return TorusForm(c, d, tau, basis, resid)


def _scalar_complement_axes(block, tol):
    """Unit vectors u with block u = a u and block = scalar on u-perp."""
    spec = sym_eigen(block)
    w, V = spec.eigenvalues, spec.eigenvectors
    scale = max(1.0, spec.operator_norm)
    out = []
    if abs(w[2] - w[0]) <= tol * scale:
        out.append(np.array([0.0, 0.0, 1.0]))
    if abs(w[1] - w[0]) <= tol * scale:
        out.append(V[:, 2])
    if abs(w[2] - w[1]) <= tol * scale:
        out.append(V[:, 0])
    return out


def detect_torus_form(phi, tol: float = 1e-9, algebra: Optional[LieAlgebra] = None):
    """Find a quaternion-compatible basis putting phi into torus form.

    Returns ``(TorusForm, bound_satisfied)`` or None.
    """
    algebra = _so4(algebra)
    phi = check_symmetric(phi)
    s1, s2 = algebra.factor_slices()
    U, S, Vt = np.linalg.svd(phi[s1, s2])
    scale = max(1.0, float(np.max(np.abs(phi))))
    if S[0] > tol * scale:
        if S[1] > tol * scale:
            return None
        pairs = [(U[:, 0], Vt[0])]
    else:
        pairs = [(u, v) for u in _scalar_complement_axes(phi[s1, s1], tol)
                 for v in _scalar_complement_axes(phi[s2, s2], tol)]
    for u, v in pairs:
        form = _torus_candidate(algebra, phi, _embed(algebra, 0, u), _embed(algebra, 1, v), tol * scale)
        if form is not None:
            return form, form.bound_satisfied
    return None


def torus_curvature_identity(form: TorusForm, alpha: float, beta: float, algebra: Optional[LieAlgebra] = None):
    """Curvature of (alpha A1 + beta B2, A2 + B3) and the matching value
    3/4 (|w|^2 under (4/3) diag(c, d) - |w|^2 under tau), w = (alpha, beta)."""
    algebra = _so4(algebra)
    A1, A2, A3, B1, B2, B3 = form.basis.T
    k = puttmann_curvature(algebra, form.phi(), alpha * A1 + beta * B2, A2 + B3)
    w = np.array([alpha, beta])
    rhs = 0.75 * float(w @ form.bound_matrix() @ w - w @ form.tau_block @ w)
    return k, rhs


# --- invariant abelian planes -----------------------------------------------


def invariance_residual(phi, plane_basis) -> float:
    """Spectral norm of the part of phi(plane) leaving the plane."""
    B = np.atleast_2d(plane_basis)
    P = B.T @ B
    return float(np.linalg.norm((np.eye(P.shape[0]) - P) @ phi @ B.T, 2))


def _split_plane(algebra, u, v):
    rows = []
    for w in (u, v):
        w = w / np.linalg.norm(w)
        if w[np.argmax(np.abs(w))] < 0:
            w = -w
        rows.append(w + 0.0)
    return np.array(rows)


POLISH_WINDOW = 1e-3  # candidates further off are not worth polishing


def _polish_plane(algebra, phi, u, v):
    """Minimise the invariance residual over split planes near span{u, v}."""
    s1, s2 = algebra.factor_slices()

    def rows(x):
        W = np.zeros((2, algebra.dim))
        W[0, s1] = x[:3] / np.linalg.norm(x[:3])
        W[1, s2] = x[3:] / np.linalg.norm(x[3:])
        return W

    def resid(x):
        W = rows(x)
        return ((np.eye(algebra.dim) - W.T @ W) @ phi @ W.T).ravel()

    x0 = np.concatenate([u[s1], v[s2]])
    sol = least_squares(resid, x0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    W = rows(sol.x)
    return W[0], W[1]


def _factor_parts(algebra, W, tol):
    """Top and bottom directions of a 2-plane W (rows) if it is split, else None."""
    s1, s2 = algebra.factor_slices()
    parts = []
    for s in (s1, s2):
        blk = W[:, s]
        _, sv, vt = np.linalg.svd(blk)
        if sv[0] <= tol or sv[1] > tol:
            return None
        d = vt[0] if vt[0][np.argmax(np.abs(vt[0]))] > 0 else -vt[0]
        parts.append(_embed(algebra, len(parts), d))
    return parts


def _minors(a, b):
    n = a.shape[-1]
    return np.stack([a[..., i] * b[..., j] - a[..., j] * b[..., i]
                     for i in range(n) for j in range(i + 1, n)], axis=-1)


def _mixed_search(algebra, E1, E2, rng, starts):
    """Look for w1 in E1, w2 in E2 whose span is split across the factors."""
    s1, s2 = algebra.factor_slices()

    def objective(A, B):
        W1 = A @ E1.T
        W2 = B @ E2.T
        r = np.concatenate([_minors(W1[..., s1], W2[..., s1]), _minors(W1[..., s2], W2[..., s2])], axis=-1)
        return np.sum(r * r, axis=-1)

    best = None
    A0 = random_unit_vectors(rng, starts, E1.shape[1])
    B0 = random_unit_vectors(rng, starts, E2.shape[1])
    for a, b in zip(A0, B0):
        a, b, v = sphere_descent(objective, a, b, steps=400)
        if best is None or v < best[2]:
            best = (a, b, v)
    return E1 @ best[0], E2 @ best[1]


def invariant_abelian_plane(
    phi,
    tol: float = 1e-9,
    budget: int = 2000,
    seed: int = 42,
    algebra: Optional[LieAlgebra] = None,
) -> Optional[Subalgebra]:
    """Search for a phi-invariant plane span{(u, 0), (0, v)}.

    Such planes are exactly the two-dimensional abelian subalgebras of so(4).
    Candidates come from the eigenspaces of phi; a seeded search over (u, v)
    is the last resort. None means the search failed, not that no plane
    exists.
    """
    algebra = _so4(algebra)
    phi = check_symmetric(phi)
    groups = eigenspaces(sym_eigen(phi))

    def certify(u, v):
        W = _split_plane(algebra, u, v)
        r = invariance_residual(phi, W)
        if 1e-14 < r <= POLISH_WINDOW:
            W2 = _split_plane(algebra, *_polish_plane(algebra, phi, W[0], W[1]))
            r2 = invariance_residual(phi, W2)
            if r2 < r:
                W, r = W2, r2
        if r <= tol:
            return Subalgebra(W)
        return None

    # coupled planes: one eigenvector from each of two simple eigenvalues
    simple = [V[:, 0] for _, V in groups if V.shape[1] == 1]
    for i in range(len(simple)):
        for j in range(i + 1, len(simple)):
            parts = _factor_parts(algebra, np.array([simple[i], simple[j]]), 1e-6)
            if parts is not None:
                sub = certify(*parts)
                if sub is not None:
                    return sub

    # singular eigenvectors, one per factor
    s1, s2 = algebra.factor_slices()
    mask2 = np.zeros(algebra.dim, dtype=bool)
    mask2[s2] = True
    in1, in2 = [], []
    for _, V in groups:
        K1 = null_space(V[mask2, :], tol)
        K2 = null_space(V[~mask2, :], tol)
        if K1.shape[1]:
            in1.append(V @ K1[:, 0])
        if K2.shape[1]:
            in2.append(V @ K2[:, 0])
    for u in in1:
        for v in in2:
            u0, v0 = u.copy(), v.copy()
            u0[mask2] = 0.0
            v0[~mask2] = 0.0
            sub = certify(u0, v0)
            if sub is not None:
                return sub

    rng = np.random.default_rng(seed)
    # coupled planes inside repeated eigenvalues
    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            E1, E2 = groups[i][1], groups[j][1]
            if E1.shape[1] == 1 and E2.shape[1] == 1:
                continue
            w1, w2 = _mixed_search(algebra, E1, E2, rng, starts=8)
            parts = _factor_parts(algebra, np.array([w1, w2]), 1e-6)
            if parts is not None:
                sub = certify(*parts)
                if sub is not None:
                    return sub

    # generic search over split planes
    def objective(U, V):
        U6 = np.zeros(U.shape[:-1] + (algebra.dim,))
        V6 = np.zeros_like(U6)
        U6[..., s1] = U
        V6[..., s2] = V
        out = np.empty(U.shape[0])
        for k in range(U.shape[0]):
            out[k] = invariance_residual(phi, np.array([U6[k], V6[k]])) ** 2
        return out

    U = random_unit_vectors(rng, budget, 3)
    V = random_unit_vectors(rng, budget, 3)
    vals = objective(U, V)
    for k in np.argsort(vals, kind="stable")[:5]:
        u, v, _ = sphere_descent(objective, U[k], V[k], steps=400)
        sub = certify(_embed(algebra, 0, u), _embed(algebra, 1, v))
        if sub is not None:
            return sub
    return None


# --- block form -------------------------------------------------------------


@dataclass(frozen=True)
class BlockForm:
    basis: np.ndarray  # columns A1, B1, A2, B2, A3, B3
    a: tuple  # (a1, a2, a3)
    b: tuple
    c: tuple
    lambda_c: float
    mu_c: float
    residual: float  # largest entry on a pattern zero

    def matrix(self) -> np.ndarray:
        a1, a2, a3 = self.a
        b1, b2, b3 = self.b
        c1, c2, c3 = self.c
        lam, mu = self.lambda_c, self.mu_c
        return np.array([
            [a1, a3, 0, 0, 0, 0],
            [a3, a2, 0, 0, 0, 0],
            [0, 0, b1, b3, lam, 0],
            [0, 0, b3, b2, 0, mu],
            [0, 0, lam, 0, c1, c3],
            [0, 0, 0, mu, c3, c2],
        ], dtype=float)

    def to_json(self):
        return {
            "basis": self.basis.T.tolist(),
            "a": [float(x) for x in self.a],
            "b": [float(x) for x in self.b],
            "c": [float(x) for x in self.c],
            "lambda": float(self.lambda_c),
            "mu": float(self.mu_c),
            "residual": float(self.residual),
        }


def _rot(theta):
    return np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])


def _diagonalizing_angle(K):
    """Angle of a rotation whose columns diagonalise the symmetric 2x2 K."""
    return 0.5 * np.arctan2(2.0 * K[0, 1], K[0, 0] - K[1, 1])


def _cross_angles(M, K1, K2, tol):
    """Rotations R1, R2 (det +1) with R1^T M R2 diagonal."""
    if np.max(np.abs(M)) <= tol:
        return _rot(_diagonalizing_angle(K1)), _rot(_diagonalizing_angle(K2))
    U, S, Vt = np.linalg.svd(M)
    if abs(S[0] - S[1]) > tol:
        if np.linalg.det(U) < 0:
            U[:, 1] *= -1
        V = Vt.T
        if np.linalg.det(V) < 0:
            V[:, 1] *= -1
        return U, V
    # conformal M: every R1 admits a partner; use it to clear the g1 coupling
    R1 = _rot(_diagonalizing_angle(K1))
    N = R1.T @ M
    R2 = _rot(np.arctan2(N[0, 1], N[0, 0]))
    return R1, R2


def block_form_basis(phi, plane: Subalgebra, algebra: Optional[LieAlgebra] = None, tol: float = 1e-9) -> BlockForm:
    """Express phi in the block-form basis built around an invariant split plane.

    The plane's g1 direction becomes A1 and its g2 direction B1; the
    remaining directions are rotated within each factor (orientation kept)
    so that the cross-factor block on the complement is diagonal.
    """
    algebra = _so4(algebra)
    phi = check_symmetric(phi)
    W = np.atleast_2d(plane.basis)
    if W.shape[0] != 2 or not is_abelian(algebra, Subalgebra(W), 1e-8):
        raise PlaneNotSplit("plane must be a two-dimensional abelian subalgebra")
    parts = _factor_parts(algebra, W, 1e-8)
    if parts is None:
        raise PlaneNotSplit("plane is not spanned by one vector from each factor")
    u, v = parts
    scale = max(1.0, float(np.max(np.abs(phi))))
    resid = invariance_residual(phi, np.array([u, v]))
    if resid > tol * scale:
        raise PlaneNotInvariant(f"plane invariance residual {resid:.3e}")

    A = oriented_triple(algebra, 0, u, 0)
    B = oriented_triple(algebra, 1, v, 0)
    a, b = A[1], A[2]
    p, q = B[1], B[2]
    G1 = np.array([a, b])
    G2 = np.array([p, q])
    M = G1 @ phi @ G2.T
    K1 = G1 @ phi @ G1.T
    K2 = G2 @ phi @ G2.T
    R1, R2 = _cross_angles(M, K1, K2, tol * scale)
    A2, A3 = (R1.T @ G1)
    B2, B3 = (R2.T @ G2)
    basis = np.array([u, v, A2, B2, A3, B3]).T
    P = basis.T @ phi @ basis
    P = 0.5 * (P + P.T)
    residual = max(abs(P[i, j]) for i, j in BLOCK_ZEROS)
    return BlockForm(
        basis,
        (P[0, 0], P[1, 1], P[0, 1]),
        (P[2, 2], P[3, 3], P[2, 3]),
        (P[4, 4], P[5, 5], P[4, 5]),
        P[2, 4],
        P[3, 5],
        float(residual),
    )


def classify(phi, tol: float = 1e-9, budget: int = 2000, seed: int = 42, algebra: Optional[LieAlgebra] = None) -> dict:
    """Run every detector and collect a JSON-ready report."""
    algebra = _so4(algebra)
    report = {"singular": None, "product": None, "torus_form": None, "invariant_plane": None, "block_form": None}
    sv = singular_eigenvector(phi, tol, algebra)
    if sv is not None:
        report["singular"] = [float(x) for x in sv]
    prod = detect_product(phi, tol, algebra)
    if prod is not None:
        report["product"] = {"g1": prod[0].tolist(), "g2": prod[1].tolist()}
    torus = detect_torus_form(phi, tol, algebra)
    if torus is not None:
        report["torus_form"] = torus[0].to_json()
    plane = invariant_abelian_plane(phi, tol, budget, seed, algebra)
    if plane is not None:
        report["invariant_plane"] = {
            "basis": plane.basis.tolist(),
            "residual": invariance_residual(phi, plane.basis),
        }
        report["block_form"] = block_form_basis(phi, plane, algebra, tol).to_json()
    return report
