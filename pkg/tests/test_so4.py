import numpy as np
import pytest

from conftest import random_spd
from curvlie import assert_nonneg, build_so3, check_inf_nonneg, puttmann_curvature
from curvlie.algebra import Subalgebra, is_abelian
from curvlie.errors import FactorsMissing, PlaneNotInvariant, PlaneNotSplit
from curvlie.numerics import random_orthogonal
from curvlie.so4 import (
    BLOCK_ZEROS,
    BlockForm,
    block_form_basis,
    classify,
    detect_product,
    detect_torus_form,
    invariance_residual,
    invariant_abelian_plane,
    oriented_triple,
    singular_eigenvector,
    torus_curvature_identity,
    torus_form_metric,
)

BOUNDARY = np.diag([4 / 3, 4 / 3])
UNBOUNDED = np.array([[1.0, 0.5], [0.5, 1.0]])


def rotation3(rng):
    Q = random_orthogonal(rng, 3)
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    return Q


def factor_rotation(rng):
    R = np.zeros((6, 6))
    R[:3, :3] = rotation3(rng)
    R[3:, 3:] = rotation3(rng)
    return R


def random_torus(rng, within_bound=None):
    c, d = rng.uniform(0.5, 2.0, 2)
    while True:
        a1, a2 = rng.uniform(0.3, 2.5, 2)
        a3 = rng.uniform(-0.8, 0.8) * np.sqrt(a1 * a2)
        tau = np.array([[a1, a3], [a3, a2]])
        ok = np.linalg.eigvalsh((4 / 3) * np.diag([c, d]) - tau)[0] >= 0
        if within_bound is None or ok == within_bound:
            return c, d, tau


def block_form_metric(rng):
    a1, a2, b1, b2, c1, c2 = rng.uniform(1, 3, 6)
    a3, b3, c3, lam, mu = rng.uniform(-0.4, 0.4, 5)
    bf = BlockForm(np.eye(6), (a1, a2, a3), (b1, b2, b3), (c1, c2, c3), lam, mu, 0.0)
    order = [0, 3, 1, 4, 2, 5]  # block slots -> standard indices
    P = np.zeros((6, 6))
    for slot, std in enumerate(order):
        P[std, slot] = 1.0
    return P @ bf.matrix() @ P.T


def test_factors_required():
    with pytest.raises(FactorsMissing):
        singular_eigenvector(np.eye(3), algebra=build_so3())


def test_oriented_triple_is_quaternionic(so4, rng):
    for f in (0, 1):
        for slot in (0, 1, 2):
            v = np.zeros(6)
            v[3 * f:3 * f + 3] = rng.standard_normal(3)
            T = oriented_triple(so4, f, v, slot)
            assert np.allclose(T @ T.T, np.eye(3), atol=1e-14)
            assert so4.bracket(T[0], T[1]) @ T[2] == pytest.approx(1.0)
            assert abs(T[slot] @ v / np.linalg.norm(v) - 1) <= 1e-14


# --- singular eigenvectors and products ---


def test_singular_eigenvector_examples(so4, rng):
    w = singular_eigenvector(np.diag([1.0, 2, 3, 4, 5, 6]))
    assert np.allclose(w, so4.vector("A1"))
    w = singular_eigenvector(torus_form_metric(1.0, 2.0, [[1.2, 0.3], [0.3, 1.5]]))
    assert np.allclose(w, so4.vector("A1"))
    for _ in range(5):
        R = factor_rotation(rng)
        phi = R @ block_form_metric(rng) @ R.T
        assert singular_eigenvector(phi) is None


def test_singular_eigenvector_inside_repeated_eigenvalue():
    # eigenvalue 2 has a 2-dim eigenspace that is tilted but contains B3
    R = np.eye(6)
    c, s = np.cos(0.4), np.sin(0.4)
    R[[0, 3], [0, 3]] = c
    R[0, 3], R[3, 0] = -s, s
    phi = R @ np.diag([1.0, 3, 4, 2, 5, 2]) @ R.T
    w = singular_eigenvector(phi)
    assert w is not None
    top, bottom = np.linalg.norm(w[:3]), np.linalg.norm(w[3:])
    assert min(top, bottom) <= 1e-9
    assert np.allclose(phi @ w, (w @ phi @ w) * w, atol=1e-9)


def test_detect_product_examples():
    phi = np.diag([1.0, 2, 3, 4, 5, 6])
    phi[0, 1] = phi[1, 0] = 0.5
    g1, g2 = detect_product(phi)
    assert np.array_equal(g1, phi[:3, :3]) and np.array_equal(g2, phi[3:, 3:])
    assert detect_product(torus_form_metric(1, 1, UNBOUNDED)) is None
    g1, g2 = detect_product(np.eye(6))
    assert np.array_equal(g1, np.eye(3)) and np.array_equal(g2, np.eye(3))


# --- torus form ---


@pytest.mark.parametrize(
    "tau, bound",
    [(BOUNDARY, True), (UNBOUNDED, False), (np.eye(2), True)],
)
def test_detect_torus_form_examples(tau, bound):
    form, ok = detect_torus_form(torus_form_metric(1.0, 1.0, tau))
    assert ok is bound and form.bound_satisfied is bound
    assert np.allclose(form.tau_block, tau, atol=1e-12)
    assert form.c == pytest.approx(1.0) and form.d == pytest.approx(1.0)


def test_identity_is_a_torus_form():
    form, ok = detect_torus_form(np.eye(6))
    assert ok and np.allclose(form.tau_block, np.eye(2))


def test_detect_torus_form_in_rotated_frames(so4, rng):
    for _ in range(20):
        c, d, tau = random_torus(rng)
        R = factor_rotation(rng)
        phi = R @ torus_form_metric(c, d, tau) @ R.T
        form, _ = detect_torus_form(phi)
        B = form.basis
        assert np.allclose(B.T @ B, np.eye(6), atol=1e-12)
        assert np.max(np.abs(form.phi() - phi)) <= 1e-10
        assert form.c == pytest.approx(c) and form.d == pytest.approx(d)
        assert np.linalg.eigvalsh(form.tau_block)[0] > 0
        A1, A2, A3, B1, B2, B3 = B.T
        assert np.allclose(so4.bracket(A1, A2), A3, atol=1e-12)
        assert np.allclose(so4.bracket(B2, B3), B1, atol=1e-12)


def test_no_torus_form_for_generic_metric(rng):
    phi = random_spd(rng, 6)
    assert detect_torus_form(phi) is None


def test_torus_identity_examples():
    form, _ = detect_torus_form(torus_form_metric(1.0, 1.0, BOUNDARY))
    k, rhs = torus_curvature_identity(form, 1.0, 1.0)
    assert abs(k) <= 1e-14 and abs(rhs) <= 1e-14
    form, _ = detect_torus_form(torus_form_metric(1.0, 1.0, np.eye(2)))
    k, rhs = torus_curvature_identity(form, 1.0, 1.0)
    assert k == pytest.approx(0.5) and rhs == pytest.approx(0.5)
    k, rhs = torus_curvature_identity(form, 0.0, 0.0)
    assert k == 0.0 and rhs == 0.0


def test_torus_identity_on_grid_for_seeded_forms():
    rng = np.random.default_rng(99)
    grid = np.linspace(-2, 2, 20)
    for _ in range(50):
        c, d, tau = random_torus(rng)
        R = factor_rotation(rng)
        form, _ = detect_torus_form(R @ torus_form_metric(c, d, tau) @ R.T)
        for a in grid:
            for b in grid:
                k, rhs = torus_curvature_identity(form, a, b)
                assert abs(k - rhs) <= 1e-10 * (1 + abs(k))


def test_bound_violations_have_negative_planes(so4):
    rng = np.random.default_rng(5)
    for _ in range(5):
        c, d, tau = random_torus(rng, within_bound=False)
        phi = torus_form_metric(c, d, tau)
        form, ok = detect_torus_form(phi)
        assert not ok
        # the identity plane along the worst direction of the bound gap
        w = np.linalg.eigh(form.bound_matrix() - form.tau_block)[1][:, 0]
        k, _ = torus_curvature_identity(form, *w)
        assert k < 0
        verdict = assert_nonneg(so4, phi, budget=3000)
        assert verdict.refuted and verdict.min_value <= -1e-8


# --- invariant planes and block form ---


def _assert_split_invariant(so4, phi, plane, tol=1e-9):
    assert plane.dim == 2 and is_abelian(so4, plane)
    assert invariance_residual(phi, plane.basis) <= tol
    for row in plane.basis:
        assert min(np.linalg.norm(row[:3]), np.linalg.norm(row[3:])) <= 1e-12


def test_invariant_plane_identity(so4):
    _assert_split_invariant(so4, np.eye(6), invariant_abelian_plane(np.eye(6)))


def test_invariant_plane_torus_form_is_tau(so4):
    phi = torus_form_metric(1.0, 2.0, [[1.2, 0.3], [0.3, 1.5]])
    plane = invariant_abelian_plane(phi)
    _assert_split_invariant(so4, phi, plane)
    assert np.allclose(plane.projector, np.diag([0, 0, 1, 1, 0, 0]), atol=1e-12)


def test_invariant_plane_product_with_distinct_eigenvalues(so4):
    phi = np.diag([1.0, 2, 3, 4, 5, 6])
    plane = invariant_abelian_plane(phi)
    _assert_split_invariant(so4, phi, plane)
    for row in plane.basis:
        assert np.sum(np.abs(row) > 1e-12) == 1  # one eigenvector per factor


def test_invariant_plane_for_rotated_block_forms(so4):
    rng = np.random.default_rng(3)
    for _ in range(15):
        R = factor_rotation(rng)
        phi = R @ block_form_metric(rng) @ R.T
        plane = invariant_abelian_plane(phi, budget=500)
        _assert_split_invariant(so4, phi, plane)
        assert block_form_basis(phi, plane).residual <= 1e-10


def test_invariant_plane_is_seed_deterministic(rng):
    R = factor_rotation(rng)
    phi = R @ block_form_metric(rng) @ R.T
    a = invariant_abelian_plane(phi, seed=4)
    b = invariant_abelian_plane(phi, seed=4)
    assert np.array_equal(a.basis, b.basis)


def test_block_form_identity(so4):
    plane = Subalgebra(np.array([so4.vector("A3"), so4.vector("B1")]))
    bf = block_form_basis(np.eye(6), plane)
    assert np.allclose(bf.a, (1, 1, 0)) and np.allclose(bf.b, (1, 1, 0)) and np.allclose(bf.c, (1, 1, 0))
    assert abs(bf.lambda_c) <= 1e-15 and abs(bf.mu_c) <= 1e-15


def test_block_form_of_torus_form(so4):
    c, d, tau = 1.5, 0.7, np.array([[1.1, 0.4], [0.4, 0.8]])
    phi = torus_form_metric(c, d, tau)
    plane = Subalgebra(np.array([so4.vector("A3"), so4.vector("B1")]))
    bf = block_form_basis(phi, plane)
    assert np.allclose([bf.a[0], bf.a[1], bf.a[2]], [tau[0, 0], tau[1, 1], tau[0, 1]])
    assert np.allclose(sorted([bf.b[0], bf.b[1], bf.c[0], bf.c[1]]), sorted([c, c, d, d]))
    assert abs(bf.lambda_c) <= 1e-12 and abs(bf.mu_c) <= 1e-12
    assert bf.residual <= 1e-12
    assert np.allclose(bf.basis @ bf.matrix() @ bf.basis.T, phi, atol=1e-12)


def test_block_form_product_has_no_couplings(so4):
    phi = np.diag([1.0, 2, 3, 4, 5, 6])
    plane = Subalgebra(np.array([so4.vector("A1"), so4.vector("B1")]))
    bf = block_form_basis(phi, plane)
    assert bf.lambda_c == pytest.approx(0, abs=1e-14) and bf.mu_c == pytest.approx(0, abs=1e-14)


def test_block_form_layout_and_orientation(so4, rng):
    R = factor_rotation(rng)
    phi = R @ block_form_metric(rng) @ R.T
    bf = block_form_basis(phi, invariant_abelian_plane(phi))
    M = bf.basis.T @ phi @ bf.basis
    assert max(abs(M[i, j]) for i, j in BLOCK_ZEROS) <= 1e-10
    assert np.allclose(M, bf.matrix(), atol=1e-10)
    A1, B1, A2, B2, A3, B3 = bf.basis.T
    assert np.allclose(so4.bracket(A1, A2), A3, atol=1e-12)
    assert np.allclose(so4.bracket(B1, B2), B3, atol=1e-12)


def test_block_form_errors(so4):
    with pytest.raises(PlaneNotSplit):
        block_form_basis(np.eye(6), Subalgebra(np.array([so4.vector("A1"), so4.vector("A2")])))
    mixed = np.array([np.r_[1, 0, 0, 1, 0, 0] / np.sqrt(2), np.r_[0, 1, 0, 0, 1, 0] / np.sqrt(2)])
    with pytest.raises(PlaneNotSplit):
        block_form_basis(np.eye(6), Subalgebra(mixed))
    phi = torus_form_metric(1.0, 1.0, UNBOUNDED)
    with pytest.raises(PlaneNotInvariant):
        block_form_basis(phi, Subalgebra(np.array([so4.vector("A3"), so4.vector("B2")])))


# --- consistency with the classification of singular eigenvectors ---


def test_singular_passing_deformations_are_product_or_torus(so4):
    rng = np.random.default_rng(17)
    candidates = []
    for _ in range(4):
        R = factor_rotation(rng)
        blk = np.zeros((6, 6))
        blk[:3, :3] = random_spd(rng, 3)
        blk[3:, 3:] = random_spd(rng, 3)
        candidates.append(R @ blk @ R.T)
        c, d, tau = random_torus(rng, within_bound=True)
        candidates.append(R @ torus_form_metric(c, d, tau) @ R.T)
        candidates.append(R @ block_form_metric(rng) @ R.T)
        candidates.append(random_spd(rng, 6))
    checked = 0
    for phi in candidates:
        psi = np.eye(6) - np.linalg.inv(phi)
        if singular_eigenvector(phi) is None:
            continue
        if check_inf_nonneg(so4, 0.5 * (psi + psi.T), budget=10000, seed=42).kind != "Passed":
            continue
        checked += 1
        assert detect_product(phi) is not None or detect_torus_form(phi) is not None
    assert checked >= 4


def test_classify_report(so4):
    report = classify(torus_form_metric(1.0, 1.0, BOUNDARY))
    assert set(report) == {"singular", "product", "torus_form", "invariant_plane", "block_form"}
    assert report["torus_form"]["bound"] is True
    assert report["invariant_plane"]["residual"] <= 1e-9
    report = classify(random_spd(np.random.default_rng(0), 6))
    assert report["torus_form"] is None and report["product"] is None


def test_witness_plane_curvature(so4):
    # curvature of the identity plane equals the direct formula
    form, _ = detect_torus_form(torus_form_metric(1.0, 1.0, UNBOUNDED))
    A1, A2, A3, B1, B2, B3 = form.basis.T
    k = puttmann_curvature(so4, form.phi(), A1 - B2, A2 + B3)
    assert k == pytest.approx(torus_curvature_identity(form, 1.0, -1.0)[1])
