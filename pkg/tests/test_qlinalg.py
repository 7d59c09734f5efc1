"""Tests for the quaternionic matrix layer.

The scalar Quaternion class provides the independent slow path: matrix
products, inner products and adjoints are re-derived entrywise with
scalar arithmetic and compared against the vectorized implementations.
"""

import numpy as np
import pytest

from qreduce import sampling
from qreduce.errors import DimensionError, NotAntiSelfAdjoint, NotInImage, NotNormal
from qreduce.qlinalg import (
    QMatrix,
    QVector,
    adjoint,
    block_symmetry_residual,
    classify_operator,
    commutator_norm,
    complex_embed,
    complex_unembed,
    embed_vector,
    gram_schmidt_h,
    inner,
    operator_norm,
    outer,
    polar_antiselfadjoint,
    s_eigenspheres,
    spectral_projections,
    unembed_vector,
)
from qreduce.quat import (
    E1,
    E2,
    Quaternion,
    STANDARD_FRAME,
    frame_complete,
    qconj,
    qmul,
)


def slow_matmul(a: QMatrix, b: QMatrix) -> QMatrix:
    """Entrywise scalar-quaternion oracle for the matrix product."""
    n = a.n
    data = np.zeros((n, n, 4))
    for m in range(n):
        for k in range(n):
            acc = Quaternion()
            for l in range(n):
                acc = acc + qmul(a.entry(m, l), b.entry(l, k))
            data[m, k] = acc.as_array()
    return QMatrix(data)


def slow_inner(v: QVector, u: QVector) -> Quaternion:
    acc = Quaternion()
    for m in range(v.n):
        acc = acc + qmul(qconj(v.entry(m)), u.entry(m))
    return acc


def real_embedding(t: QMatrix) -> np.ndarray:
    """4n x 4n real representation: each entry q becomes the matrix of left
    multiplication by q on (w, x, y, z) coordinates."""
    n = t.n
    out = np.zeros((4 * n, 4 * n))
    for m in range(n):
        for k in range(n):
            w, x, y, z = t.data[m, k]
            out[4 * m:4 * m + 4, 4 * k:4 * k + 4] = [
                [w, -x, -y, -z],
                [x, w, -z, y],
                [y, z, w, -x],
                [z, -y, x, w],
            ]
    return out


def test_matmul_matches_scalar_oracle():
    rng = np.random.default_rng(0)
    for n in (1, 2, 3):
        a, b = sampling.qmatrix(rng, n), sampling.qmatrix(rng, n)
        fast = a @ b
        slow = slow_matmul(a, b)
        np.testing.assert_allclose(fast.data, slow.data, atol=1e-12)


def test_inner_values_and_sesquilinearity():
    v = QVector.from_quaternions([Quaternion(1), E1])
    u = QVector.from_quaternions([E2, Quaternion(1)])
    assert inner(v, u).is_close(E2 - E1)

    rng = np.random.default_rng(1)
    for _ in range(50):
        v, u = sampling.qvector(rng, 3), sampling.qvector(rng, 3)
        assert inner(v, u).is_close(slow_inner(v, u), tol=1e-12)
        a, b = sampling.quaternion(rng), sampling.quaternion(rng)
        lhs = inner(v * a, u * b)
        rhs = qmul(qmul(qconj(a), inner(v, u)), b)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))

    with pytest.raises(DimensionError):
        inner(sampling.qvector(rng, 2), sampling.qvector(rng, 3))


def test_orthonormal_basis_inner():
    for m in range(3):
        for k in range(3):
            got = inner(QVector.basis(3, m), QVector.basis(3, k))
            assert got.is_close(Quaternion(1.0 if m == k else 0.0))


def test_right_linearity_of_matrix_action():
    rng = np.random.default_rng(2)
    for _ in range(1000):
        n = int(rng.integers(1, 5))
        t = sampling.qmatrix(rng, n)
        v = sampling.qvector(rng, n)
        a = sampling.quaternion(rng)
        lhs = t @ (v * a)
        rhs = (t @ v) * a
        bound = 1e-11 * (1.0 + t.frob() * v.norm() * abs(a))
        assert (lhs - rhs).norm() <= bound


def test_adjoint_involution_and_pairing():
    rng = np.random.default_rng(3)
    t = QMatrix.diag([E1, E1])
    assert (adjoint(t) + t).frob() == 0.0
    for _ in range(50):
        n = int(rng.integers(1, 5))
        t = sampling.qmatrix(rng, n)
        np.testing.assert_allclose(adjoint(adjoint(t)).data, t.data)
        v, u = sampling.qvector(rng, n), sampling.qvector(rng, n)
        lhs = inner(adjoint(t) @ v, u)
        rhs = inner(v, t @ u)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_embed_is_star_homomorphism():
    rng = np.random.default_rng(4)
    frames = [STANDARD_FRAME, frame_complete(sampling.imaginary_unit(rng))]
    for frame in frames:
        for _ in range(40):
            n = int(rng.integers(1, 5))
            a, b = sampling.qmatrix(rng, n), sampling.qmatrix(rng, n)
            ca, cb = complex_embed(a, frame), complex_embed(b, frame)
            prod_direct = complex_embed(a @ b, frame)
            assert np.linalg.norm(prod_direct - ca @ cb) <= 1e-11 * max(
                1.0, np.linalg.norm(ca) * np.linalg.norm(cb))
            np.testing.assert_allclose(complex_embed(a.H, frame), ca.conj().T,
                                       atol=1e-13)
            np.testing.assert_allclose(
                complex_embed(a + b, frame), ca + cb, atol=1e-13)
    np.testing.assert_allclose(complex_embed(QMatrix.identity(3)), np.eye(6),
                               atol=1e-15)


def test_embed_scalar_j():
    t = QMatrix.diag([E2])
    np.testing.assert_allclose(complex_embed(t), [[0, 1], [-1, 0]], atol=1e-15)
    back = complex_unembed(np.array([[0, 1], [-1, 0]], dtype=complex))
    np.testing.assert_allclose(back.data, t.data, atol=1e-15)


def test_unembed_roundtrip_and_rejection():
    rng = np.random.default_rng(5)
    for _ in range(30):
        n = int(rng.integers(1, 5))
        f = frame_complete(sampling.imaginary_unit(rng))
        t = sampling.qmatrix(rng, n)
        back = complex_unembed(complex_embed(t, f), f)
        np.testing.assert_allclose(back.data, t.data, atol=1e-12)
    with pytest.raises(NotInImage):
        complex_unembed(np.array([[1, 0], [0, 2]], dtype=complex))
    assert block_symmetry_residual(np.eye(4, dtype=complex)) == 0.0


def test_vector_embedding_intertwines():
    rng = np.random.default_rng(6)
    for _ in range(30):
        n = int(rng.integers(1, 5))
        f = frame_complete(sampling.imaginary_unit(rng))
        t = sampling.qmatrix(rng, n)
        v = sampling.qvector(rng, n)
        lhs = complex_embed(t, f) @ embed_vector(v, f)
        rhs = embed_vector(t @ v, f)
        np.testing.assert_allclose(lhs, rhs, atol=1e-11)
        back = unembed_vector(embed_vector(v, f), f)
        np.testing.assert_allclose(back.data, v.data, atol=1e-13)
        # complex part of the inner product survives the embedding
        q = inner(v, v)
        assert np.vdot(embed_vector(v, f), embed_vector(v, f)).real == pytest.approx(
            q.w, rel=1e-12)


def test_operator_norm():
    assert operator_norm(QMatrix.identity(4)) == pytest.approx(1.0)
    q = Quaternion(1, 2, -2, 0)  # |q| = 3
    assert operator_norm(QMatrix.diag([q, q])) == pytest.approx(3.0)
    rng = np.random.default_rng(7)
    for _ in range(20):
        t = sampling.qmatrix(rng, 3)
        f1 = frame_complete(sampling.imaginary_unit(rng))
        f2 = frame_complete(sampling.imaginary_unit(rng))
        n1 = np.linalg.norm(complex_embed(t, f1), 2)
        n2 = np.linalg.norm(complex_embed(t, f2), 2)
        assert abs(n1 - n2) <= 1e-11 * max(1.0, n1)


def test_classify_operator_flags():
    flags = classify_operator(QMatrix.identity(3))
    assert flags.selfadjoint and flags.unitary and flags.normal and flags.projection
    assert not flags.antiselfadjoint

    flags = classify_operator(QMatrix.diag([E1, E1, E1]))
    assert flags.antiselfadjoint and flags.unitary and flags.normal
    assert not flags.selfadjoint and not flags.projection

    rng = np.random.default_rng(8)
    v = sampling.unit_qvector(rng, 3)
    flags = classify_operator(outer(v, v))
    assert flags.selfadjoint and flags.normal and flags.projection
    assert not flags.unitary


def test_eigenspheres_identity_and_scalar():
    spheres = s_eigenspheres(QMatrix.identity(3), STANDARD_FRAME.i)
    assert len(spheres) == 1
    rep, mult = spheres[0]
    assert mult == 3 and rep.is_close(Quaternion(1.0), tol=1e-10)

    spheres = s_eigenspheres(QMatrix.diag([E1]), STANDARD_FRAME.i)
    assert len(spheres) == 1
    rep, mult = spheres[0]
    assert mult == 1 and rep.is_close(E1, tol=1e-12)


def test_eigenspheres_real_symmetric_matches_real_oracle():
    rng = np.random.default_rng(9)
    swap = QMatrix.from_real(np.array([[0.0, 1.0], [1.0, 0.0]]))
    spheres = s_eigenspheres(swap, STANDARD_FRAME.i)
    vals = sorted((rep.w, mult) for rep, mult in spheres)
    assert vals[0] == (pytest.approx(-1.0), 1)
    assert vals[1] == (pytest.approx(1.0), 1)

    for _ in range(20):
        n = int(rng.integers(2, 5))
        t = sampling.selfadjoint(rng, n)
        spheres = s_eigenspheres(t, STANDARD_FRAME.i)
        assert sum(m for _, m in spheres) == n
        got = np.sort(np.concatenate([[rep.w] * (4 * m) for rep, m in spheres]))
        oracle = np.sort(np.linalg.eigvalsh(real_embedding(t)))
        np.testing.assert_allclose(got, oracle, atol=1e-9)


def test_eigenspheres_rejects_non_normal():
    t = QMatrix.from_real(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NotNormal):
        s_eigenspheres(t, STANDARD_FRAME.i)


def test_eigensphere_invariance_under_frame_of_report_unit():
    rng = np.random.default_rng(10)
    t = sampling.selfadjoint(rng, 3)
    u = sampling.imaginary_unit(rng)
    spheres = s_eigenspheres(t, u)
    assert sum(m for _, m in spheres) == 3
    for rep, _ in spheres:
        assert np.linalg.norm(rep.vec) <= 1e-9  # selfadjoint: real spheres


def test_spectral_projections_partition_identity():
    rng = np.random.default_rng(11)
    for _ in range(10):
        n = int(rng.integers(2, 5))
        t = sampling.selfadjoint(rng, n)
        pairs = spectral_projections(t)
        total = QMatrix.zeros(n)
        rebuilt = QMatrix.zeros(n)
        for lam, proj in pairs:
            flags = classify_operator(proj, tol=1e-8)
            assert flags.projection
            total = total + proj
            rebuilt = rebuilt + proj * lam
        assert (total - QMatrix.identity(n)).frob() <= 1e-8
        assert (rebuilt - t).frob() <= 1e-7 * max(1.0, t.frob())


def test_polar_antiselfadjoint_diagonal_example():
    a = QMatrix.diag([E1 * 2.0, E2 * 3.0])
    j, m = polar_antiselfadjoint(a)
    np.testing.assert_allclose(m.data, QMatrix.diag(
        [Quaternion(2.0), Quaternion(3.0)]).data, atol=1e-9)
    np.testing.assert_allclose(j.data, QMatrix.diag([E1, E2]).data, atol=1e-9)


def test_polar_antiselfadjoint_kernel_completion():
    a = QMatrix.diag([E1, Quaternion()])
    j, m = polar_antiselfadjoint(a)
    np.testing.assert_allclose(
        m.data, QMatrix.diag([Quaternion(1.0), Quaternion()]).data, atol=1e-9)
    np.testing.assert_allclose(j.data, QMatrix.diag([E1, E1]).data, atol=1e-9)
    ident = QMatrix.identity(2)
    assert (j @ j + ident).frob() <= 1e-9


def test_polar_antiselfadjoint_postconditions_random():
    rng = np.random.default_rng(12)
    for _ in range(60):
        n = int(rng.integers(1, 5))
        a = sampling.antiselfadjoint(rng, n)
        j, m = polar_antiselfadjoint(a)
        ident = QMatrix.identity(n)
        scale = max(1.0, a.frob())
        assert (j @ m - a).frob() <= 1e-9 * scale
        assert (m - m.H).frob() <= 1e-9 * scale
        assert (j.H + j).frob() <= 1e-9
        assert (j @ j + ident).frob() <= 1e-9
        assert (j.H @ j - ident).frob() <= 1e-9
        assert commutator_norm(j, m) <= 1e-9 * scale
        # positive semidefinite modulus
        vals = np.linalg.eigvalsh(complex_embed(m))
        assert vals.min() >= -1e-9 * scale


def test_polar_invertible_reproduces_input():
    rng = np.random.default_rng(13)
    units = [sampling.imaginary_unit(rng).as_quaternion() for _ in range(3)]
    a = QMatrix.diag([u * (1.0 + k) for k, u in enumerate(units)])
    j, m = polar_antiselfadjoint(a)
    assert (j @ m - a).frob() <= 1e-9 * a.frob()


def test_polar_rejects_non_antiselfadjoint():
    with pytest.raises(NotAntiSelfAdjoint):
        polar_antiselfadjoint(QMatrix.identity(2))


def test_gram_schmidt_h():
    rng = np.random.default_rng(14)
    vecs = [sampling.qvector(rng, 4) for _ in range(4)]
    basis = gram_schmidt_h(vecs)
    assert len(basis) == 4
    for a in range(4):
        for b in range(4):
            expected = 1.0 if a == b else 0.0
            assert abs(inner(basis[a], basis[b]) - Quaternion(expected)) <= 1e-11
    # dependent input collapses
    dep = [vecs[0], vecs[0] * sampling.quaternion(rng)]
    assert len(gram_schmidt_h(dep)) == 1


def test_outer_is_rank_one_projection_builder():
    rng = np.random.default_rng(15)
    v = sampling.unit_qvector(rng, 3)
    p = outer(v, v)
    flags = classify_operator(p, tol=1e-9)
    assert flags.projection
    assert abs(p.trace().w - 1.0) <= 1e-12


def test_json_roundtrips():
    rng = np.random.default_rng(16)
    t = sampling.qmatrix(rng, 3)
    np.testing.assert_allclose(QMatrix.from_json(t.to_json()).data, t.data)
    v = sampling.qvector(rng, 3)
    np.testing.assert_allclose(QVector.from_json(v.to_json()).data, v.data)
