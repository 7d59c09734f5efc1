"""Scalar extension and restriction between real, complex and quaternionic
carriers.

Two families of constructions live here.  External ones change nothing
about the vector space but reinterpret matrix entries in a larger scalar
field; internal ones keep the space and install a richer scalar action
from structural operators (an anti-selfadjoint unitary J, or an
anticommuting pair I, J).  The bridge between a quaternionic space and
its complex component space is the splitting

    H = H+ (+) H+ * j,    H+ = {v : Jv = v*i},

computed here with an explicit orthonormal basis so every downstream
statement becomes a matrix identity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    BasisError,
    DimensionError,
    DoesNotCommute,
    InternalInconsistency,
    StructureError,
)
from .qlinalg import QMatrix, QVector, from_right_coords, right_coords
from .quat import (
    Frame,
    ImaginaryUnit,
    Quaternion,
    STANDARD_FRAME,
    frame_complete,
    symplectic_join,
    symplectic_split,
)

DEFAULT_TOL = 1e-10
RANK_TOL = 1e-10


def _check_anti_unitary(j: QMatrix, tol: float, what: str = "J") -> None:
    ident = QMatrix.identity(j.n)
    anti = (j + j.H).frob()
    gram = (j.H @ j - ident).frob()
    if anti > tol * max(1.0, j.frob()) or gram > tol * max(1.0, j.frob() ** 2):
        raise StructureError(
            f"{what} must be unitary and anti-selfadjoint "
            f"(residuals {anti:.2e}, {gram:.2e})")


# ---------------------------------------------------------------------------
# external scalar extension


def extend_scalars(mat: np.ndarray, target: str,
                   frame: Frame = STANDARD_FRAME):
    """Reinterpret a real or complex matrix over a strictly larger field.

    The entries are unchanged; complex entries are embedded into the plane
    of frame.i.  Norm, adjoint and the structure flags are preserved.
    """
    mat = np.asarray(mat)
    source_complex = np.iscomplexobj(mat)
    if target == "complex":
        if source_complex:
            raise ValueError("source field must be strictly smaller than target")
        return mat.astype(complex)
    if target == "quaternion":
        if source_complex:
            return QMatrix.from_complex(mat, frame)
        return QMatrix.from_real(mat.astype(float))
    raise ValueError(f"unknown target field {target!r}")


# ---------------------------------------------------------------------------
# J-induced splitting of a quaternionic space


@dataclass(frozen=True)
class SplitSpace:
    """Orthonormal complex basis of H+ for a compatible pair (J, i).

    `basis` holds the basis vectors as the columns of a QMatrix, so that
    restriction and extension are three-factor matrix products.
    """

    J: QMatrix
    frame: Frame
    basis: QMatrix

    @property
    def n(self) -> int:
        return self.J.n

    @property
    def i(self) -> ImaginaryUnit:
        return self.frame.i

    def plus_basis(self) -> list[QVector]:
        return [self.basis.column(m) for m in range(self.n)]

    def to_json(self) -> dict:
        return {
            "J": self.J.to_json(),
            "i": self.i.to_json(),
            "plus_basis": [b.to_json() for b in self.plus_basis()],
        }

    @classmethod
    def from_json(cls, payload: dict) -> "SplitSpace":
        j = QMatrix.from_json(payload["J"])
        frame = frame_complete(ImaginaryUnit.from_vector(payload["i"]))
        cols = [QVector.from_json(b) for b in payload["plus_basis"]]
        data = np.stack([c.data for c in cols], axis=1)
        return cls(j, frame, QMatrix(data))


def plus_projector_apply(j: QMatrix, v: QVector, frame: Frame) -> QVector:
    """P+ v = (v - (Jv) * i) / 2, the projector onto {v : Jv = v*i}."""
    return (v - (j @ v) * frame.i.as_quaternion()) * 0.5


def split_plus_minus(j: QMatrix, i: ImaginaryUnit,
                     tol: float = DEFAULT_TOL) -> SplitSpace:
    """Compute an orthonormal basis of H+ for the pair (J, i).

    The projector P+ is applied to the 2n candidates {delta_m, delta_m*j};
    pivoted QR over the plane of i then extracts n orthonormal columns.
    Complex-linear combinations stay inside H+, so the result is an
    orthonormal basis of H+ both over the plane of i and quaternionically.
    """
    _check_anti_unitary(j, tol)
    n = j.n
    frame = frame_complete(i)
    jq = frame.j.as_quaternion()
    candidates = []
    for m in range(n):
        e = QVector.basis(n, m)
        candidates.append(plus_projector_apply(j, e, frame))
        candidates.append(plus_projector_apply(j, e * jq, frame))
    coords = np.stack([right_coords(c, frame) for c in candidates], axis=1)
    q, r, _ = scipy.linalg.qr(coords, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > RANK_TOL * max(diag[0], 1e-300)))
    if rank != n:
        raise StructureError(
            f"plus space has complex dimension {rank}, expected {n}")
    cols = [from_right_coords(q[:, m], frame) for m in range(n)]
    basis = QMatrix(np.stack([c.data for c in cols], axis=1))
    space = SplitSpace(j, frame, basis)
    worst = max(
        ((j @ c) - c * frame.i.as_quaternion()).norm() for c in cols)
    if worst > 1e-9:
        raise InternalInconsistency(
            f"plus-basis defect {worst:.2e}; J is too far from the required "
            "structure")
    return space


def components(v: QVector, space: SplitSpace,
               frame: Frame | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates (v1, v2) with v = sum_m b_m v1_m + sum_m b_m v2_m * j."""
    frame = frame or space.frame
    if np.linalg.norm(frame.i.direction - space.i.direction) > 1e-12:
        raise StructureError("frame is inconsistent with the splitting unit")
    coords = space.basis.H @ v
    v1 = np.empty(space.n, dtype=complex)
    v2 = np.empty(space.n, dtype=complex)
    for m in range(space.n):
        z1, z2 = symplectic_split(coords.entry(m), frame)
        v1[m], v2[m] = z1, z2
    return v1, v2


def from_components(v1: np.ndarray, v2: np.ndarray,
                    space: SplitSpace) -> QVector:
    """Inverse of :func:`components`."""
    qs = [symplectic_join(complex(a), complex(b), space.frame)
          for a, b in zip(v1, v2)]
    return space.basis @ QVector.from_quaternions(qs)


def restrict_to_plus(t: QMatrix, space: SplitSpace,
                     tol: float = 1e-9) -> np.ndarray:
    """Complex matrix of a J-commuting operator in the plus basis."""
    res = (t @ space.J - space.J @ t).frob()
    if res > tol * max(1.0, t.frob()):
        raise DoesNotCommute(res)
    coeff = space.basis.H @ t @ space.basis
    rot = space.frame.rotation()
    w = coeff.data[:, :, 0]
    along_i = coeff.data[:, :, 1:] @ rot[0]
    return w + 1j * along_i


def extend_from_plus(mat: np.ndarray, space: SplitSpace) -> QMatrix:
    """Unique right-linear operator agreeing with `mat` on the plus basis."""
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (space.n, space.n):
        raise DimensionError(
            f"expected ({space.n}, {space.n}) matrix, got {mat.shape}")
    lift = QMatrix.from_complex(mat, space.frame)
    return space.basis @ lift @ space.basis.H


# ---------------------------------------------------------------------------
# internal complexification


@dataclass(frozen=True)
class ComplexifiedSpace:
    """Result of installing a J-induced complex structure on R^n."""

    dim: int
    basis: np.ndarray          # n x dim, columns v_m
    J: np.ndarray
    matrices: list[np.ndarray]

    def inner(self, v: np.ndarray, u: np.ndarray) -> complex:
        return complex(v @ u - 1j * (v @ (self.J @ u)))

    def scalar_mul(self, a: complex, v: np.ndarray) -> np.ndarray:
        return a.real * v + a.imag * (self.J @ v)


def _orthonormal_tuples(n: int, maps: list[np.ndarray],
                        tol: float) -> np.ndarray:
    """Greedy basis v_m such that (v_m, A v_m, ...) over `maps` is a real
    orthonormal family; returns the v_m as columns."""
    accum = np.zeros((n, 0))
    picks = []
    for m in range(n):
        c = np.zeros(n)
        c[m] = 1.0
        w = c - accum @ (accum.T @ c)
        nrm = np.linalg.norm(w)
        if nrm <= tol:
            continue
        v = w / nrm
        group = [v] + [a @ v for a in maps]
        picks.append(v)
        accum = np.concatenate([accum, np.stack(group, axis=1)], axis=1)
        if accum.shape[1] == n:
            break
    expected = n // (len(maps) + 1)
    if len(picks) != expected:
        raise InternalInconsistency(
            f"extracted {len(picks)} basis vectors, expected {expected}")
    return np.stack(picks, axis=1)


def internal_complexify(reals: list[np.ndarray], j: np.ndarray,
                        tol: float = DEFAULT_TOL) -> ComplexifiedSpace:
    """Turn R^n with an anti-selfadjoint orthogonal J into C^(n/2).

    Every listed operator must commute with J; its complex matrix in the
    returned basis represents the same operator on the complexified space.
    """
    j = np.asarray(j, dtype=float)
    n = j.shape[0]
    if n % 2:
        raise DimensionError("internal complexification needs even dimension")
    if (np.linalg.norm(j + j.T) > tol * max(1.0, np.linalg.norm(j))
            or np.linalg.norm(j @ j.T - np.eye(n)) > tol * n):
        raise StructureError("J must be orthogonal and antisymmetric")
    mats = [np.asarray(t, dtype=float) for t in reals]
    for t in mats:
        res = np.linalg.norm(t @ j - j @ t)
        if res > tol * max(1.0, np.linalg.norm(t)):
            raise DoesNotCommute(res)
    basis = _orthonormal_tuples(n, [j], tol)
    out = [basis.T @ t @ basis - 1j * (basis.T @ j @ t @ basis) for t in mats]
    return ComplexifiedSpace(n // 2, basis, j, out)


# ---------------------------------------------------------------------------
# internal quaternionification


@dataclass(frozen=True)
class QuaternionifiedSpace:
    """Result of installing an (I, J)-induced quaternionic structure on R^n."""

    dim: int
    basis: np.ndarray          # n x dim
    I: np.ndarray
    J: np.ndarray
    frame: Frame
    matrices: list[QMatrix]

    def inner(self, v: np.ndarray, u: np.ndarray) -> Quaternion:
        ji = self.J @ self.I
        parts = np.array([v @ u, -(v @ (self.I @ u)), -(v @ (self.J @ u)),
                          -(v @ (ji @ u))])
        rot = self.frame.rotation()
        vec = parts[1] * rot[0] + parts[2] * rot[1] + parts[3] * rot[2]
        return Quaternion(parts[0], *vec)

    def scalar_mul(self, v: np.ndarray, a: Quaternion) -> np.ndarray:
        rot = self.frame.rotation()
        comps = a.vec @ rot.T
        return (a.w * v + comps[0] * (self.I @ v) + comps[1] * (self.J @ v)
                + comps[2] * (self.J @ (self.I @ v)))


def internal_quaternionify(reals: list[np.ndarray], i_op: np.ndarray,
                           j_op: np.ndarray, frame: Frame = STANDARD_FRAME,
                           tol: float = DEFAULT_TOL) -> QuaternionifiedSpace:
    """Turn R^n with an anticommuting anti-selfadjoint orthogonal pair (I, J)
    into H^(n/4).

    The right action is v*a = a0 v + a1 I v + a2 J v + a3 J I v with the
    components of a taken along the frame.
    """
    i_op = np.asarray(i_op, dtype=float)
    j_op = np.asarray(j_op, dtype=float)
    n = i_op.shape[0]
    if n % 4:
        raise DimensionError(
            "internal quaternionification needs dimension divisible by 4")
    for name, op in (("I", i_op), ("J", j_op)):
        if (np.linalg.norm(op + op.T) > tol * max(1.0, np.linalg.norm(op))
                or np.linalg.norm(op @ op.T - np.eye(n)) > tol * n):
            raise StructureError(f"{name} must be orthogonal and antisymmetric")
    if np.linalg.norm(i_op @ j_op + j_op @ i_op) > tol * n:
        raise StructureError("I and J must anticommute")
    mats = [np.asarray(t, dtype=float) for t in reals]
    for t in mats:
        for op in (i_op, j_op):
            res = np.linalg.norm(t @ op - op @ t)
            if res > tol * max(1.0, np.linalg.norm(t)):
                raise DoesNotCommute(res)
    ji = j_op @ i_op
    basis = _orthonormal_tuples(n, [i_op, j_op, ji], tol)
    out = []
    for t in mats:
        w = basis.T @ t @ basis
        ci = -(basis.T @ i_op @ t @ basis)
        cj = -(basis.T @ j_op @ t @ basis)
        ck = -(basis.T @ ji @ t @ basis)
        rot = frame.rotation()
        vec = (ci[:, :, None] * rot[0] + cj[:, :, None] * rot[1]
               + ck[:, :, None] * rot[2])
        out.append(QMatrix(np.concatenate([w[:, :, None], vec], axis=-1)))
    return QuaternionifiedSpace(n // 4, basis, i_op, j_op, frame, out)


# ---------------------------------------------------------------------------
# conjugations on a complex carrier


@dataclass(frozen=True)
class Conjugation:
    """Antilinear involution K(v) = sum_n conj(<b_n, v>) b_n of a complex
    space, induced by an orthonormal basis; the fixed subspace is the real
    span of that basis."""

    basis: np.ndarray          # n x n complex, orthonormal columns

    def apply(self, v: np.ndarray) -> np.ndarray:
        b = self.basis
        return b @ (b.conj().T @ np.asarray(v, dtype=complex)).conj()

    def fixed_real_span(self) -> np.ndarray:
        return self.basis

    def commutes_with(self, mat: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
        """A complex operator commutes with K iff its matrix in the inducing
        basis is real."""
        coeff = self.basis.conj().T @ np.asarray(mat, dtype=complex) @ self.basis
        return float(np.linalg.norm(coeff.imag)) <= tol * max(
            1.0, float(np.linalg.norm(coeff)))


def conjugation_from_basis(basis: np.ndarray) -> Conjugation:
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
        raise BasisError("conjugation needs a full square basis")
    gram = basis.conj().T @ basis
    if np.linalg.norm(gram - np.eye(basis.shape[1])) > 1e-10 * basis.shape[1]:
        raise BasisError("basis is not orthonormal")
    return Conjugation(basis)


# ---------------------------------------------------------------------------
# real subspace and left multiplication from an (I, J) pair


@dataclass(frozen=True)
class LeftMultiplication:
    """Left scalar action generated by an orthonormal basis of the real
    subspace H_R = {v : Iv = v*i, Jv = v*j}.

    M_a v = sum_l b_l * a * <b_l, v>; the map a -> M_a is a unital algebra
    homomorphism and every M_a is right-linear.
    """

    real_basis: QMatrix        # columns form the basis of H_R
    frame: Frame

    @property
    def n(self) -> int:
        return self.real_basis.n

    def mat(self, a: Quaternion) -> QMatrix:
        b = self.real_basis
        return b @ QMatrix.scalar(self.n, a) @ b.H

    def unit_mats(self) -> tuple[QMatrix, QMatrix, QMatrix]:
        return (self.mat(self.frame.i.as_quaternion()),
                self.mat(self.frame.j.as_quaternion()),
                self.mat(self.frame.k.as_quaternion()))

    def basis_vectors(self) -> list[QVector]:
        return [self.real_basis.column(m) for m in range(self.n)]


def real_subspace_and_left_mult(i_op: QMatrix, j_op: QMatrix,
                                frame: Frame = STANDARD_FRAME,
                                tol: float = DEFAULT_TOL) -> LeftMultiplication:
    """Extract H_R from an anticommuting pair of anti-selfadjoint unitaries
    and build the left multiplication it generates.

    The recovered action satisfies M_i = I, M_j = J and M_k = I J within
    1e-9 (M is a homomorphism, so the unit along k is the product of the
    units along i and j).
    """
    _check_anti_unitary(i_op, tol, "I")
    _check_anti_unitary(j_op, tol, "J")
    n = i_op.n
    anti = (i_op @ j_op + j_op @ i_op).frob()
    if anti > tol * max(1.0, i_op.frob() * j_op.frob()):
        raise StructureError(f"I and J must anticommute (residual {anti:.2e})")

    iq = frame.i.as_quaternion()
    jq = frame.j.as_quaternion()
    kq = frame.k.as_quaternion()

    def project(v: QVector) -> QVector:
        return (v - (i_op @ v) * iq - (j_op @ v) * jq
                + ((j_op @ (i_op @ v)) * kq)) * 0.25

    candidates = []
    for m in range(n):
        e = QVector.basis(n, m)
        for unit in (Quaternion(1.0), iq, jq, kq):
            candidates.append(project(e * unit))
    coords = np.stack([c.data.reshape(-1) for c in candidates], axis=1)
    q, r, _ = scipy.linalg.qr(coords, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > RANK_TOL * max(diag[0], 1e-300)))
    if rank != n:
        raise StructureError(
            f"real subspace has dimension {rank}, expected {n}")
    cols = np.stack([q[:, m].reshape(n, 4) for m in range(n)], axis=1)
    left = LeftMultiplication(QMatrix(cols), frame)

    m_i, m_j, m_k = left.unit_mats()
    worst = max((m_i - i_op).frob(), (m_j - j_op).frob(),
                (m_k - i_op @ j_op).frob())
    if worst > 1e-9 * max(1.0, i_op.frob()):
        raise InternalInconsistency(
            f"left multiplication defect {worst:.2e}")
    return left
