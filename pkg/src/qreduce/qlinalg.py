"""Quaternionic vectors and right-linear operators as matrices.

A matrix acts on column vectors by left entrywise multiplication,
(Tv)_m = sum_n T[m,n] * v[n], which is right-linear: T(v*a) = (Tv)*a.
Spectral work is routed through the complex embedding

    chi(T) = [[T1, T2], [-conj(T2), conj(T1)]],   T = T1 + T2*j entrywise,

an injective *-homomorphism into the 2n x 2n complex matrices; mature
complex eigensolvers then do the heavy lifting.  The corresponding
vector embedding is psi(v) = (v1; -conj(v2)), for which
chi(T) psi(v) = psi(Tv) and <psi(v), psi(u)> is the complex part of <v, u>.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionError,
    NotAntiSelfAdjoint,
    NotInImage,
    NotNormal,
)
from .quat import (
    Frame,
    ImaginaryUnit,
    Quaternion,
    STANDARD_FRAME,
    conj4,
    matmul4,
    mul4,
)

DEFAULT_TOL = 1e-10
NORMALITY_TOL = 1e-9
PAIRING_TOL = 1e-8


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


class QVector:
    """Column vector with quaternion entries, stored as an (n, 4) array."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        data = np.asarray(data, dtype=float)
        if data.ndim != 2 or data.shape[1] != 4:
            raise DimensionError(f"expected (n, 4) component array, got {data.shape}")
        self.data = _freeze(data.copy())

    @classmethod
    def zeros(cls, n: int) -> "QVector":
        return cls(np.zeros((n, 4)))

    @classmethod
    def basis(cls, n: int, m: int) -> "QVector":
        data = np.zeros((n, 4))
        data[m, 0] = 1.0
        return cls(data)

    @classmethod
    def from_quaternions(cls, entries) -> "QVector":
        return cls(np.stack([q.as_array() for q in entries]))

    @classmethod
    def from_complex(cls, c: np.ndarray, frame: Frame = STANDARD_FRAME) -> "QVector":
        """Lift complex coordinates into the plane of frame.i."""
        c = np.asarray(c, dtype=complex).reshape(-1)
        data = np.zeros((c.size, 4))
        data[:, 0] = c.real
        data[:, 1:] = np.outer(c.imag, frame.i.direction)
        return cls(data)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def entry(self, m: int) -> Quaternion:
        return Quaternion.from_array(self.data[m])

    def __add__(self, other: "QVector") -> "QVector":
        return QVector(self.data + other.data)

    def __sub__(self, other: "QVector") -> "QVector":
        return QVector(self.data - other.data)

    def __neg__(self) -> "QVector":
        return QVector(-self.data)

    def __mul__(self, a) -> "QVector":
        """Right scalar multiplication v * a (entrywise v[m] * a)."""
        if isinstance(a, Quaternion):
            return QVector(mul4(self.data, a.as_array()))
        return QVector(self.data * float(a))

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def to_json(self) -> list:
        return self.data.tolist()

    @classmethod
    def from_json(cls, payload) -> "QVector":
        return cls(np.asarray(payload, dtype=float))

    def __repr__(self) -> str:
        return f"QVector(n={self.n})"


class QMatrix:
    """Square matrix with quaternion entries, stored as an (n, n, 4) array."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        data = np.asarray(data, dtype=float)
        if data.ndim != 3 or data.shape[0] != data.shape[1] or data.shape[2] != 4:
            raise DimensionError(f"expected (n, n, 4) component array, got {data.shape}")
        self.data = _freeze(data.copy())

    @classmethod
    def zeros(cls, n: int) -> "QMatrix":
        return cls(np.zeros((n, n, 4)))

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        data = np.zeros((n, n, 4))
        data[np.arange(n), np.arange(n), 0] = 1.0
        return cls(data)

    @classmethod
    def diag(cls, entries) -> "QMatrix":
        n = len(entries)
        data = np.zeros((n, n, 4))
        for m, q in enumerate(entries):
            data[m, m] = q.as_array()
        return cls(data)

    @classmethod
    def from_real(cls, mat: np.ndarray) -> "QMatrix":
        mat = np.asarray(mat, dtype=float)
        n = mat.shape[0]
        data = np.zeros((n, n, 4))
        data[:, :, 0] = mat
        return cls(data)

    @classmethod
    def from_complex(cls, mat: np.ndarray, frame: Frame = STANDARD_FRAME) -> "QMatrix":
        """Lift a complex matrix into the plane of frame.i."""
        mat = np.asarray(mat, dtype=complex)
        n = mat.shape[0]
        data = np.zeros((n, n, 4))
        data[:, :, 0] = mat.real
        data[:, :, 1:] = mat.imag[:, :, None] * frame.i.direction
        return cls(data)

    @classmethod
    def scalar(cls, n: int, q: Quaternion) -> "QMatrix":
        """q times the identity (left entrywise multiplication by q)."""
        data = np.zeros((n, n, 4))
        data[np.arange(n), np.arange(n)] = q.as_array()
        return cls(data)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def entry(self, m: int, k: int) -> Quaternion:
        return Quaternion.from_array(self.data[m, k])

    def __add__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.data + other.data)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.data - other.data)

    def __neg__(self) -> "QMatrix":
        return QMatrix(-self.data)

    def __mul__(self, a: float) -> "QMatrix":
        return QMatrix(self.data * float(a))

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, QMatrix):
            return QMatrix(matmul4(self.data, other.data))
        if isinstance(other, QVector):
            return QVector(matmul4(self.data, other.data[:, None, :])[:, 0, :])
        return NotImplemented

    @property
    def H(self) -> "QMatrix":
        """Adjoint: conjugate transpose."""
        return QMatrix(conj4(np.swapaxes(self.data, 0, 1)))

    def trace(self) -> Quaternion:
        return Quaternion.from_array(self.data.diagonal(axis1=0, axis2=1).sum(axis=1))

    def frob(self) -> float:
        return float(np.linalg.norm(self.data))

    def column(self, k: int) -> QVector:
        return QVector(self.data[:, k, :])

    def to_json(self) -> dict:
        return {"n": self.n, "entries": self.data.tolist()}

    @classmethod
    def from_json(cls, payload: dict) -> "QMatrix":
        data = np.asarray(payload["entries"], dtype=float)
        if data.shape[0] != payload["n"]:
            raise DimensionError("declared size does not match entry array")
        return cls(data)

    def __repr__(self) -> str:
        return f"QMatrix(n={self.n})"


# ---------------------------------------------------------------------------
# basic operations


def inner(v: QVector, u: QVector) -> Quaternion:
    """Quaternionic scalar product, conjugate-linear in the first slot:
    <v, u> = sum_m conj(v[m]) * u[m]."""
    if v.n != u.n:
        raise DimensionError(f"length mismatch {v.n} != {u.n}")
    return Quaternion.from_array(mul4(conj4(v.data), u.data).sum(axis=0))


def adjoint(t: QMatrix) -> QMatrix:
    return t.H


def outer(u: QVector, v: QVector) -> QMatrix:
    """Rank-one right-linear operator w -> u * <v, w>."""
    return QMatrix(mul4(u.data[:, None, :], conj4(v.data)[None, :, :]))


def commutator_norm(a: QMatrix, b: QMatrix) -> float:
    return (a @ b - b @ a).frob()


# ---------------------------------------------------------------------------
# complex embedding


def complex_embed(t: QMatrix, frame: Frame = STANDARD_FRAME) -> np.ndarray:
    """Embed into the 2n x 2n complex matrices via the entrywise split
    T = T1 + T2*j along the frame."""
    rot = frame.rotation()
    w = t.data[:, :, 0]
    comps = t.data[:, :, 1:] @ rot.T
    t1 = w + 1j * comps[:, :, 0]
    t2 = comps[:, :, 1] + 1j * comps[:, :, 2]
    return np.block([[t1, t2], [-t2.conj(), t1.conj()]])


def block_symmetry_residual(mat: np.ndarray) -> float:
    """Frobenius distance of a 2n x 2n complex matrix from the image of the
    embedding (the set with block form [[A, B], [-conj(B), conj(A)]])."""
    n2 = mat.shape[0]
    if mat.shape != (n2, n2) or n2 % 2:
        raise DimensionError(f"expected even square matrix, got {mat.shape}")
    n = n2 // 2
    a, b = mat[:n, :n], mat[:n, n:]
    c, d = mat[n:, :n], mat[n:, n:]
    return float(np.sqrt(np.linalg.norm(c + b.conj()) ** 2
                         + np.linalg.norm(d - a.conj()) ** 2) / np.sqrt(2.0))


def complex_unembed(mat: np.ndarray, frame: Frame = STANDARD_FRAME,
                    tol: float = DEFAULT_TOL) -> QMatrix:
    """Left inverse of :func:`complex_embed`.

    Raises NotInImage when the block symmetry is violated beyond
    tol * scale; the symmetric part of the blocks is used for the
    reconstruction, so roundoff-level violations are averaged away.
    """
    mat = np.asarray(mat, dtype=complex)
    residual = block_symmetry_residual(mat)
    scale = max(1.0, float(np.linalg.norm(mat)))
    if residual > tol * scale:
        raise NotInImage(residual)
    n = mat.shape[0] // 2
    t1 = 0.5 * (mat[:n, :n] + mat[n:, n:].conj())
    t2 = 0.5 * (mat[:n, n:] - mat[n:, :n].conj())
    rot = frame.rotation()
    comps = np.stack([t1.imag, t2.real, t2.imag], axis=-1)
    data = np.concatenate([t1.real[:, :, None], comps @ rot], axis=-1)
    return QMatrix(data)


def embed_vector(v: QVector, frame: Frame = STANDARD_FRAME) -> np.ndarray:
    """psi(v) = (v1; -conj(v2)) in C^(2n); satisfies chi(T) psi(v) = psi(Tv)."""
    rot = frame.rotation()
    comps = v.data[:, 1:] @ rot.T
    v1 = v.data[:, 0] + 1j * comps[:, 0]
    v2 = comps[:, 1] + 1j * comps[:, 2]
    return np.concatenate([v1, -v2.conj()])


def unembed_vector(c: np.ndarray, frame: Frame = STANDARD_FRAME) -> QVector:
    c = np.asarray(c, dtype=complex).reshape(-1)
    n = c.size // 2
    v1, v2 = c[:n], -c[n:].conj()
    rot = frame.rotation()
    comps = np.stack([v1.imag, v2.real, v2.imag], axis=-1)
    data = np.concatenate([v1.real[:, None], comps @ rot], axis=-1)
    return QVector(data)


def complex_matrix_to_json(mat: np.ndarray) -> dict:
    """Wire format for embedded matrices: size plus real/imaginary parts."""
    mat = np.asarray(mat, dtype=complex)
    return {"n2": int(mat.shape[0]), "re": mat.real.tolist(),
            "im": mat.imag.tolist()}


def complex_matrix_from_json(payload: dict) -> np.ndarray:
    mat = np.asarray(payload["re"], dtype=float) \
        + 1j * np.asarray(payload["im"], dtype=float)
    if mat.shape[0] != payload["n2"]:
        raise DimensionError("declared size does not match entry arrays")
    return mat


def right_coords(v: QVector, frame: Frame = STANDARD_FRAME) -> np.ndarray:
    """Coordinates (v1, conj(v2)) in C^(2n).

    This map is complex-linear for the right multiplication by scalars in
    the plane of frame.i and isometric for the complex part of the inner
    product, which makes it the right carrier for Gram-Schmidt over that
    plane.
    """
    rot = frame.rotation()
    comps = v.data[:, 1:] @ rot.T
    v1 = v.data[:, 0] + 1j * comps[:, 0]
    v2 = comps[:, 1] + 1j * comps[:, 2]
    return np.concatenate([v1, v2.conj()])


def from_right_coords(c: np.ndarray, frame: Frame = STANDARD_FRAME) -> QVector:
    c = np.asarray(c, dtype=complex).reshape(-1)
    n = c.size // 2
    v1, v2 = c[:n], c[n:].conj()
    rot = frame.rotation()
    comps = np.stack([v1.imag, v2.real, v2.imag], axis=-1)
    data = np.concatenate([v1.real[:, None], comps @ rot], axis=-1)
    return QVector(data)


# ---------------------------------------------------------------------------
# norms, flags, spectra


def operator_norm(t: QMatrix) -> float:
    """Largest singular value; frame-independent because the embedding is a
    unitary-compatible *-homomorphism."""
    return float(np.linalg.norm(complex_embed(t), 2))


@dataclass(frozen=True)
class OperatorFlags:
    selfadjoint: bool
    antiselfadjoint: bool
    unitary: bool
    normal: bool
    projection: bool

    def as_dict(self) -> dict:
        return {
            "selfadjoint": self.selfadjoint,
            "antiselfadjoint": self.antiselfadjoint,
            "unitary": self.unitary,
            "normal": self.normal,
            "projection": self.projection,
        }


def classify_operator(t: QMatrix, tol: float = DEFAULT_TOL) -> OperatorFlags:
    """Boolean structure flags from Frobenius residuals, relative to the
    operator scale."""
    adj = t.H
    scale = max(1.0, t.frob())
    sq_scale = max(1.0, scale * scale)
    ident = QMatrix.identity(t.n)
    sym = (t - adj).frob()
    anti = (t + adj).frob()
    gram = (adj @ t - ident).frob()
    comm = (t @ adj - adj @ t).frob()
    idem = (t @ t - t).frob()
    return OperatorFlags(
        selfadjoint=sym <= tol * scale,
        antiselfadjoint=anti <= tol * scale,
        unitary=gram <= tol * sq_scale,
        normal=comm <= tol * sq_scale,
        projection=(idem <= tol * sq_scale) and (sym <= tol * scale),
    )


def is_unitary(t: QMatrix, tol: float = DEFAULT_TOL) -> bool:
    return (t.H @ t - QMatrix.identity(t.n)).frob() <= tol * max(1.0, t.frob() ** 2)


def s_eigenspheres(t: QMatrix, i: ImaginaryUnit,
                   tol: float = NORMALITY_TOL,
                   pairing_tol: float = PAIRING_TOL) -> list[tuple[Quaternion, int]]:
    """Spectral spheres of a normal operator.

    The eigenvalues of the complex embedding come in conjugate pairs; each
    pair is one similarity sphere and is reported once through its
    representative in the closed upper half plane of i, with multiplicities
    summing to n.  Pairing is nearest-neighbour with ties broken by sorted
    order.
    """
    scale = max(1.0, t.frob())
    comm = (t @ t.H - t.H @ t).frob()
    if comm > tol * scale * scale:
        raise NotNormal(f"commutator residual {comm:.3e} exceeds {tol:.1e} * scale^2")
    eigs = np.linalg.eigvals(complex_embed(t))
    order = np.lexsort((eigs.imag, eigs.real))
    eigs = eigs[order]
    used = np.zeros(eigs.size, dtype=bool)
    reps: list[complex] = []
    for idx in np.argsort(-np.abs(eigs.imag), kind="stable"):
        if used[idx]:
            continue
        used[idx] = True
        target = eigs[idx].conjugate()
        candidates = np.flatnonzero(~used)
        if candidates.size == 0:
            reps.append(complex(eigs[idx].real, abs(eigs[idx].imag)))
            continue
        partner = candidates[int(np.argmin(np.abs(eigs[candidates] - target)))]
        used[partner] = True
        lam, mu = eigs[idx], eigs[partner]
        reps.append(complex(0.5 * (lam.real + mu.real),
                            0.5 * abs(lam.imag - mu.imag)))
    reps.sort(key=lambda z: (z.real, z.imag))
    clusters: list[tuple[complex, int]] = []
    for rep in reps:
        if clusters and abs(rep - clusters[-1][0]) <= pairing_tol * scale:
            prev, count = clusters[-1]
            clusters[-1] = ((prev * count + rep) / (count + 1), count + 1)
        else:
            clusters.append((rep, 1))
    return [
        (Quaternion(rep.real, *(rep.imag * i.direction)), count)
        for rep, count in clusters
    ]


def spectral_projections(t: QMatrix, frame: Frame = STANDARD_FRAME,
                         cluster_tol: float = 1e-7) -> list[tuple[float, QMatrix]]:
    """Eigensphere projections of a selfadjoint operator.

    Returns (eigenvalue, projection) pairs; the projections are mutually
    orthogonal and sum to the identity.
    """
    chi = complex_embed(t, frame)
    herm = 0.5 * (chi + chi.conj().T)
    vals, vecs = np.linalg.eigh(herm)
    scale = max(1.0, float(np.abs(vals).max(initial=0.0)))
    out: list[tuple[float, QMatrix]] = []
    start = 0
    for stop in range(1, vals.size + 1):
        if stop == vals.size or vals[stop] - vals[stop - 1] > cluster_tol * scale:
            block = vecs[:, start:stop]
            proj_c = block @ block.conj().T
            out.append((float(vals[start:stop].mean()),
                        complex_unembed(proj_c, frame, tol=1e-7)))
            start = stop
    return out


# ---------------------------------------------------------------------------
# Gram-Schmidt over the quaternions


def gram_schmidt_h(vectors, tol: float = DEFAULT_TOL) -> list[QVector]:
    """Right-quaternionic Gram-Schmidt with column rejection below tol."""
    basis: list[QVector] = []
    for v in vectors:
        w = v
        for b in basis:
            w = w - b * inner(b, w)
        nrm = w.norm()
        if nrm > tol:
            basis.append(w * (1.0 / nrm))
    return basis


# ---------------------------------------------------------------------------
# polar decomposition of anti-selfadjoint operators


def polar_antiselfadjoint(a: QMatrix, frame: Frame = STANDARD_FRAME,
                          tol: float = DEFAULT_TOL) -> tuple[QMatrix, QMatrix]:
    """Factor A = J * M with M = |A| positive and J a unitary anti-selfadjoint
    square root of -I commuting with M.

    On the range of A the factor J = A M^+ is forced; on the kernel J acts
    as right multiplication by frame.i on a deterministic orthonormal
    kernel basis, which keeps J unitary with J^2 = -I.
    """
    scale = max(1.0, a.frob())
    anti_res = (a + a.H).frob()
    if anti_res > tol * scale:
        raise NotAntiSelfAdjoint(
            f"residual {anti_res:.3e} exceeds {tol:.1e} * scale")
    chi = complex_embed(a, frame)
    herm = (chi - chi.conj().T) / 2j          # hermitian part of chi/i
    vals, vecs = np.linalg.eigh(herm)
    n2 = vals.size
    kernel_cut = 1e-10 * max(1.0, float(np.abs(vals).max(initial=0.0)))
    nonzero = np.abs(vals) > kernel_cut

    modulus_c = (vecs * np.abs(vals)) @ vecs.conj().T
    inv = np.zeros(n2)
    inv[nonzero] = 1.0 / np.abs(vals[nonzero])
    unitary_range_c = chi @ ((vecs * inv) @ vecs.conj().T)

    modulus = complex_unembed(modulus_c, frame, tol=1e-8)
    j_op = complex_unembed(unitary_range_c, frame, tol=1e-8)

    kernel_cols = vecs[:, ~nonzero]
    if kernel_cols.shape[1]:
        candidates = [unembed_vector(kernel_cols[:, c], frame)
                      for c in range(kernel_cols.shape[1])]
        kernel_basis = gram_schmidt_h(candidates, tol=1e-8)
        iq = frame.i.as_quaternion()
        for b in kernel_basis:
            j_op = j_op + outer(b * iq, b)
    return j_op, modulus


# ---------------------------------------------------------------------------
# spectral decomposition of anti-selfadjoint operators (shared by dynamics)


def expm_antiselfadjoint(a: QMatrix, frame: Frame = STANDARD_FRAME) -> QMatrix:
    """exp(A) for anti-selfadjoint A, via the complex embedding."""
    return complex_unembed(scipy.linalg.expm(complex_embed(a, frame)),
                           frame, tol=1e-8)
