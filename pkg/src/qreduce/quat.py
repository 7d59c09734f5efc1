"""Quaternion scalars, imaginary units, and symplectic frames.

Sign convention, fixed here once for the whole package: the generating
units satisfy e1*e2 = +e3 (right-handed Hamilton product).  A quaternion
is stored as the four real coefficients (w, x, y, z) of (1, e1, e2, e3).

Vectorized helpers operate on float arrays whose last axis has length 4
and carry the same convention; they are the computational backbone of
the matrix layer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import StructureError

DEFAULT_TOL = 1e-12

_CONJ_SIGNS = np.array([1.0, -1.0, -1.0, -1.0])


# ---------------------------------------------------------------------------
# vectorized kernel: arrays of shape (..., 4)

def mul4(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product of component arrays, broadcasting over leading axes."""
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def conj4(a: np.ndarray) -> np.ndarray:
    return a * _CONJ_SIGNS


def norm4(a: np.ndarray) -> np.ndarray:
    """Euclidean modulus along the last axis."""
    return np.sqrt(np.sum(a * a, axis=-1))


def matmul4(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product of quaternion-entry arrays.

    `a` has shape (..., m, n, 4) and `b` shape (..., n, k, 4); entries
    multiply on the left of the column factor, matching the action of a
    right-linear operator on column vectors.
    """
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw @ bw - ax @ bx - ay @ by - az @ bz,
            aw @ bx + ax @ bw + ay @ bz - az @ by,
            aw @ by - ax @ bz + ay @ bw + az @ bx,
            aw @ bz + ax @ by - ay @ bx + az @ bw,
        ],
        axis=-1,
    )


# ---------------------------------------------------------------------------
# scalar quaternions


@dataclass(frozen=True)
class Quaternion:
    """Element of the real division algebra spanned by (1, e1, e2, e3)."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        w, x, y, z = np.asarray(a, dtype=float).reshape(4)
        return cls(float(w), float(x), float(y), float(z))

    @classmethod
    def real(cls, value: float) -> "Quaternion":
        return cls(float(value), 0.0, 0.0, 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @property
    def vec(self) -> np.ndarray:
        """Imaginary part as a 3-vector."""
        return np.array([self.x, self.y, self.z])

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def __abs__(self) -> float:
        return math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)

    def inverse(self) -> "Quaternion":
        n2 = self.w**2 + self.x**2 + self.y**2 + self.z**2
        if n2 == 0.0:
            raise ZeroDivisionError("inverse of zero quaternion")
        c = self.conjugate()
        return Quaternion(c.w / n2, c.x / n2, c.y / n2, c.z / n2)

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w - other.w, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion.from_array(mul4(self.as_array(), other.as_array()))
        return Quaternion(self.w * other, self.x * other,
                          self.y * other, self.z * other)

    def __rmul__(self, other):
        # only reached for real scalars; quaternion*quaternion uses __mul__
        return Quaternion(self.w * other, self.x * other,
                          self.y * other, self.z * other)

    def is_close(self, other: "Quaternion", tol: float = DEFAULT_TOL) -> bool:
        return abs(self - other) <= tol

    def to_json(self) -> list:
        return [self.w, self.x, self.y, self.z]

    @classmethod
    def from_json(cls, payload) -> "Quaternion":
        return cls.from_array(payload)


ONE = Quaternion(1.0)
E1 = Quaternion(0.0, 1.0, 0.0, 0.0)
E2 = Quaternion(0.0, 0.0, 1.0, 0.0)
E3 = Quaternion(0.0, 0.0, 0.0, 1.0)


def qmul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product under the package sign convention (e1*e2 = e3)."""
    return p * q


def qconj(q: Quaternion) -> Quaternion:
    return q.conjugate()


def qnorm(q: Quaternion) -> float:
    return abs(q)


# ---------------------------------------------------------------------------
# imaginary units and frames


@dataclass(frozen=True)
class ImaginaryUnit:
    """Purely imaginary quaternion of modulus one, stored as its 3-direction."""

    direction: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float).reshape(3).copy()
        n = float(np.linalg.norm(d))
        if abs(n - 1.0) > 1e-12:
            raise StructureError(f"imaginary unit direction has norm {n!r}")
        d.flags.writeable = False
        object.__setattr__(self, "direction", d)

    @classmethod
    def from_vector(cls, v) -> "ImaginaryUnit":
        """Normalize an arbitrary nonzero 3-vector into a unit."""
        v = np.asarray(v, dtype=float).reshape(3)
        n = np.linalg.norm(v)
        if n == 0.0:
            raise StructureError("zero vector has no direction")
        return cls(v / n)

    def as_quaternion(self) -> Quaternion:
        return Quaternion(0.0, *self.direction)

    def to_json(self) -> list:
        return list(self.direction)


UNIT_E1 = ImaginaryUnit(np.array([1.0, 0.0, 0.0]))
UNIT_E2 = ImaginaryUnit(np.array([0.0, 1.0, 0.0]))
UNIT_E3 = ImaginaryUnit(np.array([0.0, 0.0, 1.0]))


@dataclass(frozen=True)
class Frame:
    """Ordered orthonormal imaginary triple (i, j, k) with k = i*j.

    A frame fixes the symplectic decomposition q = z1 + z2*j with
    z1, z2 in the complex plane spanned by (1, i).
    """

    i: ImaginaryUnit
    j: ImaginaryUnit
    k: ImaginaryUnit

    def __post_init__(self):
        if abs(float(self.i.direction @ self.j.direction)) > 1e-12:
            raise StructureError("frame axes i and j are not orthogonal")
        k_expected = np.cross(self.i.direction, self.j.direction)
        if np.linalg.norm(self.k.direction - k_expected) > 1e-12:
            raise StructureError("frame axis k is not the product i*j")

    @classmethod
    def standard(cls) -> "Frame":
        return cls(UNIT_E1, UNIT_E2, UNIT_E3)

    @classmethod
    def from_ij(cls, i: ImaginaryUnit, j: ImaginaryUnit) -> "Frame":
        k = ImaginaryUnit(np.cross(i.direction, j.direction))
        return cls(i, j, k)

    def rotation(self) -> np.ndarray:
        """3x3 matrix whose rows are the frame directions."""
        return np.stack([self.i.direction, self.j.direction, self.k.direction])

    def to_json(self) -> dict:
        return {"i": self.i.to_json(), "j": self.j.to_json()}

    @classmethod
    def from_json(cls, payload: dict) -> "Frame":
        return cls.from_ij(ImaginaryUnit.from_vector(payload["i"]),
                           ImaginaryUnit.from_vector(payload["j"]))


STANDARD_FRAME = Frame.standard()


def frame_complete(i: ImaginaryUnit) -> Frame:
    """Deterministically complete a unit into a full frame.

    The second axis is the coordinate axis least aligned with i, projected
    onto the orthogonal complement of i and normalized; the rule makes
    frames reproducible across runs.
    """
    d = i.direction
    axis = int(np.argmin(np.abs(d)))
    e = np.zeros(3)
    e[axis] = 1.0
    j_vec = e - (e @ d) * d
    j = ImaginaryUnit.from_vector(j_vec)
    return Frame.from_ij(i, j)


def symplectic_split(q: Quaternion, frame: Frame) -> tuple[complex, complex]:
    """Decompose q = z1 + z2*j with z1, z2 in the complex plane of frame.i."""
    v = q.vec
    z1 = complex(q.w, float(v @ frame.i.direction))
    z2 = complex(float(v @ frame.j.direction), float(v @ frame.k.direction))
    return z1, z2


def symplectic_join(z1: complex, z2: complex, frame: Frame) -> Quaternion:
    """Inverse of :func:`symplectic_split`."""
    vec = (z1.imag * frame.i.direction
           + z2.real * frame.j.direction
           + z2.imag * frame.k.direction)
    return Quaternion(z1.real, *vec)


def sphere_representative(q: Quaternion, i: ImaginaryUnit) -> Quaternion:
    """Canonical representative q0 + i*|Im q| of the similarity class of q.

    The class {h q h^-1 : |h| = 1} is a 2-sphere for non-real q; its unique
    point in the closed upper half of the complex plane of i is returned.
    """
    im = float(np.linalg.norm(q.vec))
    return Quaternion(q.w, *(im * i.direction))
