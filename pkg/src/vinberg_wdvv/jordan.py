"""Euclidean Jordan algebras: Sym(n,R), Herm(n,C), Herm(n,H), Herm(3,O), spin factors.

Matrix families are realized as arrays of shape ``(n, n, d)`` whose last axis
holds division-algebra coordinates; elements are coordinate vectors in an
orthonormal basis for the trace form ``Re Tr(XY)``.  Spin factors use the
natural coordinates ``(t, x_1, ..., x_{n-1})``.

All ``JordanAlgebra`` methods act on raw coordinate arrays of shape
``(..., N)`` and broadcast over leading axes.  The module-level functions
wrap them for :class:`JordanElement` values.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .division import conj_array, mul_array

FAMILIES = ("SymR", "HermC", "HermH", "Albert", "Spin")
FIELD_DIM = {"SymR": 1, "HermC": 2, "HermH": 4, "Albert": 8}


class UnsupportedRankError(ValueError):
    """The octonionic family only exists for 3x3 matrices."""


class AlgebraMismatchError(ValueError):
    """Elements from different Jordan algebras were combined."""


def _matrix_basis(n: int, d: int) -> np.ndarray:
    mats = []
    for i in range(n):
        m = np.zeros((n, n, d))
        m[i, i, 0] = 1.0
        mats.append(m)
    s = 1.0 / np.sqrt(2.0)
    for i in range(n):
        for j in range(i + 1, n):
            for u in range(d):
                m = np.zeros((n, n, d))
                m[i, j, u] = s
                m[j, i] = conj_array(m[i, j])
                mats.append(m)
    return np.array(mats)


@dataclass(frozen=True, eq=False)
class JordanAlgebra:
    family: str
    n: int
    N: int
    r: int
    basis: np.ndarray | None = None
    components: tuple = ()

    # identity and hashing by structure, not by array identity
    @property
    def key(self):
        if self.family == "DirectSum":
            return ("DirectSum",) + tuple(c.key for c in self.components)
        return (self.family, self.n)

    def __eq__(self, other):
        return isinstance(other, JordanAlgebra) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def name(self) -> str:
        if self.family == "DirectSum":
            return "+".join(c.name for c in self.components)
        if self.family == "Albert":
            return "Albert"
        return f"{self.family}({self.n})"

    def __repr__(self):
        return f"JordanAlgebra({self.name}, N={self.N}, r={self.r})"

    @property
    def d(self) -> int:
        return FIELD_DIM.get(self.family, 0)

    @property
    def is_matrix(self) -> bool:
        return self.family in FIELD_DIM

    @property
    def is_sum(self) -> bool:
        return self.family == "DirectSum"

    @cached_property
    def slices(self) -> list[slice]:
        out, start = [], 0
        for c in self.components:
            out.append(slice(start, start + c.N))
            start += c.N
        return out

    def split(self, x):
        return [x[..., s] for s in self.slices]

    # -- realization -------------------------------------------------------

    def matrix(self, x) -> np.ndarray:
        """Coordinates -> K-matrix array ``(..., n, n, d)``."""
        return np.einsum("...b,bija->...ija", x, self.basis)

    def from_matrix(self, m) -> np.ndarray:
        """Self-adjoint K-matrix -> coordinates (orthonormal basis)."""
        return np.einsum("...ija,bija->...b", m, self.basis)

    def identity(self) -> np.ndarray:
        if self.is_sum:
            return np.concatenate([c.identity() for c in self.components])
        if self.family == "Spin":
            e = np.zeros(self.N)
            e[0] = 1.0
            return e
        e = np.zeros(self.N)
        e[: self.n] = 1.0
        return e

    def random(self, rng: np.random.Generator, size=None) -> np.ndarray:
        shape = (self.N,) if size is None else tuple(np.atleast_1d(size)) + (self.N,)
        return rng.standard_normal(shape)

    # -- algebra -------------------------------------------------------------

    def product(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.is_sum:
            parts = [c.product(a, b) for c, a, b in zip(self.components, self.split(x), self.split(y))]
            return np.concatenate(np.broadcast_arrays(*parts), axis=-1) if len(parts) > 1 else parts[0]
        if self.family == "Spin":
            t, s = x[..., :1], y[..., :1]
            xv, yv = x[..., 1:], y[..., 1:]
            head = t * s + np.sum(xv * yv, axis=-1, keepdims=True)
            tail = t * yv + s * xv
            return np.concatenate([head, tail], axis=-1)
        X, Y = self.matrix(x), self.matrix(y)
        return self.from_matrix(0.5 * (kmatmul(X, Y) + kmatmul(Y, X)))

    def inner(self, x, y) -> np.ndarray:
        """Trace form ``Re Tr(XY)``; ``2(ts + x.y)`` on spin factors."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.is_sum:
            return sum(c.inner(a, b) for c, a, b in zip(self.components, self.split(x), self.split(y)))
        if self.family == "Spin":
            return 2.0 * np.sum(x * y, axis=-1)
        return kretrace(self.matrix(x), self.matrix(y))

    @cached_property
    def gram(self) -> np.ndarray:
        eye = np.eye(self.N)
        return self.inner(eye[:, None, :], eye[None, :, :])

    def det(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.is_sum:
            out = 1.0
            for c, a in zip(self.components, self.split(x)):
                out = out * c.det(a)
            return out
        if self.family == "Spin":
            return x[..., 0] ** 2 - np.sum(x[..., 1:] ** 2, axis=-1)
        m = self.matrix(x)
        if self.family == "Albert":
            return albert_det(m)
        if self.family == "HermH":
            ev = np.linalg.eigvalsh(complex_matrix(m))
            return np.prod(ev[..., ::2], axis=-1)
        return np.real(np.linalg.det(complex_matrix(m)))

    def eigenvalues(self, x) -> np.ndarray:
        """Jordan spectrum, ascending, with multiplicity (length r)."""
        x = np.asarray(x, dtype=float)
        if self.is_sum:
            return np.concatenate([c.eigenvalues(a) for c, a in zip(self.components, self.split(x))], axis=-1)
        if self.family == "Spin":
            nx = np.linalg.norm(x[..., 1:], axis=-1)
            return np.stack([x[..., 0] - nx, x[..., 0] + nx], axis=-1)
        m = self.matrix(x)
        if self.family == "Albert":
            return albert_spectrum(m)
        ev = np.linalg.eigvalsh(complex_matrix(m))
        return ev[..., ::2] if self.family == "HermH" else ev


# -- K-matrix helpers --------------------------------------------------------


def kmatmul(X, Y) -> np.ndarray:
    """Matrix product with entries multiplied in the division algebra."""
    from .division import mult_table

    d = X.shape[-1]
    return np.einsum("...ija,...jkb,abc->...ikc", X, Y, mult_table(d))


def kadjoint(X) -> np.ndarray:
    return np.swapaxes(conj_array(X), -2, -3)


def kretrace(X, Y) -> np.ndarray:
    """``Re Tr(XY)`` for K-matrices."""
    eta = -np.ones(X.shape[-1])
    eta[0] = 1.0
    return np.einsum("...ija,...jia,a->...", X, Y, eta)


def complex_matrix(m) -> np.ndarray:
    """Complex matrix of an R/C/H matrix; 2n x 2n block form for H."""
    d = m.shape[-1]
    if d == 1:
        return m[..., 0]
    if d == 2:
        return m[..., 0] + 1j * m[..., 1]
    if d == 4:
        a = m[..., 0] + 1j * m[..., 1]
        b = m[..., 2] + 1j * m[..., 3]
        top = np.concatenate([a, -b], axis=-1)
        bot = np.concatenate([np.conj(b), np.conj(a)], axis=-1)
        return np.concatenate([top, bot], axis=-2)
    raise ValueError("no complex representation for octonionic matrices")


def albert_parts(m):
    """Diagonal ``a, b, c`` and off-diagonal octonions ``x=M12, y=M20, z=M01``."""
    return (m[..., 0, 0, 0], m[..., 1, 1, 0], m[..., 2, 2, 0],
            m[..., 1, 2, :], m[..., 2, 0, :], m[..., 0, 1, :])


def freudenthal(a, b, c, x, y, z, mul, dot, re):
    """Cubic norm ``abc - a|x|^2 - b|y|^2 - c|z|^2 + 2 Re(x(yz))``.

    Written against abstract ``mul``/``dot``/``re`` so it serves both float
    arrays and jets.
    """
    return a * b * c - a * dot(x, x) - b * dot(y, y) - c * dot(z, z) + 2.0 * re(mul(x, mul(y, z)))


def albert_det(m) -> np.ndarray:
    return freudenthal(
        *albert_parts(m),
        mul=mul_array,
        dot=lambda p, q: np.sum(p * q, axis=-1),
        re=lambda p: p[..., 0],
    )


def albert_spectrum(m) -> np.ndarray:
    """Roots of the generic minimum polynomial ``l^3 - T l^2 + S l - D``."""
    a, b, c, x, y, z = albert_parts(m)
    tr = a + b + c
    sq = lambda v: np.sum(v * v, axis=-1)
    s2 = a * b + b * c + c * a - sq(x) - sq(y) - sq(z)
    det = albert_det(m)
    tr, s2, det = np.broadcast_arrays(tr, s2, det)
    comp = np.zeros(tr.shape + (3, 3))
    comp[..., 0, 0] = tr
    comp[..., 0, 1] = -s2
    comp[..., 0, 2] = det
    comp[..., 1, 0] = 1.0
    comp[..., 2, 1] = 1.0
    roots = np.sort(np.real(np.linalg.eigvals(comp)), axis=-1)
    return roots


# -- public construction ------------------------------------------------------


def make_algebra(family: str, n: int = 3) -> JordanAlgebra:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if family == "Albert" and n != 3:
        raise UnsupportedRankError("octonionic Hermitian matrices are Jordan only for n = 3")
    if family == "Spin":
        if n < 2:
            raise ValueError("spin factors need n >= 2")
        return JordanAlgebra("Spin", n, n, 2, np.eye(n))
    d = FIELD_DIM[family]
    basis = _matrix_basis(n, d)
    return JordanAlgebra(family, n, len(basis), n, basis)


def direct_sum(*algebras: JordanAlgebra) -> JordanAlgebra:
    comps = []
    for a in algebras:
        comps.extend(a.components if a.is_sum else [a])
    N = sum(c.N for c in comps)
    r = sum(c.r for c in comps)
    return JordanAlgebra("DirectSum", N, N, r, None, tuple(comps))


def parse_family(text: str) -> JordanAlgebra:
    """Parse ``SymR:3``, ``Spin:5``, ``Albert`` or sums like ``SymR:2+Spin:3``."""
    parts = [p.strip() for p in text.split("+")]
    algs = []
    for p in parts:
        name, _, n = p.partition(":")
        name = name.strip()
        if name == "Albert":
            algs.append(make_algebra("Albert", int(n) if n else 3))
        else:
            if not n:
                raise ValueError(f"family {name!r} needs a size, e.g. {name}:3")
            algs.append(make_algebra(name, int(n)))
    return algs[0] if len(algs) == 1 else direct_sum(*algs)


# -- element-level API ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class JordanElement:
    algebra: JordanAlgebra
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        if c.shape != (self.algebra.N,):
            raise ValueError(f"{self.algebra.name} elements have {self.algebra.N} coordinates")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def _check(self, other: JordanElement):
        if other.algebra != self.algebra:
            raise AlgebraMismatchError(f"{self.algebra.name} vs {other.algebra.name}")

    def __add__(self, other):
        self._check(other)
        return JordanElement(self.algebra, self.coords + other.coords)

    def __sub__(self, other):
        self._check(other)
        return JordanElement(self.algebra, self.coords - other.coords)

    def __neg__(self):
        return JordanElement(self.algebra, -self.coords)

    def __mul__(self, lam: float):
        return JordanElement(self.algebra, self.coords * float(lam))

    __rmul__ = __mul__

    def __repr__(self):
        return f"JordanElement({self.algebra.name}, {np.round(self.coords, 6).tolist()})"

    def matrix(self) -> np.ndarray:
        return self.algebra.matrix(self.coords)


def element(J: JordanAlgebra, coords) -> JordanElement:
    return JordanElement(J, coords)


def from_matrix(J: JordanAlgebra, m) -> JordanElement:
    """Element from an ``n x n`` real/complex array or an ``(n, n, d)`` K-array."""
    m = np.asarray(m)
    if np.iscomplexobj(m):
        m = np.stack([m.real, m.imag], axis=-1)
    if m.ndim == 2:
        m = m[..., None]
    if m.shape[-1] < J.d:
        m = np.concatenate([m, np.zeros(m.shape[:-1] + (J.d - m.shape[-1],))], axis=-1)
    return JordanElement(J, J.from_matrix(m))


def _coerce(J: JordanAlgebra, x) -> np.ndarray:
    if isinstance(x, JordanElement):
        if x.algebra != J:
            raise AlgebraMismatchError(f"element of {x.algebra.name} used in {J.name}")
        return x.coords
    return np.asarray(x, dtype=float)


def identity(J: JordanAlgebra) -> JordanElement:
    return JordanElement(J, J.identity())


def jordan_product(J: JordanAlgebra, x, y) -> JordanElement:
    return JordanElement(J, J.product(_coerce(J, x), _coerce(J, y)))


def trace_form(J: JordanAlgebra, x, y) -> float:
    return float(J.inner(_coerce(J, x), _coerce(J, y)))


def determinant(J: JordanAlgebra, x) -> float:
    return float(J.det(_coerce(J, x)))


def power(J: JordanAlgebra, x, m: int) -> JordanElement:
    if m < 1:
        raise ValueError("power needs m >= 1")
    base = _coerce(J, x)
    out = base
    for _ in range(m - 1):
        out = J.product(base, out)
    return JordanElement(J, out)


def random_element(J: JordanAlgebra, rng: np.random.Generator) -> JordanElement:
    return JordanElement(J, J.random(rng))
