"""Real division algebras R, C, H, O built by Cayley-Dickson doubling.

Elements are real coordinate vectors of length 1, 2, 4 or 8. The doubling
rule ``(x, y)(u, v) = (xu - conj(v) y, v x + y conj(u))`` is the only source
of multiplication; the cached tables below are generated from it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DIMS = (1, 2, 4, 8)
WIDTH = 8


class IncompatibleScalarsError(ValueError):
    """Operands come from different division algebras."""


def _check_dim(d: int) -> None:
    if d not in DIMS:
        raise ValueError(f"division algebra dimension must be one of {DIMS}, got {d}")


def conj_array(a: np.ndarray) -> np.ndarray:
    """Conjugate along the last axis: negate every non-real coordinate."""
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def cd_mul_recursive(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cayley-Dickson product on the last axis (reference recursion)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = a.shape[-1]
    if b.shape[-1] != d:
        raise IncompatibleScalarsError(f"cannot multiply dim {d} by dim {b.shape[-1]}")
    if d == 1:
        return a * b
    h = d // 2
    x, y = a[..., :h], a[..., h:]
    u, v = b[..., :h], b[..., h:]
    first = cd_mul_recursive(x, u) - cd_mul_recursive(conj_array(v), y)
    second = cd_mul_recursive(v, x) + cd_mul_recursive(y, conj_array(u))
    return np.concatenate([first, second], axis=-1)


@lru_cache(maxsize=None)
def mult_table(d: int) -> np.ndarray:
    """Structure constants ``T[i, j, k]`` with ``e_i e_j = sum_k T[i, j, k] e_k``."""
    _check_dim(d)
    eye = np.eye(d)
    table = cd_mul_recursive(eye[:, None, :], eye[None, :, :])
    table.setflags(write=False)
    return table


def mul_array(a, b) -> np.ndarray:
    """Batched product over the last axis, broadcasting leading axes."""
    a = np.asarray(a)
    b = np.asarray(b)
    d = a.shape[-1]
    if b.shape[-1] != d:
        raise IncompatibleScalarsError(f"cannot multiply dim {d} by dim {b.shape[-1]}")
    return np.einsum("...i,...j,ijk->...k", a, b, mult_table(d))


@dataclass(frozen=True, eq=False)
class DivisionScalar:
    """An element of R, C, H or O, stored zero-padded to width 8."""

    coords: np.ndarray
    dim: int

    def __post_init__(self):
        _check_dim(self.dim)
        c = np.zeros(WIDTH)
        raw = np.asarray(self.coords, dtype=float).ravel()
        if raw.size == self.dim:
            c[: self.dim] = raw
        elif raw.size == WIDTH and not np.any(raw[self.dim:]):
            c[:] = raw
        else:
            raise ValueError(f"expected {self.dim} coordinates, got {raw.size}")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @classmethod
    def of(cls, *values: float) -> DivisionScalar:
        return cls(np.array(values, dtype=float), len(values))

    @classmethod
    def unit(cls, d: int, i: int = 0) -> DivisionScalar:
        c = np.zeros(d)
        c[i] = 1.0
        return cls(c, d)

    @property
    def value(self) -> np.ndarray:
        return self.coords[: self.dim]

    def __mul__(self, other):
        if isinstance(other, DivisionScalar):
            return cd_mul(self, other)
        return DivisionScalar(self.value * float(other), self.dim)

    def __rmul__(self, other):
        return DivisionScalar(self.value * float(other), self.dim)

    def __add__(self, other: DivisionScalar) -> DivisionScalar:
        _same(self, other)
        return DivisionScalar(self.value + other.value, self.dim)

    def __sub__(self, other: DivisionScalar) -> DivisionScalar:
        _same(self, other)
        return DivisionScalar(self.value - other.value, self.dim)

    def __neg__(self) -> DivisionScalar:
        return DivisionScalar(-self.value, self.dim)

    def __eq__(self, other):
        if not isinstance(other, DivisionScalar):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash((self.dim, self.coords.tobytes()))

    def __repr__(self):
        return f"DivisionScalar({self.value.tolist()})"


def _same(a: DivisionScalar, b: DivisionScalar) -> None:
    if a.dim != b.dim:
        raise IncompatibleScalarsError(f"dim {a.dim} vs dim {b.dim}")


def cd_mul(a: DivisionScalar, b: DivisionScalar) -> DivisionScalar:
    _same(a, b)
    return DivisionScalar(cd_mul_recursive(a.value, b.value), a.dim)


def conj(a: DivisionScalar) -> DivisionScalar:
    return DivisionScalar(conj_array(a.value), a.dim)


def real_part(a: DivisionScalar) -> float:
    return float(a.coords[0])


def norm_sq(a: DivisionScalar) -> float:
    return float(np.dot(a.coords, a.coords))


def random_scalar(d: int, rng: np.random.Generator) -> DivisionScalar:
    return DivisionScalar(rng.standard_normal(d), d)
