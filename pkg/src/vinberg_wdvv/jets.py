"""Truncated multivariate Taylor arithmetic.

A :class:`Jet` holds the Taylor coefficients of a (possibly array valued)
function of ``m`` variables at the origin, truncated at total degree
``order``.  Coefficient arrays have the monomial index on axis 0 and the
value shape on the remaining axes, so a jet of an ``n x n`` matrix has
``coef.shape == (M, n, n)``.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np


class MonomialBasis:
    """Monomials of degree <= order in m variables, graded by degree."""

    def __init__(self, m: int, order: int):
        if m < 0 or order < 0:
            raise ValueError("m and order must be non-negative")
        self.m = m
        self.order = order
        exps = []
        for deg in range(order + 1):
            for combo in itertools.combinations_with_replacement(range(m), deg):
                e = [0] * m
                for v in combo:
                    e[v] += 1
                exps.append(tuple(e))
        self.exponents = exps
        self.index = {e: i for i, e in enumerate(exps)}
        self.degree = np.array([sum(e) for e in exps])
        self.factorial = np.array(
            [math.prod(math.factorial(k) for k in e) for e in exps], dtype=float
        )
        self.size = len(exps)

        src_i, src_j, dst = [], [], []
        for i, ei in enumerate(exps):
            for j, ej in enumerate(exps):
                if self.degree[i] + self.degree[j] > order:
                    continue
                src_i.append(i)
                src_j.append(j)
                dst.append(self.index[tuple(a + b for a, b in zip(ei, ej))])
        perm = np.argsort(dst, kind="stable")
        self._i = np.array(src_i)[perm]
        self._j = np.array(src_j)[perm]
        dst = np.array(dst)[perm]
        # every target has at least the pair (k, 0) so no segment is empty
        self._starts = np.searchsorted(dst, np.arange(self.size))

    def monomial(self, multi_index) -> int:
        """Index of the monomial with one factor per entry of ``multi_index``."""
        e = [0] * self.m
        for v in multi_index:
            e[v] += 1
        return self.index[tuple(e)]

    def convolve(self, a: np.ndarray, b: np.ndarray, fn=np.multiply) -> np.ndarray:
        prod = fn(a[self._i], b[self._j])
        return np.add.reduceat(prod, self._starts, axis=0)


@lru_cache(maxsize=64)
def monomial_basis(m: int, order: int) -> MonomialBasis:
    return MonomialBasis(m, order)


class Jet:
    __array_priority__ = 1000

    def __init__(self, coef, basis: MonomialBasis):
        coef = np.asarray(coef)
        if coef.shape[0] != basis.size:
            raise ValueError("coefficient axis does not match basis size")
        self.coef = coef
        self.basis = basis

    @classmethod
    def constant(cls, value, basis: MonomialBasis) -> Jet:
        value = np.asarray(value)
        coef = np.zeros((basis.size,) + value.shape, dtype=np.result_type(value, float))
        coef[0] = value
        return cls(coef, basis)

    @classmethod
    def affine(cls, value, directions, order: int) -> Jet:
        """Jet of ``t -> value + sum_a t_a directions[a]``."""
        value = np.asarray(value)
        directions = np.asarray(directions)
        basis = monomial_basis(len(directions), order)
        coef = np.zeros((basis.size,) + value.shape, dtype=np.result_type(value, directions, float))
        coef[0] = value
        if order >= 1:
            coef[1: 1 + len(directions)] = directions
        return cls(coef, basis)

    @property
    def shape(self):
        return self.coef.shape[1:]

    @property
    def value(self):
        return self.coef[0]

    def __repr__(self):
        return f"Jet(m={self.basis.m}, order={self.basis.order}, shape={self.shape})"

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.coef[(slice(None),) + idx], self.basis)

    def _lift(self, other) -> Jet:
        if isinstance(other, Jet):
            if other.basis is not self.basis:
                raise ValueError("jets over different monomial bases")
            return other
        return Jet.constant(other, self.basis)

    def __add__(self, other):
        other = self._lift(other)
        return Jet(self.coef + other.coef, self.basis)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        return Jet(self.coef - other.coef, self.basis)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return Jet(-self.coef, self.basis)

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b = self.coef, self._lift(other).coef
            # align value axes so broadcasting skips the monomial axis
            if a.ndim < b.ndim:
                a = a.reshape(a.shape[:1] + (1,) * (b.ndim - a.ndim) + a.shape[1:])
            elif b.ndim < a.ndim:
                b = b.reshape(b.shape[:1] + (1,) * (a.ndim - b.ndim) + b.shape[1:])
            return Jet(self.basis.convolve(a, b), self.basis)
        return Jet(self.coef * np.asarray(other), self.basis)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.coef / np.asarray(other), self.basis)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def bilinear(self, other: Jet, fn) -> Jet:
        """Apply a bilinear map ``fn`` (acting on stacked coefficients) to two jets."""
        other = self._lift(other)
        return Jet(self.basis.convolve(self.coef, other.coef, fn), self.basis)

    def map(self, fn) -> Jet:
        """Apply a linear map to every coefficient (``fn`` sees the monomial axis first)."""
        return Jet(fn(self.coef), self.basis)

    @property
    def real(self) -> Jet:
        return Jet(self.coef.real, self.basis)

    def compose(self, derivs) -> Jet:
        """Compose with a scalar function given ``derivs[j] = f^(j)(value)``."""
        order = self.basis.order
        h = Jet(self.coef.copy(), self.basis)
        h.coef[0] = 0
        out = Jet.constant(derivs[0], self.basis)
        power = None
        for j in range(1, order + 1):
            power = h if power is None else power * h
            out = out + power * (derivs[j] / math.factorial(j))
        return out

    def reciprocal(self) -> Jet:
        a = self.value
        order = self.basis.order
        derivs = [(-1) ** j * math.factorial(j) / a ** (j + 1) for j in range(order + 1)]
        return self.compose(derivs)

    def log(self) -> Jet:
        a = self.value
        order = self.basis.order
        derivs = [np.log(a)] + [
            (-1) ** (j - 1) * math.factorial(j - 1) / a**j for j in range(1, order + 1)
        ]
        return self.compose(derivs)

    def sum(self, axis=None) -> Jet:
        if axis is None:
            axes = tuple(range(1, self.coef.ndim))
        else:
            axes = tuple((a % len(self.shape)) + 1 for a in np.atleast_1d(axis))
        return Jet(self.coef.sum(axis=axes), self.basis)

    def partial(self, multi_index) -> float:
        """Mixed partial derivative, one variable index per differentiation."""
        k = self.basis.monomial(multi_index)
        return self.coef[k] * self.basis.factorial[k]

    def tensor(self, degree: int) -> np.ndarray:
        """Dense symmetric array of all partials of the given degree (scalar jets)."""
        m = self.basis.m
        if degree == 0:
            return np.asarray(self.value)
        idx = _tensor_index(m, degree, self.basis.order)
        flat = self.coef[idx] * self.basis.factorial[idx]
        return flat.reshape((m,) * degree + self.shape)


@lru_cache(maxsize=64)
def _tensor_index(m: int, degree: int, order: int) -> np.ndarray:
    basis = monomial_basis(m, order)
    return np.array(
        [basis.monomial(t) for t in itertools.product(range(m), repeat=degree)], dtype=int
    )


def logdet(mat: Jet) -> Jet:
    """Log-determinant of a square matrix jet by elimination without pivoting.

    The base matrix must have non-vanishing leading principal minors (true for
    Hermitian positive definite bases). Complex matrices give complex jets.
    """
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise ValueError("logdet needs a square matrix jet")
    acc = None
    a = mat
    for _ in range(n):
        piv = a[0, 0]
        if not np.all(np.isfinite(piv.value)) or abs(piv.value) == 0:
            raise ZeroDivisionError("vanishing pivot in jet elimination")
        term = piv.log()
        acc = term if acc is None else acc + term
        if a.shape[0] == 1:
            break
        inv = piv.reciprocal()
        col = a[1:, 0:1]
        row = a[0:1, 1:] * inv
        a = a[1:, 1:] - col * row
    return acc
