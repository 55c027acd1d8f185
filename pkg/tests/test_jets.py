from __future__ import annotations

import math

import numpy as np
import pytest

from vinberg_wdvv.jets import Jet, logdet, monomial_basis


def _univariate(value, order=4):
    return Jet.affine(np.array([value]), np.array([[1.0]]), order)[0]


def test_basis_size_and_lookup():
    B = monomial_basis(3, 4)
    assert len(B.exponents) == math.comb(3 + 4, 4)
    assert tuple(B.exponents[B.monomial((0, 2, 2))]) == (1, 0, 2)


def test_log_derivatives():
    x = 1.7
    jet = _univariate(x).log()
    expected = [math.log(x), 1 / x, -1 / x**2, 2 / x**3, -6 / x**4]
    for p, val in enumerate(expected):
        assert jet.partial((0,) * p) == pytest.approx(val, rel=1e-13)


def test_reciprocal_and_product():
    x = _univariate(0.8)
    one = x * x.reciprocal()
    assert one.value == pytest.approx(1.0)
    for p in range(1, 5):
        assert one.partial((0,) * p) == pytest.approx(0.0, abs=1e-12)


def test_multivariate_product_rule(rng):
    base = rng.standard_normal(2)
    dirs = np.eye(2)
    X = Jet.affine(base, dirs, 3)
    f = X[0] * X[0] * X[1]  # x^2 y
    x, y = base
    assert f.partial((0,)) == pytest.approx(2 * x * y)
    assert f.partial((0, 0, 1)) == pytest.approx(2.0)
    assert f.partial((1, 1)) == pytest.approx(0.0)
    assert np.allclose(f.tensor(2), [[2 * y, 2 * x], [2 * x, 0.0]])


def test_logdet_matches_closed_form(rng):
    n = 3
    A = rng.standard_normal((n, n))
    X = A @ A.T + n * np.eye(n)
    D = [rng.standard_normal((n, n)) for _ in range(2)]
    D = [d + d.T for d in D]
    jet = Jet.affine(X.ravel(), np.array([d.ravel() for d in D]), 2)
    ld = logdet(jet.map(lambda c: c.reshape(c.shape[:-1] + (n, n))))
    Xi = np.linalg.inv(X)
    assert ld.value == pytest.approx(np.linalg.slogdet(X)[1])
    assert ld.partial((0,)) == pytest.approx(np.trace(Xi @ D[0]))
    assert ld.partial((0, 1)) == pytest.approx(-np.trace(Xi @ D[0] @ Xi @ D[1]))
