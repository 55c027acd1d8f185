"""The symmetric cone of a Jordan algebra and its Koszul-Vinberg potential."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .jordan import JordanAlgebra, JordanElement, _coerce, albert_parts

# near-boundary points are rejected from derivative sampling below this margin
MIN_MARGIN = 1e-6


class DomainError(ValueError):
    """A point outside the open cone was passed where an interior point is needed."""


@dataclass(frozen=True)
class ConePoint:
    element: JordanElement
    interior_margin: float

    @property
    def algebra(self) -> JordanAlgebra:
        return self.element.algebra

    @property
    def coords(self) -> np.ndarray:
        return self.element.coords


def interior_margin(J: JordanAlgebra, x) -> float:
    """Smallest Jordan eigenvalue (``t - |x|`` on spin factors, min over summands)."""
    x = _coerce(J, x)
    return float(np.min(J.eigenvalues(x)))


def contains(J: JordanAlgebra, x) -> bool:
    x = _coerce(J, x)
    if J.is_sum:
        return all(contains(c, a) for c, a in zip(J.components, J.split(x)))
    if J.family == "Spin":
        return bool(x[0] > 0 and x[0] ** 2 - np.dot(x[1:], x[1:]) > 0)
    if J.family == "Albert":
        a, b, _, _, _, z = albert_parts(J.matrix(x))
        return bool(a > 0 and a * b - np.dot(z, z) > 0 and J.det(x) > 0)
    return bool(np.min(J.eigenvalues(x)) > 0)


def cone_point(J: JordanAlgebra, x) -> ConePoint:
    x = _coerce(J, x)
    if not contains(J, x):
        raise DomainError(f"point is not interior to the {J.name} cone")
    return ConePoint(JordanElement(J, x), interior_margin(J, x))


def sample_interior(J: JordanAlgebra, rng: np.random.Generator, spread: float = 1.0) -> ConePoint:
    """``a o a + spread * e`` for a standard normal ``a``."""
    if spread <= 0:
        raise ValueError("spread must be positive")
    a = J.random(rng)
    return cone_point(J, J.product(a, a) + spread * J.identity())


# -- potential ------------------------------------------------------------------


@dataclass(frozen=True)
class PotentialSpec:
    """``Phi(x) = -sum_i k_i log det_i(x_i) + c`` with ``k_i = N_i / r_i``.

    For an irreducible algebra there is one summand.  Direct sums carry one
    exponent per summand, which makes ``exp(Phi)`` the product of the
    summands' characteristic functions.
    """

    algebra: JordanAlgebra
    constant: float = 0.0

    @property
    def exponents(self) -> tuple[float, ...]:
        J = self.algebra
        comps = J.components if J.is_sum else (J,)
        return tuple(c.N / c.r for c in comps)

    @property
    def k(self) -> float:
        if self.algebra.is_sum:
            raise ValueError("direct sums carry one exponent per summand; use .exponents")
        return self.algebra.N / self.algebra.r

    @property
    def degree(self) -> int:
        """Homogeneity degree of ``chi = exp(Phi)``: ``chi(l x) = l**degree chi(x)``."""
        return -self.algebra.N


def potential_spec(J: JordanAlgebra, constant: float = 0.0) -> PotentialSpec:
    return PotentialSpec(J, constant)


def kv_potential(spec: PotentialSpec, x) -> float:
    J = spec.algebra
    x = _coerce(J, x)
    if not contains(J, x):
        raise DomainError("the potential is only defined on the open cone")
    comps = J.components if J.is_sum else (J,)
    parts = J.split(x) if J.is_sum else (x,)
    total = 0.0
    for c, k, p in zip(comps, spec.exponents, parts):
        total -= k * math.log(c.det(p))
    return total + spec.constant


# -- Koszul-Vinberg integral ---------------------------------------------------------


def kv_integral_mc(J: JordanAlgebra, x, n_samples: int, rng: np.random.Generator) -> float:
    """Importance-sampled ``int_{cone} exp(-<x, a>) da`` for cones with N <= 3.

    Uses self-duality, so the integral runs over the cone itself.  Points are
    written ``a = s (1, u)`` with ``|u| < 1``; ``u`` is uniform in the unit
    ball and ``s`` is Gamma(N) distributed with a rate below the smallest
    value of the linear form on the slice, which keeps the weights bounded.
    """
    if J.is_sum or J.N > 3 or J.family not in ("SymR", "Spin") or (J.family == "SymR" and J.n != 1):
        raise ValueError("Monte Carlo KV integral supports only SymR(1), Spin(2), Spin(3)")
    if n_samples < 100_000:
        raise ValueError("n_samples must be at least 1e5")
    x = _coerce(J, x)
    if not contains(J, x):
        raise DomainError("integrand needs an interior point")
    N = J.N
    if J.family == "SymR":
        # <x, a> = x a on the half line
        c_min = float(x[0])
        u = np.zeros((n_samples, 0))
        ball_vol = 1.0
        slope = np.full(n_samples, float(x[0]))
    else:
        m = N - 1
        u = _uniform_ball(rng, n_samples, m)
        ball_vol = math.pi ** (m / 2) / math.gamma(m / 2 + 1)
        slope = 2.0 * (x[0] + u @ x[1:])
        c_min = 2.0 * (x[0] - np.linalg.norm(x[1:]))
    rate = 0.75 * c_min
    s = rng.gamma(shape=N, scale=1.0 / rate, size=n_samples)
    # da = s^(N-1) ds du; proposal density rate^N s^(N-1) exp(-rate s) / Gamma(N) / ball_vol
    log_w = -s * (slope - rate) + special.gammaln(N) - N * math.log(rate) + math.log(ball_vol)
    return float(np.mean(np.exp(log_w)))


def _uniform_ball(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    g = rng.standard_normal((n, m))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radius = rng.random(n) ** (1.0 / m)
    return g * radius[:, None]


def self_duality_sample(J: JordanAlgebra, rng: np.random.Generator, trials: int) -> bool:
    """True iff ``<x, y> > 0`` for every sampled pair of interior points."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    for _ in range(trials):
        x = sample_interior(J, rng).coords
        y = sample_interior(J, rng).coords
        if not J.inner(x, y) > 0:
            return False
    return True
