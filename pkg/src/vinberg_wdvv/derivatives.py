"""Derivatives of the potential along chart directions.

Three independent routes:

* :func:`directional_jet` pushes truncated Taylor jets through the
  determinant of each family (elimination for matrix families, the
  quadratic form for spin factors, the Freudenthal cubic for the Albert
  algebra) and takes ``log``;
* :func:`logdet_oracle` uses closed-form derivative formulas of ``log det``;
* :func:`finite_difference_partial` uses Richardson-extrapolated central
  differences and is the oracle for the Albert algebra.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import jets
from .cone import ConePoint, DomainError, PotentialSpec, contains, cone_point, kv_potential
from .division import mul_array
from .jordan import JordanAlgebra, _coerce, albert_parts, complex_matrix, freudenthal

MAX_COND = 1e12


class ConditioningError(ValueError):
    """A derivative evaluation left the cone or hit a singular matrix."""


class IllConditionedChartError(ConditioningError):
    """The metric in a chart has condition number above the gate."""


@dataclass(frozen=True, eq=False)
class Chart:
    """Affine frame: a base point and ``m`` tangent directions (rows of ``dirs``)."""

    base: ConePoint
    dirs: np.ndarray

    def __post_init__(self):
        J = self.base.algebra
        dirs = np.atleast_2d(np.array(self.dirs, dtype=float))
        if dirs.shape[1] != J.N:
            raise ValueError(f"directions must have {J.N} coordinates")
        if dirs.shape[0] > J.N:
            raise ValueError("more chart directions than the ambient dimension")
        gram = dirs @ J.gram @ dirs.T
        if np.linalg.det(gram) <= 1e-12:
            raise ValueError("chart directions are not linearly independent")
        dirs.setflags(write=False)
        object.__setattr__(self, "dirs", dirs)

    @property
    def algebra(self) -> JordanAlgebra:
        return self.base.algebra

    @property
    def m(self) -> int:
        return self.dirs.shape[0]

    def point(self, t) -> np.ndarray:
        return self.base.coords + np.asarray(t) @ self.dirs

    def reparametrize(self, matrix) -> Chart:
        """Chart with directions ``matrix @ dirs`` (an affine change of frame)."""
        return Chart(self.base, np.asarray(matrix) @ self.dirs)


def make_chart(J: JordanAlgebra, base, dirs) -> Chart:
    base = base if isinstance(base, ConePoint) else cone_point(J, base)
    return Chart(base, dirs)


def ambient_chart(J: JordanAlgebra, x) -> Chart:
    return make_chart(J, x, np.eye(J.N))


# -- jet route ---------------------------------------------------------------------


def _logdet_jet(J: JordanAlgebra, xj: jets.Jet) -> jets.Jet:
    if J.family == "Spin":
        t = xj[0]
        v = xj[1:]
        q = t * t - (v * v).sum()
        if q.value <= 0:
            raise ConditioningError("jet base point left the Lorentz cone")
        return q.log()
    m = xj.map(J.matrix)
    if J.family == "Albert":
        parts = [jets.Jet(p, xj.basis) for p in albert_parts(m.coef)]
        det = freudenthal(
            *parts,
            mul=lambda p, q: p.bilinear(q, mul_array),
            dot=lambda p, q: p.bilinear(q, lambda u, w: np.sum(u * w, axis=-1)),
            re=lambda p: p[0],
        )
        if det.value <= 0:
            raise ConditioningError("jet base point left the Albert cone")
        return det.log()
    cm = m.map(complex_matrix)
    try:
        ld = jets.logdet(cm)
    except ZeroDivisionError as exc:
        raise ConditioningError(str(exc)) from exc
    ld = ld.real
    return ld * 0.5 if J.family == "HermH" else ld


def directional_jet(spec: PotentialSpec, chart: Chart, order: int = 4) -> jets.Jet:
    """Taylor jet of ``t -> Phi(base + sum_a t_a dirs[a])`` up to ``order``."""
    if not 0 <= order <= 4:
        raise ValueError("order must be between 0 and 4")
    J = spec.algebra
    if chart.algebra != J:
        raise ValueError("chart and potential live on different algebras")
    if not contains(J, chart.base.coords):
        raise ConditioningError("chart base is not interior")
    xj = jets.Jet.affine(chart.base.coords, chart.dirs, order)
    comps = J.components if J.is_sum else (J,)
    slices = J.slices if J.is_sum else (slice(None),)
    total = None
    for c, k, s in zip(comps, spec.exponents, slices):
        term = _logdet_jet(c, xj[s]) * (-k)
        total = term if total is None else total + term
    return total + spec.constant


# -- closed-form oracle -----------------------------------------------------------------


def _logdet_matrix_derivative(X, mats) -> float:
    """``D^p log det(X)[A_1..A_p]`` for complex matrices."""
    p = len(mats)
    Xi = np.linalg.inv(X)
    if p == 0:
        return float(np.real(np.linalg.slogdet(X)[1]))
    Y = [Xi @ A for A in mats]
    total = 0.0
    for perm in itertools.permutations(range(1, p)):
        prod = Y[0]
        for i in perm:
            prod = prod @ Y[i]
        total += np.trace(prod)
    return float(np.real((-1) ** (p - 1) * total))


def _spin_logq_derivative(x, dirs) -> float:
    """``D^p log(t^2 - |v|^2)`` from the quadratic form, p <= 4."""
    eta = -np.ones(len(x))
    eta[0] = 1.0
    q = np.dot(x * eta, x)
    p = len(dirs)
    if p == 0:
        return math.log(q)
    al = [2.0 * np.dot(x * eta, d) / q for d in dirs]
    be = [[2.0 * np.dot(a * eta, b) / q for b in dirs] for a in dirs]
    if p == 1:
        return al[0]
    if p == 2:
        return be[0][1] - al[0] * al[1]
    if p == 3:
        a, b, c = al
        return -(be[0][1] * c + be[0][2] * b + be[1][2] * a) + 2.0 * a * b * c
    if p == 4:
        pairs = ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2))
        bb = sum(be[i][j] * be[k][l] for i, j, k, l in pairs)
        baa = sum(be[i][j] * al[k] * al[l] for i, j, k, l in pairs)
        baa += sum(be[k][l] * al[i] * al[j] for i, j, k, l in pairs)
        return -bb + 2.0 * baa - 6.0 * al[0] * al[1] * al[2] * al[3]
    raise ValueError("spin oracle supports orders up to 4")


def logdet_oracle(spec: PotentialSpec, x, dirs, order: int | None = None) -> float:
    """Closed-form ``D^p Phi(x)[d_1, .., d_p]`` with ``p = len(dirs)``.

    Matrix families over R, C, H and spin factors only; the Albert algebra
    has no matrix-inverse formula here and raises ``ValueError``.
    """
    J = spec.algebra
    x = _coerce(J, x)
    dirs = [np.asarray(d, dtype=float) for d in dirs]
    if order is not None and order != len(dirs):
        raise ValueError("order must equal the number of directions")
    if not contains(J, x):
        raise ConditioningError("oracle point is not interior")
    if not dirs:
        return kv_potential(spec, x)
    comps = J.components if J.is_sum else (J,)
    slices = J.slices if J.is_sum else (slice(None),)
    total = 0.0
    for c, k, s in zip(comps, spec.exponents, slices):
        total += -k * _component_logdet_derivative(c, x[s], [d[s] for d in dirs])
    return total


def _component_logdet_derivative(J: JordanAlgebra, x, dirs) -> float:
    if J.family == "Spin":
        return _spin_logq_derivative(x, dirs)
    if J.family == "Albert":
        raise ValueError("no closed-form log-det oracle for the Albert algebra")
    X = complex_matrix(J.matrix(x))
    mats = [complex_matrix(J.matrix(d)) for d in dirs]
    try:
        val = _logdet_matrix_derivative(X, mats)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError("singular matrix in oracle") from exc
    return 0.5 * val if J.family == "HermH" else val


# -- finite differences -------------------------------------------------------------------


def finite_difference_partial(spec: PotentialSpec, x, dirs, h: float = 1e-2, levels: int = 1) -> float:
    """Tensor-product central difference of ``Phi`` with ``levels`` Richardson steps."""
    J = spec.algebra
    x = _coerce(J, x)
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float)) if len(dirs) else np.zeros((0, J.N))
    p = len(dirs)
    if p == 0:
        return kv_potential(spec, x)

    def central(step):
        acc = 0.0
        for signs in itertools.product((1.0, -1.0), repeat=p):
            pt = x + step * np.asarray(signs) @ dirs
            acc += math.prod(signs) * kv_potential(spec, pt)
        return acc / (2.0 * step) ** p

    table = [central(h / 2**i) for i in range(levels + 1)]
    for lvl in range(1, levels + 1):
        f = 4.0**lvl
        table = [(f * table[i + 1] - table[i]) / (f - 1.0) for i in range(len(table) - 1)]
    return table[0]


# -- tensors in a chart ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MetricTensor:
    g: np.ndarray
    inverse: np.ndarray
    cond: float

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.g)[0])


@dataclass(frozen=True, eq=False)
class ChartGeometry:
    """Metric, C-tensor and (optionally) the fourth-derivative tensor at a chart base."""

    chart: Chart
    value: float
    gradient: np.ndarray
    metric: MetricTensor
    C: np.ndarray | None = None
    Q: np.ndarray | None = None


def _metric_from(g: np.ndarray) -> MetricTensor:
    g = 0.5 * (g + g.T)
    try:
        cond = float(np.linalg.cond(g))
    except np.linalg.LinAlgError:
        cond = math.inf
    if not np.isfinite(cond) or cond > MAX_COND:
        raise IllConditionedChartError(f"metric condition number {cond:.3g} exceeds {MAX_COND:.0e}")
    return MetricTensor(g, np.linalg.inv(g), cond)


def chart_geometry(spec: PotentialSpec, chart: Chart, order: int = 3) -> ChartGeometry:
    """All derivatives of the potential up to ``order`` (2, 3 or 4) from one jet."""
    if order not in (2, 3, 4):
        raise ValueError("order must be 2, 3 or 4")
    jet = directional_jet(spec, chart, order)
    return ChartGeometry(
        chart=chart,
        value=float(jet.value),
        gradient=jet.tensor(1),
        metric=_metric_from(jet.tensor(2)),
        C=jet.tensor(3) if order >= 3 else None,
        Q=jet.tensor(4) if order >= 4 else None,
    )


def metric(spec: PotentialSpec, chart: Chart) -> MetricTensor:
    return chart_geometry(spec, chart, 2).metric


def c_tensor(spec: PotentialSpec, chart: Chart) -> np.ndarray:
    return directional_jet(spec, chart, 3).tensor(3)


def q_tensor(spec: PotentialSpec, chart: Chart) -> np.ndarray:
    return directional_jet(spec, chart, 4).tensor(4)


def monge_ampere_invariant(spec: PotentialSpec, x) -> float:
    """``det(g(x)) * exp(-2 Phi(x))`` in the ambient orthonormal chart.

    Homogeneity and transitivity of the automorphism group make this constant
    on the cone.
    """
    J = spec.algebra
    x = _coerce(J, x)
    if not contains(J, x):
        raise DomainError("Monge-Ampere invariant needs an interior point")
    geo = chart_geometry(spec, ambient_chart(J, x), 2)
    sign, logdet = np.linalg.slogdet(geo.metric.g)
    if sign <= 0:
        raise ConditioningError("ambient metric is not positive definite")
    return math.exp(logdet - 2.0 * geo.value)
