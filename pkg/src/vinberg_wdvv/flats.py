"""Maximal flats through the identity and the Lie-bracket machinery around them.

The tangent space at the identity is identified with the symmetric part of
the Cartan decomposition: Hermitian K-matrices for the matrix families and
``t I + B(x)`` (scaling plus a Lorentz boost) for spin factors.  Brackets
are matrix commutators in those models.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scipy.linalg import null_space

from .cone import ConePoint, PotentialSpec, cone_point
from .derivatives import Chart, ambient_chart, chart_geometry, directional_jet
from .jordan import JordanAlgebra, _coerce, kadjoint, kmatmul


class UnsupportedBracketError(ValueError):
    """No Lie-algebra model is provided for the octonionic cone."""


@dataclass(frozen=True, eq=False)
class FlatDescriptor:
    algebra: JordanAlgebra
    abasis: np.ndarray
    chart_dirs: np.ndarray
    family_note: str

    @property
    def dim(self) -> int:
        return len(self.abasis)

    def chart(self, params) -> Chart:
        return flat_chart(self, params)


# -- flats ---------------------------------------------------------------------------


def _diag_indices(J: JordanAlgebra) -> list[int]:
    # make_algebra puts the diagonal units first
    return list(range(J.n))


def cartan_flat(J: JordanAlgebra) -> FlatDescriptor:
    if J.is_sum:
        parts = [cartan_flat(c) for c in J.components]
        abasis = _block_embed(J, [p.abasis for p in parts])
        dirs = _block_embed(J, [p.chart_dirs for p in parts])
        note = "product of " + ", ".join(p.family_note for p in parts)
        return FlatDescriptor(J, abasis, dirs, note)
    if J.family == "Spin":
        abasis = np.zeros((2, J.N))
        abasis[0, 0] = 1.0
        abasis[1, 1] = 1.0
        dirs = np.zeros((2, J.N))
        # light-cone coordinates u = x0 + x1, v = x0 - x1
        dirs[0, :2] = (0.5, 0.5)
        dirs[1, :2] = (0.5, -0.5)
        return FlatDescriptor(J, abasis, dirs, "Lorentz 2-flat (x0, x1)")
    abasis = np.eye(J.N)[_diag_indices(J)]
    note = "diagonal idempotents" if J.family == "Albert" else "traceless diagonal + identity ray"
    return FlatDescriptor(J, abasis, abasis.copy(), note)


def _block_embed(J: JordanAlgebra, blocks) -> np.ndarray:
    rows = []
    for s, block in zip(J.slices, blocks):
        for b in block:
            v = np.zeros(J.N)
            v[s] = b
            rows.append(v)
    return np.array(rows)


def _flat_coords(J: JordanAlgebra, params) -> np.ndarray:
    if J.is_sum:
        out, i = [], 0
        for c in J.components:
            k = 2 if c.family == "Spin" else c.n
            out.append(_flat_coords(c, params[i:i + k]))
            i += k
        return np.concatenate(out)
    x = np.zeros(J.N)
    if J.family == "Spin":
        t0, t1 = params
        x[0] = np.exp(t0) * np.cosh(t1)
        x[1] = np.exp(t0) * np.sinh(t1)
        return x
    x[_diag_indices(J)] = np.exp(params)
    return x


def flat_point(F: FlatDescriptor, params) -> ConePoint:
    """``exp(sum_a params[a] abasis[a])`` (Jordan exponential) applied to the identity."""
    params = np.asarray(params, dtype=float)
    if params.shape != (F.dim,):
        raise ValueError(f"flat has dimension {F.dim}, got {params.shape[0]} parameters")
    return cone_point(F.algebra, _flat_coords(F.algebra, params))


def flat_chart(F: FlatDescriptor, params) -> Chart:
    """Affine slice through the flat point, in ambient linear coordinates."""
    return Chart(flat_point(F, params), F.chart_dirs)


def weyl_chamber_contains(t_params, tol: float = 1e-12) -> bool:
    t = np.asarray(t_params, dtype=float)
    return bool(abs(t.sum()) <= tol and np.all(np.diff(t) > 0))


# -- brackets -----------------------------------------------------------------------------


def _check_bracket(J: JordanAlgebra):
    if J.family == "Albert" or (J.is_sum and any(c.family == "Albert" for c in J.components)):
        raise UnsupportedBracketError("no Lie bracket model for the octonionic cone")


def ambient(J: JordanAlgebra, x) -> np.ndarray:
    """Tangent coordinates -> matrix in the Lie algebra model."""
    _check_bracket(J)
    x = _coerce(J, x)
    if J.is_sum:
        return [ambient(c, p) for c, p in zip(J.components, J.split(x))]
    if J.family == "Spin":
        m = x[0] * np.eye(J.n)
        m[0, 1:] = x[1:]
        m[1:, 0] = x[1:]
        return m
    return J.matrix(x)


def _is_tangent(J, X) -> bool:
    if isinstance(X, list):
        return False
    X = np.asarray(X)
    return X.ndim == 1 and X.shape[0] == J.N


def _commutator(J: JordanAlgebra, A, B):
    if J.is_sum:
        return [_commutator(c, a, b) for c, a, b in zip(J.components, A, B)]
    if J.family == "Spin":
        return A @ B - B @ A
    return kmatmul(A, B) - kmatmul(B, A)


def lie_bracket(J: JordanAlgebra, X, Y):
    """Commutator in the Lie algebra model; accepts tangent coordinates or model matrices."""
    _check_bracket(J)
    A = ambient(J, X) if _is_tangent(J, X) else X
    B = ambient(J, Y) if _is_tangent(J, Y) else Y
    return _commutator(J, A, B)


def _flatten(J: JordanAlgebra, A) -> np.ndarray:
    if J.is_sum:
        return np.concatenate([_flatten(c, a) for c, a in zip(J.components, A)])
    return np.asarray(A, dtype=float).ravel()


def to_tangent(J: JordanAlgebra, A) -> np.ndarray:
    """Project a model matrix to its symmetric part and return tangent coordinates."""
    _check_bracket(J)
    if J.is_sum:
        return np.concatenate([to_tangent(c, a) for c, a in zip(J.components, A)])
    if J.family == "Spin":
        S = 0.5 * (A + A.T)
        x = np.zeros(J.N)
        x[0] = S[0, 0]
        x[1:] = S[0, 1:]
        return x
    S = 0.5 * (A + kadjoint(A))
    return J.from_matrix(S)


def lie_triple_residual(J: JordanAlgebra, basis) -> float:
    """Largest distance from ``[[X, Y], Z]`` to the span of ``basis``."""
    _check_bracket(J)
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    span = np.array([_flatten(J, ambient(J, b)) for b in basis]).T
    q, _ = np.linalg.qr(span)
    worst = 0.0
    for X in basis:
        for Y in basis:
            XY = lie_bracket(J, X, Y)
            for Z in basis:
                v = _flatten(J, lie_bracket(J, XY, Z))
                worst = max(worst, float(np.linalg.norm(v - q @ (q.T @ v))))
    return worst


def curvature_triple(J: JordanAlgebra, X, Y, Z) -> np.ndarray:
    """``R(X, Y) Z = -[[X, Y], Z]`` in tangent coordinates."""
    inner = lie_bracket(J, X, Y)
    out = lie_bracket(J, inner, ambient(J, Z))
    return -to_tangent(J, out)


def totally_geodesic_residual(spec: PotentialSpec, F: FlatDescriptor, params) -> float:
    """Second-fundamental-form proxy at a flat point.

    Largest ``|C(f_a, f_b, w)|`` over flat directions ``f`` and unit
    directions ``w`` that are g-orthogonal to the flat, divided by
    ``1 + max |C(f_a, f_b, f_c)|``.
    """
    base = flat_point(F, params)
    J = F.algebra
    g = chart_geometry(spec, ambient_chart(J, base.coords), 2).metric.g
    fdirs = F.chart_dirs
    m = len(fdirs)
    W = null_space(fdirs @ g).T
    inner_scale = np.abs(directional_jet(spec, Chart(base, fdirs), 3).tensor(3)).max()
    worst = 0.0
    for w in W:
        C = directional_jet(spec, Chart(base, np.vstack([fdirs, w])), 3).tensor(3)
        worst = max(worst, float(np.abs(C[:m, :m, m]).max()))
    return worst / (1.0 + inner_scale)
