"""Structure constants of the potential-induced product and residuals of the
Frobenius axioms (associativity/WDVV, metric compatibility, unit, pencil
flatness).

Residuals are normalized by ``1 + magnitude of the compared terms`` so that
families with different potential scalings are comparable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cone import PotentialSpec
from .derivatives import Chart, chart_geometry
from .jordan import JordanAlgebra


@dataclass(frozen=True)
class ResidualReport:
    check: str
    family: str
    chart_kind: str
    samples: int
    max_residual: float
    mean_residual: float
    tolerance: float
    passed: bool
    note: str = ""
    bound: str = "upper"
    informational: bool = False
    min_residual: float | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_values(cls, check, family, chart_kind, values, tolerance, *, bound="upper",
                    note="", informational=False, extra=None) -> ResidualReport:
        """Pass iff every value is strictly below (``upper``) or above (``lower``) the tolerance."""
        v = np.asarray(values, dtype=float).ravel()
        if v.size == 0:
            raise ValueError("a residual report needs at least one sample")
        vmax, vmin, vmean = float(v.max()), float(v.min()), float(v.mean())
        if np.isnan(v).any():
            passed = False
        elif bound == "upper":
            passed = vmax < tolerance
        elif bound == "lower":
            passed = vmin > tolerance
        else:
            raise ValueError("bound must be 'upper' or 'lower'")
        return cls(check, family, chart_kind, int(v.size), vmax, vmean, float(tolerance),
                   bool(passed), note, bound, informational, vmin, dict(extra or {}))

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "family": self.family,
            "chart_kind": self.chart_kind,
            "samples": self.samples,
            "max_residual": self.max_residual,
            "mean_residual": self.mean_residual,
            "min_residual": self.min_residual,
            "tolerance": self.tolerance,
            "bound": self.bound,
            "passed": self.passed,
            "informational": self.informational,
            "note": self.note,
            "extra": self.extra,
        }


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """``gamma[i, j, k] = sigma * kappa * sum_l C[j, k, l] ginv[l, i]``."""

    gamma: np.ndarray
    sigma: float = -1.0
    kappa: float = 0.5

    @property
    def m(self) -> int:
        return self.gamma.shape[0]


def _inverse(g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    try:
        return np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("singular metric") from exc


def structure_constants(g, C, sigma: float = -1.0, kappa: float = 0.5) -> StructureConstants:
    if sigma not in (1, -1) or kappa not in (1, 0.5):
        raise ValueError("convention flags are sigma in {+1, -1} and kappa in {1, 1/2}")
    ginv = _inverse(g)
    gamma = sigma * kappa * np.einsum("jkl,li->ijk", np.asarray(C, dtype=float), ginv)
    return StructureConstants(gamma, float(sigma), float(kappa))


def circ(sc: StructureConstants, X, Y) -> np.ndarray:
    return np.einsum("ijk,j,k->i", sc.gamma, np.asarray(X, dtype=float), np.asarray(Y, dtype=float))


def wdvv_sides(g, C):
    """``L[a,b,c,d] = C_abe g^ef C_fcd`` and ``R[a,b,c,d] = C_bce g^ef C_fad``."""
    ginv = _inverse(g)
    C = np.asarray(C, dtype=float)
    lhs = np.einsum("abe,ef,fcd->abcd", C, ginv, C)
    rhs = np.einsum("bce,ef,fad->abcd", C, ginv, C)
    return lhs, rhs


def wdvv_residual(g, C) -> float:
    lhs, rhs = wdvv_sides(g, C)
    scale = 1.0 + max(np.abs(lhs).max(), np.abs(rhs).max())
    return float(np.abs(lhs - rhs).max() / scale)


def frobenius_compat_residual(g, sc: StructureConstants, C) -> float:
    """Compares ``g(e_a o e_b, e_c)`` with ``sigma kappa C_abc`` and with ``g(e_a, e_b o e_c)``."""
    g = np.asarray(g, dtype=float)
    C = np.asarray(C, dtype=float)
    prod = np.einsum("ijk,il->jkl", sc.gamma, g)  # g(e_j o e_k, e_l)
    target = sc.sigma * sc.kappa * C
    swapped = np.einsum("ibc,ai->abc", sc.gamma, g)  # g(e_a, e_b o e_c)
    r1 = np.abs(prod - target).max()
    r2 = np.abs(prod - swapped).max()
    scale = 1.0 + max(np.abs(prod).max(), np.abs(target).max())
    return float(max(r1, r2) / scale)


def unit_residual(g, C, e_components) -> float:
    """``max |e^i C_iab - g_ab|`` over ``1 + max |e^i C_iab|``."""
    g = np.asarray(g, dtype=float)
    contraction = np.einsum("i,iab->ab", np.asarray(e_components, dtype=float), np.asarray(C, dtype=float))
    return float(np.abs(contraction - g).max() / (1.0 + np.abs(contraction).max()))


def solve_unit(g, C) -> tuple[np.ndarray, float]:
    """Least-squares solution of ``e^i C_iab = g_ab`` and its residual norm."""
    C = np.asarray(C, dtype=float)
    m = C.shape[0]
    A = C.reshape(m, m * m).T
    b = np.asarray(g, dtype=float).ravel()
    e, *_ = np.linalg.lstsq(A, b, rcond=None)
    return e, float(np.linalg.norm(A @ e - b))


# -- pencil of connections -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PencilCurvature:
    """``R(lam) = lam * linear + lam**2 * quadratic`` with index order ``[i, j, k, l]``."""

    linear: np.ndarray
    quadratic: np.ndarray
    scale: float

    def at(self, lam: float) -> np.ndarray:
        return lam * self.linear + lam**2 * self.quadratic


def pencil_terms(g, C, Q, sigma: float = -1.0, kappa: float = 0.5) -> PencilCurvature:
    """Curvature parts of ``nabla_0 + lam Gamma`` in an affine chart.

    ``d_m Gamma^i_jk = sk (Q_jklm g^li - C_jkl g^lp C_pqm g^qi)``.
    """
    ginv = _inverse(g)
    C = np.asarray(C, dtype=float)
    Q = np.asarray(Q, dtype=float)
    sk = sigma * kappa
    gamma = sk * np.einsum("jkl,li->ijk", C, ginv)
    dginv = -np.einsum("lp,pqm,qi->lim", ginv, C, ginv)
    dgamma = sk * (np.einsum("jklm,li->ijkm", Q, ginv) + np.einsum("jkl,lim->ijkm", C, dginv))
    # dgamma[i, j, k, m] = d_m Gamma^i_jk
    d_k = np.einsum("iljk->ijkl", dgamma)  # d_k Gamma^i_lj
    d_l = np.einsum("ikjl->ijkl", dgamma)  # d_l Gamma^i_kj
    linear = d_k - d_l
    gg1 = np.einsum("ikm,mlj->ijkl", gamma, gamma)
    gg2 = np.einsum("ilm,mkj->ijkl", gamma, gamma)
    quadratic = gg1 - gg2
    scale = 1.0 + max(np.abs(d_k).max(), np.abs(gg1).max())
    return PencilCurvature(linear, quadratic, float(scale))


def _pencil_from_chart(spec: PotentialSpec, chart: Chart, sigma, kappa) -> PencilCurvature:
    geo = chart_geometry(spec, chart, 4)
    return pencil_terms(geo.metric.g, geo.C, geo.Q, sigma, kappa)


def pencil_curvature(spec: PotentialSpec, chart: Chart, lam: float, sigma=-1.0, kappa=0.5) -> np.ndarray:
    return _pencil_from_chart(spec, chart, sigma, kappa).at(lam)


def pencil_curvature_residual(spec: PotentialSpec, chart: Chart, lam: float, sigma=-1.0, kappa=0.5) -> float:
    return pencil_residuals(_pencil_from_chart(spec, chart, sigma, kappa), [lam])[0]


def pencil_residuals(pc: PencilCurvature, lams) -> list[float]:
    """Max-norm of ``R(lam)`` over ``max(1, max(|lam|, lam^2) * scale)`` for each ``lam``."""
    out = []
    for lam in lams:
        terms = max(abs(lam), lam**2) * pc.scale
        out.append(float(np.abs(pc.at(lam)).max() / max(terms, 1.0)))
    return out


def pencil_coefficients(pc: PencilCurvature, lams=(1.0, 2.0, 3.0)) -> tuple[float, float, float]:
    """Fit ``R(lam) = c0 + c1 lam + c2 lam^2`` entrywise; return normalized max |c0|, |c1|, |c2|."""
    lams = np.asarray(lams, dtype=float)
    samples = np.stack([pc.at(l).ravel() for l in lams])
    V = np.vander(lams, 3, increasing=True)
    coef, *_ = np.linalg.lstsq(V, samples, rcond=None)
    return tuple(float(np.abs(c).max() / pc.scale) for c in coef)


# -- algebra-level Frobenius property ---------------------------------------------------------


def trace_assoc_residual(J: JordanAlgebra, samples: int, rng: np.random.Generator) -> float:
    """``max |<x o y, z> - <x, y o z>|`` over ``1 + |x||y||z|`` on random triples."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    x, y, z = (J.random(rng, samples) for _ in range(3))
    lhs = J.inner(J.product(x, y), z)
    rhs = J.inner(x, J.product(y, z))
    norm = lambda v: np.sqrt(J.inner(v, v))
    scale = 1.0 + norm(x) * norm(y) * norm(z)
    return float(np.max(np.abs(lhs - rhs) / scale))
