"""Per-family checks run by the suite.

Each check takes ``(J, ctx)`` and returns a :class:`ResidualReport`.  The
registry records the default tolerance, whether the tolerance is an upper or
lower bound, whether the check is informational, and which algebras it
applies to.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cone import (contains, kv_integral_mc, kv_potential, potential_spec,
                   sample_interior)
from .derivatives import (ambient_chart, chart_geometry, directional_jet,
                          finite_difference_partial, logdet_oracle, make_chart,
                          monge_ampere_invariant)
from .flats import (cartan_flat, curvature_triple, flat_chart, lie_bracket,
                    lie_triple_residual, totally_geodesic_residual)
from .frobenius import (ResidualReport, frobenius_compat_residual, pencil_coefficients,
                        pencil_residuals, pencil_terms, solve_unit, structure_constants,
                        trace_assoc_residual, unit_residual, wdvv_residual)
from .jordan import JordanAlgebra

PENCIL_LAMBDAS = (-1.0, 0.5, 1.0, 2.0)
CONVENTIONS = ((-1.0, 0.5), (-1.0, 1.0), (1.0, 0.5), (1.0, 1.0))


@dataclass
class CheckContext:
    rng: np.random.Generator
    samples: int
    tolerance: float
    sigma: float = -1.0
    kappa: float = 0.5


@dataclass(frozen=True)
class CheckSpec:
    name: str
    fn: Callable
    tolerance: float
    bound: str = "upper"
    informational: bool = False
    applies: Callable[[JordanAlgebra], bool] = lambda J: True
    chart_kind: str = "none"
    monte_carlo: bool = False


REGISTRY: dict[str, CheckSpec] = {}


def _components(J):
    return J.components if J.is_sum else (J,)


def _has_bracket(J) -> bool:
    return all(c.family != "Albert" for c in _components(J))


def _no_albert_oracle(J) -> bool:
    return all(c.family != "Albert" for c in _components(J))


def _is_proper_locus(J) -> bool:
    # ambient WDVV fails for matrix families with n >= 2 and spin factors with n >= 3
    return any((c.is_matrix and c.family != "Albert" and c.n >= 2) or (c.family == "Spin" and c.n >= 3)
               for c in _components(J)) and all(c.family != "Albert" for c in _components(J))


def _mc_supported(J) -> bool:
    return (J.family == "SymR" and J.n == 1) or (J.family == "Spin" and J.n <= 3)


def check(name, tolerance, **kw):
    def register(fn):
        REGISTRY[name] = CheckSpec(name, fn, tolerance, **kw)
        return fn
    return register


def _report(spec: CheckSpec, J, ctx, values, note="", extra=None):
    return ResidualReport.from_values(
        spec.name, J.name, spec.chart_kind, values, ctx.tolerance,
        bound=spec.bound, note=note, informational=spec.informational, extra=extra,
    )


def run_check(name: str, J: JordanAlgebra, ctx: CheckContext) -> ResidualReport:
    spec = REGISTRY[name]
    values, note, extra = spec.fn(J, ctx)
    return _report(spec, J, ctx, values, note, extra)


def _norm(v):
    return np.linalg.norm(v, axis=-1)


def _flat_params(F, rng):
    return rng.uniform(-1.0, 1.0, F.dim)


# -- algebra ------------------------------------------------------------------------------------


@check("jordan_commutativity", 1e-12)
def _commutativity(J, ctx):
    x, y = J.random(ctx.rng, ctx.samples), J.random(ctx.rng, ctx.samples)
    return np.abs(J.product(x, y) - J.product(y, x)).max(axis=-1), "exact by construction", None


@check("jordan_identity", 1e-9)
def _jordan_identity(J, ctx):
    x, y = J.random(ctx.rng, ctx.samples), J.random(ctx.rng, ctx.samples)
    x2 = J.product(x, x)
    lhs = J.product(J.product(x2, y), x)
    rhs = J.product(x2, J.product(y, x))
    scale = _norm(x) ** 3 * _norm(y)
    return _norm(lhs - rhs) / scale, "relative to |x|^3 |y|", None


@check("power_associativity", 1e-10)
def _power_assoc(J, ctx):
    out = []
    for x in J.random(ctx.rng, ctx.samples):
        pw = [None, x]
        for m in range(2, 7):
            pw.append(J.product(x, pw[-1]))
        nx = _norm(x)
        for r, s in itertools.product(range(1, 6), repeat=2):
            if r + s <= 6:
                out.append(_norm(J.product(pw[r], pw[s]) - pw[r + s]) / nx ** (r + s))
    return out, "x^r o x^s vs x^(r+s), r+s <= 6, relative", None


@check("trace_assoc", 1e-10)
def _trace_assoc(J, ctx):
    return [trace_assoc_residual(J, ctx.samples, ctx.rng)], "random triples, normalized", None


@check("trace_form_positive", 1e-12, bound="lower")
def _trace_positive(J, ctx):
    x = J.random(ctx.rng, ctx.samples)
    return J.inner(x, x) / _norm(x) ** 2, "<x, x> / |x|^2 (formal reality)", None


# -- cone -------------------------------------------------------------------------------------------


@check("cone_membership", 1e-12)
def _membership(J, ctx):
    fails = []
    for _ in range(ctx.samples):
        p = sample_interior(J, ctx.rng).coords
        q = sample_interior(J, ctx.rng).coords
        lam = math.exp(ctx.rng.uniform(-3, 3))
        fails.append(float(not (contains(J, p) and contains(J, lam * p) and contains(J, p + q))))
    fails.append(float(not contains(J, J.identity())))
    fails.append(float(contains(J, -J.identity())))
    return fails, "failures among samples, scalings, sums, identity", None


@check("self_duality", 1e-12, bound="lower")
def _self_duality(J, ctx):
    vals = []
    for _ in range(ctx.samples):
        x = sample_interior(J, ctx.rng).coords
        y = sample_interior(J, ctx.rng).coords
        vals.append(J.inner(x, y) / (_norm(x) * _norm(y)))
    return vals, "<x, y> / (|x||y|) over interior pairs", None


@check("potential_homogeneity", 1e-10)
def _phi_homogeneity(J, ctx):
    spec = potential_spec(J)
    vals = []
    for _ in range(ctx.samples):
        x = sample_interior(J, ctx.rng).coords
        lam = math.exp(ctx.rng.uniform(math.log(0.1), math.log(10.0)))
        vals.append(abs(kv_potential(spec, lam * x) - kv_potential(spec, x) + J.N * math.log(lam)))
    return vals, "Phi(lx) - Phi(x) + N log l", None


@check("potential_convexity", 1e-12)
def _phi_convexity(J, ctx):
    spec = potential_spec(J)
    vals = []
    for _ in range(ctx.samples):
        a = sample_interior(J, ctx.rng).coords
        b = sample_interior(J, ctx.rng).coords
        mid = kv_potential(spec, 0.5 * (a + b))
        avg = 0.5 * (kv_potential(spec, a) + kv_potential(spec, b))
        vals.append(max(0.0, mid - avg))
    return vals, "positive part of midpoint excess", None


# -- derivatives ---------------------------------------------------------------------------------------


def _all_multi_indices(m, max_order):
    for p in range(1, max_order + 1):
        yield from itertools.combinations_with_replacement(range(m), p)


@check("derivative_oracle", 1e-8, applies=_no_albert_oracle, chart_kind="random")
def _deriv_oracle(J, ctx):
    spec = potential_spec(J)
    vals = []
    for _ in range(ctx.samples):
        x = sample_interior(J, ctx.rng).coords
        dirs = J.random(ctx.rng, min(4, J.N))
        jet = directional_jet(spec, make_chart(J, x, dirs), 4)
        for idx in _all_multi_indices(len(dirs), 4):
            a = jet.partial(idx)
            b = logdet_oracle(spec, x, dirs[list(idx)])
            vals.append(abs(a - b) / max(abs(b), 1e-6))
    return vals, "jet vs closed-form log-det, orders 1-4, relative", None


@check("derivative_richardson", 1e-5, applies=lambda J: not _no_albert_oracle(J), chart_kind="random")
def _deriv_richardson(J, ctx):
    spec = potential_spec(J)
    vals = []
    for _ in range(min(ctx.samples, 3)):
        x = sample_interior(J, ctx.rng).coords
        dirs = J.random(ctx.rng, min(4, J.N))
        dirs /= _norm(dirs)[:, None]
        jet = directional_jet(spec, make_chart(J, x, dirs), 4)
        for idx in _all_multi_indices(len(dirs), 4):
            a = jet.partial(idx)
            b = finite_difference_partial(spec, x, dirs[list(idx)], h=2e-2, levels=2)
            vals.append(abs(a - b) / max(abs(b), 1.0))
    return vals, "jet vs Richardson divided differences, orders 1-4", None


@check("derivative_fd", 1e-6, chart_kind="random")
def _deriv_fd(J, ctx):
    spec = potential_spec(J)
    vals = []
    for _ in range(ctx.samples):
        x = sample_interior(J, ctx.rng).coords
        dirs = J.random(ctx.rng, min(2, J.N))
        dirs /= _norm(dirs)[:, None]
        jet = directional_jet(spec, make_chart(J, x, dirs), 2)
        for idx in _all_multi_indices(len(dirs), 2):
            fd = finite_difference_partial(spec, x, dirs[list(idx)], h=1e-3, levels=1)
            vals.append(abs(jet.partial(idx) - fd))
    return vals, "jet vs central differences (step 1e-3, one Richardson step), orders 1-2, absolute", None


@check("metric_posdef", 1e-12, bound="lower", chart_kind="ambient")
def _metric_pd(J, ctx):
    spec = potential_spec(J)
    vals, margins = [], []
    for _ in range(ctx.samples):
        p = sample_interior(J, ctx.rng)
        margins.append(p.interior_margin)
        vals.append(chart_geometry(spec, ambient_chart(J, p.coords), 2).metric.min_eigenvalue)
    return vals, "minimum eigenvalue of g", {"min_interior_margin": float(min(margins))}


@check("metric_homogeneity", 1e-10, chart_kind="ambient")
def _metric_homog(J, ctx):
    spec = potential_spec(J)
    vals = []
    for _ in range(ctx.samples):
        x = sample_interior(J, ctx.rng).coords
        lam = math.exp(ctx.rng.uniform(-1, 1))
        g1 = chart_geometry(spec, ambient_chart(J, x), 2).metric.g
        g2 = chart_geometry(spec, ambient_chart(J, lam * x), 2).metric.g
        vals.append(np.abs(lam**2 * g2 - g1).max() / np.abs(g1).max())
    return vals, "|l^2 g(lx) - g(x)| / |g(x)|", None


@check("monge_ampere", 1e-8, chart_kind="ambient")
def _monge_ampere(J, ctx):
    spec = potential_spec(J)
    vals = [monge_ampere_invariant(spec, sample_interior(J, ctx.rng).coords) for _ in range(max(ctx.samples, 2))]
    vals.append(monge_ampere_invariant(spec, J.identity()))
    cv = float(np.std(vals) / np.mean(vals))
    return [cv], "coefficient of variation of det(g) exp(-2 Phi)", {"mean": float(np.mean(vals))}


# -- flats ------------------------------------------------------------------------------------------------


@check("flat_brackets", 1e-12, applies=_has_bracket, chart_kind="flat")
def _flat_brackets(J, ctx):
    F = cartan_flat(J)
    vals = []
    for a, b in itertools.combinations(F.abasis, 2):
        br = lie_bracket(J, a, b)
        parts = br if isinstance(br, list) else [br]
        vals.append(max(float(np.abs(p).max()) for p in parts))
    return vals or [0.0], "pairwise commutators of the flat basis", None


@check("lie_triple", 1e-12, applies=_has_bracket, chart_kind="flat")
def _lie_triple(J, ctx):
    return [lie_triple_residual(J, cartan_flat(J).abasis)], "distance of [[X,Y],Z] to the flat", None


@check("flat_curvature", 1e-12, applies=_has_bracket, chart_kind="flat")
def _flat_curvature(J, ctx):
    F = cartan_flat(J)
    vals = [float(np.abs(curvature_triple(J, a, b, c)).max())
            for a, b, c in itertools.product(F.abasis, repeat=3)]
    return vals, "-[[X,Y],Z] on flat basis triples", None


@check("totally_geodesic", 1e-9, chart_kind="flat")
def _totally_geodesic(J, ctx):
    spec = potential_spec(J)
    F = cartan_flat(J)
    vals = [totally_geodesic_residual(spec, F, _flat_params(F, ctx.rng)) for _ in range(ctx.samples)]
    return vals, "C(flat, flat, g-normal) contraction", None


# -- Frobenius on flats ------------------------------------------------------------------------------------


def _flat_geometries(J, ctx, order):
    spec = potential_spec(J)
    F = cartan_flat(J)
    for _ in range(ctx.samples):
        yield spec, F, chart_geometry(spec, flat_chart(F, _flat_params(F, ctx.rng)), order)


@check("wdvv_flat", 1e-9, chart_kind="flat")
def _wdvv_flat(J, ctx):
    return [wdvv_residual(geo.metric.g, geo.C) for *_, geo in _flat_geometries(J, ctx, 3)], \
        "normalized associativity defect", None


@check("wdvv_flat_reparam", 1e-9, chart_kind="flat")
def _wdvv_reparam(J, ctx):
    vals = []
    for spec, F, geo in _flat_geometries(J, ctx, 3):
        m = F.dim
        while True:
            A = np.eye(m) + 0.5 * ctx.rng.standard_normal((m, m))
            if abs(np.linalg.det(A)) > 0.1:
                break
        chart = geo.chart.reparametrize(A)
        g2 = chart_geometry(spec, chart, 3)
        vals.append(wdvv_residual(g2.metric.g, g2.C))
    return vals, "WDVV after a random linear change of flat frame", None


@check("frobenius_compat_flat", 1e-9, chart_kind="flat")
def _compat_flat(J, ctx):
    vals = []
    for *_, geo in _flat_geometries(J, ctx, 3):
        sc = structure_constants(geo.metric.g, geo.C, ctx.sigma, ctx.kappa)
        vals.append(frobenius_compat_residual(geo.metric.g, sc, geo.C))
    return vals, "g(a o b, c) vs C and g(a, b o c)", None


@check("pencil_flat", 1e-9, chart_kind="flat")
def _pencil_flat(J, ctx):
    vals = []
    for *_, geo in _flat_geometries(J, ctx, 4):
        pc = pencil_terms(geo.metric.g, geo.C, geo.Q, ctx.sigma, ctx.kappa)
        vals.append(max(pencil_residuals(pc, PENCIL_LAMBDAS)))
    return vals, f"max over lambda in {PENCIL_LAMBDAS}", None


@check("pencil_coefficients", 1e-8, chart_kind="flat")
def _pencil_coef(J, ctx):
    vals = []
    for *_, geo in _flat_geometries(J, ctx, 4):
        pc = pencil_terms(geo.metric.g, geo.C, geo.Q, ctx.sigma, ctx.kappa)
        _, c1, c2 = pencil_coefficients(pc, (1.0, 2.0, 3.0))
        vals.append(max(c1, c2))
    return vals, "lambda and lambda^2 coefficients fitted over lambda in {1,2,3}", None


@check("unit_flat", 1e-9, chart_kind="flat")
def _unit_flat(J, ctx):
    vals, fits = [], []
    for *_, geo in _flat_geometries(J, ctx, 3):
        e, fit = solve_unit(geo.metric.g, geo.C)
        fits.append(fit)
        vals.append(unit_residual(geo.metric.g, geo.C, e))
    return vals, "solved unit field against Phi_0ab = g_ab", {"max_lstsq_residual": float(max(fits))}


@check("unit_flatness", 1e-9, informational=True, chart_kind="flat")
def _unit_flatness(J, ctx):
    units = []
    for *_, geo in _flat_geometries(J, ctx, 3):
        units.append(solve_unit(geo.metric.g, geo.C)[0])
    units = np.array(units)
    spread = float(np.abs(units - units[0]).max() / (1.0 + np.abs(units).max()))
    return [spread], "variation of the solved unit across flat points (observable only)", \
        {"unit_is_constant": bool(spread < 1e-9)}


@check("convention_invariance", 1e-12, chart_kind="flat")
def _conventions(J, ctx):
    flips = []
    tol = 1e-9
    for *_, geo in _flat_geometries(J, ctx, 4):
        verdicts = set()
        for sigma, kappa in CONVENTIONS:
            sc = structure_constants(geo.metric.g, geo.C, sigma, kappa)
            pc = pencil_terms(geo.metric.g, geo.C, geo.Q, sigma, kappa)
            verdicts.add((
                wdvv_residual(geo.metric.g, geo.C) < tol,
                frobenius_compat_residual(geo.metric.g, sc, geo.C) < tol,
                max(pencil_residuals(pc, PENCIL_LAMBDAS)) < tol,
            ))
        flips.append(float(len(verdicts) - 1))
    return flips, "verdict changes across (sigma, kappa) conventions", None


@check("wdvv_ambient", 1e-2, bound="lower", informational=True, applies=_is_proper_locus, chart_kind="ambient")
def _wdvv_ambient(J, ctx):
    spec = potential_spec(J)
    geo = chart_geometry(spec, ambient_chart(J, J.identity()), 3)
    return [wdvv_residual(geo.metric.g, geo.C)], "ambient chart at the identity; must exceed tolerance", None


# -- Koszul-Vinberg integral --------------------------------------------------------------------------------


@check("kv_integral", 0.02, applies=_mc_supported, monte_carlo=True)
def _kv_integral(J, ctx):
    k = J.N / J.r
    n_points = 20
    n_mc = 10**6
    logs, logdets = [], []
    for _ in range(n_points):
        x = sample_interior(J, ctx.rng).coords * math.exp(ctx.rng.uniform(-1, 1))
        logs.append(math.log(kv_integral_mc(J, x, n_mc, ctx.rng)))
        logdets.append(math.log(J.det(x)))
    logs, logdets = np.array(logs), np.array(logdets)
    slope, _ = np.polyfit(logdets, logs, 1)
    offsets = logs + k * logdets
    spread = np.abs(offsets - offsets.mean())
    slope_err = abs(slope + k) / k
    return np.append(spread, slope_err), "log-integral vs -k log det: intercept spread and slope error", \
        {"fitted_slope": float(slope), "expected_slope": -k}
