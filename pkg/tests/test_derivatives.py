from __future__ import annotations

import itertools

import numpy as np
import pytest

from vinberg_wdvv.cone import potential_spec, sample_interior
from vinberg_wdvv.derivatives import (ConditioningError, IllConditionedChartError, ambient_chart,
                                      c_tensor, chart_geometry, directional_jet,
                                      finite_difference_partial, logdet_oracle, make_chart, metric,
                                      monge_ampere_invariant)
from vinberg_wdvv.jordan import from_matrix, make_algebra, parse_family


def _sym(rng, n):
    a = rng.standard_normal((n, n))
    return a + a.T


@pytest.mark.parametrize("n", [2, 3, 4])
def test_low_orders_at_identity(n, rng):
    J = make_algebra("SymR", n)
    spec = potential_spec(J)
    A, B = _sym(rng, n), _sym(rng, n)
    dirs = np.array([from_matrix(J, A).coords, from_matrix(J, B).coords])
    jet = directional_jet(spec, make_chart(J, J.identity(), dirs), 2)
    assert jet.partial((0,)) == pytest.approx(-spec.k * np.trace(A))
    assert jet.partial((0, 1)) == pytest.approx(spec.k * np.trace(A @ B))


def test_third_order_along_a_diagonal_unit():
    J = make_algebra("SymR", 2)
    spec = potential_spec(J)
    E11 = from_matrix(J, np.diag([1.0, 0.0])).coords
    jet = directional_jet(spec, make_chart(J, J.identity(), [E11]), 3)
    assert jet.partial((0, 0, 0)) == pytest.approx(-2 * spec.k)


def test_linearity_in_direction(rng):
    J = make_algebra("HermC", 2)
    spec = potential_spec(J)
    x = sample_interior(J, rng)
    d1, d2 = J.random(rng), J.random(rng)
    first = lambda d: directional_jet(spec, make_chart(J, x, [d]), 1).partial((0,))
    assert first(d1 + d2) == pytest.approx(first(d1) + first(d2), rel=1e-12)


def test_ambient_metric_and_c_at_identity():
    J = make_algebra("SymR", 3)
    spec = potential_spec(J)
    chart = ambient_chart(J, J.identity())
    assert np.allclose(metric(spec, chart).g, spec.k * np.eye(J.N), atol=1e-13)
    C = c_tensor(spec, chart)
    mats = [J.matrix(e)[..., 0] for e in np.eye(J.N)]
    for a, b, c in itertools.product(range(J.N), repeat=3):
        A, B, Cm = mats[a], mats[b], mats[c]
        expected = -spec.k * (np.trace(A @ B @ Cm) + np.trace(A @ Cm @ B))
        assert C[a, b, c] == pytest.approx(expected, abs=1e-12)


def test_spin_hessian_at_identity():
    J = make_algebra("Spin", 4)
    spec = potential_spec(J)
    g = metric(spec, ambient_chart(J, J.identity())).g
    # second derivatives of -k log(t^2 - |x|^2) at (1, 0) are 2k on every axis
    assert np.allclose(g, spec.k * np.diag([2.0, 2.0, 2.0, 2.0]), atol=1e-12)
    dirs = np.eye(4)
    for a, b in itertools.combinations_with_replacement(range(4), 2):
        assert g[a, b] == pytest.approx(logdet_oracle(spec, J.identity(), dirs[[a, b]]), abs=1e-10)


@pytest.mark.parametrize("fam", ["SymR:3", "HermC:2", "HermH:2", "Spin:5", "SymR:2+Spin:3"])
def test_jet_agrees_with_oracle(fam, rng):
    J = parse_family(fam)
    spec = potential_spec(J)
    for _ in range(5):
        x = sample_interior(J, rng).coords
        dirs = J.random(rng, min(4, J.N))
        jet = directional_jet(spec, make_chart(J, x, dirs), 4)
        for p in range(1, 5):
            for idx in itertools.combinations_with_replacement(range(len(dirs)), p):
                ref = logdet_oracle(spec, x, dirs[list(idx)])
                assert jet.partial(idx) == pytest.approx(ref, rel=1e-8, abs=1e-10)


def test_albert_has_no_closed_form_oracle(rng):
    J = make_algebra("Albert", 3)
    spec = potential_spec(J)
    with pytest.raises(ValueError):
        logdet_oracle(spec, J.identity(), [J.identity()])


def test_albert_jet_against_richardson(rng):
    J = make_algebra("Albert", 3)
    spec = potential_spec(J)
    x = sample_interior(J, rng).coords
    dirs = J.random(rng, 2)
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    jet = directional_jet(spec, make_chart(J, x, dirs), 3)
    for idx in [(0,), (0, 1), (1, 1), (0, 0, 1)]:
        fd = finite_difference_partial(spec, x, dirs[list(idx)], h=2e-2, levels=2)
        assert jet.partial(idx) == pytest.approx(fd, abs=1e-5 * max(1.0, abs(fd)))


def test_central_difference_agrees(rng):
    J = make_algebra("HermH", 2)
    spec = potential_spec(J)
    x = sample_interior(J, rng).coords
    d = J.random(rng, 1)
    d /= np.linalg.norm(d)
    jet = directional_jet(spec, make_chart(J, x, d), 2)
    assert jet.partial((0,)) == pytest.approx(finite_difference_partial(spec, x, d, h=1e-4, levels=0), abs=1e-6)


def test_scaling_of_g_and_c(rng):
    J = make_algebra("HermC", 3)
    spec = potential_spec(J)
    x = sample_interior(J, rng).coords
    lam = 1.9
    a = chart_geometry(spec, ambient_chart(J, x), 3)
    b = chart_geometry(spec, ambient_chart(J, lam * x), 3)
    assert np.allclose(lam**2 * b.metric.g, a.metric.g, atol=1e-12)
    assert np.allclose(lam**3 * b.C, a.C, atol=1e-11)


def test_monge_ampere_invariant(rng):
    J = make_algebra("HermC", 2)
    spec = potential_spec(J)
    e = J.identity()
    assert monge_ampere_invariant(spec, 3.0 * e) == pytest.approx(monge_ampere_invariant(spec, e), rel=1e-10)
    vals = [monge_ampere_invariant(spec, sample_interior(J, rng).coords) for _ in range(50)]
    assert np.std(vals) / np.mean(vals) < 1e-8


def test_monge_ampere_of_direct_sum_is_product(rng):
    A, B = make_algebra("SymR", 2), make_algebra("Spin", 3)
    S = parse_family("SymR:2+Spin:3")
    x = sample_interior(S, rng).coords
    xa, xb = S.split(x)
    total = monge_ampere_invariant(potential_spec(S), x)
    parts = monge_ampere_invariant(potential_spec(A), xa) * monge_ampere_invariant(potential_spec(B), xb)
    assert total == pytest.approx(parts, rel=1e-10)


def test_chart_validation():
    J = make_algebra("SymR", 2)
    with pytest.raises(ValueError):
        make_chart(J, J.identity(), [[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    with pytest.raises(ValueError):
        make_chart(J, J.identity(), np.eye(4, 3))
    spec = potential_spec(J)
    near_boundary = from_matrix(J, np.diag([1.0, 1e-7])).coords
    with pytest.raises(IllConditionedChartError):
        metric(spec, ambient_chart(J, near_boundary))
    with pytest.raises(ConditioningError):
        logdet_oracle(spec, -J.identity(), [J.identity()])
