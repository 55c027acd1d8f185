from __future__ import annotations

import numpy as np
import pytest

from vinberg_wdvv.cone import potential_spec, sample_interior
from vinberg_wdvv.derivatives import ambient_chart, chart_geometry
from vinberg_wdvv.flats import cartan_flat, flat_chart
from vinberg_wdvv.frobenius import (ResidualReport, circ, frobenius_compat_residual,
                                    pencil_coefficients, pencil_curvature, pencil_residuals,
                                    pencil_terms, solve_unit, structure_constants,
                                    trace_assoc_residual, unit_residual, wdvv_residual)
from vinberg_wdvv.jordan import make_algebra, parse_family


def _flat_geo(fam, params, order=3):
    J = parse_family(fam)
    F = cartan_flat(J)
    return chart_geometry(potential_spec(J), flat_chart(F, params), order)


def _ambient_identity(fam, order=3):
    J = parse_family(fam)
    return J, chart_geometry(potential_spec(J), ambient_chart(J, J.identity()), order)


def test_zero_c_gives_zero_gamma():
    sc = structure_constants(np.eye(3), np.zeros((3, 3, 3)))
    assert not sc.gamma.any()


def test_convention_flags_are_validated():
    with pytest.raises(ValueError):
        structure_constants(np.eye(2), np.zeros((2, 2, 2)), sigma=2)
    with pytest.raises(ValueError):
        structure_constants(np.eye(2), np.zeros((2, 2, 2)), kappa=0.25)


def test_ambient_product_is_the_jordan_product(rng):
    J, geo = _ambient_identity("SymR:3")
    sc = structure_constants(geo.metric.g, geo.C)
    x, y = J.random(rng), J.random(rng)
    assert np.allclose(circ(sc, x, y), J.product(x, y), atol=1e-13)
    assert np.array_equal(sc.gamma, sc.gamma.transpose(0, 2, 1))
    assert np.allclose(circ(sc, 2 * x + y, y), 2 * circ(sc, x, y) + circ(sc, y, y))


def test_flat_product_is_diagonal():
    geo = _flat_geo("SymR:3", [0.2, -0.4, 0.9])
    sc = structure_constants(geo.metric.g, geo.C)
    for a in range(3):
        for b in range(3):
            if a != b:
                assert np.abs(sc.gamma[:, a, b]).max() < 1e-14


def test_wdvv_on_flat_and_off_flat(rng):
    geo = _flat_geo("SymR:3", rng.uniform(-1, 1, 3))
    assert wdvv_residual(geo.metric.g, geo.C) <= 1e-9
    _, amb = _ambient_identity("SymR:3")
    assert wdvv_residual(amb.metric.g, amb.C) > 1e-2
    one = np.array([[[2.0]]])
    assert wdvv_residual(np.eye(1), one) == 0.0


@pytest.mark.parametrize("fam", ["Spin:5", "HermC:3", "Albert"])
def test_compatibility_on_flats(fam, rng):
    J = parse_family(fam)
    geo = _flat_geo(fam, rng.uniform(-1, 1, cartan_flat(J).dim))
    sc = structure_constants(geo.metric.g, geo.C)
    assert frobenius_compat_residual(geo.metric.g, sc, geo.C) <= 1e-10


def test_compatibility_negative_control(rng):
    geo = _flat_geo("SymR:3", [0.1, 0.5, -0.3])
    g = geo.metric.g
    sc = structure_constants(g, geo.C)
    noise = rng.standard_normal(g.shape)
    bad = g + 0.1 * (noise + noise.T)
    assert frobenius_compat_residual(bad, sc, geo.C) > 1e-3


def test_unit_on_symmetric_flat():
    lam = np.array([0.5, 1.0, 3.0])
    geo = _flat_geo("SymR:3", np.log(lam))
    g, C = geo.metric.g, geo.C
    assert unit_residual(g, C, -lam / 2) <= 1e-10
    e, _ = solve_unit(g, C)
    assert np.allclose(e, -lam / 2)
    assert unit_residual(g, C, np.zeros(3)) == pytest.approx(np.abs(g).max())
    contraction = lambda v: np.einsum("i,iab->ab", v, C)
    assert np.array_equal(contraction(2 * e), 2 * contraction(e))


def test_pencil_at_zero_and_on_flat(rng):
    geo = _flat_geo("SymR:2", rng.uniform(-1, 1, 2), order=4)
    pc = pencil_terms(geo.metric.g, geo.C, geo.Q)
    assert not pc.at(0.0).any()
    assert max(pencil_residuals(pc, (-1.0, 0.5, 1.0, 2.0))) <= 1e-9
    c0, c1, c2 = pencil_coefficients(pc)
    assert max(c0, c1, c2) <= 1e-8


def test_pencil_fails_off_flat():
    J = make_algebra("SymR", 3)
    spec = potential_spec(J)
    R = pencil_curvature(spec, ambient_chart(J, J.identity()), 1.0)
    _, amb = _ambient_identity("SymR:3", order=4)
    pc = pencil_terms(amb.metric.g, amb.C, amb.Q)
    assert np.array_equal(R, pc.at(1.0))
    assert pencil_residuals(pc, [1.0])[0] > 1e-2


def test_quadratic_pencil_part_is_the_associator():
    _, amb = _ambient_identity("HermC:2", order=4)
    pc = pencil_terms(amb.metric.g, amb.C, amb.Q)
    sc = structure_constants(amb.metric.g, amb.C)
    G = sc.gamma
    assoc = np.einsum("ikm,mlj->ijkl", G, G) - np.einsum("ilm,mkj->ijkl", G, G)
    assert np.allclose(pc.quadratic, assoc)
    assert np.abs(assoc).max() > 1e-3


@pytest.mark.parametrize("fam", ["SymR:4", "HermH:3", "Albert", "Spin:6", "SymR:2+Spin:3"])
def test_trace_associativity(fam, rng):
    J = parse_family(fam)
    assert trace_assoc_residual(J, 1000, rng) <= 1e-10
    x = sample_interior(J, rng).coords
    assert J.inner(J.product(x, x), x) == J.inner(x, J.product(x, x))


def test_report_pass_rule():
    rep = ResidualReport.from_values("demo", "SymR(2)", "flat", [0.0, 1e-12], 1e-9)
    assert rep.passed and rep.samples == 2
    assert not ResidualReport.from_values("demo", "SymR(2)", "flat", [0.0], 0.0).passed
    assert not ResidualReport.from_values("demo", "x", "none", [np.nan], 1.0).passed
    low = ResidualReport.from_values("demo", "x", "none", [-0.5, 2.0], 0.0, bound="lower")
    assert not low.passed
    with pytest.raises(ValueError):
        ResidualReport.from_values("demo", "x", "none", [], 1.0)
