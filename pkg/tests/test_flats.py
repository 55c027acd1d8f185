from __future__ import annotations

import itertools

import numpy as np
import pytest

from vinberg_wdvv.cone import contains, potential_spec
from vinberg_wdvv.flats import (UnsupportedBracketError, ambient, cartan_flat, curvature_triple, flat_point,
                                lie_bracket, lie_triple_residual, to_tangent,
                                totally_geodesic_residual, weyl_chamber_contains)
from vinberg_wdvv.jordan import from_matrix, make_algebra, parse_family

BRACKET_FAMILIES = ["SymR:3", "SymR:4", "HermC:2", "HermH:3", "Spin:3", "Spin:5", "SymR:2+Spin:3"]


def test_flat_dimensions():
    assert cartan_flat(make_algebra("SymR", 3)).dim == 3
    assert cartan_flat(make_algebra("Spin", 5)).dim == 2
    assert cartan_flat(make_algebra("Albert", 3)).dim == 3
    assert cartan_flat(parse_family("SymR:2+Spin:3")).dim == 4


@pytest.mark.parametrize("fam", BRACKET_FAMILIES)
def test_flat_basis_commutes(fam):
    J = parse_family(fam)
    F = cartan_flat(J)
    for a, b in itertools.combinations(F.abasis, 2):
        br = lie_bracket(J, a, b)
        for part in (br if isinstance(br, list) else [br]):
            assert np.abs(part).max() == 0.0
    assert lie_triple_residual(J, F.abasis) <= 1e-12


def test_bracket_examples(rng):
    J = make_algebra("SymR", 2)
    X = from_matrix(J, [[0.0, 1.0], [1.0, 0.0]]).coords
    Y = from_matrix(J, [[1.0, 0.0], [0.0, -1.0]]).coords
    assert np.allclose(lie_bracket(J, X, Y)[..., 0], 2 * np.array([[0.0, -1.0], [1.0, 0.0]]))
    Z = J.random(rng)
    assert np.abs(lie_bracket(J, Z, Z)).max() == 0.0


def test_random_subspace_is_not_a_triple_system(rng):
    J = make_algebra("SymR", 3)
    assert lie_triple_residual(J, J.random(rng, 3)) > 1e-3


def test_whole_tangent_space_is_a_triple_system():
    J = make_algebra("SymR", 3)
    assert lie_triple_residual(J, np.eye(J.N)) <= 1e-12


@pytest.mark.parametrize("fam", BRACKET_FAMILIES)
def test_curvature_vanishes_on_flat(fam):
    J = parse_family(fam)
    F = cartan_flat(J)
    for a, b, c in itertools.product(F.abasis, repeat=3):
        assert np.abs(curvature_triple(J, a, b, c)).max() == 0.0


def test_curvature_is_nonzero_and_antisymmetric(rng):
    J = make_algebra("HermC", 2)
    X, Y = J.random(rng), J.random(rng)
    R = curvature_triple(J, X, Y, X)
    assert R.shape == (J.N,)
    assert np.abs(R).max() > 1e-3
    assert np.array_equal(R, -curvature_triple(J, Y, X, X))


def test_spin_tangent_roundtrip(rng):
    J = make_algebra("Spin", 4)
    x = J.random(rng)
    assert np.allclose(to_tangent(J, ambient(J, x)), x)


def test_albert_brackets_are_unsupported():
    J = make_algebra("Albert", 3)
    with pytest.raises(UnsupportedBracketError):
        lie_bracket(J, J.identity(), J.identity())


def test_flat_points():
    J = make_algebra("SymR", 2)
    F = cartan_flat(J)
    assert np.allclose(flat_point(F, [0.0, 0.0]).coords, J.identity())
    assert np.allclose(J.matrix(flat_point(F, np.log([2.0, 3.0])).coords)[..., 0], np.diag([2.0, 3.0]))
    S = cartan_flat(make_algebra("Spin", 4))
    assert np.allclose(flat_point(S, [0.0, 0.0]).coords, S.algebra.identity())
    with pytest.raises(ValueError):
        flat_point(F, [0.0])


@pytest.mark.parametrize("fam", ["SymR:3", "Albert", "Spin:4", "SymR:2+Spin:3"])
def test_flat_points_are_interior(fam, rng):
    F = cartan_flat(parse_family(fam))
    for _ in range(20):
        assert contains(F.algebra, flat_point(F, rng.uniform(-2, 2, F.dim)).coords)


def test_weyl_chamber():
    assert weyl_chamber_contains([-1.0, 0.0, 1.0])
    assert not weyl_chamber_contains([1.0, 0.0, -1.0])
    assert not weyl_chamber_contains([-1.0, -1.0, 2.0])


@pytest.mark.parametrize("fam", ["SymR:3", "HermH:2", "Albert", "Spin:5"])
def test_flats_are_totally_geodesic(fam, rng):
    J = parse_family(fam)
    F = cartan_flat(J)
    for _ in range(3):
        assert totally_geodesic_residual(potential_spec(J), F, rng.uniform(-1, 1, F.dim)) <= 1e-9
