"""First integrals and the commutator route to the coefficient span."""

import random

import pytest

from conftest import random_distribution, random_poly
from denseleaf.exact import (
    GaussianRational,
    SparsePoly,
    matrix_rank,
    same_row_space,
)
from denseleaf.forms import OneForm, PolyVectorField, commutator
from denseleaf.distribution import (
    SeparatedDistribution,
    bracket_span,
    coefficient_table,
    first_integral,
    is_first_integral,
    span_and_codim,
)


def x_(nv, i):
    return SparsePoly.variable(nv, i)


def _dist(*component_lists):
    return SeparatedDistribution([OneForm(list(c)) for c in component_lists])


# ---------------------------------------------------------------------------
# frozen small systems


def test_single_exact_form_has_affine_integral():
    # dz = y dx + x dy: one integral z - xy
    d = _dist([x_(2, 1), x_(2, 0)])
    fi = first_integral(d)
    assert fi.codim == 1
    assert fi.t_rows == [[GaussianRational(1)]]
    assert fi.potentials[0] == x_(2, 0) * x_(2, 1)
    h = fi.integral_polys()[0]
    assert h.terms == {
        (0, 0, 1): GaussianRational(1),
        (1, 1, 0): GaussianRational(-1),
    }
    assert fi.verify()


def test_two_form_system_with_one_relation():
    # dz1 = x dy, dz2 = 2x dy + y dx: the only relation is z1 - z2 + xy
    z0 = SparsePoly.zero(2)
    d = _dist([z0, x_(2, 0)], [x_(2, 1), x_(2, 0).scale(2)])
    fi = first_integral(d)
    assert fi.codim == 1
    assert fi.t_rows == [[GaussianRational(1), GaussianRational(-1)]]
    assert fi.potentials[0] == -(x_(2, 0) * x_(2, 1))
    assert is_first_integral(d, fi.integral_polys()[0])


def test_contact_form_has_no_integrals():
    # dz = y dx - x dy: coefficient span is all of C^1, kappa = 0
    d = _dist([x_(2, 1), -x_(2, 0)])
    table = coefficient_table(d)
    assert table.entries == {((0, 0), 0, 1): (GaussianRational(-2),)}
    basis, codim = span_and_codim(table)
    assert codim == 0
    fi = first_integral(d)
    assert fi.codim == 0 and fi.t_rows == [] and fi.integral_polys() == []


def test_closed_system_recovers_all_of_z():
    # dz1 = x dx, dz2 = y dy: both closed, kappa = N = 2
    z0 = SparsePoly.zero(2)
    d = _dist([x_(2, 0), z0], [z0, x_(2, 1)])
    fi = first_integral(d)
    assert fi.codim == 2
    assert fi.t_rows == [
        [GaussianRational(1), GaussianRational(0)],
        [GaussianRational(0), GaussianRational(1)],
    ]
    assert fi.potentials[0].terms == {(2, 0): GaussianRational(1, 0) / 2}
    assert fi.verify()


# ---------------------------------------------------------------------------
# structural invariants on seeded inputs


def test_annihilator_rows_are_exact_and_complete():
    rng = random.Random(1618)
    for _ in range(15):
        d = random_distribution(rng, max_m=4, max_n=3, max_degree=4)
        table = coefficient_table(d)
        basis, codim = span_and_codim(table)
        fi = first_integral(d)
        assert fi.codim == codim == d.N - len(basis)
        assert matrix_rank(fi.t_rows) == codim
        # T annihilates every coefficient vector exactly
        for vec in table.vectors():
            for row in fi.t_rows:
                s = GaussianRational(0)
                for t, c in zip(row, vec):
                    s = s + t * c
                assert s.is_zero()
        assert fi.verify()


def test_functions_of_integrals_are_integrals():
    rng = random.Random(271828)
    found = 0
    while found < 8:
        d = random_distribution(rng, max_m=3, max_n=2, max_degree=3)
        fi = first_integral(d)
        if fi.codim == 0:
            continue
        found += 1
        hs = fi.integral_polys()
        # polynomial expressions in the h's stay first integrals
        f = hs[0] * hs[0] + hs[-1].scale(GaussianRational(2, 1))
        assert is_first_integral(d, f)
        # and ratios of such expressions pass the rational-function test
        assert is_first_integral(d, hs[0] * hs[-1], hs[0] + SparsePoly.constant(d.num_ambient, 1))


def test_non_integrals_are_rejected():
    # dz = y dx - x dy has no nonconstant integral; z itself must fail
    d = _dist([x_(2, 1), -x_(2, 0)])
    z = SparsePoly.variable(3, 2)
    assert not is_first_integral(d, z)
    # and in a kappa = 1 system, a single z coordinate not in ker T fails
    z0 = SparsePoly.zero(2)
    d2 = _dist([z0, x_(2, 0)], [x_(2, 1), x_(2, 0).scale(2)])
    z1 = SparsePoly.variable(4, 2)
    assert not is_first_integral(d2, z1)


def test_is_first_integral_validates_input():
    d = _dist([x_(2, 1), x_(2, 0)])
    with pytest.raises(ValueError):
        is_first_integral(d, SparsePoly.variable(2, 0))  # wrong arity
    with pytest.raises(ValueError):
        is_first_integral(d, SparsePoly.variable(3, 0), SparsePoly.zero(3))


# ---------------------------------------------------------------------------
# bracket route


def test_simple_commutator():
    # [d/dx, d/dy + x d/dz] = d/dz
    X = PolyVectorField.coordinate(3, 0)
    comps = [SparsePoly.zero(3), SparsePoly.constant(3, 1), x_(3, 0)]
    Y = PolyVectorField(comps)
    B = commutator(X, Y)
    assert B.components[0].is_zero() and B.components[1].is_zero()
    assert B.components[2] == SparsePoly.constant(3, 1)


def test_bracket_span_matches_coefficient_span_seeded():
    rng = random.Random(31415)
    for _ in range(10):
        d = random_distribution(rng, max_m=3, max_n=3, max_degree=3)
        table = coefficient_table(d)
        expected, _ = span_and_codim(table)
        got = bracket_span(d)
        if not expected:
            assert got == []
        else:
            assert same_row_space(expected, got)


def test_bracket_span_sees_high_order_coefficients():
    # dz = x^3 y dy has a single coefficient at K = (2, 1): depth must reach it
    w = OneForm([SparsePoly.zero(2), x_(2, 0) ** 3 * x_(2, 1)])
    d = SeparatedDistribution([w])
    assert bracket_span(d, depth=2) == []  # too shallow on purpose
    assert bracket_span(d, depth=3) == [[GaussianRational(1)]]


def test_validation():
    with pytest.raises(ValueError):
        SeparatedDistribution([])
    with pytest.raises(ValueError):
        SeparatedDistribution([OneForm([SparsePoly.zero(1)])])
