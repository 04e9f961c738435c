"""Lifted fields, lifted loops, and Legendrian products."""

import math
import random

import numpy as np
import pytest

from conftest import random_distribution, random_poly
from denseleaf.exact import GaussianRational, SparsePoly
from denseleaf.forms import OneForm, PolyVectorField, contract
from denseleaf.distribution import SeparatedDistribution, first_integral
from denseleaf.lifting import (
    GuardViolation,
    LiftGuard,
    LiftedField,
    commutator,
    contact_distribution,
    legendrian_product,
    lift_loop,
    lift_vector_field,
    omega_sup_bound,
)
from denseleaf.lifting_paths import (
    CoordinateArc,
    LineSegment,
    PiecewisePath,
    TorusLoop,
)


def x_(nv, i):
    return SparsePoly.variable(nv, i)


def contact2() -> SeparatedDistribution:
    # dz = y dx - x dy
    return SeparatedDistribution([OneForm([x_(2, 1), -x_(2, 0)])])


# ---------------------------------------------------------------------------
# lifted fields


def test_lift_vector_field_fiber_components():
    d = contact2()
    X = PolyVectorField([x_(2, 0), -x_(2, 1)])  # x d/dx - y d/dy
    Z = lift_vector_field(d, X)
    assert Z.z_components[0] == (x_(2, 0) * x_(2, 1)).scale(2)


def test_lifted_field_annihilates_first_integrals():
    rng = random.Random(424242)
    checked = 0
    while checked < 6:
        d = random_distribution(rng, max_m=3, max_n=2, max_degree=3)
        fi = first_integral(d)
        if fi.codim == 0:
            continue
        checked += 1
        X = PolyVectorField([random_poly(rng, d.M, 2) for _ in range(d.M)])
        amb = lift_vector_field(d, X).ambient()
        for h in fi.integral_polys():
            assert amb.apply(h).is_zero()


def test_ambient_brackets_of_coordinate_lifts():
    # for dz = y dx - x dy the bracket of the two lifts is -2 d/dz
    d = contact2()
    X1, X2 = d.coordinate_lifts()
    B = commutator(X1, X2)
    assert B.components[0].is_zero() and B.components[1].is_zero()
    assert B.components[2] == SparsePoly.constant(3, -2)


# ---------------------------------------------------------------------------
# paths


def test_path_continuity_is_enforced():
    a = LineSegment([0, 0], [1, 0])
    b = LineSegment([0.5, 0], [1, 1])
    with pytest.raises(ValueError):
        PiecewisePath([a, b])
    path = PiecewisePath([a, LineSegment([1, 0], [1, 1])])
    assert not path.is_closed()
    assert path.length() == pytest.approx(2.0)


def test_torus_loop_geometry():
    loop = TorusLoop([0.1, 0.2], [1, -1])
    assert np.allclose(loop.point(0.0), loop.point(1.0))
    assert loop.sup_abs() == pytest.approx(0.2)
    assert loop.length() == pytest.approx(2 * math.pi * math.hypot(0.1, 0.2))
    # reversal flips the winding
    assert np.allclose(loop.reversed().point(0.25), loop.point(0.75))


def test_coordinate_arc_sup_and_length():
    arc = CoordinateArc([0.5, 1.0], coord=1, center=1.0, radius=0.25,
                        theta0=0.0, theta1=math.pi)
    assert arc.sup_abs() == pytest.approx(1.25)
    assert arc.length() == pytest.approx(0.25 * math.pi)
    assert np.allclose(arc.point(0.0), [0.5, 1.25])


# ---------------------------------------------------------------------------
# loop lifting (quadrature)


def test_lift_along_exact_form_is_path_independent():
    # dz = y dx + x dy = d(xy): displacement depends on endpoints only
    d = SeparatedDistribution([OneForm([x_(2, 1), x_(2, 0)])])
    path = PiecewisePath([LineSegment([0, 0], [1, 1])])
    z = lift_loop(d, path)
    assert abs(z[0] - 1.0) < 1e-12
    dogleg = PiecewisePath([LineSegment([0, 0], [1, 0]), LineSegment([1, 0], [1, 1])])
    assert abs(lift_loop(d, dogleg)[0] - 1.0) < 1e-12


def test_lift_of_basic_torus_loop_matches_closed_form():
    # dz = x dy around the (1,-1)-loop: displacement -2 pi i y1 y2
    d = SeparatedDistribution([OneForm([SparsePoly.zero(2), x_(2, 0)])])
    y = [0.1, 0.1]
    path = PiecewisePath([TorusLoop(y, [1, -1])])
    z = lift_loop(d, path)
    expected = -2j * math.pi * y[0] * y[1]
    assert abs(z[0] - expected) < 1e-10
    # winding the other way negates the displacement
    z_rev = lift_loop(d, path.reversed())
    assert abs(z_rev[0] + expected) < 1e-10


def test_lift_displacements_add_under_concatenation():
    d = contact2()
    a = PiecewisePath([TorusLoop([0.1, 0.05], [1, -1])])
    b = PiecewisePath([TorusLoop([0.05, 0.1], [2, -1], turns=1)])
    # both loops start on the same torus point? no: lift displacement of a
    # closed loop is base-point free data, but concatenation needs continuity
    za = lift_loop(d, a)
    zb = lift_loop(d, b)
    if np.allclose(a.end(), b.start()):
        zab = lift_loop(d, a.concat(b))
        assert np.allclose(zab, za + zb, atol=1e-10)
    # displacement never depends on the start fiber point (direct integral)
    z_shift = lift_loop(d, a, z0=[3 + 4j])
    assert abs((z_shift[0] - (3 + 4j)) - za[0]) < 1e-12


def test_guard_blocks_unsafe_lifts():
    d = contact2()
    loop = TorusLoop([0.1, 0.1], [1, -1])
    path = PiecewisePath([loop])
    # generous guard passes
    ok = lift_loop(d, path, guard=LiftGuard(base_radius=0.2, fiber_radius=1.0))
    assert np.isfinite(ok).all()
    # fiber radius too small: |z0| + Kb * len >= r
    with pytest.raises(GuardViolation):
        lift_loop(d, path, guard=LiftGuard(base_radius=0.2, fiber_radius=1e-6))
    # declared base polydisc smaller than the loop: refused outright
    with pytest.raises(GuardViolation):
        lift_loop(d, path, guard=LiftGuard(base_radius=0.05, fiber_radius=1.0))


def test_omega_sup_bound_dominates_samples():
    rng = random.Random(11)
    d = random_distribution(rng, max_m=3, max_n=2, max_degree=3)
    r = 0.3
    kb = omega_sup_bound(d, r)
    for _ in range(100):
        x = [r * complex(math.cos(a), math.sin(a))
             for a in [rng.uniform(0, 2 * math.pi) for _ in range(d.M)]]
        val = math.sqrt(sum(
            abs(w.components[i].eval_complex(x)) ** 2
            for w in d.omega for i in range(d.M)
        ))
        assert val <= kb + 1e-9


# ---------------------------------------------------------------------------
# Legendrian products


def test_legendrian_product_frozen_example():
    # A = x, B = -y on one pair: Z_j = x_j dx_j - y_j dy_j + 2 x_j y_j dz
    d1 = contact_distribution(1)
    base = PolyVectorField([x_(2, 0), -x_(2, 1)])
    Z3 = lift_vector_field(d1, base)
    fields, dist = legendrian_product(Z3, 2)
    assert dist.M == 4 and dist.N == 1
    for j, Z in enumerate(fields):
        xj = SparsePoly.variable(4, 2 * j)
        yj = SparsePoly.variable(4, 2 * j + 1)
        assert Z.base.components[2 * j] == xj
        assert Z.base.components[2 * j + 1] == -yj
        assert Z.z_components[0] == (xj * yj).scale(2)


def test_legendrian_product_fields_commute_and_are_tangent():
    d1 = contact_distribution(1)
    # quadratic Legendrian input: A = y^2, B = x y + 1
    A = x_(2, 1) ** 2
    B = x_(2, 0) * x_(2, 1) + SparsePoly.constant(2, 1)
    Z3 = lift_vector_field(d1, PolyVectorField([A, B]))
    for m in (1, 2, 3):
        fields, dist = legendrian_product(Z3, m)
        ambients = [Z.ambient() for Z in fields]
        for a in range(m):
            # tangency: fiber part equals the contact pairing exactly
            assert fields[a].z_components[0] == contract(dist.omega[0], fields[a].base)
            for b in range(a + 1, m):
                assert commutator(ambients[a], ambients[b]).is_zero()


def test_legendrian_product_rejects_non_tangent_input():
    d1 = contact_distribution(1)
    bogus = LiftedField(d1, PolyVectorField([x_(2, 0), -x_(2, 1)]),
                        [SparsePoly.constant(2, 1)])
    with pytest.raises(ValueError):
        legendrian_product(bogus, 2)
