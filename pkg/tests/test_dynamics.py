"""Numeric dynamics: holonomy, contraction, return accumulation, density,
and the multiplicative subgroup probe."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from denseleaf.distribution import SeparatedDistribution
from denseleaf.dynamics import (
    ContractionReport,
    ReturnRecord,
    SimConfig,
    accumulate_returns,
    contraction_check,
    contraction_delta,
    default_generators,
    density_report,
    holonomy_multipliers,
    holonomy_numeric,
    mu_multipliers,
    subgroup_density_probe,
)
from denseleaf.exact import GaussianRational, SparsePoly
from denseleaf.forms import OneForm
from denseleaf.lifting import contact_distribution, lift_loop
from denseleaf.lifting_paths import LineSegment, PiecewisePath, TorusLoop
from denseleaf.synthesis import build_Y, generate_mu


def x_(nv, i):
    return SparsePoly.variable(nv, i)


def gr(re, im=0):
    return GaussianRational(Fraction(re), Fraction(im))


# ---------------------------------------------------------------------------
# holonomy


def quarter_field():
    # one axis, poles 0 and 1, residue i/4 at the first pole
    return build_Y([0, 1], [[GaussianRational(0, Fraction(1, 4)), gr(3)]])


def test_holonomy_quarter_residue_multiplier():
    Y = quarter_field()
    pred = holonomy_multipliers(Y, 0)
    # e^{2 pi i (i/4)} = e^{-pi/2}
    assert pred[0] == pytest.approx(math.exp(-math.pi / 2), rel=1e-15)
    assert pred[0] == pytest.approx(0.20787957635076193, rel=1e-15)
    got = holonomy_numeric(Y, 0)
    assert abs(got[0] - pred[0]) / abs(pred[0]) < 1e-6


def test_holonomy_integer_residue_is_trivial():
    Y = build_Y([0, 1], [[gr(1), gr(2)]])
    assert holonomy_multipliers(Y, 0)[0] == pytest.approx(1.0, rel=1e-15)
    assert holonomy_numeric(Y, 0)[0] == pytest.approx(1.0, rel=1e-6)


def test_holonomy_matches_prediction_on_every_pole():
    # two axes, two poles, residues of modulus <= 2 with mixed signs
    Y = build_Y(
        [0, 1],
        [
            [gr(Fraction(1, 3), Fraction(1, 5)), gr(Fraction(-1, 2), Fraction(1, 7))],
            [gr(Fraction(2, 3), Fraction(-1, 4)), gr(0, Fraction(3, 2))],
        ],
    )
    for pole in range(2):
        pred = holonomy_multipliers(Y, pole)
        got = holonomy_numeric(Y, pole)
        assert np.all(np.abs(got - pred) / np.abs(pred) < 1e-6)


def test_holonomy_loop_then_inverse_is_identity():
    Y = quarter_field()
    z0 = np.array([0.3 + 0.4j])
    w = holonomy_numeric(Y, 0, z=z0)
    back = holonomy_numeric(Y, 0, z=w, turns=-1)
    assert abs(back[0] - z0[0]) < 1e-8


def test_holonomy_acts_linearly_on_the_fiber():
    Y = quarter_field()
    mult = holonomy_numeric(Y, 0)[0]
    z0 = np.array([-1.7 + 0.2j])
    assert holonomy_numeric(Y, 0, z=z0)[0] == pytest.approx(mult * z0[0], rel=1e-9)


def test_holonomy_integrator_consistency():
    Y = quarter_field()
    tol = 1e-8
    a = holonomy_numeric(Y, 0, abs_tol=tol * 1e-2, rel_tol=tol)
    b = holonomy_numeric(Y, 0, abs_tol=tol * 1e-2 / 2, rel_tol=tol / 2)
    assert np.all(np.abs(a - b) < 10 * tol)


def test_holonomy_validation():
    Y = quarter_field()
    with pytest.raises(ValueError):
        holonomy_numeric(Y, 5)
    with pytest.raises(ValueError):
        holonomy_multipliers(Y, -1)
    with pytest.raises(ValueError):
        holonomy_numeric(Y, 0, z=[1.0, 2.0])  # one axis only


# ---------------------------------------------------------------------------
# contraction


def test_contraction_generated_exponents_pass():
    rep = contraction_check(generate_mu(2))
    assert isinstance(rep, ContractionReport)
    assert rep.ok and rep.delta < 1.0
    # worst column margin is the mixed column: sqrt2/8 * 1/400 + sqrt3/16 * 1/100
    margin = math.sqrt(2) / 3200 + math.sqrt(3) / 1600
    assert rep.delta == pytest.approx(math.exp(-2 * math.pi * margin), rel=1e-12)
    assert rep.delta == pytest.approx(0.9904671787328825, rel=1e-13)
    # the linearized maps attain the bound on near-axis samples
    assert rep.max_ratio <= rep.delta * (1 + 1e-12)
    assert rep.max_ratio > rep.delta * (1 - 1e-6)


def test_contraction_three_base_variables():
    rep = contraction_check(generate_mu(3), samples=400)
    assert rep.ok
    # here the pure-contraction column is the worst: margin 1/400
    assert rep.delta == pytest.approx(math.exp(-math.pi / 200), rel=1e-13)
    assert rep.delta == pytest.approx(0.9844147633517137, rel=1e-13)


def test_contraction_real_column_fails_without_raising():
    # a single real exponent: multiplier on the unit circle, no contraction
    rep = contraction_check([[gr(Fraction(1, 2))]], samples=50)
    assert rep.delta >= 1.0
    assert not rep.ok


def test_contraction_delta_monotone_in_imaginary_part():
    deltas = [
        contraction_delta(generate_mu(2, contraction=Fraction(1, d)))
        for d in (400, 200, 100)
    ]
    assert deltas[0] > deltas[1] > deltas[2]


@given(num=st.integers(1, 30), den=st.integers(1, 40))
@settings(max_examples=40, deadline=None)
def test_contraction_delta_closed_form_single_column(num, den):
    q = Fraction(num, den * 100)
    mu = [[GaussianRational(Fraction(1, 3), q)], [GaussianRational(0, q)]]
    # margin = min(Im mu_1, Im mu_1 + Im mu_2) = q
    assert contraction_delta(mu) == pytest.approx(
        math.exp(-2 * math.pi * float(q)), rel=1e-12
    )


# ---------------------------------------------------------------------------
# return accumulation


def xdy_distribution():
    # dz = x dy over (x, y)
    return SeparatedDistribution([OneForm([SparsePoly.zero(2), x_(2, 0)])])


def two_base_generators(y1=(0.10, 0.10), y2=(0.15, 0.05)):
    y1 = np.asarray(y1, dtype=complex)
    y2 = np.asarray(y2, dtype=complex)
    g1 = PiecewisePath([TorusLoop(y1, (1, -1))])
    bridge = PiecewisePath([LineSegment(y1, y2)])
    g2 = bridge.concat(PiecewisePath([TorusLoop(y2, (1, -1))])).concat(
        bridge.reversed()
    )
    return [g1, g2]


def test_returns_are_integer_combinations_of_the_two_loops():
    dist = xdy_distribution()
    gens = two_base_generators()
    recs = accumulate_returns(dist, gens, SimConfig(budget=30))
    assert recs.skipped == 0
    assert len(recs) == 31  # empty word + every word attempted
    # int x dy over the (1,-1)-loop at base y is -2 pi i y1 y2
    d1 = -2j * math.pi * 0.10 * 0.10
    d2 = -2j * math.pi * 0.15 * 0.05
    for r in recs:
        a, b = r.exponents
        assert abs(r.displacement[0] - (a * d1 + b * d2)) < 1e-10
        assert r.residual <= 1e-8 * (1 + np.linalg.norm(r.displacement))
        assert np.allclose(r.endpoint, r.displacement)  # z0 = 0


def test_return_word_spells_signed_generator_indices():
    rec = ReturnRecord((2, -1, 0), 3, np.zeros(1), np.zeros(1), 0.0)
    assert rec.word == (1, 1, -2)


def test_closed_form_gives_zero_displacements():
    # d(xy) = y dx + x dy is exact, so every loop lifts to a closed loop
    closed = SeparatedDistribution([OneForm([x_(2, 1), x_(2, 0)])])
    recs = accumulate_returns(closed, two_base_generators(), SimConfig(budget=20))
    assert all(abs(r.displacement[0]) < 1e-10 for r in recs)


def test_displacements_stay_in_the_coefficient_span():
    # two identical forms: coefficient span is the diagonal of C^2
    twin = SeparatedDistribution(
        [OneForm([SparsePoly.zero(2), x_(2, 0)])] * 2
    )
    recs = accumulate_returns(twin, two_base_generators(), SimConfig(budget=20))
    v = np.array([1.0, 1.0]) / math.sqrt(2)
    for r in recs:
        off_diagonal = np.linalg.norm(r.displacement - v * (v @ r.displacement))
        assert off_diagonal <= 1e-8 * (1 + np.linalg.norm(r.displacement))
        assert r.residual <= 1e-8 * (1 + np.linalg.norm(r.displacement))


def test_guard_refusals_are_counted_not_fatal():
    dist = contact_distribution(1)
    gens = default_generators(dist)
    # reach of a single small loop is ~0.03, of two loops ~0.06: a 0.05
    # fiber radius admits radius-1 words and refuses everything longer
    cfg = SimConfig(fiber_radius=0.05, budget=30)
    recs = accumulate_returns(dist, gens, cfg)
    assert recs.skipped > 0
    assert all(r.word_length <= 1 for r in recs)
    assert len(recs) == 5  # empty word + four radius-1 words
    assert (len(recs) - 1) + recs.skipped <= cfg.budget


def test_zero_budget_keeps_only_the_empty_word():
    recs = accumulate_returns(
        xdy_distribution(), two_base_generators(), SimConfig(budget=0)
    )
    assert len(recs) == 1 and recs[0].word_length == 0


def test_accumulate_validation():
    dist = xdy_distribution()
    open_path = PiecewisePath([LineSegment((0.1, 0.1), (0.2, 0.1))])
    with pytest.raises(ValueError):
        accumulate_returns(dist, [open_path])
    g1 = PiecewisePath([TorusLoop((0.10, 0.10), (1, -1))])
    g2 = PiecewisePath([TorusLoop((0.15, 0.05), (1, -1))])
    with pytest.raises(ValueError):
        accumulate_returns(dist, [g1, g2])  # different start points
    with pytest.raises(ValueError):
        accumulate_returns(dist, [])


def test_default_generators_contact_displacements():
    dist = contact_distribution(1)
    gens = default_generators(dist)
    assert len(gens) == 2
    start = gens[0].start()
    for g in gens:
        assert g.is_closed()
        assert np.allclose(g.start(), start)
    # int (y dx - x dy) over the (1,-1)-loop at (a, b) is 4 pi i a b:
    # 4 pi i 0.0025 for the plain loop, a quarter turn of it for the
    # rotated one (base point (0.05 i, 0.05))
    d1 = lift_loop(dist, gens[0])[0]
    d2 = lift_loop(dist, gens[1])[0]
    assert d1 == pytest.approx(4j * math.pi * 0.0025, abs=1e-12)
    assert d2 == pytest.approx(-4 * math.pi * 0.0025, abs=1e-12)


def test_default_generators_validation():
    closed = SeparatedDistribution([OneForm([x_(2, 1), x_(2, 0)])])
    with pytest.raises(ValueError):
        default_generators(closed)  # nothing moves the fiber
    dist = contact_distribution(1)
    with pytest.raises(ValueError):
        default_generators(dist, anchor=[0.05, 0.0])
    with pytest.raises(ValueError):
        default_generators(dist, anchor=[0.05])


# ---------------------------------------------------------------------------
# density


def synthetic_record(word, disp):
    disp = np.atleast_1d(np.asarray(disp, dtype=complex))
    return ReturnRecord(
        tuple(word), sum(abs(k) for k in word), disp, disp.copy(), 0.0
    )


def test_density_single_endpoint_fills_one_cell():
    recs = [synthetic_record((1, 0), 0.0123 + 0.0077j)]
    rep = density_report(recs)
    # eps 0.05 grid on the radius-0.2 disc of the 1-dim span: 49 points
    assert rep.span_dim == 1
    assert rep.total_cells == 49
    assert rep.covered_cells == 1
    assert rep.coverage == pytest.approx(1 / 49)


def test_density_grid_size_matches_integer_disc_count():
    recs = [synthetic_record((1,), 0.01)]
    rep = density_report(recs)
    steps = int(0.2 / 0.05)
    count = sum(
        1
        for a in range(-steps, steps + 1)
        for b in range(-steps, steps + 1)
        if math.hypot(a, b) * 0.05 <= 0.2 + 1e-12
    )
    assert rep.total_cells == count == 49


def test_density_zero_span_is_a_single_covered_cell():
    closed = SeparatedDistribution([OneForm([x_(2, 1), x_(2, 0)])])
    recs = accumulate_returns(closed, two_base_generators(), SimConfig(budget=10))
    rep = density_report(recs)
    assert rep.span_dim == 0
    assert rep.total_cells == 1 and rep.covered_cells == 1
    assert rep.coverage == 1.0


def test_density_lattice_fill_of_the_contact_slice():
    # Simulated returns of dz = y dx - x dy: the two default generators
    # displace by 4 pi i 0.0025 and its quarter turn, a square lattice of
    # spacing ~0.0314.  Half its cell diagonal (~0.0222) is below the
    # half-cell reach of the 0.05 grid (0.025), and words up to length 14
    # reach every lattice point with |a|, |b| <= 7, which is enough to put
    # a lattice point next to every grid point of the 0.2 disc whatever
    # orientation the span basis picks.  So the disc fills completely.
    d1 = 4j * math.pi * 0.0025
    d2 = -4 * math.pi * 0.0025
    recs = [
        synthetic_record((a, b), a * d1 + b * d2)
        for a in range(-14, 15)
        for b in range(-14 + abs(a), 15 - abs(a))
    ]
    rep = density_report(recs)
    assert rep.span_dim == 1
    assert rep.total_cells == 49
    assert rep.coverage == 1.0


def test_density_measured_contact_returns_fill_the_disc():
    # same prediction as the lattice-fill simulation, now with every
    # displacement actually integrated
    dist = contact_distribution(1)
    recs = accumulate_returns(dist, default_generators(dist), max_radius=14)
    assert recs.skipped == 0
    rep = density_report(recs)
    assert rep.coverage == 1.0
    assert rep.endpoints_used == 421


def test_density_grid_guard():
    recs = [
        synthetic_record((1, 0), [1.0, 0.0]),
        synthetic_record((0, 1), [0.0, 1.0]),
    ]
    with pytest.raises(ValueError):
        density_report(recs, SimConfig(eps=0.001))  # 4 real dims, huge grid


def test_density_requires_records():
    with pytest.raises(ValueError):
        density_report([])


def test_simconfig_validation():
    with pytest.raises(ValueError):
        SimConfig(abs_tol=0.0)
    with pytest.raises(ValueError):
        SimConfig(eps=-0.05)
    with pytest.raises(ValueError):
        SimConfig(budget=-1)


# ---------------------------------------------------------------------------
# subgroup probe


def test_probe_reaches_a_generic_target():
    mults = mu_multipliers(generate_mu(2))[:, 0]
    rec = subgroup_density_probe(mults, 0.5 + 0.1j, word_bound=40)
    assert rec.error < 0.01
    # exact minimizer over the whole |k|_1 <= 40 ball
    assert rec.exponents == (5, 12, -17)
    assert rec.word_length == 34
    assert rec.error == pytest.approx(0.0021216979579675027, rel=1e-12)


def test_probe_target_equal_to_a_multiplier():
    mults = mu_multipliers(generate_mu(2))[:, 0]
    rec = subgroup_density_probe(mults, mults[1], word_bound=5)
    assert rec.error == 0.0
    assert rec.word_length == 1
    assert rec.exponents == (0, 1, 0)


def test_probe_single_irrational_rotation():
    # golden rotation: orbit gaps on the circle bound the best chord error
    alpha = (math.sqrt(5) - 1) / 2
    lam = complex(math.cos(2 * math.pi * alpha), math.sin(2 * math.pi * alpha))
    target = complex(math.cos(1.234), math.sin(1.234))
    bound = 1000
    rec = subgroup_density_probe([lam], target, word_bound=bound)
    ks = np.arange(-bound, bound + 1)
    phases = np.sort((ks * alpha) % 1.0)
    gaps = np.diff(np.concatenate([phases, [phases[0] + 1.0]]))
    worst_chord = 2 * math.sin(math.pi * float(gaps.max()))
    assert rec.error <= worst_chord
    assert rec.error < 0.01


@given(k=st.integers(-8, 8).filter(lambda k: k != 0))
@settings(max_examples=20, deadline=None)
def test_probe_finds_pure_powers(k):
    mults = mu_multipliers(generate_mu(2))[:, 0]
    rec = subgroup_density_probe(mults, mults[1] ** k, word_bound=8)
    assert rec.error <= 1e-9 * max(1.0, abs(mults[1]) ** k)
    assert rec.word_length <= abs(k)


def test_probe_beam_fallback_still_converges():
    # force the beam path by forbidding exhaustive enumeration
    mults = mu_multipliers(generate_mu(2))[:, 0]
    rec = subgroup_density_probe(
        mults, 0.5 + 0.1j, word_bound=40, exhaustive_limit=1
    )
    assert rec.error < 0.01
    stopped = subgroup_density_probe(
        mults, 0.5 + 0.1j, word_bound=40, exhaustive_limit=1, tol=0.02
    )
    assert stopped.error <= 0.02


def test_probe_vector_multipliers():
    # componentwise products over C^2: (0.5, 2)^2 (i, 1)^b hits (i/4, 4)
    # exactly for b = 1 mod 4
    mults = np.array([[0.5, 2.0], [1j, 1.0 + 0j]])
    rec = subgroup_density_probe(mults, [0.25j, 4.0 + 0j], word_bound=6)
    assert rec.error < 1e-12
    assert rec.exponents[0] == 2 and rec.exponents[1] % 4 == 1


def test_probe_validation():
    with pytest.raises(ValueError):
        subgroup_density_probe([0.0, 1.0], 1.0)
    with pytest.raises(ValueError):
        subgroup_density_probe([0.5], 0.0)
    with pytest.raises(ValueError):
        subgroup_density_probe(np.array([[0.5, 0.5]]), [1.0, 1.0, 1.0])
