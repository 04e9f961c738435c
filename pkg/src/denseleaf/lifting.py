r"""Lifting base objects into the total space of the system.

A polynomial field X on the base lifts to X + sum_j w_j(X) d/dz_j, which is
tangent to the distribution by construction.  A loop in the base lifts by
direct integration of the fiber displacement dz_j = w_j(gamma) . gamma'
(no feedback: the right-hand side never sees z), so lifts of concatenated
loops add displacements.

Loop lifting carries an optional guard: using a term-sum bound Kb for |w|
on a declared base polydisc, the lift refuses to run unless
|z0| + Kb * length(gamma) stays inside the declared fiber radius.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.integrate import quad_vec

from .distribution import SeparatedDistribution
from .exact import SparsePoly
from .forms import OneForm, PolyVectorField, commutator, contract
from .lifting_paths import PiecewisePath, Segment  # re-exported below

__all__ = [
    "LiftedField",
    "LiftGuard",
    "GuardViolation",
    "lift_vector_field",
    "lift_loop",
    "omega_sup_bound",
    "commutator",
    "legendrian_product",
    "contact_distribution",
]


class GuardViolation(RuntimeError):
    """The a-priori fiber bound left the declared safe region."""


class LiftGuard:
    """Safe region declaration for loop lifting.

    base_radius bounds the polydisc the loop must stay in; fiber_radius is
    the radius the lifted fiber point must provably stay inside.
    """

    __slots__ = ("base_radius", "fiber_radius")

    def __init__(self, base_radius: float, fiber_radius: float):
        if base_radius <= 0 or fiber_radius <= 0:
            raise ValueError("guard radii must be positive")
        self.base_radius = base_radius
        self.fiber_radius = fiber_radius


class LiftedField:
    """A base polynomial field together with its fiber components."""

    __slots__ = ("distribution", "base", "z_components")

    def __init__(self, distribution: SeparatedDistribution, base: PolyVectorField,
                 z_components: Sequence[SparsePoly]):
        if base.num_vars != distribution.M:
            raise ValueError("base field must live in the base variables")
        if len(z_components) != distribution.N:
            raise ValueError("need one fiber component per z variable")
        self.distribution = distribution
        self.base = base
        self.z_components = list(z_components)

    def ambient(self) -> PolyVectorField:
        """The same field as a polynomial field in (x_1..x_M, z_1..z_N)."""
        d = self.distribution
        n = d.num_ambient
        xpos = list(range(d.M))
        comps = [p.embed(n, xpos) for p in self.base.components]
        comps += [p.embed(n, xpos) for p in self.z_components]
        return PolyVectorField(comps)

    def __repr__(self):
        return f"LiftedField(base={self.base!r}, z={self.z_components!r})"


def lift_vector_field(dist: SeparatedDistribution, X: PolyVectorField) -> LiftedField:
    """Tangent lift: fiber components are w_j(X)."""
    return LiftedField(dist, X, [contract(w, X) for w in dist.omega])


def omega_sup_bound(dist: SeparatedDistribution, radius: float) -> float:
    """Term-sum overestimate of the euclidean norm of (w_1(v), ..., w_N(v))
    per unit base speed, valid on the closed polydisc |x_i| <= radius."""
    total = 0.0
    for w in dist.omega:
        per_form = sum(p.coeff_bound(radius) ** 2 for p in w.components)
        total += per_form
    return math.sqrt(total)


def lift_loop(
    dist: SeparatedDistribution,
    path: PiecewisePath,
    z0: Sequence[complex] | None = None,
    guard: LiftGuard | None = None,
    tol: float = 1e-12,
) -> np.ndarray:
    """Endpoint of the lifted path over `path` starting at fiber point z0.

    Pure quadrature: each segment contributes
    int_0^1 w_j(gamma(t)) . gamma'(t) dt, accumulated per fiber coordinate
    with absolute tolerance `tol` per segment.
    """
    z = np.zeros(dist.N, dtype=complex) if z0 is None else np.asarray(z0, dtype=complex)
    if z.shape != (dist.N,):
        raise ValueError(f"fiber point must have {dist.N} coordinates")
    if guard is not None:
        sup = path.sup_abs()
        if sup > guard.base_radius * (1 + 1e-12):
            raise GuardViolation(
                f"path reaches |x| = {sup:.6g}, outside declared base radius {guard.base_radius}"
            )
        kb = omega_sup_bound(dist, guard.base_radius)
        reach = float(np.linalg.norm(z)) + kb * path.length()
        if reach >= guard.fiber_radius:
            raise GuardViolation(
                f"a-priori fiber reach {reach:.6g} exceeds declared radius {guard.fiber_radius}"
            )
    comps = [[p for p in w.components] for w in dist.omega]
    for seg in path.segments:
        def integrand(t: float) -> np.ndarray:
            x = seg.point(t)
            v = seg.velocity(t)
            out = np.empty(dist.N, dtype=complex)
            for j in range(dist.N):
                acc = 0j
                for i in range(dist.M):
                    p = comps[j][i]
                    if p.terms:
                        acc += p.eval_complex(x) * v[i]
                out[j] = acc
            return out

        delta, _err = quad_vec(integrand, 0.0, 1.0, epsabs=tol, epsrel=1e-10)
        z = z + delta
    return z


# ---------------------------------------------------------------------------
# products of Legendrian fields


def contact_distribution(m: int = 1) -> SeparatedDistribution:
    """dz = sum_j (y_j dx_j - x_j dy_j) on C^{2m+1}, variables ordered
    (x_1, y_1, ..., x_m, y_m, z)."""
    if m < 1:
        raise ValueError("need at least one (x, y) pair")
    nv = 2 * m
    comps = []
    for j in range(m):
        comps.append(SparsePoly.variable(nv, 2 * j + 1))      # y_j  (dx_j slot)
        comps.append(-SparsePoly.variable(nv, 2 * j))         # -x_j (dy_j slot)
    return SeparatedDistribution([OneForm(comps)])


def legendrian_product(Z3: LiftedField, m: int) -> tuple[list[LiftedField], SeparatedDistribution]:
    """Spread one Legendrian field over m disjoint (x_j, y_j) pairs.

    Z3 must be a lifted field of the one-pair contact system; the result is
    m pairwise commuting lifted fields of the m-pair contact system, the
    j-th acting on (x_j, y_j) and pushing z by y_j A(x_j, y_j) - x_j B(x_j, y_j).
    """
    d3 = Z3.distribution
    if d3.M != 2 or d3.N != 1:
        raise ValueError("Z3 must live over one (x, y) pair")
    A, B = Z3.base.components
    expected = contact_distribution(1)
    want = contract(expected.omega[0], Z3.base)
    if d3.omega[0].components != expected.omega[0].components or Z3.z_components[0] != want:
        raise ValueError("Z3 is not tangent to the one-pair contact system")
    if m < 1:
        raise ValueError("m must be positive")
    dist = contact_distribution(m)
    nv = 2 * m
    fields = []
    for j in range(m):
        pos = [2 * j, 2 * j + 1]
        comps = [SparsePoly.zero(nv) for _ in range(nv)]
        comps[2 * j] = A.embed(nv, pos)
        comps[2 * j + 1] = B.embed(nv, pos)
        fields.append(lift_vector_field(dist, PolyVectorField(comps)))
    return fields, dist
