r"""Distributions with separated variables and their first integrals.

The input datum is a family of polynomial one-forms w_1, ..., w_N in the
base variables x_1, ..., x_M, read as the Pfaffian system
dz_j = w_j(x).  The span W of all exterior-derivative coefficient vectors
(one vector in C^N per basis two-form x^K dx_i ^ dx_j) controls
everything: its codimension kappa counts independent first integrals, and
any exact left annihilator T of W produces the affine integrals
h_l(x, z) = T_l . z - g_l(x) with dg_l = T_l . w.

The bracket test recomputes W dynamically from iterated commutators of the
coordinate lifts, which gives an independent route to the same span.
"""

from __future__ import annotations

from typing import Sequence

from .exact import (
    GaussianRational,
    MultiIndex,
    SparsePoly,
    ZERO,
    exact_nullspace,
    mi_add,
    row_space_basis,
    same_row_space,
    unit_index,
)
from .forms import (
    OneForm,
    PolyVectorField,
    commutator,
    exterior_derivative,
    poincare_primitive,
)

__all__ = [
    "SeparatedDistribution",
    "CoefficientTable",
    "FirstIntegralBasis",
    "coefficient_table",
    "span_and_codim",
    "first_integral",
    "is_first_integral",
    "bracket_span",
]


class SeparatedDistribution:
    """Pfaffian system dz_j = w_j(x), j = 1..N, over x in C^M (M >= 2)."""

    __slots__ = ("M", "N", "omega", "max_degree")

    def __init__(self, omega: Sequence[OneForm]):
        if not omega:
            raise ValueError("need at least one one-form")
        M = omega[0].num_vars
        if M < 2:
            raise ValueError("base dimension must be at least 2")
        for w in omega:
            if w.num_vars != M:
                raise ValueError("all forms must live in the same base variables")
        self.M = M
        self.N = len(omega)
        self.omega = list(omega)
        self.max_degree = max(0, max(w.total_degree() for w in omega))

    @property
    def num_ambient(self) -> int:
        return self.M + self.N

    def coordinate_lifts(self) -> list[PolyVectorField]:
        """The M spanning fields X_i = d/dx_i + sum_j w_{j,i}(x) d/dz_j,
        as polynomial fields in the ambient variables (x_1..x_M, z_1..z_N)."""
        n = self.num_ambient
        lifts = []
        xpos = list(range(self.M))
        for i in range(self.M):
            comps = [SparsePoly.zero(n) for _ in range(n)]
            comps[i] = SparsePoly.constant(n, 1)
            for j, w in enumerate(self.omega):
                comps[self.M + j] = w.components[i].embed(n, xpos)
            lifts.append(PolyVectorField(comps))
        return lifts

    def __repr__(self):
        return f"SeparatedDistribution(M={self.M}, N={self.N}, deg<={self.max_degree})"


class CoefficientTable:
    """Exterior-derivative coefficients of all N forms, stacked.

    entries maps (K, i, j) with i < j to a tuple of N exact scalars: the
    coefficient of x^K dx_i ^ dx_j in dw_1, ..., dw_N.  All-zero vectors
    are not stored.
    """

    __slots__ = ("M", "N", "entries")

    def __init__(self, M: int, N: int, entries: dict | None = None):
        self.M = M
        self.N = N
        self.entries: dict[tuple, tuple] = dict(entries or {})

    def vectors(self) -> list[list[GaussianRational]]:
        """The coefficient vectors in a deterministic order (by degree,
        then multi-index, then form pair)."""
        keys = sorted(self.entries, key=lambda k: (sum(k[0]), k[0], k[1], k[2]))
        return [list(self.entries[k]) for k in keys]

    def items(self):
        return self.entries.items()

    def __len__(self):
        return len(self.entries)


def coefficient_table(dist: SeparatedDistribution) -> CoefficientTable:
    derivatives = [exterior_derivative(w) for w in dist.omega]
    keys = set()
    for dw in derivatives:
        keys.update(dw.coeffs)
    entries = {}
    for key in keys:
        K, i, j = key
        vec = tuple(dw.coeffs.get(key, ZERO) for dw in derivatives)
        if any(vec):
            entries[key] = vec
    return CoefficientTable(dist.M, dist.N, entries)


def span_and_codim(table: CoefficientTable) -> tuple[list[list[GaussianRational]], int]:
    """Basis of the coefficient span inside C^N and its codimension."""
    basis = row_space_basis(table.vectors())
    return basis, table.N - len(basis)


class FirstIntegralBasis:
    """A complete independent family of affine first integrals.

    t_rows is a kappa x N exact matrix of full row rank annihilating the
    coefficient span; potentials[l] is the base polynomial g_l with
    dg_l = t_rows[l] . w.  The integrals are h_l = t_rows[l] . z - g_l(x).
    """

    __slots__ = ("distribution", "codim", "t_rows", "potentials", "span_basis")

    def __init__(self, distribution, codim, t_rows, potentials, span_basis):
        self.distribution = distribution
        self.codim = codim
        self.t_rows = t_rows
        self.potentials = potentials
        self.span_basis = span_basis

    def integral_polys(self) -> list[SparsePoly]:
        """h_l as polynomials in the ambient variables (x, z)."""
        d = self.distribution
        n = d.num_ambient
        out = []
        for row, g in zip(self.t_rows, self.potentials):
            h = -g.embed(n, list(range(d.M)))
            for l, t in enumerate(row):
                if t:
                    h = h + SparsePoly.monomial(t, unit_index(n, d.M + l))
            out.append(h)
        return out

    def verify(self) -> bool:
        """Exact check that every lift annihilates every integral."""
        lifts = self.distribution.coordinate_lifts()
        for h in self.integral_polys():
            for X in lifts:
                if not X.apply(h).is_zero():
                    return False
        return True


def first_integral(dist: SeparatedDistribution) -> FirstIntegralBasis:
    """Build the complete affine first-integral family of the system.

    The annihilator rows are the exact kernel of the stacked coefficient
    vectors (fraction-free elimination), so T . z - g is exact data; each
    combined form sum_l T_l w_l is closed by construction and its
    potential comes from the radial homotopy.
    """
    table = coefficient_table(dist)
    span_basis, codim = span_and_codim(table)
    t_rows = exact_nullspace(table.vectors(), ncols=dist.N)
    assert len(t_rows) == codim
    potentials = []
    for row in t_rows:
        combo = OneForm.zero(dist.M)
        for t, w in zip(row, dist.omega):
            if t:
                combo = combo + w.scale(t)
        # closedness is guaranteed by the kernel property; primitive raises
        # if that invariant is ever broken
        potentials.append(poincare_primitive(combo))
    return FirstIntegralBasis(dist, codim, t_rows, potentials, span_basis)


def is_first_integral(dist: SeparatedDistribution, p: SparsePoly, q: SparsePoly | None = None) -> bool:
    """Exact test that the rational function p/q (q omitted means q = 1) is
    constant along the distribution: X(p) q - p X(q) == 0 for every
    coordinate lift X."""
    n = dist.num_ambient
    if p.num_vars != n:
        raise ValueError(f"expected a polynomial in {n} ambient variables")
    if q is None:
        q = SparsePoly.constant(n, 1)
    if q.num_vars != n:
        raise ValueError(f"expected a polynomial in {n} ambient variables")
    if q.is_zero():
        raise ValueError("denominator is identically zero")
    for X in dist.coordinate_lifts():
        if not (X.apply(p) * q - p * X.apply(q)).is_zero():
            return False
    return True


def bracket_span(dist: SeparatedDistribution, depth: int | None = None) -> list[list[GaussianRational]]:
    """Span of the z-parts at the origin of iterated commutators.

    Starts from the pairwise brackets of the coordinate lifts and applies
    ad_{X_1}, ..., ad_{X_M} in nondecreasing index order until total order
    `depth` (default: the input degree bound).  Returns a deterministic
    basis of the resulting span in C^N; by the structure of the lifts this
    must reproduce the coefficient span, which is what the dual-route test
    checks.
    """
    if depth is None:
        depth = dist.max_degree
    lifts = dist.coordinate_lifts()
    M, N = dist.M, dist.N
    vectors: list[list[GaussianRational]] = []

    def z_part_at_origin(field: PolyVectorField) -> list[GaussianRational]:
        zero = (0,) * dist.num_ambient
        return [field.components[M + j].coefficient(zero) for j in range(N)]

    # frontier of (last applied index, field); brackets of two z-part-only
    # fields vanish, so only ad_{X_l} of the base lifts ever matters
    frontier: list[tuple[int, PolyVectorField]] = []
    for i in range(M):
        for j in range(i + 1, M):
            Y = commutator(lifts[i], lifts[j])
            frontier.append((0, Y))
            vectors.append(z_part_at_origin(Y))
    for _ in range(depth):
        nxt: list[tuple[int, PolyVectorField]] = []
        for last, Y in frontier:
            for l in range(last, M):
                Z = commutator(lifts[l], Y)
                if Z.is_zero():
                    continue
                nxt.append((l, Z))
                vectors.append(z_part_at_origin(Z))
        frontier = nxt
        if not frontier:
            break
    return row_space_basis([v for v in vectors if any(v)])
