r"""Return displacements of torus loops, exactly.

A loop t |-> (y_1 e^{2 pi i m_1 t}, ..., y_M e^{2 pi i m_M t}) with one
positive winding m_a > 0 and all other windings negative bounds a disc
inside the torus |x_l| = |y_l|, and the fiber displacement of its lift is
the integral of the curvature two-form over that disc.  Each basis
two-form x^K dx_i ^ dx_j integrates in closed form: the result vanishes
unless a is one of {i, j} and the winding vector is orthogonal to
L = K + e_i + e_j, and otherwise contributes

    (2 pi i / (k_a + 1)) * (m_j if i == a else -m_i) * y^L.

Summing over the coefficient table gives the return series
rho(y) = sum_L a_L y^L with exact coefficients a_L carrying one factor of
2 pi i.  The same weights, read backwards, let one recover coefficient
vectors from measured displacement coefficients; that inverse is what the
synthesis pipeline drives.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .distribution import CoefficientTable
from .exact import (
    GaussianRational,
    MultiIndex,
    TwoPiPower,
    exact_solve,
    matrix_rank,
    mi_add,
    mi_dot,
    unit_index,
)
from .forms import TwoForm

__all__ = [
    "ElementaryVector",
    "FamilyMonomial",
    "ReturnSeries",
    "disc_monomial_integral",
    "elementary_disc_integral",
    "return_series",
    "weight_vector",
    "monomial_family",
    "elementary_basis_for",
    "recover_coefficients",
]


class ElementaryVector:
    """Integer winding vector with a single expanding axis.

    powers[axis] > 0 and every other entry is < 0; such vectors are exactly
    the windings whose torus loop bounds a disc with one expanding
    coordinate and contracting remaining coordinates.
    """

    __slots__ = ("powers", "axis")

    def __init__(self, powers: Sequence[int], axis: int):
        powers = tuple(int(p) for p in powers)
        if not 0 <= axis < len(powers):
            raise ValueError("axis out of range")
        if powers[axis] <= 0:
            raise ValueError("axis winding must be positive")
        if any(p >= 0 for k, p in enumerate(powers) if k != axis):
            raise ValueError("off-axis windings must be negative")
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "axis", axis)

    def __setattr__(self, name, value):
        raise AttributeError("ElementaryVector is immutable")

    @property
    def M(self) -> int:
        return len(self.powers)

    def dot(self, L: Sequence[int]) -> int:
        return mi_dot(self.powers, L)

    def drop_axis(self) -> tuple:
        """The winding with the axis coordinate removed (used for the
        determinant identity of weight matrices)."""
        return tuple(p for k, p in enumerate(self.powers) if k != self.axis)

    def __eq__(self, other):
        if not isinstance(other, ElementaryVector):
            return NotImplemented
        return self.powers == other.powers and self.axis == other.axis

    def __hash__(self):
        return hash((self.powers, self.axis))

    def __repr__(self):
        return f"ElementaryVector({self.powers}, axis={self.axis})"


class FamilyMonomial(NamedTuple):
    """One slot of the degree-L coefficient family: x^K dx_i ^ dx_j.

    Slots with a negative entry in K do not correspond to an actual
    monomial; they carry coefficient zero and are flagged valid=False.
    """

    K: MultiIndex
    i: int
    j: int
    valid: bool


def disc_monomial_integral(p: int, q: int) -> TwoPiPower:
    """Integral of w^p conj(w)^q dw ^ d(conj w) over the unit disc:
    -(2 pi i) / (p + 1) when p == q, else 0."""
    if p < 0 or q < 0:
        raise ValueError("exponents must be nonnegative")
    if p != q:
        return TwoPiPower(0)
    return TwoPiPower(GaussianRational(Fraction(-1, p + 1)), 1)


def elementary_disc_integral(
    K: MultiIndex, i: int, j: int, ev: ElementaryVector
) -> tuple[TwoPiPower, MultiIndex]:
    """Integral of x^K dx_i ^ dx_j over the disc bounded by the ev-loop.

    Returns (coefficient, L) with L = K + e_i + e_j, the integral being
    coefficient * y^L for base point y.  Zero unless the expanding axis is
    one of {i, j} and ev . L == 0.
    """
    M = ev.M
    K = tuple(K)
    if len(K) != M or any(k < 0 for k in K):
        raise ValueError("bad exponent vector")
    if not 0 <= i < j < M:
        raise ValueError("need 0 <= i < j < M")
    L = mi_add(mi_add(K, unit_index(M, i)), unit_index(M, j))
    a = ev.axis
    if a not in (i, j) or ev.dot(L) != 0:
        return TwoPiPower(0), L
    if i == a:
        num = ev.powers[j]
    else:
        num = -ev.powers[i]
    coeff = GaussianRational(Fraction(num, K[a] + 1))
    return TwoPiPower(coeff, 1), L


class ReturnSeries:
    """Exact displacement series of a torus-loop family.

    coefficients maps L -> tuple of N exact values (one per fiber
    coordinate), each carrying a single factor of 2 pi i; only L with
    ev . L == 0 appear, and only up to the truncation order.
    """

    __slots__ = ("ev", "order", "num_z", "coefficients")

    def __init__(self, ev: ElementaryVector, order: int, num_z: int,
                 coefficients: dict):
        self.ev = ev
        self.order = order
        self.num_z = num_z
        self.coefficients = coefficients

    def coefficient(self, L: MultiIndex) -> tuple:
        return self.coefficients.get(tuple(L), (TwoPiPower(0),) * self.num_z)

    def evaluate(self, y: Sequence[complex]) -> np.ndarray:
        """Numeric displacement at base point y (truncated sum)."""
        y = np.asarray(y, dtype=complex)
        out = np.zeros(self.num_z, dtype=complex)
        for L, vec in self.coefficients.items():
            mono = complex(np.prod(y ** np.asarray(L)))
            for n, c in enumerate(vec):
                out[n] += c.to_complex() * mono
        return out

    def __repr__(self):
        return (f"ReturnSeries(ev={self.ev!r}, order={self.order}, "
                f"terms={len(self.coefficients)})")


def _as_table(curvature) -> CoefficientTable:
    if isinstance(curvature, CoefficientTable):
        return curvature
    if isinstance(curvature, TwoForm):
        entries = {key: (c,) for key, c in curvature.coeffs.items()}
        return CoefficientTable(curvature.num_vars, 1, entries)
    raise TypeError("expected a CoefficientTable or TwoForm")


def return_series(curvature, ev: ElementaryVector, order: int) -> ReturnSeries:
    """Assemble the displacement series of the ev-loop family from a
    curvature coefficient table, truncated at total degree `order`."""
    table = _as_table(curvature)
    if table.M != ev.M:
        raise ValueError("winding vector dimension mismatch")
    acc: dict[MultiIndex, list] = {}
    for (K, i, j), cvec in table.items():
        w, L = elementary_disc_integral(K, i, j, ev)
        if not w or sum(L) > order:
            continue
        slot = acc.get(L)
        if slot is None:
            slot = [TwoPiPower(0)] * table.N
            acc[L] = slot
        for n, c in enumerate(cvec):
            if c:
                slot[n] = slot[n] + w * c
    out = {L: tuple(vec) for L, vec in acc.items() if any(vec)}
    return ReturnSeries(ev, order, table.N, out)


def monomial_family(L: MultiIndex, axis: int) -> list[FamilyMonomial]:
    """The M-1 basis two-forms of total degree |L| whose disc integrals can
    meet y^L: x^{L-e_i-e_axis} dx_i dx_axis for i < axis, then
    x^{L-e_axis-e_j} dx_axis dx_j for j > axis, in that order."""
    M = len(L)
    if not 0 <= axis < M:
        raise ValueError("axis out of range")
    fam = []
    for i in range(M):
        if i == axis:
            continue
        a, b = (i, axis) if i < axis else (axis, i)
        K = _lower(L, a, b)
        fam.append(FamilyMonomial(K, a, b, all(k >= 0 for k in K)))
    return fam


def _lower(L: MultiIndex, i: int, j: int) -> MultiIndex:
    # L - e_i - e_j, entries allowed to go negative (invalid slots)
    out = list(L)
    out[i] -= 1
    out[j] -= 1
    return tuple(out)


def weight_vector(L: MultiIndex, ev: ElementaryVector) -> list[TwoPiPower]:
    """Disc-integral weights of the degree-L family for the ev-loop, in
    family order: (2 pi i / l_axis) * (-m_1, ..., -m_{axis-1},
    m_{axis+1}, ..., m_M)."""
    a = ev.axis
    if len(L) != ev.M:
        raise ValueError("dimension mismatch")
    la = L[a]
    if la <= 0:
        raise ValueError("the axis entry of L must be positive")
    out = []
    for p in range(ev.M):
        if p == a:
            continue
        num = -ev.powers[p] if p < a else ev.powers[p]
        out.append(TwoPiPower(GaussianRational(Fraction(num, la)), 1))
    return out


def elementary_basis_for(L: MultiIndex, axis: int) -> list[ElementaryVector]:
    """A deterministic family of M-1 independent windings, all with
    expanding coordinate `axis` and all orthogonal to L.

    Needs l_axis > 0 and at least one other positive entry.  Row t of the
    integer seed is (t^0, t^1, ..., t^{M-2}) placed on the non-axis slots
    (always independent), scaled by the least factor making the axis
    winding an integer.
    """
    M = len(L)
    if not 0 <= axis < M:
        raise ValueError("axis out of range")
    la = L[axis]
    if la <= 0:
        raise ValueError("the axis entry of L must be positive")
    rest = [p for p in range(M) if p != axis]
    if all(L[p] <= 0 for p in rest):
        raise ValueError("need a positive entry away from the axis")
    out = []
    for t in range(1, M):
        seed = [t**r for r in range(M - 1)]
        dot = sum(s * L[p] for s, p in zip(seed, rest))
        scale = la // math.gcd(dot, la)
        powers = [0] * M
        for s, p in zip(seed, rest):
            powers[p] = -scale * s
        powers[axis] = scale * dot // la
        out.append(ElementaryVector(powers, axis))
    # Vandermonde seeds guarantee independence; keep the certificate cheap
    assert matrix_rank([[GaussianRational(p) for p in ev.drop_axis()] for ev in out]) == M - 1
    return out


def recover_coefficients(
    a_values: Sequence[Sequence[TwoPiPower]],
    L: MultiIndex,
    axis: int,
    basis: Sequence[ElementaryVector] | None = None,
) -> list[list[GaussianRational]]:
    """Invert the weight map: given the degree-L displacement coefficients
    a_L(m) in C^N for M-1 independent windings m (default: the
    deterministic basis), return the coefficient vectors of the degree-L
    family monomials, in family order.  Slots flagged invalid must come
    out zero when the data really arises from a polynomial table.
    """
    if basis is None:
        basis = elementary_basis_for(L, axis)
    M = len(L)
    if len(basis) != M - 1 or len(a_values) != M - 1:
        raise ValueError("need M-1 windings and M-1 measured coefficients")
    num_z = len(a_values[0])
    # strip the common 2 pi i factor: row r, column s over family slots
    rows = []
    rhs_rows = []
    for ev, avec in zip(basis, a_values):
        if ev.axis != axis:
            raise ValueError("windings must share the family axis")
        rows.append([w.coeff for w in weight_vector(L, ev)])
        cur = []
        for a in avec:
            if a.power not in (0, 1):
                raise ValueError("coefficient data must carry one 2 pi i factor")
            cur.append(a.coeff)
        rhs_rows.append(cur)
    cols = []
    for n in range(num_z):
        cols.append(exact_solve(rows, [r[n] for r in rhs_rows]))
    # transpose back to one vector in C^N per family slot
    return [[cols[n][s] for n in range(num_z)] for s in range(M - 1)]
