r"""Synthesis of a tangent field whose loop returns fill the fiber.

Given a separated system dz_j = w_j(x), the goal is one polynomial field
Z, tangent to the system, whose flow loops realize enough fiber
displacements to reach every direction of the coefficient span.  The
construction walks through a fixed chart chain:

1. quadratic blow-up x = (t_1, t_1 t_2, ..., t_1 t_M): the curvature
   coefficients transport by an explicit sparse table map;
2. a greedy choice of spanning monomials in the blown-up table, then for
   each one a deterministic family of winding vectors orthogonal to its
   shifted exponent (so the return-series weights can be inverted);
3. a rational field Y = sum_i A_i(t_M) t_i d/dt_i + d/dt_M whose residue
   data is solved exactly: prescribed winding ratios at the first m
   poles, prescribed contraction exponents at the next n, and a free
   block adjusted so Y is flat to order k at each of the m special poles;
4. blow-down to a homogeneous polynomial field X on the base, lift to Z.

Every genericity requirement is certified exactly (determinants,
nonvanishing, separating lines), never assumed.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import NamedTuple, Sequence

from .distribution import (
    CoefficientTable,
    SeparatedDistribution,
    coefficient_table,
    span_and_codim,
)
from .exact import (
    GaussianRational,
    I,
    MultiIndex,
    ONE,
    SimplePoleSum,
    SparsePoly,
    ZERO,
    as_gaussian,
    exact_det,
    exact_nullspace,
    exact_solve,
    matrix_rank,
)
from .forms import PolyVectorField, contract
from .lifting import lift_vector_field

__all__ = [
    "SynthesisError",
    "blowup_coefficients",
    "blowdown_coefficients",
    "shifted_coefficient",
    "spanning_monomials",
    "build_lambda_set",
    "assign_taus",
    "generate_mu",
    "pole_matrix",
    "choose_b",
    "ChosenPoles",
    "separating_direction",
    "solve_nu",
    "NuSolution",
    "RationalAxisField",
    "build_Y",
    "verify_linearization",
    "blow_down",
    "verify_invariance",
    "SynthesisResult",
    "synthesize_Z",
]


class SynthesisError(RuntimeError):
    """A genericity certificate could not be established."""


# ---------------------------------------------------------------------------
# blow-up transport of curvature tables


def blowup_coefficients(table: CoefficientTable) -> CoefficientTable:
    """Transport a curvature table through x = (t_1, t_1 t_2, ..., t_1 t_M).

    Each entry c x^K dx_i ^ dx_j pulls back to at most three sparse
    contributions; the resulting table spans the same subspace of C^N and
    every surviving exponent L obeys l_1 >= l_2 + ... + l_M.
    """
    M, N = table.M, table.N
    acc: dict[tuple, list] = {}

    def add(L, i, j, vec, negate=False):
        key = (tuple(L), i, j)
        slot = acc.get(key)
        if slot is None:
            slot = [ZERO] * N
            acc[key] = slot
        for nidx, c in enumerate(vec):
            slot[nidx] = slot[nidx] - c if negate else slot[nidx] + c

    for (K, i, j), vec in table.items():
        deg = sum(K)
        rest = K[1:]
        if i == 0:
            # dt_1 ^ (t_j dt_1 + t_1 dt_j) keeps only the t_1 dt_1 dt_j part
            add((deg + 1,) + rest, 0, j, vec)
        else:
            add((deg + 2,) + rest, i, j, vec)
            Li = [deg + 1, *rest]
            Li[i] += 1
            add(Li, 0, j, vec)
            Lj = [deg + 1, *rest]
            Lj[j] += 1
            add(Lj, 0, i, vec, negate=True)
    entries = {k: tuple(v) for k, v in acc.items() if any(v)}
    return CoefficientTable(M, N, entries)


def blowdown_coefficients(table: CoefficientTable) -> CoefficientTable:
    """Invert blowup_coefficients on its image.

    Pairs away from the first axis read off directly; pairs (0, q) need
    the directly-read values subtracted back out, since three source
    entries can land on the same transported key.
    """
    M, N = table.M, table.N
    theta = table.entries
    out: dict[tuple, tuple] = {}
    # away from the exceptional axis: theta at ((|K|+2, rest), i, j)
    for (L, i, j), vec in theta.items():
        if i == 0:
            continue
        rest = L[1:]
        k0 = L[0] - 2 - sum(rest)
        if k0 < 0:
            raise SynthesisError("table is not a blow-up transport")
        out[((k0,) + rest, i, j)] = vec

    def direct(K, i, j):
        return out.get((tuple(K), i, j), (ZERO,) * N)

    # candidates for pairs (0, q): every theta key there, plus every spot a
    # direct entry could have contaminated
    candidates = set()
    for (L, i, j), _ in theta.items():
        if i == 0:
            rest = L[1:]
            k0 = L[0] - 1 - sum(rest)
            if k0 >= 0:
                candidates.add(((k0,) + rest, j))
    for (K, i, j), _ in out.items():
        if K[0] >= 1:
            base = (K[0] - 1,)
            for q, bump in ((j, i), (i, j)):
                rest = list(K[1:])
                rest[bump - 1] += 1
                candidates.add((base + tuple(rest), q))
    for K, q in candidates:
        rest = K[1:]
        L0 = (K[0] + 1 + sum(rest),) + rest
        vec = list(theta.get((L0, 0, q), (ZERO,) * N))
        for p in range(1, M):
            if p == q or rest[p - 1] < 1:
                continue
            lowered = list(rest)
            lowered[p - 1] -= 1
            src = (K[0] + 1,) + tuple(lowered)
            if p < q:
                cvec = direct(src, p, q)
                vec = [a - c for a, c in zip(vec, cvec)]
            else:
                cvec = direct(src, q, p)
                vec = [a + c for a, c in zip(vec, cvec)]
        if any(vec):
            out[(tuple(K), 0, q)] = tuple(vec)
    return CoefficientTable(M, N, {k: v for k, v in out.items() if any(v)})


def shifted_coefficient(
    table: CoefficientTable, L: MultiIndex, i: int, j: int, tau
) -> list[GaussianRational]:
    """Coefficient of t^L dt_i ^ dt_j after translating the last
    coordinate by tau: a finite binomial sum down the last exponent."""
    L = tuple(L)
    tau = as_gaussian(tau)
    out = [ZERO] * table.N
    prefix, last = L[:-1], L[-1]
    for (K, a, b), vec in table.items():
        if (a, b) != (i, j) or K[:-1] != prefix or K[-1] < last:
            continue
        w = as_gaussian(math.comb(K[-1], last)) * tau ** (K[-1] - last)
        for nidx, c in enumerate(vec):
            out[nidx] = out[nidx] + c * w
    return out


# ---------------------------------------------------------------------------
# spanning monomials and winding families


def spanning_monomials(table: CoefficientTable) -> list[tuple]:
    """Greedy minimal list of table keys whose coefficient vectors span
    the same subspace, scanned in (degree, exponent, pair) order."""
    keys = sorted(table.entries, key=lambda k: (sum(k[0]), k[0], k[1], k[2]))
    chosen: list[tuple] = []
    rows: list[list] = []
    rank = 0
    for key in keys:
        rows.append(list(table.entries[key]))
        new_rank = matrix_rank(rows)
        if new_rank > rank:
            chosen.append(key)
            rank = new_rank
        else:
            rows.pop()
    return chosen


def build_lambda_set(spanning: Sequence[tuple]) -> list[tuple]:
    """For each spanning monomial (L, i, j): the deterministic windings
    with expanding axis i, orthogonal to L + e_i + e_j.  Returns
    [(key, (winding, ...)), ...] preserving the spanning order."""
    from .returns import elementary_basis_for

    out = []
    for L, i, j in spanning:
        target = list(L)
        target[i] += 1
        target[j] += 1
        out.append(((L, i, j), tuple(elementary_basis_for(tuple(target), i))))
    return out


class PoleAssignment(NamedTuple):
    """One head pole: its translation amount and the winding whose
    component ratios the residues must realize there."""

    tau: GaussianRational
    winding: object  # ElementaryVector
    ratios: tuple  # (lambda_i / lambda_M for the first M-1 coordinates)


def assign_taus(lambda_set: Sequence[tuple], d: int) -> list[PoleAssignment]:
    """Give every winding d+1 distinct integer translation amounts
    (globally distinct: 1, 2, 3, ...), enough to pin down shifted
    coefficients of degree <= d."""
    out = []
    tau = 1
    for _key, windings in lambda_set:
        for ev in windings:
            last = ev.powers[-1]
            ratios = tuple(
                GaussianRational(Fraction(p, last)) for p in ev.powers[:-1]
            )
            for _ in range(d + 1):
                out.append(PoleAssignment(as_gaussian(tau), ev, ratios))
                tau += 1
    return out


# ---------------------------------------------------------------------------
# contraction exponents


def _squarefree(count: int) -> list[int]:
    out = []
    q = 2
    while len(out) < count:
        if all(q % (p * p) for p in range(2, int(math.isqrt(q)) + 1)):
            out.append(q)
        q += 1
    return out


# Scales of the exponent construction, tuned empirically against the
# subgroup probe (see the probe-driven tests): the multipliers
# exp(2 pi i mu) must contract (so every orbit falls into the origin)
# yet mesh finely enough that words of length <= 60 reach any target in
# the unit-shell to ~0.008.  The tension: the real spread sets the
# coarse phase step, the mixed column's fractional walk fills between,
# and every unit of imaginary mass eats word budget when a product has
# to climb back to |w| ~ 1.  Hence a tiny uniform contraction, a
# moderate phase denominator, and scaled-down irrational weights.
MU_CONTRACTION = Fraction(1, 400)
MU_SPREAD = Fraction(1, 64)
MU_IMAG_SPREAD = Fraction(3, 400)
MU_WEIGHT_SCALES = (Fraction(1, 8), Fraction(1, 16))
# The sqrt(q) weights are 30-digit truncations, so the Z-independence
# behind density is probabilistic, not certified.
MU_WEIGHTS_EXACT = False


def generate_mu(
    M: int,
    contraction: Fraction = MU_CONTRACTION,
    spread: Fraction = MU_SPREAD,
    imag_spread: Fraction = MU_IMAG_SPREAD,
) -> tuple:
    """Exponent matrix of the contraction poles: M-1 rows, 2(M-1)+1
    columns.

    Column 2l perturbs row l by a real unit of `spread`, column 2l+1 by
    an imaginary unit of `imag_spread`, on top of the uniform
    i*contraction; together they are a real basis.  The last column is
    a combination with quadratic-irrational weights sqrt(2)/8,
    sqrt(3)/16, sqrt(5)/8, ... (fixed 30-digit truncations, scales
    alternating per MU_WEIGHT_SCALES), making the multiplier subgroup
    mesh fine rather than lattice-coarse.  Truncation keeps the
    subgroup finitely generated over Q, so density holds only down to
    the scale the weights resolve; the probe measures the usable scale
    empirically.  Every column keeps Im mu_1j > 0 and
    Im(mu_1j + mu_ij) > 0, which is what makes all multiplier products
    contract.
    """
    if M < 2:
        raise ValueError("need at least two base coordinates")
    if contraction <= 0 or spread <= 0 or imag_spread <= 0:
        raise ValueError("contraction and both spreads must be positive")
    rows = M - 1
    cols: list[list[GaussianRational]] = []
    for l in range(rows):
        real_bump = [
            GaussianRational(spread if i == l else 0, contraction) for i in range(rows)
        ]
        imag_bump = [
            GaussianRational(0, contraction + (imag_spread if i == l else 0))
            for i in range(rows)
        ]
        cols.append(real_bump)
        cols.append(imag_bump)
    weights = [
        Fraction(math.isqrt(q * 10**60), 10**30) * MU_WEIGHT_SCALES[idx % 2]
        for idx, q in enumerate(_squarefree(2 * rows))
    ]
    mixed = [ZERO] * rows
    for w, col in zip(weights, cols):
        gw = as_gaussian(w)
        mixed = [acc + gw * entry for acc, entry in zip(mixed, col)]
    cols.append(mixed)
    mu = tuple(tuple(cols[j][i] for j in range(len(cols))) for i in range(rows))
    for j in range(len(cols)):
        assert mu[0][j].im > 0
        assert all((mu[0][j] + mu[i][j]).im > 0 for i in range(1, rows))
    return mu


# ---------------------------------------------------------------------------
# pole placement with certificates


def pole_matrix(b: Sequence[GaussianRational], m: int, k: int) -> list[list[GaussianRational]]:
    """Rows (l, a) for l < m, a = 1..k; entry j is -1/(b_j - b_l)^a and 0
    at j = l.  A residue row nu with F nu = 0 makes the corresponding
    axis flat to order k at each of the first m poles."""
    rows = []
    for l in range(m):
        for a in range(1, k + 1):
            row = []
            for j, bj in enumerate(b):
                if j == l:
                    row.append(ZERO)
                else:
                    row.append(-((bj - b[l]) ** -a))
            rows.append(row)
    return rows


class ChosenPoles(NamedTuple):
    b: tuple
    F: list
    m: int
    n: int
    k: int
    submatrices_checked: int
    det_J: GaussianRational
    det_J1: GaussianRational


def choose_b(
    m: int,
    k: int,
    n: int,
    head: Sequence[GaussianRational],
    seed: int = 0,
    max_attempts: int = 32,
) -> ChosenPoles:
    """Pick the pole list: the m prescribed translation amounts up front,
    then (k+1)m + n + 1 - m random real rationals, certified so that

    * every km x km minor of F avoiding the first m columns is nonzero
      (kernel vectors of the free block have full support), and
    * the ones-row bordered free block J1 is nonsingular (the kernel
      vector has nonzero coordinate sum).

    Failures resample the tail, up to max_attempts draws.
    """
    if len(head) != m:
        raise ValueError("head must supply one translation per special pole")
    head = [as_gaussian(t) for t in head]
    if len({(t.re, t.im) for t in head}) != m:
        raise ValueError("translations must be distinct")
    total = (k + 1) * m + n + 1
    km = k * m
    rng = random.Random(seed)
    for _ in range(max_attempts):
        seen = {(t.re, t.im) for t in head}
        tail = []
        while len(tail) < total - m:
            cand = Fraction(rng.randint(-(10**4), 10**4), rng.randint(1, 10**4))
            if (cand, Fraction(0)) in seen:
                continue
            seen.add((cand, Fraction(0)))
            tail.append(as_gaussian(cand))
        b = tuple(head) + tuple(tail)
        F = pole_matrix(b, m, k)
        checked = 0
        ok = True
        for cols in itertools.combinations(range(m, total), km):
            sub = [[row[c] for c in cols] for row in F]
            checked += 1
            if not exact_det(sub):
                ok = False
                break
        if not ok:
            continue
        free0 = total - (km + 1)
        det_j = exact_det([[row[c] for c in range(free0, total - 1)] for row in F])
        ones = [ONE] * (km + 1)
        j1 = [ones] + [[row[c] for c in range(free0, total)] for row in F]
        det_j1 = exact_det(j1)
        if det_j and det_j1:
            return ChosenPoles(b, F, m, n, k, checked, det_j, det_j1)
    raise SynthesisError(f"no certified pole set within {max_attempts} draws")


# ---------------------------------------------------------------------------
# residue solve


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def separating_direction(points: Sequence[GaussianRational]):
    """A rational direction d with 1 strictly on one side of the line
    R*d and all the points strictly on the other, or None.  Scans 360
    rationalized angles; all side tests are exact."""
    for deg in range(360):
        th = math.radians(deg)
        d = GaussianRational(
            Fraction(math.cos(th)).limit_denominator(10**6),
            Fraction(math.sin(th)).limit_denominator(10**6),
        )
        side_one = _sign(-d.im)
        if side_one == 0:
            continue
        good = True
        for w in points:
            side = _sign(w.im * d.re - w.re * d.im)
            if side == 0 or side == side_one:
                good = False
                break
        if good:
            return d
    return None


class NuSolution(NamedTuple):
    nu: tuple  # one residue row per axis, length = number of poles
    s: int  # the final imaginary push along the kernel direction
    v_star: tuple  # kernel of the free block (real rational, full support)
    separating: dict  # column -> certified direction, all columns >= m
    nu_tilde: tuple  # residues at infinity, all certified nonzero


def solve_nu(
    poles: ChosenPoles,
    assignments: Sequence[PoleAssignment],
    mu: Sequence[Sequence[GaussianRational]],
    max_doublings: int = 64,
) -> NuSolution:
    """Solve the residue rows exactly.

    Row i is prescribed on the first m columns (winding ratios) and the
    next n (contraction exponents), and solved on the free block so that
    F nu_i = 0.  The one-parameter slack is pushed along i * v_star,
    doubling s until every sign, nonvanishing, and separating-line
    requirement is met exactly; each requirement eventually holds because
    v_star has full support and nonzero sum.
    """
    m, n, k = poles.m, poles.n, poles.k
    km = k * m
    total = len(poles.b)
    free0 = m + n
    if free0 + km + 1 != total:
        raise ValueError("pole layout mismatch")
    if len(assignments) != m:
        raise ValueError("need one assignment per special pole")
    axes = len(mu)
    F = poles.F
    F_free = [row[free0:] for row in F]
    kernel = exact_nullspace(F_free, ncols=km + 1)
    if len(kernel) != 1:
        raise SynthesisError("free block does not have a one-dimensional kernel")
    v_star = kernel[0]
    if any(v.im for v in v_star) or any(not v for v in v_star):
        raise SynthesisError("kernel vector must be real with full support")
    if not sum((v.re for v in v_star), Fraction(0)):
        raise SynthesisError("kernel vector has zero coordinate sum")

    prescribed = []
    particular = []
    for i in range(axes):
        p = [assignments[l].ratios[i] for l in range(m)]
        p += [mu[i][j] for j in range(n)]
        prescribed.append(p)
        if km:
            rhs = []
            for row in F:
                acc = ZERO
                for j in range(free0):
                    if row[j] and p[j]:
                        acc = acc + row[j] * p[j]
                rhs.append(-acc)
            w = exact_solve(F_free, rhs)
        else:
            w = [ZERO] * (km + 1)
        particular.append(w)

    s = 1
    for _ in range(max_doublings):
        push = [I * (v * s) for v in v_star]
        nu = tuple(
            tuple(prescribed[i]) + tuple(w + p for w, p in zip(particular[i], push))
            for i in range(axes)
        )
        certified = _certify_nu(nu, v_star, m, free0)
        if certified is not None:
            separating, nu_tilde = certified
            for i in range(axes):
                for row in F:
                    acc = ZERO
                    for rj, nj in zip(row, nu[i]):
                        if rj and nj:
                            acc = acc + rj * nj
                    if acc:
                        raise SynthesisError("residue row violates flatness exactly")
            return NuSolution(nu, s, tuple(v_star), separating, nu_tilde)
        s *= 2
    raise SynthesisError(f"sign conditions unmet after {max_doublings} doublings")


def _certify_nu(nu, v_star, m, free0):
    """All exact side conditions for a candidate residue matrix, or None.

    * free-block entries have imaginary sign matching the kernel vector,
    * every entry is nonzero,
    * the residues at infinity are nonzero,
    * each column beyond the first m admits a line separating 1 from the
      first row's entry and its sums with the other rows.
    """
    axes = len(nu)
    total = len(nu[0])
    for i in range(axes):
        for f, v in enumerate(v_star):
            if _sign(nu[i][free0 + f].im) != _sign(v.re):
                return None
        if any(not x for x in nu[i]):
            return None
    nu_tilde = []
    for i in range(axes):
        acc = ZERO
        for x in nu[i]:
            acc = acc + x
        nu_tilde.append((-ONE if i == 0 else ONE) - acc)
    if any(not x for x in nu_tilde):
        return None
    separating = {}
    for j in range(m, total):
        pts = [nu[0][j]] + [nu[0][j] + nu[i][j] for i in range(1, axes)]
        d = separating_direction(pts)
        if d is None:
            return None
        separating[j] = d
    return separating, tuple(nu_tilde)


# ---------------------------------------------------------------------------
# the rational field, its certificates, and the blow-down


class RationalAxisField:
    """sum_i A_i(t_last) t_i d/dt_i + d/dt_last with A_i simple pole sums.

    Linear in each axis coordinate, rational in the last; the last
    coordinate moves at unit speed, so loops in it act linearly on the
    axes.
    """

    __slots__ = ("b", "nu", "pole_sums")

    def __init__(self, b: Sequence, nu: Sequence[Sequence]):
        self.b = tuple(as_gaussian(x) for x in b)
        self.nu = tuple(tuple(as_gaussian(x) for x in row) for row in nu)
        self.pole_sums = tuple(SimplePoleSum(0, self.b, row) for row in self.nu)

    @property
    def num_axes(self) -> int:
        return len(self.nu)

    @property
    def num_vars(self) -> int:
        return len(self.nu) + 1

    def velocity(self, t: Sequence[complex]):
        if len(t) != self.num_vars:
            raise ValueError("point has wrong dimension")
        u = t[-1]
        out = [ps.eval_complex(u) * ti for ps, ti in zip(self.pole_sums, t)]
        out.append(1.0 + 0j)
        return out

    def __repr__(self):
        return f"RationalAxisField(axes={self.num_axes}, poles={len(self.b)})"


def build_Y(b: Sequence, nu: Sequence[Sequence]) -> RationalAxisField:
    return RationalAxisField(b, nu)


def verify_linearization(
    Y: RationalAxisField, pole: int, k: int, certified: int
) -> tuple:
    """Exactly verify that Y is flat to order k at the given head pole and
    return the multipliers of its linear part, (nu_1l, ..., nu_(M-1)l, 1).

    Only the first `certified` poles carry the flatness certificate;
    asking beyond them is refused rather than reported as a failure.
    """
    if not 0 <= pole < certified:
        raise ValueError("linearization is only certified at the head poles")
    bl = Y.b[pole]
    for i, row in enumerate(Y.nu):
        for a in range(1, k + 1):
            acc = ZERO
            for j, bj in enumerate(Y.b):
                if j == pole:
                    continue
                acc = acc + row[j] * (bj - bl) ** -a
            if acc:
                raise SynthesisError(
                    f"axis {i} is not flat to order {a} at pole {pole}"
                )
    return tuple(row[pole] for row in Y.nu) + (ONE,)


def blow_down(b: Sequence, nu: Sequence[Sequence]) -> tuple[PolyVectorField, SparsePoly]:
    """The polynomial field X on the base induced by the rational axis
    field, plus its invariant hypersurface polynomial.

    With P = prod_j (x_M - b_j x_1) and Q_i = sum_j nu_ij prod_{l != j}:
    X = Q_1 x_1 d_1 + sum_{i=2}^{M-1} (Q_1 + Q_i) x_i d_i
      + (Q_1 x_M + P) d_M, homogeneous of degree = number of poles, and
    S = x_1 ... x_{M-1} P satisfies X(S) in (S).
    """
    nu = [list(row) for row in nu]
    M = len(nu) + 1
    b = [as_gaussian(x) for x in b]
    x0 = SparsePoly.variable(M, 0)
    xlast = SparsePoly.variable(M, M - 1)
    factors = [xlast - x0.scale(bj) for bj in b]
    npoles = len(factors)
    # prefix[j] = f_0 ... f_{j-1}, suffix[j] = f_j ... f_{end}
    prefix = [SparsePoly.constant(M, 1)]
    for f in factors:
        prefix.append(prefix[-1] * f)
    suffix = [SparsePoly.constant(M, 1)]
    for f in reversed(factors):
        suffix.append(suffix[-1] * f)
    suffix.reverse()
    P = prefix[-1]
    partial = [prefix[j] * suffix[j + 1] for j in range(npoles)]
    Q = []
    for row in nu:
        acc = SparsePoly.zero(M)
        for c, pj in zip(row, partial):
            acc = acc + pj.scale(c)
        Q.append(acc)
    comps = [Q[0] * x0]
    for i in range(1, M - 1):
        comps.append((Q[0] + Q[i]) * SparsePoly.variable(M, i))
    comps.append(Q[0] * xlast + P)
    S = P
    for i in range(M - 1):
        S = S * SparsePoly.variable(M, i)
    return PolyVectorField(comps), S


def verify_invariance(X: PolyVectorField, b: Sequence) -> bool:
    """Exact check that every irreducible factor of the hypersurface is
    invariant: X(f) vanishes on {f = 0} for f = x_i and
    f = x_M - b_j x_1."""
    M = X.num_vars
    idx = SparsePoly.variable
    for i in range(M - 1):
        f = idx(M, i)
        images = [idx(M, l) for l in range(M)]
        images[i] = SparsePoly.zero(M)
        if not X.apply(f).substitute(images).is_zero():
            return False
    for bj in b:
        f = idx(M, M - 1) - idx(M, 0).scale(as_gaussian(bj))
        images = [idx(M, l) for l in range(M)]
        images[M - 1] = idx(M, 0).scale(as_gaussian(bj))
        if not X.apply(f).substitute(images).is_zero():
            return False
    return True


# ---------------------------------------------------------------------------
# the full pipeline


class SynthesisResult:
    """Everything the synthesis produced, with its exact certificates."""

    __slots__ = (
        "distribution",
        "table",
        "blowup",
        "spanning",
        "lambda_set",
        "assignments",
        "degree",
        "k",
        "m",
        "n",
        "mu",
        "poles",
        "residues",
        "Y",
        "X",
        "S",
        "Z",
        "certificates",
        "warnings",
    )

    def __init__(self, **kw):
        for name in self.__slots__:
            object.__setattr__(self, name, kw.pop(name))
        if kw:
            raise TypeError(f"unexpected fields: {sorted(kw)}")

    @property
    def b(self):
        return self.poles.b

    def linearization_at(self, pole: int) -> tuple:
        return verify_linearization(self.Y, pole, self.k, self.m)

    def __repr__(self):
        return (
            f"SynthesisResult(M={self.distribution.M}, poles={len(self.poles.b)}, "
            f"m={self.m}, k={self.k}, warnings={len(self.warnings)})"
        )


class SynthesisCertificates(NamedTuple):
    submatrices_checked: int
    det_J: GaussianRational
    det_J1: GaussianRational
    s: int
    v_star: tuple
    separating: dict
    nu_tilde: tuple
    flat_poles: int  # head poles with verified vanishing Taylor data
    invariance: bool
    tangency: bool

    @property
    def ok(self) -> bool:
        return (
            bool(self.det_J)
            and bool(self.det_J1)
            and all(self.separating.values())
            and all(self.nu_tilde)
            and self.invariance
            and self.tangency
        )


def synthesize_Z(
    dist: SeparatedDistribution,
    k_override: int | None = None,
    seed: int = 0,
) -> SynthesisResult:
    """Run the whole chain on a separated system and return the lifted
    field with its certificates.

    The result's loop returns can only ever reach fiber directions inside
    the coefficient span; a positive-codimension system gets a warning
    saying so (and a trivially-flat degenerate build when the curvature
    vanishes entirely).
    """
    table = coefficient_table(dist)
    _, codim = span_and_codim(table)
    warnings = []
    if not len(table):
        warnings.append(
            "curvature vanishes: every lift is holonomy-free and loop "
            "returns cannot move in the fiber"
        )
    elif codim > 0:
        warnings.append(
            f"coefficient span has codimension {codim}: first integrals "
            "confine loop returns to a proper subspace of the fiber"
        )
    theta = blowup_coefficients(table)
    spanning = spanning_monomials(theta)
    lambda_set = build_lambda_set(spanning)
    degree = max((sum(L) for L, _i, _j in spanning), default=0)
    k = degree + 1 if k_override is None else k_override
    if k < degree + 1:
        raise ValueError(f"k must be at least {degree + 1} for this table")
    assignments = assign_taus(lambda_set, degree)
    m = len(assignments)
    M = dist.M
    n = 2 * (M - 1) + 1
    mu = generate_mu(M)
    poles = choose_b(m, k, n, [a.tau for a in assignments], seed=seed)
    sol = solve_nu(poles, assignments, mu)
    Y = build_Y(poles.b, sol.nu)
    for pole in range(m):
        verify_linearization(Y, pole, k, certified=m)
    X, S = blow_down(poles.b, sol.nu)
    invariance = verify_invariance(X, poles.b)
    Z = lift_vector_field(dist, X)
    tangency = all(
        Z.z_components[j] == contract(dist.omega[j], X) for j in range(dist.N)
    )
    certificates = SynthesisCertificates(
        submatrices_checked=poles.submatrices_checked,
        det_J=poles.det_J,
        det_J1=poles.det_J1,
        s=sol.s,
        v_star=sol.v_star,
        separating=sol.separating,
        nu_tilde=sol.nu_tilde,
        flat_poles=m,
        invariance=invariance,
        tangency=tangency,
    )
    if not certificates.ok:
        raise SynthesisError("certificates failed after construction")
    return SynthesisResult(
        distribution=dist,
        table=table,
        blowup=theta,
        spanning=spanning,
        lambda_set=lambda_set,
        assignments=assignments,
        degree=degree,
        k=k,
        m=m,
        n=n,
        mu=mu,
        poles=poles,
        residues=sol.nu,
        Y=Y,
        X=X,
        S=S,
        Z=Z,
        certificates=certificates,
        warnings=tuple(warnings),
    )
