r"""Exact scalar and polynomial arithmetic.

Everything upstream of the numeric layer runs over Gaussian rationals
(complex numbers with `fractions.Fraction` real and imaginary parts), so
kernel computations, annihilators and certificates are exact.  Quantities
that carry a transcendental factor are kept as an exact coefficient times
an integer power of 2*pi*i and only lowered to floating point at the
boundary (`to_complex`).

Multi-indices are plain tuples of ints; sparse polynomials are dicts from
multi-index to coefficient.  Zero coefficients are never stored.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

__all__ = [
    "GaussianRational",
    "MultiIndex",
    "SparsePoly",
    "TwoPiPower",
    "SimplePoleSum",
    "InconsistentSystemError",
    "ZERO",
    "ONE",
    "I",
    "mi_add",
    "mi_sub",
    "mi_dot",
    "mi_degree",
    "unit_index",
    "as_gaussian",
    "poly_divmod",
    "exact_nullspace",
    "exact_solve",
    "exact_det",
    "row_echelon",
    "matrix_rank",
    "row_space_basis",
    "same_row_space",
]

RationalLike = Union[int, Fraction]
ScalarLike = Union[int, Fraction, "GaussianRational"]


class GaussianRational:
    """A complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: RationalLike = 0, im: RationalLike = 0):
        # object.__setattr__ keeps instances effectively immutable/hashable
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_string(cls, re: str, im: str = "0") -> "GaussianRational":
        """Parse from "p/q" strings (also accepts plain integers like "3")."""
        return cls(Fraction(re), Fraction(im))

    # -- predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: ScalarLike) -> "GaussianRational":
        o = as_gaussian(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: ScalarLike) -> "GaussianRational":
        o = as_gaussian(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: ScalarLike) -> "GaussianRational":
        return as_gaussian(other) - self

    def __mul__(self, other: ScalarLike) -> "GaussianRational":
        o = as_gaussian(other)
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> "GaussianRational":
        o = as_gaussian(other)
        d = o.re * o.re + o.im * o.im
        if not d:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )

    def __rtruediv__(self, other: ScalarLike) -> "GaussianRational":
        return as_gaussian(other) / self

    def __pow__(self, n: int) -> "GaussianRational":
        if n < 0:
            return ONE / (self ** (-n))
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Exact squared modulus."""
        return self.re * self.re + self.im * self.im

    # -- comparisons / hashing -----------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = GaussianRational(other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    # -- lowering ------------------------------------------------------------

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self) -> str:
        if not self.im:
            return f"GR({self.re})"
        return f"GR({self.re}, {self.im})"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def as_gaussian(x: ScalarLike) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to GaussianRational")


# ---------------------------------------------------------------------------
# multi-indices

MultiIndex = tuple  # tuple[int, ...]; kept as a plain tuple on purpose


def mi_add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def mi_sub(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    """Componentwise difference; entries may go negative (caller checks)."""
    return tuple(x - y for x, y in zip(a, b, strict=True))


def mi_dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b, strict=True))


def mi_degree(a: MultiIndex) -> int:
    return sum(a)


def unit_index(n: int, i: int) -> MultiIndex:
    """The i-th standard multi-index e_i in n variables (0-based i)."""
    return tuple(1 if k == i else 0 for k in range(n))


# ---------------------------------------------------------------------------
# sparse polynomials


class SparsePoly:
    """Multivariate polynomial with GaussianRational coefficients.

    terms maps multi-index -> coefficient.  Invariant: no zero coefficient
    is ever stored, so `not self.terms` is the zero test.
    """

    __slots__ = ("num_vars", "terms")

    def __init__(self, num_vars: int, terms: Mapping[MultiIndex, ScalarLike] | None = None):
        self.num_vars = num_vars
        clean: dict[MultiIndex, GaussianRational] = {}
        if terms:
            for k, c in terms.items():
                k = tuple(k)
                if len(k) != num_vars:
                    raise ValueError(f"multi-index {k} has wrong length (expected {num_vars})")
                if any(e < 0 for e in k):
                    raise ValueError(f"negative exponent in {k}")
                c = as_gaussian(c)
                if c:
                    prev = clean.get(k)
                    c = prev + c if prev is not None else c
                    if c:
                        clean[k] = c
                    else:
                        clean.pop(k, None)
        self.terms = clean

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, num_vars: int) -> "SparsePoly":
        return cls(num_vars)

    @classmethod
    def constant(cls, num_vars: int, c: ScalarLike) -> "SparsePoly":
        return cls(num_vars, {(0,) * num_vars: c})

    @classmethod
    def variable(cls, num_vars: int, i: int) -> "SparsePoly":
        return cls(num_vars, {unit_index(num_vars, i): 1})

    @classmethod
    def monomial(cls, coeff: ScalarLike, exponents: MultiIndex) -> "SparsePoly":
        return cls(len(exponents), {tuple(exponents): coeff})

    # -- predicates ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.num_vars == other.num_vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.num_vars, frozenset(self.terms.items())))

    def total_degree(self) -> int:
        """Total degree; the zero polynomial reports -1."""
        if not self.terms:
            return -1
        return max(sum(k) for k in self.terms)

    # -- ring operations ---------------------------------------------------

    def _check_compat(self, other: "SparsePoly"):
        if self.num_vars != other.num_vars:
            raise ValueError("polynomials over different variable counts")

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        self._check_compat(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, ZERO) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return _raw_poly(self.num_vars, out)

    def __neg__(self) -> "SparsePoly":
        return _raw_poly(self.num_vars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "SparsePoly") -> "SparsePoly":
        return self + (-other)

    def __mul__(self, other) -> "SparsePoly":
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(other)
        self._check_compat(other)
        out: dict[MultiIndex, GaussianRational] = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                k = mi_add(ka, kb)
                s = out.get(k, ZERO) + ca * cb
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return _raw_poly(self.num_vars, out)

    def __rmul__(self, other) -> "SparsePoly":
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c: ScalarLike) -> "SparsePoly":
        c = as_gaussian(c)
        if not c:
            return SparsePoly.zero(self.num_vars)
        return _raw_poly(self.num_vars, {k: v * c for k, v in self.terms.items()})

    def __pow__(self, n: int) -> "SparsePoly":
        if n < 0:
            raise ValueError("negative polynomial power")
        out = SparsePoly.constant(self.num_vars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def diff(self, i: int) -> "SparsePoly":
        """Partial derivative with respect to variable i (0-based)."""
        out: dict[MultiIndex, GaussianRational] = {}
        for k, c in self.terms.items():
            if k[i] == 0:
                continue
            kk = list(k)
            e = kk[i]
            kk[i] = e - 1
            out[tuple(kk)] = c * e
        return _raw_poly(self.num_vars, out)

    def substitute(self, images: Sequence["SparsePoly"]) -> "SparsePoly":
        """Ring homomorphism: variable i maps to images[i].

        All images must share a common variable count, which becomes the
        variable count of the result.
        """
        if len(images) != self.num_vars:
            raise ValueError("need one image per variable")
        if not images:
            raise ValueError("cannot substitute in a 0-variable polynomial")
        nv = images[0].num_vars
        for g in images:
            if g.num_vars != nv:
                raise ValueError("images over different variable counts")
        out = SparsePoly.zero(nv)
        # power cache keyed by (variable, exponent); exponents are small
        cache: dict[tuple[int, int], SparsePoly] = {}

        def power(i: int, e: int) -> SparsePoly:
            got = cache.get((i, e))
            if got is None:
                got = images[i] ** e
                cache[(i, e)] = got
            return got

        for k, c in self.terms.items():
            term = SparsePoly.constant(nv, c)
            for i, e in enumerate(k):
                if e:
                    term = term * power(i, e)
            out = out + term
        return out

    def embed(self, num_vars: int, positions: Sequence[int]) -> "SparsePoly":
        """Reinterpret over a larger variable set; positions[i] is the new
        slot of old variable i."""
        out: dict[MultiIndex, GaussianRational] = {}
        for k, c in self.terms.items():
            kk = [0] * num_vars
            for i, e in enumerate(k):
                kk[positions[i]] = e
            out[tuple(kk)] = c
        return _raw_poly(num_vars, out)

    # -- evaluation --------------------------------------------------------

    def coefficient(self, k: MultiIndex) -> GaussianRational:
        return self.terms.get(tuple(k), ZERO)

    def eval_exact(self, point: Sequence[ScalarLike]) -> GaussianRational:
        if len(point) != self.num_vars:
            raise ValueError("point has wrong dimension")
        pt = [as_gaussian(p) for p in point]
        acc = ZERO
        for k, c in self.terms.items():
            term = c
            for x, e in zip(pt, k):
                if e:
                    term = term * (x**e)
            acc = acc + term
        return acc

    def eval_complex(self, point: Sequence[complex]) -> complex:
        """Numeric evaluation; the one deliberate exact->float lowering."""
        acc = 0j
        for k, c in self.terms.items():
            term = c.to_complex()
            for x, e in zip(point, k):
                if e:
                    term *= x**e
            acc += term
        return acc

    def coeff_bound(self, radius: float) -> float:
        """sum |coeff| * radius^degree — a safe sup bound on the polydisc."""
        return sum(
            math.sqrt(float(c.abs2())) * radius ** sum(k) for k, c in self.terms.items()
        )

    def __repr__(self) -> str:
        if not self.terms:
            return "SparsePoly(0)"
        bits = []
        for k in sorted(self.terms, key=lambda k: (sum(k), k)):
            bits.append(f"{self.terms[k]!r}*x^{k}")
        return "SparsePoly(" + " + ".join(bits) + ")"


def poly_divmod(f: SparsePoly, g: SparsePoly) -> tuple[SparsePoly, SparsePoly]:
    """Exact division with remainder by a single divisor: f = q g + r where
    no term of r is divisible by the lexicographic lead term of g.

    For one divisor the remainder is canonical, and it vanishes exactly
    when g divides f, which is the membership test this exists for.
    """
    if f.num_vars != g.num_vars:
        raise ValueError("polynomials live over different variable counts")
    if g.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    lead = max(g.terms)
    lc = g.terms[lead]
    work = dict(f.terms)
    quo: dict[MultiIndex, GaussianRational] = {}
    rem: dict[MultiIndex, GaussianRational] = {}
    while work:
        k = max(work)
        c = work.pop(k)
        if all(a >= b for a, b in zip(k, lead)):
            e = mi_sub(k, lead)
            coeff = c / lc
            prev = quo.get(e, ZERO) + coeff
            if prev:
                quo[e] = prev
            else:
                quo.pop(e, None)
            # every monomial introduced here is lex-smaller than k
            for kg, cg in g.terms.items():
                if kg == lead:
                    continue
                kk = mi_add(e, kg)
                nc = work.get(kk, ZERO) - coeff * cg
                if nc:
                    work[kk] = nc
                else:
                    work.pop(kk, None)
        else:
            rem[k] = c
    return _raw_poly(f.num_vars, quo), _raw_poly(f.num_vars, rem)


def _raw_poly(num_vars: int, terms: dict) -> SparsePoly:
    # internal: terms already clean (no zeros, valid keys)
    p = object.__new__(SparsePoly)
    p.num_vars = num_vars
    p.terms = terms
    return p


# ---------------------------------------------------------------------------
# exact scalars carrying a power of 2*pi*i


class TwoPiPower:
    """An exact value c * (2*pi*i)^p with c Gaussian rational, p >= 0.

    Sums are only defined between equal powers (or with zero); products add
    powers.  This is enough to keep period integrals exact until lowering.
    """

    __slots__ = ("coeff", "power")

    def __init__(self, coeff: ScalarLike = 0, power: int = 0):
        coeff = as_gaussian(coeff)
        if power < 0:
            raise ValueError("negative power of 2*pi*i not supported")
        object.__setattr__(self, "coeff", coeff)
        # normalize: zero has power 0 so that zeros of any origin compare equal
        object.__setattr__(self, "power", power if coeff else 0)

    def __setattr__(self, name, value):
        raise AttributeError("TwoPiPower is immutable")

    def is_zero(self) -> bool:
        return not self.coeff

    def __bool__(self) -> bool:
        return bool(self.coeff)

    def __add__(self, other: "TwoPiPower") -> "TwoPiPower":
        if not isinstance(other, TwoPiPower):
            return NotImplemented
        if not self.coeff:
            return other
        if not other.coeff:
            return self
        if self.power != other.power:
            raise ValueError(
                f"cannot add values with different 2*pi*i powers ({self.power} vs {other.power})"
            )
        return TwoPiPower(self.coeff + other.coeff, self.power)

    def __neg__(self) -> "TwoPiPower":
        return TwoPiPower(-self.coeff, self.power)

    def __sub__(self, other: "TwoPiPower") -> "TwoPiPower":
        return self + (-other)

    def __mul__(self, other) -> "TwoPiPower":
        if isinstance(other, TwoPiPower):
            return TwoPiPower(self.coeff * other.coeff, self.power + other.power)
        return TwoPiPower(self.coeff * as_gaussian(other), self.power)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, TwoPiPower):
            return NotImplemented
        return self.coeff == other.coeff and self.power == other.power

    def __hash__(self):
        return hash((self.coeff, self.power))

    def to_complex(self) -> complex:
        return self.coeff.to_complex() * (2j * math.pi) ** self.power

    def __repr__(self) -> str:
        if self.power == 0:
            return f"TwoPiPower({self.coeff!r})"
        return f"TwoPiPower({self.coeff!r} * (2*pi*i)^{self.power})"


TWO_PI_I = TwoPiPower(1, 1)


# ---------------------------------------------------------------------------
# univariate rational functions with simple poles


class SimplePoleSum:
    """constant + sum_j residues[j] / (u - poles[j]), all entries exact."""

    __slots__ = ("constant", "poles", "residues")

    def __init__(
        self,
        constant: ScalarLike,
        poles: Sequence[ScalarLike],
        residues: Sequence[ScalarLike],
    ):
        if len(poles) != len(residues):
            raise ValueError("poles and residues must pair up")
        object.__setattr__(self, "constant", as_gaussian(constant))
        object.__setattr__(self, "poles", tuple(as_gaussian(b) for b in poles))
        object.__setattr__(self, "residues", tuple(as_gaussian(r) for r in residues))
        if len(set(self.poles)) != len(self.poles):
            raise ValueError("poles must be pairwise distinct")

    def __setattr__(self, name, value):
        raise AttributeError("SimplePoleSum is immutable")

    def eval_exact(self, u: ScalarLike) -> GaussianRational:
        u = as_gaussian(u)
        acc = self.constant
        for b, r in zip(self.poles, self.residues):
            acc = acc + r / (u - b)
        return acc

    def eval_complex(self, u: complex) -> complex:
        acc = self.constant.to_complex()
        for b, r in zip(self.poles, self.residues):
            acc += r.to_complex() / (u - b.to_complex())
        return acc

    def __repr__(self):
        return f"SimplePoleSum({self.constant!r}, poles={list(self.poles)!r})"


# ---------------------------------------------------------------------------
# exact linear algebra (fraction-free elimination)


class InconsistentSystemError(ValueError):
    """Raised by exact_solve when the linear system has no solution."""


Matrix = list  # list[list[GaussianRational]]


def _gauss_int_rows(rows: Iterable[Sequence[ScalarLike]]) -> list[list[GaussianRational]]:
    """Copy rows, scaling each by the lcm of its denominators.

    Row scaling does not change the row space, kernel, or pivot structure,
    and it lets the elimination below stay in Gaussian integers.
    """
    out = []
    for row in rows:
        row = [as_gaussian(x) for x in row]
        l = 1
        for x in row:
            l = math.lcm(l, x.re.denominator, x.im.denominator)
        out.append([x * l for x in row])
    return out


def _row_gcd_reduce(row: list[GaussianRational]) -> None:
    # divide a Gaussian-integer row by the gcd of all its integer parts;
    # keeps fraction-free growth under control without changing pivots
    g = 0
    for x in row:
        g = math.gcd(g, abs(x.re.numerator), abs(x.im.numerator))
    if g > 1:
        for i, x in enumerate(row):
            row[i] = GaussianRational(x.re / g, x.im / g)


def row_echelon(
    rows: Sequence[Sequence[ScalarLike]], ncols: int | None = None
) -> tuple[list[list[GaussianRational]], list[int]]:
    """Fraction-free row echelon form.

    Returns (echelon rows, pivot column list).  Deterministic: pivots are
    chosen as the first row with a nonzero entry, scanning columns left to
    right.  Input rows are not modified.
    """
    m = _gauss_int_rows(rows)
    if not m:
        return [], []
    n = ncols if ncols is not None else len(m[0])
    pivots: list[int] = []
    r = 0
    for col in range(n):
        pivot_row = None
        for i in range(r, len(m)):
            if m[i][col]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        piv = m[r][col]
        for i in range(r + 1, len(m)):
            if not m[i][col]:
                continue
            fac = m[i][col]
            # cross-multiplication keeps entries in the Gaussian integers
            m[i] = [piv * m[i][j] - fac * m[r][j] for j in range(len(m[i]))]
            _row_gcd_reduce(m[i])
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r] + [row for row in m[r:] if any(row)], pivots


def matrix_rank(rows: Sequence[Sequence[ScalarLike]]) -> int:
    if not rows:
        return 0
    _, pivots = row_echelon(rows)
    return len(pivots)


def row_space_basis(rows: Sequence[Sequence[ScalarLike]]) -> list[list[GaussianRational]]:
    """Deterministic basis of the row space, each vector scaled so its
    leading nonzero entry is 1."""
    if not rows:
        return []
    ech, pivots = row_echelon(rows)
    out = []
    for row in ech[: len(pivots)]:
        lead = next(x for x in row if x)
        out.append([x / lead for x in row])
    return out


def same_row_space(a: Sequence[Sequence[ScalarLike]], b: Sequence[Sequence[ScalarLike]]) -> bool:
    ra, rb = matrix_rank(a), matrix_rank(b)
    if ra != rb:
        return False
    stacked = [list(r) for r in a] + [list(r) for r in b]
    return matrix_rank(stacked) == ra


def exact_nullspace(rows: Sequence[Sequence[ScalarLike]], ncols: int | None = None) -> list[list[GaussianRational]]:
    """Exact basis of the right kernel {v : A v = 0}.

    One basis vector per free column, in increasing column order, each
    normalized so its first nonzero coordinate is 1.  For a matrix with no
    rows, ncols must be given and the standard basis is returned.
    """
    if not rows:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [[ONE if j == i else ZERO for j in range(ncols)] for i in range(ncols)]
    n = ncols if ncols is not None else len(rows[0])
    ech, pivots = row_echelon(rows, n)
    pivot_set = set(pivots)
    free_cols = [j for j in range(n) if j not in pivot_set]
    basis = []
    for fc in free_cols:
        v: list[GaussianRational] = [ZERO] * n
        v[fc] = ONE
        # back substitution over the echelon rows (pivot entry may be any
        # nonzero Gaussian integer, so divide exactly)
        for i in range(len(pivots) - 1, -1, -1):
            col = pivots[i]
            s = ZERO
            row = ech[i]
            for j in range(col + 1, n):
                if v[j] and row[j]:
                    s = s + row[j] * v[j]
            v[col] = -s / row[col]
        lead = next(x for x in v if x)
        basis.append([x / lead for x in v])
    return basis


def exact_solve(
    rows: Sequence[Sequence[ScalarLike]],
    rhs: Sequence[ScalarLike],
    free_values: Mapping[int, ScalarLike] | None = None,
) -> list[GaussianRational]:
    """Particular solution of A x = rhs.

    Free variables default to 0; callers may pin specific free columns via
    free_values (pinning a pivot column raises).  Raises
    InconsistentSystemError when no solution exists.
    """
    if not rows:
        raise ValueError("empty system")
    n = len(rows[0])
    aug = [list(r) + [rv] for r, rv in zip(rows, rhs, strict=True)]
    ech, pivots = row_echelon(aug, n)  # pivot search limited to A's columns
    # rows beyond the pivot count must be trivial in the A-part; a nonzero
    # rhs there certifies inconsistency
    for row in ech[len(pivots):]:
        if any(row[:n]):
            raise AssertionError("echelon invariant violated")
        if row[n]:
            raise InconsistentSystemError("system has no solution")
    pivot_set = set(pivots)
    x: list[GaussianRational] = [ZERO] * n
    if free_values:
        for j, val in free_values.items():
            if j in pivot_set:
                raise ValueError(f"column {j} is not a free column")
            x[j] = as_gaussian(val)
    for i in range(len(pivots) - 1, -1, -1):
        col = pivots[i]
        row = ech[i]
        s = row[n]
        for j in range(col + 1, n):
            if x[j] and row[j]:
                s = s - row[j] * x[j]
        x[col] = s / row[col]
    return x


def exact_det(rows: Sequence[Sequence[ScalarLike]]) -> GaussianRational:
    """Determinant by Bareiss fraction-free elimination."""
    n = len(rows)
    if n == 0:
        return ONE
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    m = [[as_gaussian(x) for x in row] for row in rows]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if not m[k][k]:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return ZERO
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) / prev
            m[i][k] = ZERO
        prev = m[k][k]
    d = m[n - 1][n - 1]
    return d if sign > 0 else -d
