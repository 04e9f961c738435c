r"""Polynomial differential forms and vector fields.

One-forms are stored by their dx_i coefficient polynomials, two-forms as a
sparse table (K, i, j) -> coefficient over the ordered basis
x^K dx_i ^ dx_j with i < j.  The exterior derivative, contraction,
pullbacks, and the radial-homotopy primitive of a closed one-form all stay
exact.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .exact import (
    GaussianRational,
    MultiIndex,
    ScalarLike,
    SparsePoly,
    ZERO,
    as_gaussian,
    mi_add,
    unit_index,
)

__all__ = [
    "OneForm",
    "TwoForm",
    "PolyVectorField",
    "exterior_derivative",
    "contract",
    "commutator",
    "pullback_one_form",
    "pullback_two_form",
    "poincare_primitive",
    "gradient_form",
]


class PolyVectorField:
    """Vector field sum_i components[i] * d/dx_i with polynomial entries."""

    __slots__ = ("num_vars", "components")

    def __init__(self, components: Sequence[SparsePoly]):
        if not components:
            raise ValueError("a vector field needs at least one component")
        nv = components[0].num_vars
        if len(components) != nv:
            raise ValueError("need exactly one component per variable")
        for p in components:
            if p.num_vars != nv:
                raise ValueError("components over different variable counts")
        self.num_vars = nv
        self.components = list(components)

    @classmethod
    def coordinate(cls, num_vars: int, i: int) -> "PolyVectorField":
        comps = [SparsePoly.zero(num_vars) for _ in range(num_vars)]
        comps[i] = SparsePoly.constant(num_vars, 1)
        return cls(comps)

    def apply(self, p: SparsePoly) -> SparsePoly:
        """Directional derivative X(p) = sum_i X_i * dp/dx_i."""
        if p.num_vars != self.num_vars:
            raise ValueError("polynomial over wrong variable count")
        out = SparsePoly.zero(self.num_vars)
        for i, comp in enumerate(self.components):
            if comp:
                out = out + comp * p.diff(i)
        return out

    def eval_complex(self, point):
        return [c.eval_complex(point) for c in self.components]

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        return PolyVectorField([a + b for a, b in zip(self.components, other.components, strict=True)])

    def __neg__(self) -> "PolyVectorField":
        return PolyVectorField([-a for a in self.components])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyVectorField):
            return NotImplemented
        return self.components == other.components

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __repr__(self):
        return f"PolyVectorField({self.components!r})"


class OneForm:
    """Polynomial one-form sum_i components[i] * dx_i."""

    __slots__ = ("num_vars", "components")

    def __init__(self, components: Sequence[SparsePoly]):
        if not components:
            raise ValueError("a one-form needs at least one component")
        nv = components[0].num_vars
        if len(components) != nv:
            raise ValueError("need exactly one dx_i coefficient per variable")
        for p in components:
            if p.num_vars != nv:
                raise ValueError("components over different variable counts")
        self.num_vars = nv
        self.components = list(components)

    @classmethod
    def zero(cls, num_vars: int) -> "OneForm":
        return cls([SparsePoly.zero(num_vars) for _ in range(num_vars)])

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm([a + b for a, b in zip(self.components, other.components, strict=True)])

    def __neg__(self) -> "OneForm":
        return OneForm([-a for a in self.components])

    def __sub__(self, other: "OneForm") -> "OneForm":
        return self + (-other)

    def scale(self, c: ScalarLike) -> "OneForm":
        return OneForm([p.scale(c) for p in self.components])

    def __eq__(self, other) -> bool:
        if not isinstance(other, OneForm):
            return NotImplemented
        return self.components == other.components

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def total_degree(self) -> int:
        return max(c.total_degree() for c in self.components)

    def __repr__(self):
        return f"OneForm({self.components!r})"


class TwoForm:
    """Sparse polynomial two-form over the basis x^K dx_i ^ dx_j, i < j.

    coeffs maps (K, i, j) -> GaussianRational; keys always have i < j and
    zero values are never stored.
    """

    __slots__ = ("num_vars", "coeffs")

    def __init__(self, num_vars: int, coeffs: Mapping[tuple, ScalarLike] | None = None):
        self.num_vars = num_vars
        clean: dict[tuple, GaussianRational] = {}
        if coeffs:
            for (K, i, j), c in coeffs.items():
                K = tuple(K)
                c = as_gaussian(c)
                if len(K) != num_vars or any(e < 0 for e in K):
                    raise ValueError(f"bad multi-index {K}")
                if not 0 <= i < j < num_vars:
                    raise ValueError(f"need 0 <= i < j < num_vars, got ({i}, {j})")
                if not c:
                    continue
                key = (K, i, j)
                prev = clean.get(key)
                c = prev + c if prev is not None else c
                if c:
                    clean[key] = c
                else:
                    clean.pop(key, None)
        self.coeffs = clean

    def add_term(self, K: MultiIndex, i: int, j: int, c: ScalarLike) -> None:
        """Accumulate c * x^K dx_i ^ dx_j, normalizing orientation to i < j."""
        c = as_gaussian(c)
        if not c:
            return
        if i == j:
            return
        if i > j:
            i, j, c = j, i, -c
        key = (tuple(K), i, j)
        s = self.coeffs.get(key, ZERO) + c
        if s:
            self.coeffs[key] = s
        else:
            self.coeffs.pop(key, None)

    def coefficient(self, K: MultiIndex, i: int, j: int) -> GaussianRational:
        if i == j:
            return ZERO
        if i > j:
            return -self.coefficient(K, j, i)
        return self.coeffs.get((tuple(K), i, j), ZERO)

    def __add__(self, other: "TwoForm") -> "TwoForm":
        if self.num_vars != other.num_vars:
            raise ValueError("two-forms over different variable counts")
        out = TwoForm(self.num_vars, self.coeffs)
        for (K, i, j), c in other.coeffs.items():
            out.add_term(K, i, j, c)
        return out

    def __neg__(self) -> "TwoForm":
        return TwoForm(self.num_vars, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other: "TwoForm") -> "TwoForm":
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TwoForm):
            return NotImplemented
        return self.num_vars == other.num_vars and self.coeffs == other.coeffs

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        bits = [
            f"{c!r}*x^{K}*dx{i}^dx{j}"
            for (K, i, j), c in sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0][0]), kv[0]))
        ]
        return "TwoForm(" + (" + ".join(bits) if bits else "0") + ")"


# ---------------------------------------------------------------------------
# operations


def exterior_derivative(form: OneForm) -> TwoForm:
    """d(sum_i P_i dx_i) = sum_{i<j} [(dP_j/dx_i) - (dP_i/dx_j)] dx_i ^ dx_j.

    On monomials the (K, i, j) coefficient is
    (k_i + 1) * [x^{K+e_i}] P_j  -  (k_j + 1) * [x^{K+e_j}] P_i.
    """
    out = TwoForm(form.num_vars)
    for j, P in enumerate(form.components):
        if not P:
            continue
        for i in range(form.num_vars):
            if i == j:
                continue
            for K, c in P.diff(i).terms.items():
                out.add_term(K, i, j, c)
    return out


def contract(form: OneForm, field: PolyVectorField) -> SparsePoly:
    """Interior product <form, field> = sum_i P_i * X_i."""
    if form.num_vars != field.num_vars:
        raise ValueError("form and field over different variable counts")
    out = SparsePoly.zero(form.num_vars)
    for p, x in zip(form.components, field.components):
        if p and x:
            out = out + p * x
    return out


def commutator(A: PolyVectorField, B: PolyVectorField) -> PolyVectorField:
    """Lie bracket [A, B]_k = sum_i A_i dB_k/dx_i - B_i dA_k/dx_i."""
    if A.num_vars != B.num_vars:
        raise ValueError("fields over different variable counts")
    comps = []
    for k in range(A.num_vars):
        acc = SparsePoly.zero(A.num_vars)
        for i in range(A.num_vars):
            if A.components[i]:
                acc = acc + A.components[i] * B.components[k].diff(i)
            if B.components[i]:
                acc = acc - B.components[i] * A.components[k].diff(i)
        comps.append(acc)
    return PolyVectorField(comps)


def pullback_one_form(form: OneForm, phi: Sequence[SparsePoly]) -> OneForm:
    """Pullback along the polynomial map x = phi(t)."""
    if len(phi) != form.num_vars:
        raise ValueError("map must supply one image per source variable")
    nt = phi[0].num_vars
    comps = [SparsePoly.zero(nt) for _ in range(nt)]
    for i, P in enumerate(form.components):
        if not P:
            continue
        Pphi = P.substitute(phi)
        for l in range(nt):
            dphi = phi[i].diff(l)
            if dphi:
                comps[l] = comps[l] + Pphi * dphi
    return OneForm(comps)


def pullback_two_form(form: TwoForm, phi: Sequence[SparsePoly]) -> TwoForm:
    """Pullback of sum c x^K dx_i ^ dx_j along x = phi(t):
    (x^K o phi) * dphi_i ^ dphi_j expanded on the dt_l ^ dt_r basis."""
    if len(phi) != form.num_vars:
        raise ValueError("map must supply one image per source variable")
    nt = phi[0].num_vars
    out = TwoForm(nt)
    diffs = [[phi[i].diff(l) for l in range(nt)] for i in range(form.num_vars)]
    for (K, i, j), c in form.coeffs.items():
        mono = SparsePoly.monomial(c, K).substitute(phi)
        if not mono:
            continue
        for l in range(nt):
            for r in range(l + 1, nt):
                wedge = diffs[i][l] * diffs[j][r] - diffs[i][r] * diffs[j][l]
                if wedge.is_zero():
                    continue
                for Kt, ct in (mono * wedge).terms.items():
                    out.add_term(Kt, l, r, ct)
    return out


def poincare_primitive(form: OneForm) -> SparsePoly:
    """Primitive of a closed one-form by the radial homotopy:
    a x^K dx_i  |->  a x^{K+e_i} / (|K| + 1).

    Raises ValueError if the form is not closed; then d(result) == form.
    """
    if not exterior_derivative(form).is_zero():
        raise ValueError("one-form is not closed; no primitive exists")
    out = SparsePoly.zero(form.num_vars)
    for i, P in enumerate(form.components):
        terms = {
            mi_add(K, unit_index(form.num_vars, i)): c / (sum(K) + 1)
            for K, c in P.terms.items()
        }
        out = out + SparsePoly(form.num_vars, terms)
    return out


def gradient_form(f: SparsePoly) -> OneForm:
    """df as a one-form."""
    return OneForm([f.diff(i) for i in range(f.num_vars)])
