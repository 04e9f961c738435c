"""Command-line reports: analyze / synthesize / simulate / verify.

The file formats are part of the contract.  A system comes in as JSON —

    {"M": 2, "N": 1,
     "omega": [[{"re": "1", "im": "0", "K": [0, 1], "dx": 1},
                {"re": "-1", "im": "0", "K": [1, 0], "dx": 2}]]}

one term list per defining form, each term an exact Gaussian-rational
coefficient times x^K dx_{dx} (dx is 1-based).  Every exact quantity is
serialized as a "p/q" string and round-trips bit-exactly; floats appear
only in simulation output, printed with 17 significant digits.

Exit codes: 0 ok, 2 parse error, 3 synthesis failure, 4 nothing survived
the lifting guard, 5 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from .distribution import (
    SeparatedDistribution,
    bracket_span,
    coefficient_table,
    first_integral,
    span_and_codim,
)
from .dynamics import (
    SimConfig,
    accumulate_returns,
    default_generators,
    density_report,
)
from .exact import GaussianRational, SparsePoly, poly_divmod, same_row_space
from .forms import OneForm, PolyVectorField, contract
from .lifting_paths import LineSegment, PiecewisePath, TorusLoop
from .synthesis import (
    SynthesisError,
    build_Y,
    synthesize_Z,
    verify_invariance,
    verify_linearization,
)

__all__ = [
    "FormatError",
    "parse_distribution",
    "distribution_doc",
    "analyze_doc",
    "synthesis_doc",
    "write_returns_csv",
    "main",
]

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SYNTHESIS = 3
EXIT_GUARD = 4
EXIT_VERIFY = 5

# Word-radius cap for `simulate`: with the default 0.05-scale generators
# the displacement lattice already overshoots the 0.2 report disc at
# fourteen letters, so longer words only burn budget.
SIM_WORD_RADIUS = 14


class FormatError(ValueError):
    """An input file violates the documented JSON schema."""


# ---------------------------------------------------------------------------
# exact scalars and polynomials <-> JSON


def _rat_str(x: Fraction) -> str:
    return str(x)


def _parse_rat(value, where: str) -> Fraction:
    if not isinstance(value, str):
        raise FormatError(f"{where}: rationals are 'p/q' strings, got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"{where}: bad rational {value!r}") from exc


def _gauss_doc(c: GaussianRational) -> dict:
    return {"re": _rat_str(c.re), "im": _rat_str(c.im)}


def _parse_gauss(obj, where: str) -> GaussianRational:
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected a {{re, im}} object, got {obj!r}")
    re = _parse_rat(obj.get("re", "0"), where)
    im = _parse_rat(obj.get("im", "0"), where)
    return GaussianRational(re, im)


def _poly_doc(p: SparsePoly) -> list:
    return [
        {
            "re": _rat_str(p.terms[K].re),
            "im": _rat_str(p.terms[K].im),
            "K": list(K),
        }
        for K in sorted(p.terms)
    ]


def _parse_exponents(obj, num_vars: int, where: str) -> tuple:
    if (
        not isinstance(obj, list)
        or len(obj) != num_vars
        or not all(isinstance(e, int) and not isinstance(e, bool) for e in obj)
    ):
        raise FormatError(f"{where}: K must be a list of {num_vars} integers")
    if any(e < 0 for e in obj):
        raise FormatError(f"{where}: negative exponent in K = {obj}")
    return tuple(obj)


def _parse_poly(obj, num_vars: int, where: str) -> SparsePoly:
    if not isinstance(obj, list):
        raise FormatError(f"{where}: expected a term list")
    terms: dict = {}
    for t in obj:
        if not isinstance(t, dict):
            raise FormatError(f"{where}: expected term objects")
        K = _parse_exponents(t.get("K"), num_vars, where)
        c = _parse_gauss({"re": t.get("re", "0"), "im": t.get("im", "0")}, where)
        prev = terms.get(K)
        terms[K] = c if prev is None else prev + c
    return SparsePoly(num_vars, terms)


def _parse_field(obj, num_vars: int, where: str) -> PolyVectorField:
    if not isinstance(obj, list) or len(obj) != num_vars:
        raise FormatError(f"{where}: expected {num_vars} component polynomials")
    return PolyVectorField(
        [_parse_poly(p, num_vars, f"{where}[{i}]") for i, p in enumerate(obj)]
    )


# ---------------------------------------------------------------------------
# the DistributionFile format


def parse_distribution(doc) -> SeparatedDistribution:
    if not isinstance(doc, dict):
        raise FormatError("top level must be a JSON object")
    M = doc.get("M")
    N = doc.get("N")
    if not isinstance(M, int) or isinstance(M, bool) or M < 2:
        raise FormatError("M must be an integer >= 2")
    if not isinstance(N, int) or isinstance(N, bool) or N < 1:
        raise FormatError("N must be an integer >= 1")
    forms_doc = doc.get("omega")
    if not isinstance(forms_doc, list) or len(forms_doc) != N:
        raise FormatError("omega must list one term list per fiber equation")
    forms = []
    for j, form in enumerate(forms_doc):
        where = f"omega[{j}]"
        if not isinstance(form, list):
            raise FormatError(f"{where}: expected a list of terms")
        comp_terms: list[dict] = [{} for _ in range(M)]
        for t in form:
            if not isinstance(t, dict):
                raise FormatError(f"{where}: expected term objects")
            dx = t.get("dx")
            if not isinstance(dx, int) or isinstance(dx, bool) or not 1 <= dx <= M:
                raise FormatError(f"{where}: dx must be in 1..{M}, got {dx!r}")
            K = _parse_exponents(t.get("K"), M, where)
            c = _parse_gauss({"re": t.get("re", "0"), "im": t.get("im", "0")}, where)
            slot = comp_terms[dx - 1]
            prev = slot.get(K)
            slot[K] = c if prev is None else prev + c
        forms.append(OneForm([SparsePoly(M, terms) for terms in comp_terms]))
    try:
        return SeparatedDistribution(forms)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def distribution_doc(dist: SeparatedDistribution) -> dict:
    forms = []
    for w in dist.omega:
        terms = []
        for i, comp in enumerate(w.components, start=1):
            for K in sorted(comp.terms):
                c = comp.terms[K]
                terms.append(
                    {
                        "re": _rat_str(c.re),
                        "im": _rat_str(c.im),
                        "K": list(K),
                        "dx": i,
                    }
                )
        forms.append(terms)
    return {"M": dist.M, "N": dist.N, "omega": forms}


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from exc


def _load_distribution(path: str) -> SeparatedDistribution:
    return parse_distribution(_load_json(path))


def _emit_json(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# analyze


def analyze_doc(dist: SeparatedDistribution) -> dict:
    table = coefficient_table(dist)
    basis, kappa = span_and_codim(table)
    fib = first_integral(dist)
    return {
        "kind": "report",
        "distribution": distribution_doc(dist),
        "kappa": kappa,
        "span_basis": [[_gauss_doc(c) for c in row] for row in basis],
        "first_integrals": [
            {
                "t_row": [_gauss_doc(t) for t in row],
                "potential": _poly_doc(g),
            }
            for row, g in zip(fib.t_rows, fib.potentials)
        ],
    }


def cmd_analyze(args) -> int:
    dist = _load_distribution(args.path)
    _emit_json(analyze_doc(dist), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# synthesize


def synthesis_doc(result, seed: int) -> dict:
    cert = result.certificates
    return {
        "kind": "synthesis",
        "distribution": distribution_doc(result.distribution),
        "seed": seed,
        "degree": result.degree,
        "k": result.k,
        "m": result.m,
        "n": result.n,
        "warnings": list(result.warnings),
        "mu": [[_gauss_doc(c) for c in row] for row in result.mu],
        "b": [_gauss_doc(c) for c in result.b],
        "nu": [[_gauss_doc(c) for c in row] for row in result.residues],
        "X": [_poly_doc(p) for p in result.X.components],
        "S": _poly_doc(result.S),
        "Z": {
            "base": [_poly_doc(p) for p in result.Z.base.components],
            "z_components": [_poly_doc(p) for p in result.Z.z_components],
        },
        "certificates": {
            "submatrices_checked": cert.submatrices_checked,
            "det_J": _gauss_doc(cert.det_J),
            "det_J1": _gauss_doc(cert.det_J1),
            "s": cert.s,
            "v_star": [_gauss_doc(c) for c in cert.v_star],
            "separating": {
                str(col): _gauss_doc(d)
                for col, d in sorted(cert.separating.items())
            },
            "nu_tilde": [_gauss_doc(c) for c in cert.nu_tilde],
            "flat_poles": cert.flat_poles,
            "invariance": cert.invariance,
            "tangency": cert.tangency,
        },
    }


def cmd_synthesize(args) -> int:
    dist = _load_distribution(args.path)
    try:
        result = synthesize_Z(dist, k_override=args.k, seed=args.seed)
    except (SynthesisError, ValueError) as exc:
        print(f"synthesis failed: {exc}", file=sys.stderr)
        return EXIT_SYNTHESIS
    _emit_json(synthesis_doc(result, seed=args.seed), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate


def _simulation_generators(dist: SeparatedDistribution, scale: float = 0.05):
    try:
        return default_generators(dist, scale=scale)
    except ValueError:
        # nothing curves: any loop pair will do, and all returns close up
        anchor = np.full(dist.M, scale, dtype=complex)
        winding = (1, -1) + (0,) * (dist.M - 2)
        rotated = anchor.copy()
        rotated[0] *= 1j
        plain = PiecewisePath([TorusLoop(anchor, winding)])
        bridge = PiecewisePath([LineSegment(anchor, rotated)])
        conj = bridge.concat(PiecewisePath([TorusLoop(rotated, winding)])).concat(
            bridge.reversed()
        )
        return [plain, conj]


def write_returns_csv(path: str, records: Sequence) -> None:
    """One row per return: the signed generator word, then re/im of every
    endpoint coordinate, 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        n = len(records[0].endpoint) if records else 0
        head = ["word"]
        for j in range(1, n + 1):
            head += [f"re_z{j}", f"im_z{j}"]
        writer.writerow(head)
        for rec in records:
            row = [" ".join(str(i) for i in rec.word)]
            for zj in rec.endpoint:
                row += [format(zj.real, ".17g"), format(zj.imag, ".17g")]
            writer.writerow(row)


def cmd_simulate(args) -> int:
    dist = _load_distribution(args.path)
    cfg = SimConfig(
        abs_tol=args.tol, eps=args.eps, budget=args.budget, seed=args.seed
    )
    recs = accumulate_returns(
        dist, _simulation_generators(dist), cfg, max_radius=SIM_WORD_RADIUS
    )
    write_returns_csv(args.returns, recs)
    rep = density_report(recs, cfg)
    _emit_json(
        {
            "kind": "density",
            "eps": rep.eps,
            "radius": rep.radius,
            "span_dim": rep.span_dim,
            "total_cells": rep.total_cells,
            "covered_cells": rep.covered_cells,
            "coverage": rep.coverage,
            "endpoints_used": rep.endpoints_used,
            "wall_time": rep.wall_time,
            "records": len(recs),
            "skipped": recs.skipped,
        },
        args.out,
    )
    if recs.skipped and len(recs) == 1:
        print("every attempted word was refused by the lifting guard", file=sys.stderr)
        return EXIT_GUARD
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _need(doc: dict, key: str, kind: str):
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(f"{kind} file is missing {key!r}")
    return doc[key]


def _need_int(doc: dict, key: str, kind: str) -> int:
    v = _need(doc, key, kind)
    if not isinstance(v, int) or isinstance(v, bool):
        raise FormatError(f"{kind} file: {key} must be an integer")
    return v


def _distribution_checks(dist: SeparatedDistribution) -> list[tuple[str, bool]]:
    fib = first_integral(dist)
    vectors = coefficient_table(dist).vectors()
    kills = True
    for row in fib.t_rows:
        for v in vectors:
            dot = GaussianRational(0)
            for t, c in zip(row, v):
                dot = dot + t * c
            if dot:
                kills = False
    span = fib.span_basis
    brackets = bracket_span(dist)
    if brackets or span:
        agree = same_row_space(brackets, span)
    else:
        agree = True
    return [
        ("first integrals annihilate every lift", fib.verify()),
        ("annihilator rows kill the curvature span", kills),
        ("bracket span equals curvature span", agree),
    ]


def _report_checks(doc: dict) -> list[tuple[str, bool]]:
    dist = parse_distribution(_need(doc, "distribution", "report"))
    fresh = analyze_doc(dist)
    keys = ("kappa", "span_basis", "first_integrals")
    match = all(doc.get(k) == fresh[k] for k in keys)
    return [("report matches recomputation", match)] + _distribution_checks(dist)


def _synthesis_checks(doc: dict) -> list[tuple[str, bool]]:
    kind = "synthesis"
    dist = parse_distribution(_need(doc, "distribution", kind))
    M = dist.M
    b = [_parse_gauss(o, "b") for o in _need(doc, "b", kind)]
    nu = [
        [_parse_gauss(o, "nu") for o in row] for row in _need(doc, "nu", kind)
    ]
    k = _need_int(doc, "k", kind)
    m = _need_int(doc, "m", kind)
    X = _parse_field(_need(doc, "X", kind), M, "X")
    S = _parse_poly(_need(doc, "S", kind), M, "S")
    z_doc = _need(doc, "Z", kind)
    base = _parse_field(_need(z_doc, "base", kind), M, "Z.base")
    z_components = [
        _parse_poly(p, M, f"Z.z_components[{j}]")
        for j, p in enumerate(_need(z_doc, "z_components", kind))
    ]
    cert = _need(doc, "certificates", kind)

    flat = True
    try:
        Y = build_Y(b, nu)
        for pole in range(m):
            verify_linearization(Y, pole, k, certified=m)
    except (SynthesisError, ValueError):
        flat = False
    tangent = len(z_components) == dist.N and all(
        z_components[j] == contract(dist.omega[j], X) for j in range(dist.N)
    )
    return [
        ("residues all nonzero", all(bool(c) for row in nu for c in row)),
        ("head poles flat to the certified order", flat),
        ("pole lines invariant under the field", verify_invariance(X, b)),
        (
            "flow derivative of S divisible by S",
            poly_divmod(X.apply(S), S)[1].is_zero(),
        ),
        ("lifted field projects to the base field", base.components == X.components),
        ("lifted field tangent to the distribution", tangent),
        (
            "minor determinants nonzero",
            bool(_parse_gauss(_need(cert, "det_J", kind), "det_J"))
            and bool(_parse_gauss(_need(cert, "det_J1", kind), "det_J1")),
        ),
    ]


def _density_checks(doc: dict) -> list[tuple[str, bool]]:
    kind = "density"
    total = _need_int(doc, "total_cells", kind)
    covered = _need_int(doc, "covered_cells", kind)
    coverage = _need(doc, "coverage", kind)
    eps = _need(doc, "eps", kind)
    numbers_ok = isinstance(coverage, (int, float)) and isinstance(eps, (int, float))
    return [
        ("coverage fraction in [0, 1]", numbers_ok and 0.0 <= coverage <= 1.0),
        ("cell counts consistent", total >= 1 and 0 <= covered <= total),
        (
            "fraction equals covered/total",
            numbers_ok and total >= 1 and coverage == covered / total,
        ),
        ("grid resolution positive", numbers_ok and eps > 0),
        ("record counts sane", _need_int(doc, "records", kind) >= 1
         and _need_int(doc, "skipped", kind) >= 0
         and _need_int(doc, "endpoints_used", kind) >= 1),
    ]


def cmd_verify(args) -> int:
    doc = _load_json(args.path)
    kind = doc.get("kind") if isinstance(doc, dict) else None
    if kind is None:
        checks = _distribution_checks(parse_distribution(doc))
    elif kind == "report":
        checks = _report_checks(doc)
    elif kind == "synthesis":
        checks = _synthesis_checks(doc)
    elif kind == "density":
        checks = _density_checks(doc)
    else:
        raise FormatError(f"unknown report kind {kind!r}")
    failed = 0
    for name, ok in checks:
        print(("PASS " if ok else "FAIL ") + name)
        failed += not ok
    return EXIT_VERIFY if failed else EXIT_OK


# ---------------------------------------------------------------------------
# argument surface


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="denseleaf",
        description="exact analysis, synthesis, and desk-scale simulation "
        "of separated-variable Pfaffian systems",
    )
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser(
        "analyze", help="codimension, curvature span, and first integrals"
    )
    a.add_argument("path", help="DistributionFile JSON")
    a.add_argument("--out", default=None, help="write the report here instead of stdout")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser(
        "synthesize", help="build the tangent field with exact certificates"
    )
    s.add_argument("path", help="DistributionFile JSON")
    s.add_argument("--seed", type=int, default=0, help="pole-draw seed (default 0)")
    s.add_argument(
        "--k",
        type=int,
        default=None,
        help="flatness order override (default: smallest admissible)",
    )
    s.add_argument("--out", default=None, help="write the result here instead of stdout")
    s.set_defaults(func=cmd_synthesize)

    m = sub.add_parser(
        "simulate", help="accumulate loop returns and report slice coverage"
    )
    m.add_argument("path", help="DistributionFile JSON")
    m.add_argument("returns", help="CSV output path for the return records")
    m.add_argument("--budget", type=int, default=10**4, help="max words to lift")
    m.add_argument("--eps", type=float, default=0.05, help="grid resolution")
    m.add_argument("--tol", type=float, default=1e-12, help="quadrature tolerance")
    m.add_argument("--seed", type=int, default=0, help="simulation seed")
    m.add_argument("--out", default=None, help="write the report here instead of stdout")
    m.set_defaults(func=cmd_simulate)

    v = sub.add_parser(
        "verify", help="re-run the invariant battery on a system or report file"
    )
    v.add_argument("path", help="DistributionFile or any emitted report JSON")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if getattr(args, "seed", 0) < 0 or getattr(args, "seed", 0) >= 2**64:
        print("error: --seed must fit in an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
