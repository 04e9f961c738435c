r"""Measured dynamics of synthesized fields: holonomy, contraction,
accumulated loop returns, and density reports.

Everything here is deliberately numeric.  The exact layers predict what
loops should do (multipliers e^{2 pi i nu}, displacement lattices inside
the coefficient span, contraction rate of the linearized returns); this
module integrates, accumulates, and counts, so the predictions can be
checked against honest measurement rather than against themselves.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .distribution import SeparatedDistribution, coefficient_table
from .lifting import GuardViolation, LiftGuard, lift_loop
from .lifting_paths import LineSegment, PiecewisePath, TorusLoop
from .returns import elementary_basis_for
from .synthesis import RationalAxisField, spanning_monomials

__all__ = [
    "SimConfig",
    "holonomy_multipliers",
    "holonomy_numeric",
    "contraction_delta",
    "ContractionReport",
    "contraction_check",
    "default_generators",
    "ReturnRecord",
    "ReturnAccumulation",
    "accumulate_returns",
    "DensityReport",
    "density_report",
    "mu_multipliers",
    "ProbeRecord",
    "subgroup_density_probe",
]


@dataclass(frozen=True)
class SimConfig:
    """Knobs for the numeric runs.

    `fiber_radius` is the declared safe radius of the a-priori lifting
    guard.  The density grid lives on a much smaller disc (its radius is
    an argument of `density_report`): the guard bounds the worst
    intermediate excursion of a lift, which is far larger than the disc
    the endpoints are expected to fill.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_step: float = math.inf
    base_point: tuple | None = None  # anchor p of the generator loops
    fiber_radius: float = 1.0
    eps: float = 0.05
    budget: int = 10**4
    seed: int = 0

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0 or self.max_step <= 0:
            raise ValueError("integrator tolerances must be positive")
        if self.fiber_radius <= 0 or self.eps <= 0:
            raise ValueError("radii must be positive")
        if self.budget < 0:
            raise ValueError("budget must be nonnegative")


# ---------------------------------------------------------------------------
# holonomy around a single pole


def holonomy_multipliers(Y: RationalAxisField, pole: int) -> np.ndarray:
    """Predicted multipliers of the loop around one pole: e^{2 pi i nu}.

    Exact for any pole of the field, not only the flat ones: the axis
    equations are one-dimensional linear, so the multiplier is the
    exponential of the residue and the other poles (all outside the
    loop) contribute nothing.
    """
    if not 0 <= pole < len(Y.b):
        raise ValueError("pole index out of range")
    return np.array(
        [np.exp(2j * math.pi * row[pole].to_complex()) for row in Y.nu]
    )


def holonomy_numeric(
    Y: RationalAxisField,
    pole: int,
    z: Sequence[complex] | None = None,
    turns: int = 1,
    abs_tol: float = 1e-12,
    rel_tol: float = 1e-10,
    max_step: float = math.inf,
) -> np.ndarray:
    """Fiber point after dragging z around the pole, by integrating the
    axis equations along the circle of half the minimal pole gap.

    z defaults to (1, ..., 1), in which case the result is the measured
    multiplier vector itself; negative `turns` runs the loop clockwise.
    """
    if not 0 <= pole < len(Y.b):
        raise ValueError("pole index out of range")
    center = Y.b[pole].to_complex()
    gap = min(
        abs(bj.to_complex() - center) for j, bj in enumerate(Y.b) if j != pole
    )
    radius = gap / 2.0

    def rhs(theta, zv):
        u = center + radius * np.exp(1j * theta)
        du = 1j * radius * np.exp(1j * theta)
        return np.array(
            [ps.eval_complex(u) * du * zi for ps, zi in zip(Y.pole_sums, zv)]
        )

    z0 = np.ones(Y.num_axes, dtype=complex) if z is None else np.asarray(z, dtype=complex)
    if z0.shape != (Y.num_axes,):
        raise ValueError(f"fiber point needs {Y.num_axes} coordinates")
    sol = solve_ivp(
        rhs,
        (0.0, 2.0 * math.pi * turns),
        z0,
        method="RK45",
        rtol=rel_tol,
        atol=abs_tol,
        max_step=max_step,
    )
    if not sol.success:
        raise RuntimeError(f"holonomy integration failed: {sol.message}")
    return sol.y[:, -1]


# ---------------------------------------------------------------------------
# contraction of the linearized returns


def contraction_delta(mu: Sequence[Sequence]) -> float:
    """The uniform bound e^{-2 pi delta~} on the return-map norm ratios,
    delta~ being the worst column margin min(Im mu_1j, Im(mu_1j + mu_ij)).
    A margin <= 0 simply makes the bound >= 1 (no contraction claimed)."""
    margins = []
    rows = len(mu)
    for j in range(len(mu[0])):
        worst = mu[0][j].im
        for i in range(1, rows):
            worst = min(worst, (mu[0][j] + mu[i][j]).im)
        margins.append(worst)
    return math.exp(-2.0 * math.pi * float(min(margins)))


class ContractionReport(NamedTuple):
    delta: float
    max_ratio: float
    samples: int

    @property
    def ok(self) -> bool:
        # the bound is attained (exactly, for one axis), so allow one ulp
        return self.max_ratio <= self.delta * (1 + 1e-12) and self.delta < 1.0


def contraction_check(
    mu: Sequence[Sequence], samples: int = 1000, seed: int = 0
) -> ContractionReport:
    """Measure the worst norm ratio of the linearized return maps.

    Each column j acts by t_i -> e^{2 pi i mu_ij} t_i with the loop
    coordinate fixed; the norm is the ambient one after the chart,
    |t_1| sqrt(1 + sum |t_i|^2 + |a|^2).  The measured maximum must stay
    below the closed-form delta, and strictly below 1.
    """
    delta = contraction_delta(mu)
    rows = len(mu)
    mults = [
        np.array([np.exp(2j * math.pi * mu[i][j].to_complex()) for i in range(rows)])
        for j in range(len(mu[0]))
    ]
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(samples):
        scale = 10.0 ** rng.uniform(-3, 3)
        tail = np.array(
            [
                scale * (rng.gauss(0, 1) + 1j * rng.gauss(0, 1))
                for _ in range(rows)  # t_2..t_{M-1} and the loop coordinate
            ]
        )
        base = math.sqrt(1.0 + float(np.sum(np.abs(tail) ** 2)))
        for g in mults:
            moved = tail.copy()
            if rows > 1:
                moved[: rows - 1] = moved[: rows - 1] * g[1:]
            ratio = (
                abs(g[0])
                * math.sqrt(1.0 + float(np.sum(np.abs(moved) ** 2)))
                / base
            )
            worst = max(worst, ratio)
    return ContractionReport(delta=delta, max_ratio=worst, samples=samples)


# ---------------------------------------------------------------------------
# honest accumulation of loop returns


def default_generators(
    dist: SeparatedDistribution,
    scale: float = 0.05,
    anchor: Sequence[complex] | None = None,
) -> list[PiecewisePath]:
    """Loops whose lifted displacements reach over the coefficient span.

    For each spanning coefficient, take the first winding orthogonal to
    its shifted exponent and run the torus loop at a base point near the
    anchor — twice, the second at a base point rotated so the
    displacement turns a quarter, making the two real-independent.
    Rotated loops are conjugated by a straight bridge from the anchor,
    so all generators start at the same point and concatenate freely.
    """
    table = coefficient_table(dist)
    spanning = spanning_monomials(table)
    if not spanning:
        raise ValueError("curvature vanishes: no loop moves the fiber")
    M = dist.M
    anchor = (
        np.full(M, scale, dtype=complex)
        if anchor is None
        else np.asarray(anchor, dtype=complex)
    )
    if anchor.shape != (M,):
        raise ValueError(f"anchor needs {M} coordinates")
    if np.any(anchor == 0):
        raise ValueError("anchor must avoid the coordinate hyperplanes")
    out: list[PiecewisePath] = []
    for K, i, j in spanning:
        target = list(K)
        target[i] += 1
        target[j] += 1
        ev = elementary_basis_for(tuple(target), i)[0]
        turn = next(l for l in range(M) if target[l] >= 1)
        for phase in (1.0, np.exp(1j * math.pi / (2 * target[turn]))):
            y = anchor.copy()
            y[turn] *= phase
            loop = PiecewisePath([TorusLoop(y, ev.powers)])
            if np.allclose(y, anchor):
                out.append(loop)
            else:
                bridge = PiecewisePath([LineSegment(anchor, y)])
                out.append(bridge.concat(loop).concat(bridge.reversed()))
    return out


class ReturnRecord(NamedTuple):
    exponents: tuple
    word_length: int
    displacement: np.ndarray
    endpoint: np.ndarray
    residual: float  # distance from the coefficient span

    @property
    def word(self) -> tuple:
        """The word spelled out as signed 1-based generator indices."""
        out = []
        for idx, k in enumerate(self.exponents, start=1):
            out.extend([idx if k > 0 else -idx] * abs(k))
        return tuple(out)


class ReturnAccumulation(list):
    """A list of ReturnRecord that also remembers how many words the
    guard refused."""

    def __init__(self, records=(), skipped: int = 0):
        super().__init__(records)
        self.skipped = skipped


def _span_basis(dist: SeparatedDistribution) -> np.ndarray:
    vectors = coefficient_table(dist).vectors()
    if not vectors:
        return np.zeros((0, dist.N))
    A = np.array([[c.to_complex() for c in row] for row in vectors])
    _u, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s > 1e-12 * s[0]))
    return vh[:rank]


def _words_of_radius(g: int, r: int):
    if r == 0:
        yield (0,) * g
        return
    for word in itertools.product(range(-r, r + 1), repeat=g):
        if sum(abs(k) for k in word) == r:
            yield word


def accumulate_returns(
    dist: SeparatedDistribution,
    generators: Sequence[PiecewisePath],
    cfg: SimConfig | None = None,
    z0: Sequence[complex] | None = None,
    max_radius: int = 100,
) -> ReturnAccumulation:
    """Lift words in the generators, shortest first, one quadrature per
    word — no lattice shortcuts — until the word budget is spent.

    Words are exponent tuples; negative powers traverse the reversed
    loop.  All generators must be closed and share a start point so any
    concatenation is a genuine path.  Every lift runs under the a-priori
    guard for cfg.fiber_radius; words the guard refuses are skipped and
    counted, not fatal.  Displacements land in the coefficient span up
    to quadrature error; each record carries its measured distance from
    the span.
    """
    cfg = SimConfig() if cfg is None else cfg
    if not generators:
        raise ValueError("need at least one generator")
    start = generators[0].start()
    for g in generators:
        if not g.is_closed():
            raise ValueError("generators must be closed loops")
        if not np.allclose(g.start(), start, atol=1e-12):
            raise ValueError("generators must share a start point")
    z0 = np.zeros(dist.N, dtype=complex) if z0 is None else np.asarray(z0, dtype=complex)
    guard = LiftGuard(
        base_radius=max(g.sup_abs() for g in generators) * (1 + 1e-9),
        fiber_radius=cfg.fiber_radius,
    )
    basis = _span_basis(dist)

    def residual_of(disp):
        if basis.shape[0] == 0:
            return float(np.linalg.norm(disp))
        coords = basis.conj() @ disp
        return float(np.linalg.norm(disp - basis.T @ coords))

    records = ReturnAccumulation(
        [
            ReturnRecord(
                exponents=(0,) * len(generators),
                word_length=0,
                displacement=np.zeros(dist.N, dtype=complex),
                endpoint=z0.copy(),
                residual=0.0,
            )
        ]
    )
    attempted = 0
    for r in range(1, max_radius + 1):
        if attempted >= cfg.budget:
            break
        for word in _words_of_radius(len(generators), r):
            if attempted >= cfg.budget:
                break
            path = None
            for gen, k in zip(generators, word):
                if k == 0:
                    continue
                piece = gen if k > 0 else gen.reversed()
                for _ in range(abs(k)):
                    path = piece if path is None else path.concat(piece)
            attempted += 1
            try:
                disp = lift_loop(dist, path, z0=z0, guard=guard, tol=cfg.abs_tol) - z0
            except GuardViolation:
                records.skipped += 1
                continue
            records.append(
                ReturnRecord(
                    exponents=word,
                    word_length=r,
                    displacement=disp,
                    endpoint=z0 + disp,
                    residual=residual_of(disp),
                )
            )
    return records


class DensityReport(NamedTuple):
    eps: float
    radius: float
    span_dim: int
    total_cells: int
    covered_cells: int
    coverage: float
    endpoints_used: int
    wall_time: float


def density_report(
    records: Sequence[ReturnRecord],
    cfg: SimConfig | None = None,
    radius: float = 0.2,
    z0: Sequence[complex] | None = None,
) -> DensityReport:
    """How much of the level-slice disc the accumulated endpoints fill:
    the fraction of eps-grid cells of the radius-disc occupied by some
    endpoint (a cell is the eps-box around its grid point, so a single
    endpoint claims exactly one cell, wherever it lands).

    The slice directions are measured from the displacements themselves
    (their span is the coefficient span, by the membership invariant of
    the records), and the grid lives in orthonormal coordinates on that
    span, so cells are honest eps-cells.  A zero-dimensional span — a
    closed system, nothing spreads — keeps the single cell at the base
    point, which the empty word always covers.
    """
    t0 = time.perf_counter()
    cfg = SimConfig() if cfg is None else cfg
    eps = cfg.eps
    if not records:
        raise ValueError("no records to report on")
    if z0 is None:
        zeros = [r for r in records if r.word_length == 0]
        z0 = zeros[0].endpoint if zeros else np.zeros_like(records[0].endpoint)
    z0 = np.asarray(z0, dtype=complex)
    disp = np.array([rec.endpoint - z0 for rec in records])
    _u, s, vh = np.linalg.svd(disp)
    cut = max(1e-10, 1e-6 * (s[0] if s.size else 0.0))
    rank = int(np.sum(s > cut))
    if rank == 0:
        covered = any(float(np.max(np.abs(d))) <= eps / 2 for d in disp)
        return DensityReport(
            eps, radius, 0, 1, int(covered), float(covered), len(records),
            time.perf_counter() - t0,
        )
    basis = vh[:rank]
    coords = disp @ basis.conj().T
    steps = int(math.floor(radius / eps))
    if (2 * steps + 1) ** (2 * rank) > 10**6:
        raise ValueError("grid too fine for this span dimension")
    axes = [np.arange(-steps, steps + 1)] * (2 * rank)
    mesh = np.meshgrid(*axes, indexing="ij")
    cells = np.stack([m.ravel() for m in mesh], axis=-1)
    keep = np.linalg.norm(cells * eps, axis=1) <= radius + 1e-12
    cells = cells[keep]
    real = np.empty((coords.shape[0], 2 * rank))
    real[:, 0::2] = coords.real
    real[:, 1::2] = coords.imag
    hit = {tuple(c) for c in np.round(real / eps).astype(int)}
    covered = int(sum(tuple(c) in hit for c in cells))
    total = int(cells.shape[0])
    return DensityReport(
        eps=eps,
        radius=radius,
        span_dim=rank,
        total_cells=total,
        covered_cells=covered,
        coverage=covered / total,
        endpoints_used=len(records),
        wall_time=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# multiplicative subgroup probe


def mu_multipliers(mu: Sequence[Sequence]) -> np.ndarray:
    """Columns of the exponent matrix as multiplier vectors e^{2 pi i mu},
    one row per distinguished loop, one column per axis coordinate."""
    rows = len(mu)
    return np.array(
        [
            [np.exp(2j * math.pi * mu[i][j].to_complex()) for i in range(rows)]
            for j in range(len(mu[0]))
        ]
    )


class ProbeRecord(NamedTuple):
    exponents: tuple
    value: np.ndarray
    error: float
    word_length: int


def subgroup_density_probe(
    multipliers: Sequence,
    target,
    word_bound: int = 60,
    beam_width: int = 2000,
    tol: float | None = None,
    exhaustive_limit: int = 8 * 10**6,
) -> ProbeRecord:
    """Best short product of the multipliers approaching a target, by
    bounded breadth-first search over exponent words.

    `multipliers` is one nonzero complex number (or vector) per
    generator; the product over a word k is componentwise prod g_j^{k_j}
    and the reported error is the max-norm distance to the target.
    When the whole |k|_1 <= word_bound ball fits in `exhaustive_limit`
    states it is enumerated outright, so the answer is the exact
    minimizer.  With more generators the search falls back to a beam
    ordered by distance in log coordinates (magnitude plus wrapped
    phase), which stays informative where tiny products make the direct
    error saturate at |target|; the reported best is then the
    true-error minimizer among words visited, stopping early once it
    reaches `tol`.  Deterministic either way.  Because generated
    exponents are rational truncations, the subgroup is only finitely
    fine — this probe is the empirical measure of how fine.
    """
    mults = np.atleast_2d(np.asarray(multipliers, dtype=complex))
    if mults.shape[0] == 1 and np.ndim(multipliers) == 1:
        # a plain sequence of scalars: one generator per entry
        mults = mults.T
    ngen, naxes = mults.shape
    if np.any(mults == 0):
        raise ValueError("multipliers must be nonzero")
    target_arr = np.atleast_1d(np.asarray(target, dtype=complex))
    if target_arr.shape != (naxes,):
        raise ValueError(f"target must have {naxes} components")
    if np.any(target_arr == 0):
        raise ValueError("target must be nonzero")
    logs = np.log(mults)  # any branch works: words take integer powers
    t_log = np.log(target_arr)

    def values_of(K):
        return np.exp(K.astype(float) @ logs)

    def true_errors(K):
        return np.max(np.abs(values_of(K) - target_arr), axis=1)

    def record(k, err):
        karr = np.array(k, dtype=int)[None, :]
        return ProbeRecord(
            exponents=tuple(int(x) for x in k),
            value=values_of(karr)[0],
            error=float(err),
            word_length=int(sum(abs(int(x)) for x in k)),
        )

    if (2 * word_bound + 1) ** ngen <= exhaustive_limit:
        side = np.arange(-word_bound, word_bound + 1)
        K = np.stack(
            np.meshgrid(*([side] * ngen), indexing="ij"), axis=-1
        ).reshape(-1, ngen)
        K = K[np.abs(K).sum(axis=1) <= word_bound]
        best = None
        for lo in range(0, K.shape[0], 1 << 18):
            chunk = K[lo : lo + (1 << 18)]
            errs = true_errors(chunk)
            i = int(np.argmin(errs))
            if best is None or errs[i] < best[0]:
                best = (float(errs[i]), tuple(chunk[i]))
        return record(best[1], best[0])

    steps = np.concatenate([np.eye(ngen, dtype=int), -np.eye(ngen, dtype=int)])

    def beam_scores(K):
        d = K.astype(float) @ logs - t_log
        wrapped = np.abs(d.imag - 2.0 * math.pi * np.round(d.imag / (2.0 * math.pi)))
        return np.sum(np.abs(d.real) + wrapped, axis=1)

    frontier = np.zeros((1, ngen), dtype=int)
    best_k = (0,) * ngen
    best_err = float(true_errors(frontier)[0])
    seen = {best_k}
    for _ in range(2 * word_bound):
        if tol is not None and best_err <= tol:
            break
        room = np.sum(np.abs(frontier), axis=1) < word_bound
        if not np.any(room):
            break
        neigh = (frontier[room][:, None, :] + steps[None, :, :]).reshape(-1, ngen)
        fresh = [k for k in map(tuple, neigh) if k not in seen]
        if not fresh:
            break
        seen.update(fresh)
        cand = np.array(fresh, dtype=int)
        errs = true_errors(cand)
        top = int(np.argmin(errs))
        if errs[top] < best_err:
            best_err = float(errs[top])
            best_k = tuple(cand[top])
        order = np.argsort(beam_scores(cand), kind="stable")
        frontier = cand[order[:beam_width]]
    return record(best_k, best_err)
