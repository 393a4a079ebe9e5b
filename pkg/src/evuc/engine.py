"""Cutting-plane resolution of unit commitment with an exact EV aggregate.

The master LP dispatches the production units against demand plus the
aggregate charging vector p, with p constrained by a growing pool of
border cuts. Separation reduces membership of p in the exact aggregate
set to submodular minimization over the extended ground set: the extended
vector (p, -sum p) lies in the zero-base polyhedron of the aggregate
border extension if and only if p is a true aggregate schedule. Violated
sets harvested from the minimization are mapped back to upper/lower
border cuts on p and added all at once.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import lp, sfm
from .gpoly import LOWER, UPPER, BorderEvaluator, Cut, naive_polytope
from .model import Instance, SubsetMask, flexibility_rows


class EngineError(RuntimeError):
    """The cutting-plane loop reached an inconsistent state."""


class UcStatus(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    ITERATION_LIMIT = "IterationLimit"


@dataclass
class SolveOptions:
    sep_tol: float = 1e-6
    max_iters: int = 100
    threads: int = 1
    all_cuts: bool = True      # add every harvested cut; False keeps only the minimizer's
    naive_only: bool = False   # stop after the first master solve (no separation)


@dataclass
class IterationStats:
    objective: float
    cuts_added: int
    sfm_value: float | None
    oracle_wall_ms: float
    master_wall_ms: float


@dataclass
class SolveReport:
    status: UcStatus
    objective: float
    iterations: list[IterationStats]
    p_schedule: np.ndarray | None
    unit_schedules: list[np.ndarray] | None
    total_cuts: int


@dataclass
class SeparationResult:
    feasible: bool
    cuts: list[Cut]
    sfm_value: float


@dataclass
class DisaggregationResult:
    feasible: bool
    schedules: list[np.ndarray] | None
    max_residual: float


class CutPool:
    """Ordered cut collection, deduplicated by (subset, sense).

    Re-adding a key keeps the tighter bound; this happens when a border
    cut from separation sharpens a componentwise naive bound on the same
    subset. Tightening counts as an addition for progress accounting.
    """

    def __init__(self, cuts=()):
        self._cuts: dict[tuple[int, str], Cut] = {}
        for cut in cuts:
            self.add(cut)

    def add(self, cut: Cut) -> bool:
        key = cut.key()
        prev = self._cuts.get(key)
        if prev is None:
            self._cuts[key] = cut
            return True
        if (cut.sense == UPPER and cut.bound < prev.bound - 1e-12 * (1.0 + abs(prev.bound))) or (
            cut.sense == LOWER and cut.bound > prev.bound + 1e-12 * (1.0 + abs(prev.bound))
        ):
            self._cuts[key] = cut
            return True
        return False

    def add_all(self, cuts) -> int:
        return sum(1 for cut in cuts if self.add(cut))

    def __iter__(self):
        return iter(self._cuts.values())

    def __len__(self):
        return len(self._cuts)


def build_master(instance: Instance, pool: CutPool) -> lp.LinearProgram:
    """Master LP: unit dispatch against demand plus the EV charging vector.

    Variables are the unit productions (one block of T per unit) followed
    by the aggregate charging vector p. Demand balance is one equality per
    step; unit ramps and extra rows apply to their own block; every pool
    cut becomes one row on p.
    """
    T = instance.T
    M = len(instance.units)
    n = (M + 1) * T
    p_off = M * T
    objective = np.zeros(n)
    lower = np.full(n, -np.inf)
    upper = np.full(n, np.inf)
    rows: list[lp.Row] = []
    for m, unit in enumerate(instance.units):
        off = m * T
        objective[off:off + T] = unit.cost
        lower[off:off + T] = unit.p_min
        upper[off:off + T] = unit.p_max
        if unit.ramp_up is not None:
            for t in range(1, T):
                rows.append(lp.Row({off + t: 1.0, off + t - 1: -1.0}, "<=", unit.ramp_up))
        if unit.ramp_down is not None:
            for t in range(1, T):
                rows.append(lp.Row({off + t - 1: 1.0, off + t: -1.0}, "<=", unit.ramp_down))
        for extra in unit.extra_rows:
            rows.append(lp.Row({off + i: v for i, v in extra.coeffs}, extra.sense, extra.rhs))
    for t in range(T):
        coeffs = {m * T + t: 1.0 for m in range(M)}
        coeffs[p_off + t] = -1.0
        rows.append(lp.Row(coeffs, "=", float(instance.demand[t])))
    for cut in pool:
        coeffs = {p_off + t: 1.0 for t in cut.subset.indices()}
        rows.append(lp.Row(coeffs, "<=" if cut.sense == UPPER else ">=", cut.bound))
    return lp.LinearProgram(n, objective, lower, upper, rows)


def _fleet_oracle_parts(evaluator: BorderEvaluator, p: np.ndarray):
    """Membership oracle for p plus the extended-vector sum it subtracts.

    h(A) = (aggregate border extension of A) - (extended vector of p
    summed over A); p is a true aggregate schedule exactly when h is
    nonnegative everywhere.
    """
    T = evaluator.T
    p = np.asarray(p, dtype=float)
    sum_p = float(np.sum(p))
    ext = T

    def p_star(mask: SubsetMask) -> float:
        idx = [i for i in mask.indices() if i < T]
        # summing a sliced copy keeps the full-set value identical to
        # np.sum(p), so h(full) is exactly zero
        total = float(np.sum(p[idx])) if idx else 0.0
        if ext in mask:
            total -= sum_p
        return total

    def h(mask: SubsetMask) -> float:
        return evaluator.base_extension(mask) - p_star(mask)

    p_ext = np.append(p, -sum_p)

    def chain_values(ordering: np.ndarray) -> np.ndarray:
        return evaluator.chain_borders(ordering) - np.cumsum(p_ext[ordering])

    oracle = sfm.SfmOracle(eval=h, ground_size=T + 1, chain_values=chain_values)
    return oracle, p_star


def make_fleet_oracle(evaluator: BorderEvaluator, p: np.ndarray) -> sfm.SfmOracle:
    return _fleet_oracle_parts(evaluator, p)[0]


def _cut_from_extended(evaluator: BorderEvaluator, mask: SubsetMask,
                       extension_value: float | None = None) -> Cut:
    """Map an extended violated set to a border cut on p.

    extension_value, when known (from the minimization trace), is the
    aggregate border extension of the set; passing it skips a fresh
    per-profile evaluation of the bound.
    """
    T = evaluator.T
    ext_bit = 1 << T
    if mask.bits & ext_bit:
        inner = mask.bits & ~ext_bit
        subset = SubsetMask(~inner & ((1 << T) - 1), T)
        if extension_value is None:
            return Cut(subset, LOWER, evaluator.aggregate_border(subset, LOWER))
        return Cut(subset, LOWER, -extension_value + 0.0)
    subset = SubsetMask(mask.bits, T)
    if extension_value is None:
        return Cut(subset, UPPER, evaluator.aggregate_border(subset, UPPER))
    return Cut(subset, UPPER, extension_value)


def separation_oracle(evaluator: BorderEvaluator, p: np.ndarray,
                      sep_tol: float = 1e-6) -> SeparationResult:
    """Decide membership of p in the exact aggregate set or return cuts.

    Runs the minimum-norm-point minimization of the membership oracle;
    feasibility is declared when the minimum is above a scale-aware
    threshold, otherwise every violated chain set maps to a border cut
    (sets without the extension element give upper cuts, sets with it
    give lower cuts on the complement) with bounds re-evaluated exactly.
    """
    p = np.asarray(p, dtype=float)
    oracle, p_star = _fleet_oracle_parts(evaluator, p)
    result = sfm.min_norm_point(oracle)
    threshold = sep_tol * (1.0 + float(np.sum(np.abs(p))))
    if result.value >= -threshold:
        return SeparationResult(True, [], result.value)
    h_seen: dict[int, float] = {result.minimizer.bits: result.value}
    for bits, value in result.trace.chain_sets():
        if value < -threshold and bits not in h_seen:
            h_seen[bits] = value
    masks = sfm.collect_cuts(result.trace, threshold)
    cuts: dict[tuple[int, str], Cut] = {}
    for mask in masks:
        extension_value = h_seen[mask.bits] + p_star(mask)
        cut = _cut_from_extended(evaluator, mask, extension_value)
        cuts.setdefault(cut.key(), cut)
    return SeparationResult(False, list(cuts.values()), result.value)


def solve_uc(instance: Instance, opts: SolveOptions | None = None,
             on_cuts=None) -> SolveReport:
    """Cutting-plane solve of the unit-commitment instance.

    Starts from the componentwise naive relaxation of the aggregate set
    and alternates master solves with separation until the charging
    schedule certifies as a true aggregate. on_cuts, when given, is called
    with (iteration index, list of added cuts) after each violated round.
    """
    opts = opts or SolveOptions()
    T = instance.T
    p_off = len(instance.units) * T
    evaluator = BorderEvaluator(instance.fleet, instance.horizon.step_hours,
                                thread_count=opts.threads)
    pool = CutPool(naive_polytope(instance.fleet, T))
    iterations: list[IterationStats] = []

    for _ in range(max(1, opts.max_iters)):
        t0 = time.perf_counter()
        master = build_master(instance, pool)
        sol = lp.solve_lp(master)
        master_ms = (time.perf_counter() - t0) * 1e3
        if sol.status == lp.LpStatus.INFEASIBLE:
            return SolveReport(UcStatus.INFEASIBLE, np.nan, iterations, None, None, len(pool))
        if sol.status != lp.LpStatus.OPTIMAL:
            raise EngineError(f"master solve failed with status {sol.status.value}")
        p_k = sol.x[p_off:]
        schedules = [sol.x[m * T:(m + 1) * T] for m in range(len(instance.units))]

        if opts.naive_only:
            iterations.append(IterationStats(sol.objective_value, 0, None, 0.0, master_ms))
            return SolveReport(UcStatus.OPTIMAL, sol.objective_value, iterations,
                               p_k, schedules, len(pool))

        t1 = time.perf_counter()
        sep = separation_oracle(evaluator, p_k, opts.sep_tol)
        oracle_ms = (time.perf_counter() - t1) * 1e3
        if sep.feasible:
            iterations.append(IterationStats(sol.objective_value, 0, sep.sfm_value,
                                             oracle_ms, master_ms))
            return SolveReport(UcStatus.OPTIMAL, sol.objective_value, iterations,
                               p_k, schedules, len(pool))
        cuts = sep.cuts if opts.all_cuts else sep.cuts[:1]
        added = pool.add_all(cuts)
        iterations.append(IterationStats(sol.objective_value, added, sep.sfm_value,
                                         oracle_ms, master_ms))
        if added == 0:
            raise EngineError(
                "separation reported a violation but produced no new cut; "
                "master and oracle tolerances are inconsistent"
            )
        if on_cuts is not None:
            on_cuts(len(iterations) - 1, cuts)

    return SolveReport(UcStatus.ITERATION_LIMIT,
                       iterations[-1].objective if iterations else np.nan,
                       iterations, None, None, len(pool))


def solve_extensive(instance: Instance) -> SolveReport:
    """Reference solve with one explicit charging block per fleet profile.

    Ground truth for the cutting-plane path: class n contributes count_n
    times a per-vehicle schedule constrained by its own power box and
    energy windows.
    """
    T = instance.T
    M = len(instance.units)
    N = len(instance.fleet)
    n_vars = (M + N) * T
    objective = np.zeros(n_vars)
    lower = np.full(n_vars, -np.inf)
    upper = np.full(n_vars, np.inf)
    rows: list[lp.Row] = []
    for m, unit in enumerate(instance.units):
        off = m * T
        objective[off:off + T] = unit.cost
        lower[off:off + T] = unit.p_min
        upper[off:off + T] = unit.p_max
        if unit.ramp_up is not None:
            for t in range(1, T):
                rows.append(lp.Row({off + t: 1.0, off + t - 1: -1.0}, "<=", unit.ramp_up))
        if unit.ramp_down is not None:
            for t in range(1, T):
                rows.append(lp.Row({off + t - 1: 1.0, off + t: -1.0}, "<=", unit.ramp_down))
        for extra in unit.extra_rows:
            rows.append(lp.Row({off + i: v for i, v in extra.coeffs}, extra.sense, extra.rhs))
    for n, profile in enumerate(instance.fleet):
        off = (M + n) * T
        lower[off:off + T] = profile.p_min
        upper[off:off + T] = profile.p_max
        rows.extend(flexibility_rows(profile, instance.horizon.step_hours, off))
    for t in range(T):
        coeffs = {m * T + t: 1.0 for m in range(M)}
        for n, profile in enumerate(instance.fleet):
            coeffs[(M + n) * T + t] = -float(profile.count)
        rows.append(lp.Row(coeffs, "=", float(instance.demand[t])))

    t0 = time.perf_counter()
    sol = lp.solve_lp(lp.LinearProgram(n_vars, objective, lower, upper, rows))
    master_ms = (time.perf_counter() - t0) * 1e3
    if sol.status == lp.LpStatus.INFEASIBLE:
        return SolveReport(UcStatus.INFEASIBLE, np.nan, [], None, None, 0)
    if sol.status != lp.LpStatus.OPTIMAL:
        raise EngineError(f"extensive solve failed with status {sol.status.value}")
    p = np.zeros(T)
    for n, profile in enumerate(instance.fleet):
        off = (M + n) * T
        p += profile.count * sol.x[off:off + T]
    schedules = [sol.x[m * T:(m + 1) * T] for m in range(M)]
    stats = IterationStats(sol.objective_value, 0, None, 0.0, master_ms)
    return SolveReport(UcStatus.OPTIMAL, sol.objective_value, [stats], p, schedules, 0)


def disaggregation_certificate(fleet, p: np.ndarray, step_hours: float = 1.0,
                               feas_tol: float = lp.FEAS_TOL) -> DisaggregationResult:
    """Split an aggregate schedule into per-profile schedules, or report the
    residual by which no split exists.

    Solved as an elastic feasibility LP: per-class schedules plus signed
    slack on the aggregation equalities, minimizing total slack. A zero
    optimum certifies p as a true aggregate.
    """
    fleet = tuple(fleet)
    p = np.asarray(p, dtype=float)
    T = p.shape[0]
    N = len(fleet)
    n_vars = N * T + 2 * T
    elastic = N * T
    objective = np.zeros(n_vars)
    objective[elastic:] = 1.0
    lower = np.full(n_vars, -np.inf)
    upper = np.full(n_vars, np.inf)
    lower[elastic:] = 0.0
    rows: list[lp.Row] = []
    for n, profile in enumerate(fleet):
        off = n * T
        lower[off:off + T] = profile.p_min
        upper[off:off + T] = profile.p_max
        rows.extend(flexibility_rows(profile, step_hours, off))
    for t in range(T):
        coeffs = {n * T + t: float(fleet[n].count) for n in range(N)}
        coeffs[elastic + t] = 1.0
        coeffs[elastic + T + t] = -1.0
        rows.append(lp.Row(coeffs, "=", float(p[t])))
    sol = lp.solve_lp(lp.LinearProgram(n_vars, objective, lower, upper, rows))
    if sol.status != lp.LpStatus.OPTIMAL:
        return DisaggregationResult(False, None, np.inf)
    slack = sol.x[elastic:elastic + T] - sol.x[elastic + T:]
    residual = float(np.max(np.abs(slack), initial=0.0))
    tol = feas_tol * (1.0 + float(np.max(np.abs(p), initial=0.0)))
    if residual > tol:
        return DisaggregationResult(False, None, residual)
    schedules = [sol.x[n * T:(n + 1) * T].copy() for n in range(N)]
    return DisaggregationResult(True, schedules, residual)
