"""Border functions of EV flexibility sets and of their exact aggregate.

The upper border of a set A is the maximum of x(A) over one profile's
flexibility polytope, the lower border the minimum; both are computed by
LP solves over the profile's power box and cumulative-energy windows.
Aggregate borders add per-profile values weighted by vehicle counts, in
fixed fleet order. The base-polyhedron extension lifts the border pair to
a single submodular function over the T time steps plus one extension
element, which is what the separation machinery minimizes.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .model import EVProfile, SubsetMask, flexibility_rows

UPPER = "upper"
LOWER = "lower"


class SolveFailure(RuntimeError):
    """An LP border evaluation reported a numerical failure."""


class StructureViolation(RuntimeError):
    """A sampled pair of subsets violated a structural inequality."""


@dataclass(frozen=True)
class Cut:
    """Linear inequality on the aggregate charging vector.

    upper: p(subset) <= bound; lower: p(subset) >= bound.
    """

    subset: SubsetMask
    sense: str
    bound: float

    def key(self) -> tuple[int, str]:
        return (self.subset.bits, self.sense)


def _border_program(profile: EVProfile, step_hours: float) -> lp.LinearProgram:
    return lp.LinearProgram(
        num_vars=profile.T,
        objective=np.zeros(profile.T),
        lower=profile.p_min,
        upper=profile.p_max,
        rows=flexibility_rows(profile, step_hours),
    )


def _checked(sol: lp.LpSolution) -> lp.LpSolution:
    if sol.status != lp.LpStatus.OPTIMAL:
        raise SolveFailure(f"border LP ended with status {sol.status.value}")
    return sol


def upper_border(profile: EVProfile, subset: SubsetMask, step_hours: float = 1.0) -> float:
    """max of x(subset) over the profile's flexibility set, times count."""
    if subset.size != profile.T:
        raise ValueError("subset mask does not match the profile horizon")
    if subset.is_empty:
        return 0.0
    prob = _border_program(profile, step_hours)
    prob.objective = -subset.indicator()
    sol = _checked(lp.solve_lp(prob))
    return profile.count * -sol.objective_value


def lower_border(profile: EVProfile, subset: SubsetMask, step_hours: float = 1.0) -> float:
    """min of x(subset) over the profile's flexibility set, times count."""
    if subset.size != profile.T:
        raise ValueError("subset mask does not match the profile horizon")
    if subset.is_empty:
        return 0.0
    prob = _border_program(profile, step_hours)
    prob.objective = subset.indicator()
    sol = _checked(lp.solve_lp(prob))
    return profile.count * sol.objective_value


class BorderEvaluator:
    """Memoized border evaluation for a fleet of EV profiles.

    The memo table is transparent: cached values are exactly the values a
    fresh evaluation would produce, because every (profile, subset, side)
    query goes through one deterministic LP path. Aggregation sums
    per-profile values in fleet order regardless of the thread schedule,
    so results are schedule-independent.
    """

    def __init__(self, fleet, step_hours: float = 1.0, thread_count: int = 1,
                 use_cache: bool = True):
        self.fleet = tuple(fleet)
        self.step_hours = float(step_hours)
        self.thread_count = max(1, int(thread_count))
        self.use_cache = bool(use_cache)
        self._point_cache: dict[tuple[int, str, int], float] = {}
        self._chain_cache: dict[tuple[int, bytes], np.ndarray] = {}
        programs = [_border_program(p, self.step_hours) for p in self.fleet]
        self._point_solvers = [lp.WarmLpSolver(p) for p in programs]
        self._chain_solvers = [lp.WarmLpSolver(p) for p in programs]
        self._locks = [threading.Lock() for _ in self.fleet]
        self._pool: ThreadPoolExecutor | None = None
        if self.fleet:
            T = self.fleet[0].T
            if any(p.T != T for p in self.fleet):
                raise ValueError("fleet profiles have differing horizons")

    @property
    def T(self) -> int:
        return self.fleet[0].T if self.fleet else 0

    def _executor(self) -> ThreadPoolExecutor | None:
        if self.thread_count <= 1 or len(self.fleet) <= 1:
            return None
        if self._pool is None:
            self._pool = ThreadPoolExecutor(max_workers=self.thread_count)
        return self._pool

    def _map_profiles(self, fn):
        pool = self._executor()
        if pool is None:
            return [fn(n) for n in range(len(self.fleet))]
        return list(pool.map(fn, range(len(self.fleet))))

    def _per_vehicle(self, n: int, side: str, subset: SubsetMask) -> float:
        """Border of profile n on subset, per vehicle (count not applied)."""
        if subset.is_empty:
            return 0.0
        key = (n, side, subset.bits)
        if self.use_cache:
            hit = self._point_cache.get(key)
            if hit is not None:
                return hit
        indicator = subset.indicator()
        objective = -indicator if side == UPPER else indicator
        with self._locks[n]:
            sol = _checked(self._point_solvers[n].solve(objective))
        value = -sol.objective_value if side == UPPER else sol.objective_value
        if self.use_cache:
            self._point_cache[key] = value
        return value

    def profile_border(self, n: int, side: str, subset: SubsetMask) -> float:
        """Count-weighted border of one fleet profile."""
        return self.fleet[n].count * self._per_vehicle(n, side, subset)

    def aggregate_border(self, subset: SubsetMask, side: str) -> float:
        """Border of the exact aggregate set: count-weighted sum over profiles."""
        if side not in (UPPER, LOWER):
            raise ValueError(f"unknown border side {side!r}")
        if subset.size != self.T and self.fleet:
            raise ValueError("subset mask does not match the fleet horizon")
        if subset.is_empty or not self.fleet:
            return 0.0
        values = self._map_profiles(lambda n: self._per_vehicle(n, side, subset))
        total = 0.0
        for n, value in enumerate(values):
            total += self.fleet[n].count * value
        return total

    def base_extension(self, subset: SubsetMask) -> float:
        """Submodular function over the extended ground set {0..T}.

        Subsets avoiding the extension element evaluate to the aggregate
        upper border; subsets containing it evaluate to minus the lower
        border of the complement of the remaining elements.
        """
        T = self.T
        if subset.size != T + 1:
            raise ValueError("extended mask must have size T + 1")
        ext_bit = 1 << T
        if subset.bits & ext_bit:
            inner = subset.bits & ~ext_bit
            comp = ~inner & ((1 << T) - 1)
            return -self.aggregate_border(SubsetMask(comp, T), LOWER) + 0.0
        return self.aggregate_border(SubsetMask(subset.bits, T), UPPER)

    def _chain_vertex(self, n: int, ordering: np.ndarray) -> np.ndarray:
        """Extended greedy vertex of profile n's 0-base polyhedron, per vehicle.

        Solved as a single LP: with weights strictly decreasing along the
        ordering, the optimizer is tight on every prefix of the chain, so
        its coordinates are exactly the chain marginals.
        """
        key = (n, ordering.tobytes())
        if self.use_cache:
            hit = self._chain_cache.get(key)
            if hit is not None:
                return hit
        T = self.T
        ranks = np.empty(T + 1)
        ranks[ordering] = np.arange(T + 1, 0, -1, dtype=float)
        objective = -(ranks[:T] - ranks[T])
        with self._locks[n]:
            sol = _checked(self._chain_solvers[n].solve(objective))
        vertex = np.append(sol.x, -np.sum(sol.x))
        if self.use_cache:
            self._chain_cache[key] = vertex
        return vertex

    def chain_borders(self, ordering: np.ndarray) -> np.ndarray:
        """Aggregate base-extension values on all prefixes of an ordering.

        ordering must be a permutation of {0..T}; entry i of the result is
        the extension function evaluated on the first i+1 elements.
        """
        ordering = np.asarray(ordering, dtype=np.intp)
        if ordering.shape != (self.T + 1,):
            raise ValueError("ordering must be a permutation of the extended ground set")
        if not self.fleet:
            return np.zeros(self.T + 1)
        vertices = self._map_profiles(lambda n: self._chain_vertex(n, ordering))
        total = np.zeros(self.T + 1)
        for n, vertex in enumerate(vertices):
            total += self.fleet[n].count * vertex
        return np.cumsum(total[ordering])


def naive_polytope(fleet, num_steps: int | None = None) -> list[Cut]:
    """Cuts of the componentwise-summed relaxation of the aggregate set.

    Per-step bounds on p_t plus prefix bounds on p({0..t}); at most 4T
    cuts after merging the duplicate step-0 keys (the {0} prefix and the
    {0} singleton are the same subset, the tighter bound is kept).
    """
    fleet = tuple(fleet)
    if num_steps is None:
        if not fleet:
            raise ValueError("num_steps is required for an empty fleet")
        num_steps = fleet[0].T
    T = int(num_steps)
    p_lo = np.zeros(T)
    p_hi = np.zeros(T)
    s_lo = np.zeros(T)
    s_hi = np.zeros(T)
    for profile in fleet:
        p_lo += profile.count * profile.p_min
        p_hi += profile.count * profile.p_max
        s_lo += profile.count * profile.s_min
        s_hi += profile.count * profile.s_max
    merged: dict[tuple[int, str], Cut] = {}

    def push(cut: Cut):
        prev = merged.get(cut.key())
        if prev is None:
            merged[cut.key()] = cut
        else:
            better = min if cut.sense == UPPER else max
            merged[cut.key()] = Cut(cut.subset, cut.sense, better(prev.bound, cut.bound))

    for t in range(T):
        step = SubsetMask(1 << t, T)
        push(Cut(step, UPPER, float(p_hi[t])))
        push(Cut(step, LOWER, float(p_lo[t])))
    for t in range(T):
        prefix = SubsetMask((1 << (t + 1)) - 1, T)
        push(Cut(prefix, UPPER, float(s_hi[t])))
        push(Cut(prefix, LOWER, float(s_lo[t])))
    return list(merged.values())


@dataclass
class StructureWitness:
    kind: str
    set_a: SubsetMask
    set_b: SubsetMask
    lhs: float
    rhs: float


@dataclass
class StructureReport:
    passed: bool
    samples: int
    witnesses: list[StructureWitness] = field(default_factory=list)


def check_structure(evaluator: BorderEvaluator, samples: int, seed: int,
                    raise_on_violation: bool = False) -> StructureReport:
    """Sampled structural checks of the aggregate border pair.

    Draws random subset pairs (A, B) of the time steps and checks
    submodularity of the upper border, supermodularity of the lower
    border, and the cross-inequality
    f(A) - g(B) >= f(A \\ B) - g(B \\ A). Violations indicate an
    implementation bug, never valid profiles.
    """
    T = evaluator.T
    rng = np.random.default_rng(seed)
    witnesses: list[StructureWitness] = []

    def random_mask() -> SubsetMask:
        picks = rng.integers(0, 2, size=T)
        bits = 0
        for i in np.flatnonzero(picks):
            bits |= 1 << int(i)
        return SubsetMask(bits, T)

    def record(kind, a, b, left, right):
        tol = 1e-9 * (1.0 + max(abs(left), abs(right)))
        if left < right - tol:
            witnesses.append(StructureWitness(kind, a, b, left, right))

    empty = SubsetMask.empty(T)
    if evaluator.aggregate_border(empty, UPPER) != 0.0:
        witnesses.append(StructureWitness("empty-upper", empty, empty, 0.0, 0.0))
    if evaluator.aggregate_border(empty, LOWER) != 0.0:
        witnesses.append(StructureWitness("empty-lower", empty, empty, 0.0, 0.0))
    if T > 0 and evaluator.base_extension(SubsetMask.full(T + 1)) != 0.0:
        witnesses.append(StructureWitness("full-extension", empty, empty, 0.0, 0.0))

    for _ in range(samples):
        a, b = random_mask(), random_mask()
        f = lambda s: evaluator.aggregate_border(s, UPPER)
        g = lambda s: evaluator.aggregate_border(s, LOWER)
        record("submodular-upper", a, b, f(a) + f(b), f(a | b) + f(a & b))
        record("supermodular-lower", a, b, g(a | b) + g(a & b), g(a) + g(b))
        record("cross-inequality", a, b, f(a) - g(b), f(a - b) - g(b - a))

    report = StructureReport(passed=not witnesses, samples=samples, witnesses=witnesses)
    if raise_on_violation and not report.passed:
        w = report.witnesses[0]
        raise StructureViolation(
            f"{w.kind} violated on A={w.set_a.indices()} B={w.set_b.indices()}: "
            f"{w.lhs} < {w.rhs}"
        )
    return report
