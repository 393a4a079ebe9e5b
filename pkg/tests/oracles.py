"""Independent brute-force oracles used to pin expected values in tests.

Everything here is deliberately naive: integer-point enumeration for
border values, exhaustive subset scans for set-function minima, and
active-set vertex enumeration for small LPs. None of it shares code with
the solver paths it checks.
"""

from __future__ import annotations

import itertools

import numpy as np

from evuc.model import EVProfile, SubsetMask


def integer_points(profile: EVProfile) -> list[np.ndarray]:
    """All integer schedules of one vehicle of the profile (tau = 1)."""
    lo = profile.p_min.astype(int)
    hi = profile.p_max.astype(int)
    assert np.array_equal(lo, profile.p_min) and np.array_equal(hi, profile.p_max)
    points = []
    for combo in itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        x = np.array(combo, dtype=float)
        c = np.cumsum(x)
        if np.all(c >= profile.s_min - 1e-9) and np.all(c <= profile.s_max + 1e-9):
            points.append(x)
    return points


def border_by_enumeration(profile: EVProfile, subset: SubsetMask, side: str) -> float:
    """Border value of an all-integer profile by integer-point enumeration.

    Valid because a flexibility set with integer bounds is an integral
    polytope: its extreme points are integer, so optimizing x(A) over the
    integer points gives the true border.
    """
    points = integer_points(profile)
    assert points, "profile is empty"
    ind = subset.indicator()
    values = [float(ind @ x) for x in points]
    best = max(values) if side == "upper" else min(values)
    return profile.count * best


def aggregate_border_by_enumeration(fleet, subset: SubsetMask, side: str) -> float:
    return sum(border_by_enumeration(p, subset, side) for p in fleet)


def extension_by_enumeration(fleet, subset: SubsetMask) -> float:
    """Base-polyhedron extension value by per-profile enumeration."""
    T = subset.size - 1
    if subset.bits >> T & 1:
        inner = subset.bits & ~(1 << T)
        comp = SubsetMask(~inner & ((1 << T) - 1), T)
        return -aggregate_border_by_enumeration(fleet, comp, "lower")
    return aggregate_border_by_enumeration(fleet, SubsetMask(subset.bits, T), "upper")


def minimize_set_function(fn, ground_size: int):
    """Exhaustive minimum of a set function; first minimizer in mask order."""
    best_bits, best = 0, fn(SubsetMask.empty(ground_size))
    for bits in range(1, 1 << ground_size):
        value = fn(SubsetMask(bits, ground_size))
        if value < best:
            best, best_bits = value, bits
    return SubsetMask(best_bits, ground_size), best


def lp_min_by_vertex_enumeration(objective, lower, upper, rows):
    """Optimal value of a bounded-feasible LP by brute-force vertex search.

    rows are (dense coefficient vector, sense, rhs) triples. Collects all
    constraints (rows as one- or two-sided, bounds as rows), tries every
    n-subset with a unique solution, keeps feasible ones.
    """
    objective = np.asarray(objective, dtype=float)
    n = objective.shape[0]
    cons = []  # (a, rhs) pairs meaning a.x = rhs when active; plus feasibility data
    ineqs = []  # (a, lo, hi)
    for a, sense, rhs in rows:
        a = np.asarray(a, dtype=float)
        if sense == "<=":
            ineqs.append((a, -np.inf, rhs))
        elif sense == ">=":
            ineqs.append((a, rhs, np.inf))
        else:
            ineqs.append((a, rhs, rhs))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        ineqs.append((e, lower[j], upper[j]))

    def feasible(x):
        for a, lo, hi in ineqs:
            v = float(a @ x)
            if v < lo - 1e-7 or v > hi + 1e-7:
                return False
        return True

    candidates = []
    for a, lo, hi in ineqs:
        if np.isfinite(lo):
            candidates.append((a, lo))
        if np.isfinite(hi) and hi != lo:
            candidates.append((a, hi))
    best = np.inf
    best_x = None
    for combo in itertools.combinations(range(len(candidates)), n):
        A = np.array([candidates[i][0] for i in combo])
        b = np.array([candidates[i][1] for i in combo])
        if abs(np.linalg.det(A)) < 1e-9:
            continue
        x = np.linalg.solve(A, b)
        if feasible(x):
            val = float(objective @ x)
            if val < best - 1e-12:
                best = val
                best_x = x
    return best, best_x


def random_integer_profile(rng: np.random.Generator, T: int, count: int | None = None,
                           allow_v2g: bool = True) -> EVProfile:
    """Random all-integer profile, nonempty by construction.

    A feasible integer point is sampled first and the windows are opened
    around its cumulative sums, so the flexibility set always contains it.
    """
    p_min = rng.integers(-1 if allow_v2g else 0, 1, size=T)
    p_max = p_min + rng.integers(0, 3, size=T)
    x = rng.integers(p_min, p_max + 1)
    c = np.cumsum(x)
    s_min = c - rng.integers(0, 3, size=T)
    s_max = c + rng.integers(0, 3, size=T)
    if count is None:
        count = int(rng.integers(1, 4))
    return EVProfile(p_min=p_min, p_max=p_max, s_min=s_min, s_max=s_max, count=count)


def random_submodular_oracle(rng: np.random.Generator, ground_size: int):
    """Normalized random submodular function: concave-of-cardinality plus a
    modular part, shifted so the full set evaluates to zero."""
    increments = np.sort(rng.uniform(0.0, 2.0, size=ground_size))[::-1]
    concave = np.concatenate([[0.0], np.cumsum(increments)])
    modular = rng.normal(0.0, 1.5, size=ground_size)
    shift = (concave[ground_size] + modular.sum()) / ground_size

    def h(mask: SubsetMask) -> float:
        k = len(mask)
        return concave[k] + sum(modular[i] for i in mask.indices()) - shift * k

    return h


def random_cut_oracle(rng: np.random.Generator, ground_size: int):
    """Normalized graph-cut function plus a modular part."""
    weights = {}
    for i in range(ground_size):
        for j in range(i + 1, ground_size):
            if rng.random() < 0.4:
                weights[(i, j)] = float(rng.uniform(0.1, 2.0))
    modular = rng.normal(0.0, 1.0, size=ground_size)
    shift = modular.sum() / ground_size

    def h(mask: SubsetMask) -> float:
        total = sum(modular[i] for i in mask.indices()) - shift * len(mask)
        for (i, j), w in weights.items():
            if (i in mask) != (j in mask):
                total += w
        return total

    return h
