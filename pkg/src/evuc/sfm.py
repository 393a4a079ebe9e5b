"""Submodular function minimization via the minimum-norm-point algorithm.

The oracle is a set function h over an extended ground set with
h(empty) = h(full) = 0; its base polyhedron is the zero-base polyhedron
whose minimum-norm point yields both the minimum value of h and the
inclusion-minimal minimizer (the strictly negative coordinates). Greedy
chains evaluated along the way are recorded so that violated sets can be
harvested as cutting planes afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .model import SubsetMask

WOLFE_EPS = 1e-10        # termination test on the support line
COEFF_ZERO_TOL = 1e-12   # convex coefficients at or below this are dropped
MAJOR_CYCLES_PER_ELEMENT = 100


class SfmError(RuntimeError):
    pass


class MaxIterationsError(SfmError):
    """The Wolfe major-cycle cap was exceeded."""


class GroundSetTooLarge(ValueError):
    pass


@dataclass
class SfmOracle:
    """Evaluation oracle for a submodular h with h(empty) = h(full) = 0.

    eval maps a SubsetMask over the extended ground set to h's value.
    chain_values, when provided, returns h on all prefixes of an ordering
    in one call; it must agree with eval and exists purely so that fleet
    oracles can amortize their LP work across a greedy chain.
    """

    eval: Callable[[SubsetMask], float]
    ground_size: int
    chain_values: Callable[[np.ndarray], np.ndarray] | None = None

    def mask(self, bits: int) -> SubsetMask:
        return SubsetMask(bits, self.ground_size)


@dataclass
class MinNormTrace:
    """Greedy chains (ordering plus prefix values) seen during one solve."""

    ground_size: int
    chains: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    norms: list[float] = field(default_factory=list)
    minimizer: SubsetMask | None = None
    value: float | None = None

    def add_chain(self, ordering: np.ndarray, values: np.ndarray) -> None:
        self.chains.append((ordering, values))

    def chain_sets(self):
        """Yield (bits, h value) for every prefix set of every chain."""
        for ordering, values in self.chains:
            bits = 0
            for i, elem in enumerate(ordering):
                bits |= 1 << int(elem)
                yield bits, float(values[i])


@dataclass
class MinNormState:
    """Active set of the Wolfe iteration: vertices, convex weights, point."""

    vertices: np.ndarray
    weights: np.ndarray
    x_hat: np.ndarray
    chains: list[tuple[np.ndarray, np.ndarray]]


@dataclass
class MinNormResult:
    x_hat: np.ndarray
    minimizer: SubsetMask
    value: float
    trace: MinNormTrace
    state: MinNormState
    maximal_minimizer: SubsetMask
    major_cycles: int


def _chain_h(oracle: SfmOracle, ordering: np.ndarray) -> np.ndarray:
    if oracle.chain_values is not None:
        return np.asarray(oracle.chain_values(ordering), dtype=float)
    values = np.empty(len(ordering))
    bits = 0
    for i, elem in enumerate(ordering):
        bits |= 1 << int(elem)
        values[i] = oracle.eval(oracle.mask(bits))
    return values


def greedy_vertex(oracle: SfmOracle, ordering: np.ndarray,
                  trace: MinNormTrace | None = None) -> np.ndarray:
    """Edmonds greedy vertex of the base polyhedron for one ordering.

    Coordinate ordering[i] gets the marginal h(S_{i+1}) - h(S_i) where S_i
    is the prefix of the first i elements. The chain and its h values are
    appended to the trace when one is given.
    """
    ordering = np.asarray(ordering, dtype=np.intp)
    n = oracle.ground_size
    if sorted(ordering.tolist()) != list(range(n)):
        raise ValueError("ordering must be a permutation of the ground set")
    values = _chain_h(oracle, ordering)
    vertex = np.empty(n)
    vertex[ordering] = np.diff(np.concatenate([[0.0], values]))
    if trace is not None:
        trace.add_chain(ordering, values)
    return vertex


def _affine_minimizer(vertices: np.ndarray):
    """Minimum-norm point of the affine hull of the given vertices.

    Solves the bordered Gram system by normal equations; falls back to a
    least-squares solve when the system is ill-conditioned.
    """
    k = vertices.shape[0]
    gram = vertices @ vertices.T
    M = np.zeros((k + 1, k + 1))
    M[0, 1:] = 1.0
    M[1:, 0] = 1.0
    M[1:, 1:] = gram
    rhs = np.zeros(k + 1)
    rhs[0] = 1.0
    try:
        sol = np.linalg.solve(M, rhs)
        resid = float(np.max(np.abs(M @ sol - rhs)))
        if not np.isfinite(resid) or resid > 1e-8 * (1.0 + float(np.max(np.abs(gram)))):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
    weights = sol[1:]
    return weights, vertices.T @ weights


def min_norm_point(oracle: SfmOracle, eps: float = WOLFE_EPS) -> MinNormResult:
    """Minimize a submodular h via the minimum-norm point of its base polyhedron.

    Returns the norm-minimal point x_hat, the inclusion-minimal minimizer
    (strictly negative coordinates of x_hat, with a scale-aware threshold),
    its re-evaluated h value, and the trace of greedy chains.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    n = oracle.ground_size
    empty = oracle.eval(SubsetMask.empty(n))
    full = oracle.eval(SubsetMask.full(n))
    scale0 = 1.0 + abs(empty) + abs(full)
    if abs(empty) > 1e-6 * scale0 or abs(full) > 1e-6 * scale0:
        raise ValueError("oracle must satisfy h(empty) = h(full) = 0")

    trace = MinNormTrace(n)
    first = greedy_vertex(oracle, np.arange(n), trace)
    # run the active-set algebra at unit scale: base polyhedra of
    # MW-scale fleets otherwise produce Gram matrices around 1e10 whose
    # normal-equation noise swamps the coefficient tolerances
    unit = 1.0 + float(np.max(np.abs(first), initial=0.0))
    x = first / unit
    vertices = [x.copy()]
    weights = np.array([1.0])
    major = 0
    minor_total = 0
    cap = MAJOR_CYCLES_PER_ELEMENT * n
    while True:
        trace.norms.append(float(x @ x) * unit * unit)
        ordering = np.argsort(x, kind="stable")
        q = greedy_vertex(oracle, ordering, trace) / unit
        scale = 1.0 + max(float(x @ x), float(q @ q))
        if float(x @ q) >= float(x @ x) - eps * scale:
            break
        V = np.asarray(vertices)
        if np.any(np.all(np.abs(V - q) <= 1e-12 * scale, axis=1)):
            break  # vertex already active: converged to working precision
        major += 1
        if major > cap:
            raise MaxIterationsError(f"no convergence within {cap} major cycles")
        vertices.append(q)
        weights = np.append(weights, 0.0)
        while True:
            minor_total += 1
            if minor_total > 10 * cap:
                raise MaxIterationsError(f"no convergence within {10 * cap} minor cycles")
            V = np.asarray(vertices)
            b, y = _affine_minimizer(V)
            if np.min(b) > COEFF_ZERO_TOL:
                weights, x = b, y
                break
            shrink = weights - b
            movable = shrink > COEFF_ZERO_TOL
            if np.any(movable):
                theta = float(np.min(weights[movable] / shrink[movable]))
                theta = min(max(theta, 0.0), 1.0)
                weights = theta * b + (1.0 - theta) * weights
                accept = False
            else:
                # the affine minimizer coincides with the current point up
                # to noise; accept it after pruning negligible weights
                weights = b
                accept = True
            keep = weights > COEFF_ZERO_TOL
            if not np.any(keep):
                keep[int(np.argmax(weights))] = True
            vertices = [v for v, k in zip(vertices, keep) if k]
            weights = np.maximum(weights[keep], 0.0)
            weights /= weights.sum()
            x = np.asarray(vertices).T @ weights
            if accept:
                break

    neg_tol = 1e-9 * (1.0 + float(np.max(np.abs(x), initial=0.0)))
    min_bits = 0
    max_bits = 0
    for e in range(n):
        if x[e] < -neg_tol:
            min_bits |= 1 << e
        if x[e] <= neg_tol:
            max_bits |= 1 << e
    minimizer = SubsetMask(min_bits, n)
    value = float(oracle.eval(minimizer))
    trace.minimizer = minimizer
    trace.value = value
    state = MinNormState(
        vertices=np.asarray(vertices) * unit,
        weights=weights.copy(),
        x_hat=x * unit,
        chains=trace.chains,
    )
    return MinNormResult(
        x_hat=x * unit,
        minimizer=minimizer,
        value=value,
        trace=trace,
        state=state,
        maximal_minimizer=SubsetMask(max_bits, n),
        major_cycles=major,
    )


def collect_cuts(trace: MinNormTrace, tol: float) -> list[SubsetMask]:
    """Distinct chain sets with h below -tol, minimizer first.

    Every returned set witnesses a violated base-polyhedron inequality;
    the trace's minimizer is always included when its value qualifies.
    """
    seen: dict[int, None] = {}
    if trace.minimizer is not None and trace.value is not None and trace.value < -tol:
        seen[trace.minimizer.bits] = None
    for bits, value in trace.chain_sets():
        if value < -tol and bits not in seen:
            seen[bits] = None
    return [SubsetMask(bits, trace.ground_size) for bits in seen]


def brute_force_sfm(oracle: SfmOracle) -> tuple[SubsetMask, float]:
    """Exhaustive minimum over all subsets; ties break toward the smallest
    bit pattern, which is the inclusion-minimal minimizer."""
    n = oracle.ground_size
    if n > 20:
        raise GroundSetTooLarge(f"ground set of size {n} is too large to enumerate")
    best_bits = 0
    best = oracle.eval(SubsetMask.empty(n))
    for bits in range(1, 1 << n):
        value = oracle.eval(SubsetMask(bits, n))
        if value < best:
            best, best_bits = value, bits
    return SubsetMask(best_bits, n), float(best)
