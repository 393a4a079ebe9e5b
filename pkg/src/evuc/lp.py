"""Dense bounded-variable revised simplex with a two-phase start.

Sized for the problems this package actually solves: master dispatch LPs
with a few thousand variables and many small per-profile border
subproblems. The basis inverse is kept explicitly and refreshed
periodically; pricing is Dantzig with a Bland fallback once degenerate
pivots pile up. The pivot loop is jitted with numba when available (the
pure-Python fallback is identical but slow). Identical input bytes
produce identical pivot sequences and therefore identical results.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from enum import Enum

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

FEAS_TOL = 1e-7       # absolute feasibility tolerance on rows and bounds
OPT_TOL = 1e-9        # reduced-cost optimality tolerance
PIVOT_TOL = 1e-10     # minimum acceptable pivot magnitude
_REFACTOR_EVERY = 100
_DEGENERATE_STEP = 1e-11

# column states
_BASIC = 0
_AT_LOWER = 1
_AT_UPPER = 2
_FREE = 3

# pivot-loop outcomes
_OPTIMAL = 0
_UNBOUNDED = 1
_BUDGET = 2
_TINY_PIVOT = 3


class LpStatus(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass
class Row:
    """One linear constraint: sparse coefficients, sense and right-hand side."""

    coeffs: dict[int, float]
    sense: str
    rhs: float


@dataclass
class Basis:
    """Snapshot of a simplex basis, optionally with its factorized inverse.

    Usable to warm-start a solve of the same LP shape (same rows) under a
    different objective.
    """

    basic: np.ndarray
    status: np.ndarray
    factor: np.ndarray | None = None


@dataclass
class LpSolution:
    status: LpStatus
    x: np.ndarray | None
    objective_value: float
    max_residual: float
    iterations: int
    basis: Basis | None = None


class LinearProgram:
    """min objective . x subject to row constraints and variable bounds."""

    def __init__(self, num_vars: int, objective, lower, upper, rows):
        self.num_vars = int(num_vars)
        self.objective = np.asarray(objective, dtype=float).copy()
        self.lower = np.asarray(lower, dtype=float).copy()
        self.upper = np.asarray(upper, dtype=float).copy()
        self.rows = list(rows)
        self._cache = None
        if self.objective.shape != (self.num_vars,):
            raise ValueError("objective length does not match num_vars")
        if self.lower.shape != (self.num_vars,) or self.upper.shape != (self.num_vars,):
            raise ValueError("bound length does not match num_vars")
        if not np.all(np.isfinite(self.objective)):
            raise ValueError("objective must be finite")
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise ValueError("bounds must not be NaN")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")
        for row in self.rows:
            if row.sense not in ("<=", ">=", "="):
                raise ValueError(f"unknown row sense {row.sense!r}")
            if not np.isfinite(row.rhs):
                raise ValueError("row rhs must be finite")
            for idx, val in row.coeffs.items():
                if not 0 <= idx < self.num_vars:
                    raise ValueError(f"row references variable {idx}")
                if not np.isfinite(val):
                    raise ValueError("row coefficient must be finite")

    def _arrays(self):
        """Dense standard form [A | I] with logical-variable bounds (cached)."""
        if self._cache is None:
            kept = []
            for row in self.rows:
                if any(v != 0.0 for v in row.coeffs.values()):
                    kept.append(row)
                else:
                    ok = (
                        row.rhs >= -FEAS_TOL if row.sense == "<="
                        else row.rhs <= FEAS_TOL if row.sense == ">="
                        else abs(row.rhs) <= FEAS_TOL
                    )
                    if not ok:
                        self._cache = ("infeasible",)
                        return self._cache
            m = len(kept)
            n = self.num_vars
            full = np.zeros((m, n + m))
            b = np.empty(m)
            log_lo = np.empty(m)
            log_hi = np.empty(m)
            for i, row in enumerate(kept):
                for idx, val in row.coeffs.items():
                    full[i, idx] = val
                full[i, n + i] = 1.0
                b[i] = row.rhs
                if row.sense == "<=":
                    log_lo[i], log_hi[i] = 0.0, np.inf
                elif row.sense == ">=":
                    log_lo[i], log_hi[i] = -np.inf, 0.0
                else:
                    log_lo[i], log_hi[i] = 0.0, 0.0
            self._cache = ("ok", full, b, log_lo, log_hi)
        return self._cache


def _pivot_loop(A, costs, l, u, x, status, basic, B_inv, fixed,
                priced_cols, budget, n_deg, degenerate_cap, bland):
    """Run up to `budget` simplex pivots in place.

    Returns (outcome, pivots_done, n_deg, bland). Outcomes: 0 optimal,
    1 unbounded, 2 budget exhausted (caller refactorizes and re-enters),
    3 pivot element too small (caller refactorizes).
    """
    m = A.shape[0]
    done = 0
    while done < budget:
        w = np.dot(costs[basic], B_inv)
        d = costs - np.dot(w, A)
        # Dantzig pricing (Bland: first improving index)
        q = -1
        best = OPT_TOL
        for j in range(priced_cols):
            if fixed[j]:
                continue
            st = status[j]
            if st == 0:
                continue
            dj = d[j]
            if st == 1:
                viol = -dj
            elif st == 2:
                viol = dj
            else:
                viol = abs(dj)
            if viol > best:
                q = j
                if bland == 1:
                    break
                best = viol
        if q < 0:
            return _OPTIMAL, done, n_deg, bland
        direction = 1.0 if d[q] < 0.0 else -1.0

        y = np.dot(B_inv, np.ascontiguousarray(A[:, q]))
        t_row = np.inf
        for i in range(m):
            di = direction * y[i]
            bi = basic[i]
            if di > PIVOT_TOL:
                ti = (x[bi] - l[bi]) / di
            elif di < -PIVOT_TOL:
                ti = (x[bi] - u[bi]) / di
            else:
                continue
            if ti < 0.0:
                ti = 0.0
            if ti < t_row:
                t_row = ti
        gap = u[q] - l[q]
        t_bound = gap if np.isfinite(gap) else np.inf
        t = t_row if t_row < t_bound else t_bound
        if not np.isfinite(t):
            return _UNBOUNDED, done, n_deg, bland
        if t <= _DEGENERATE_STEP:
            n_deg += 1
            if n_deg > degenerate_cap:
                bland = 1
        done += 1
        if t_bound <= t_row:
            # bound flip, basis unchanged
            for i in range(m):
                bi = basic[i]
                x[bi] -= t_bound * direction * y[i]
            if status[q] == 1:
                x[q] = u[q]
                status[q] = 2
            else:
                x[q] = l[q]
                status[q] = 1
            continue
        # leaving row among the ratio ties: largest pivot magnitude
        # (Bland: smallest leaving variable index)
        thresh = t + 1e-12 * (1.0 + t)
        r = -1
        best_mag = -1.0
        best_idx = np.int64(2**62)
        for i in range(m):
            di = direction * y[i]
            bi = basic[i]
            if di > PIVOT_TOL:
                ti = (x[bi] - l[bi]) / di
            elif di < -PIVOT_TOL:
                ti = (x[bi] - u[bi]) / di
            else:
                continue
            if ti < 0.0:
                ti = 0.0
            if ti <= thresh:
                if bland == 1:
                    if bi < best_idx:
                        best_idx = bi
                        r = i
                else:
                    mag = abs(di)
                    if mag > best_mag:
                        best_mag = mag
                        r = i
        if r < 0 or abs(y[r]) < PIVOT_TOL:
            return _TINY_PIVOT, done - 1, n_deg, bland
        leaving = basic[r]
        for i in range(m):
            bi = basic[i]
            x[bi] -= t * direction * y[i]
        if direction * y[r] > 0.0:
            x[leaving] = l[leaving]
            status[leaving] = 1
        else:
            x[leaving] = u[leaving]
            status[leaving] = 2
        x[q] = x[q] + direction * t
        status[q] = 0
        basic[r] = q
        piv = y[r]
        for i in range(m):
            if i == r or y[i] == 0.0:
                continue
            f = y[i] / piv
            for jj in range(m):
                B_inv[i, jj] -= f * B_inv[r, jj]
        for jj in range(m):
            B_inv[r, jj] /= piv
    return _BUDGET, done, n_deg, bland


if numba is not None:
    _pivot_loop = numba.njit(cache=True, fastmath=False, nogil=True)(_pivot_loop)


class _Simplex:
    def __init__(self, prob: LinearProgram, warm: Basis | None, keep_factor: bool):
        arrays = prob._arrays()
        self.trivially_infeasible = arrays[0] == "infeasible"
        if self.trivially_infeasible:
            return
        _, full, b, log_lo, log_hi = arrays
        self.prob = prob
        self.keep_factor = keep_factor
        self.n = prob.num_vars
        self.m = full.shape[0]
        self.A = full
        self.b = b
        self.l = np.concatenate([prob.lower, log_lo])
        self.u = np.concatenate([prob.upper, log_hi])
        self.ncols = self.n + self.m
        self.priced_cols = self.ncols
        self.pivots = 0
        self.since_refactor = 0
        self.dirty = True
        self.started = False
        self.warm = None
        if warm is not None and self._warm_ok(warm):
            self.warm = warm

    def _warm_ok(self, warm: Basis) -> bool:
        return (
            warm.status.shape == (self.ncols,)
            and warm.basic.shape == (self.m,)
            and bool(np.all(warm.basic >= 0))
            and bool(np.all(warm.basic < self.ncols))
            and np.count_nonzero(warm.status == _BASIC) == self.m
            and bool(np.all(warm.status[warm.basic] == _BASIC))
        )

    def _nonbasic_values(self):
        x = np.zeros(self.ncols)
        at_lo = self.status == _AT_LOWER
        at_hi = self.status == _AT_UPPER
        x[at_lo] = self.l[at_lo]
        x[at_hi] = self.u[at_hi]
        return x

    def _set_basics_from_rhs(self):
        xz = self.x.copy()
        xz[self.basic] = 0.0
        self.x[self.basic] = self.B_inv @ (self.b - self.A @ xz)

    def _cold_start(self):
        m, n = self.m, self.n
        self.status = np.empty(self.ncols, dtype=np.int8)
        for j in range(n):
            lo, hi = self.l[j], self.u[j]
            if np.isfinite(lo) and np.isfinite(hi):
                self.status[j] = _AT_LOWER if abs(lo) <= abs(hi) else _AT_UPPER
            elif np.isfinite(lo):
                self.status[j] = _AT_LOWER
            elif np.isfinite(hi):
                self.status[j] = _AT_UPPER
            else:
                self.status[j] = _FREE
        self.status[n:] = _BASIC
        self.basic = np.arange(n, self.ncols, dtype=np.int64)

        x = self._nonbasic_values()
        resid = self.b - self.A[:, :n] @ x[:n]
        # rows whose logical cannot absorb the residual get an artificial
        art_rows, art_sign = [], []
        diag = np.ones(m)
        for i in range(m):
            j = n + i
            if self.l[j] - FEAS_TOL <= resid[i] <= self.u[j] + FEAS_TOL:
                x[j] = resid[i]
            else:
                beta = self.u[j] if resid[i] > self.u[j] else self.l[j]
                x[j] = beta
                self.status[j] = _AT_UPPER if beta == self.u[j] else _AT_LOWER
                sign = 1.0 if resid[i] - beta > 0 else -1.0
                art_rows.append(i)
                art_sign.append(sign)
        if art_rows:
            k = len(art_rows)
            art_cols = np.zeros((m, k))
            art_vals = np.empty(k)
            for a, (i, s) in enumerate(zip(art_rows, art_sign)):
                art_cols[i, a] = s
                art_vals[a] = s * (resid[i] - x[n + i])
                diag[i] = s
            self.A = np.ascontiguousarray(np.concatenate([self.A, art_cols], axis=1))
            self.l = np.concatenate([self.l, np.zeros(k)])
            self.u = np.concatenate([self.u, np.full(k, np.inf)])
            self.status = np.concatenate([self.status, np.full(k, _BASIC, dtype=np.int8)])
            x = np.concatenate([x, art_vals])
            for a, i in enumerate(art_rows):
                self.basic[i] = self.ncols + a
            self.n_art = k
        else:
            self.n_art = 0
        self.ncols = self.A.shape[1]
        self.priced_cols = self.ncols
        self.x = x
        self.B_inv = np.diag(diag)
        self.dirty = False
        self.since_refactor = 0
        return self.n_art > 0

    def _warm_start(self):
        self.status = self.warm.status.copy()
        self.basic = self.warm.basic.astype(np.int64)
        self.n_art = 0
        if self.warm.factor is not None and self.warm.factor.shape == (self.m, self.m):
            self.B_inv = self.warm.factor.copy()
        else:
            try:
                self.B_inv = np.linalg.inv(self.A[:, self.basic])
            except np.linalg.LinAlgError:
                return False
        self.x = self._nonbasic_values()
        self._set_basics_from_rhs()
        self.dirty = False
        self.since_refactor = 0
        xb = self.x[self.basic]
        ok = np.all(xb >= self.l[self.basic] - FEAS_TOL) and np.all(
            xb <= self.u[self.basic] + FEAS_TOL
        )
        return bool(ok)

    def _refactor(self):
        try:
            self.B_inv = np.ascontiguousarray(np.linalg.inv(self.A[:, self.basic]))
        except np.linalg.LinAlgError:
            return False
        self._set_basics_from_rhs()
        self.dirty = False
        self.since_refactor = 0
        return True

    def _optimize(self, costs: np.ndarray) -> str:
        cap = 2000 + 30 * (self.m + self.ncols)
        degenerate_cap = 10 * (self.m + self.ncols)
        # refactorization cadence: fixed for small bases, amortized O(m)
        # pivots between O(m^3) refreshes for large ones
        refactor_every = max(_REFACTOR_EVERY, self.m // 2)
        n_deg = 0
        bland = 0
        fixed = self.l == self.u
        stalls = 0
        while True:
            if self.since_refactor >= refactor_every and not self._refactor():
                return "singular"
            budget = min(refactor_every - self.since_refactor, cap - self.pivots)
            if budget <= 0:
                return "iterlimit"
            outcome, done, n_deg, bland = _pivot_loop(
                self.A, costs, self.l, self.u, self.x, self.status, self.basic,
                self.B_inv, fixed, self.priced_cols, budget, n_deg,
                degenerate_cap, bland,
            )
            self.pivots += done
            self.since_refactor += done
            if done > 0:
                self.dirty = True
            if outcome == _OPTIMAL:
                return "optimal"
            if outcome == _UNBOUNDED:
                return "unbounded"
            # budget exhausted or tiny pivot: refresh the factorization
            if outcome == _TINY_PIVOT and done == 0:
                stalls += 1
                if stalls > 3:
                    return "singular"
            else:
                stalls = 0
            if not self._refactor():
                return "singular"

    def _start(self) -> LpSolution | None:
        """Bring the tableau to primal feasibility; None means ready."""
        warm_used = False
        if self.warm is not None:
            warm_used = self._warm_start()
        if not warm_used:
            need_phase1 = self._cold_start()
            if need_phase1:
                costs1 = np.zeros(self.ncols)
                costs1[self.n + self.m:] = 1.0
                outcome = self._optimize(costs1)
                if outcome in ("singular", "iterlimit"):
                    return LpSolution(LpStatus.NUMERICAL_FAILURE, None, np.nan, np.inf, self.pivots)
                infeas = float(costs1 @ self.x)
                scale = 1.0 + float(np.max(np.abs(self.b))) if self.m else 1.0
                if infeas > FEAS_TOL * scale:
                    return LpSolution(LpStatus.INFEASIBLE, None, np.nan, infeas, self.pivots)
                # freeze artificials at zero for phase 2
                self.u[self.n + self.m:] = 0.0
                art = np.arange(self.n + self.m, self.ncols)
                nb_art = art[self.status[art] != _BASIC]
                self.status[nb_art] = _AT_LOWER
                self.x[nb_art] = 0.0
                if not self._refactor():
                    return LpSolution(LpStatus.NUMERICAL_FAILURE, None, np.nan, np.inf, self.pivots)
                self.priced_cols = self.n + self.m
        self.started = True
        return None

    def _phase2(self, objective: np.ndarray) -> LpSolution:
        costs = np.zeros(self.ncols)
        costs[: self.n] = objective
        outcome = self._optimize(costs)
        if outcome == "unbounded":
            return LpSolution(LpStatus.UNBOUNDED, None, -np.inf, 0.0, self.pivots)
        if outcome in ("singular", "iterlimit"):
            return LpSolution(LpStatus.NUMERICAL_FAILURE, None, np.nan, np.inf, self.pivots)
        x = self.x[: self.n].copy()
        residual = self._max_residual(x)
        tol = FEAS_TOL * (1.0 + self._scale())
        if self.dirty and residual > 0.01 * tol:
            # incremental updates drifted; refresh the factorization once
            if not self._refactor():
                return LpSolution(LpStatus.NUMERICAL_FAILURE, None, np.nan, np.inf, self.pivots)
            x = self.x[: self.n].copy()
            residual = self._max_residual(x)
        obj = float(objective @ x)
        status = LpStatus.OPTIMAL if residual <= tol else LpStatus.NUMERICAL_FAILURE
        basis = None
        if status == LpStatus.OPTIMAL and bool(np.all(self.basic < self.n + self.m)):
            basis = Basis(
                basic=self.basic.copy(),
                status=self.status[: self.n + self.m].copy(),
                factor=self.B_inv.copy() if self.keep_factor else None,
            )
        return LpSolution(status, x, obj, residual, self.pivots, basis)

    def solve(self) -> LpSolution:
        if self.trivially_infeasible:
            return LpSolution(LpStatus.INFEASIBLE, None, np.nan, np.inf, 0)
        early = self._start()
        if early is not None:
            return early
        return self._phase2(self.prob.objective)

    def _scale(self) -> float:
        return float(np.max(np.abs(self.b))) if self.m else 0.0

    def _max_residual(self, x: np.ndarray) -> float:
        res = 0.0
        res = max(res, float(np.max(self.prob.lower - x, initial=0.0)))
        res = max(res, float(np.max(x - self.prob.upper, initial=0.0)))
        if self.m:
            s = self.b - self.A[:, : self.n] @ x  # values the logicals must take
            lo = self.l[self.n: self.n + self.m]
            hi = self.u[self.n: self.n + self.m]
            res = max(res, float(np.max(lo - s, initial=0.0)))
            res = max(res, float(np.max(s - hi, initial=0.0)))
        return res


def solve_lp(prob: LinearProgram, basis: Basis | None = None,
             keep_factor: bool = False) -> LpSolution:
    """Solve a linear program; optionally warm-start from a prior basis.

    A warm basis is only honored when it matches the problem shape and is
    primal feasible, which holds when re-solving the same constraint set
    under a new objective; otherwise the solve falls back to a cold start.
    keep_factor stores the basis inverse in the returned snapshot so a
    later warm start can skip refactorization.
    """
    return _Simplex(prob, basis, keep_factor).solve()


class WarmLpSolver:
    """Repeated solves of one constraint set under changing objectives.

    Keeps the simplex state hot between calls: after an optimal solve the
    current basis is primal feasible for any new objective, so subsequent
    solves run phase 2 only, with no basis marshalling. Results for a
    given objective depend on the call history only through the
    (mathematically equivalent) optimal basis the previous call ended in.
    Not safe for concurrent use; callers hold one instance per worker.
    """

    def __init__(self, prob: LinearProgram):
        self._prob = prob
        self._spx: _Simplex | None = None

    def solve(self, objective) -> LpSolution:
        objective = np.asarray(objective, dtype=float)
        if self._spx is None:
            spx = _Simplex(self._prob, None, False)
            if spx.trivially_infeasible:
                return LpSolution(LpStatus.INFEASIBLE, None, np.nan, np.inf, 0)
            early = spx._start()
            if early is not None:
                return early
            self._spx = spx
        spx = self._spx
        before = spx.pivots
        sol = spx._phase2(objective)
        sol.iterations = spx.pivots - before
        if sol.status == LpStatus.NUMERICAL_FAILURE and before > 0:
            # hot state degraded; retry once from a cold start
            self._spx = None
            spx = _Simplex(self._prob, None, False)
            early = spx._start()
            if early is not None:
                return early
            sol = spx._phase2(objective)
            if sol.status == LpStatus.OPTIMAL:
                self._spx = spx
        elif sol.status != LpStatus.OPTIMAL:
            self._spx = None  # next call restarts cold
        return sol
