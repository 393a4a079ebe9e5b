import numpy as np
import pytest

from evuc import lp

from oracles import lp_min_by_vertex_enumeration


def dense_rows(rows, n):
    out = []
    for row in rows:
        a = np.zeros(n)
        for i, v in row.coeffs.items():
            a[i] = v
        out.append((a, row.sense, row.rhs))
    return out


class TestBasics:
    def test_box_minimum(self):
        sol = lp.solve_lp(lp.LinearProgram(1, [1.0], [0.0], [1.0], []))
        assert sol.status == lp.LpStatus.OPTIMAL
        assert sol.x[0] == 0.0
        assert sol.objective_value == 0.0

    def test_infeasible_pair(self):
        prob = lp.LinearProgram(1, [0.0], [-np.inf], [np.inf],
                                [lp.Row({0: 1.0}, ">=", 1.0), lp.Row({0: 1.0}, "<=", 0.0)])
        assert lp.solve_lp(prob).status == lp.LpStatus.INFEASIBLE

    def test_simplex_facet(self):
        prob = lp.LinearProgram(2, [-1.0, -1.0], [0.0, 0.0], [np.inf, np.inf],
                                [lp.Row({0: 1.0, 1: 1.0}, "<=", 1.0)])
        sol = lp.solve_lp(prob)
        assert sol.status == lp.LpStatus.OPTIMAL
        assert sol.objective_value == pytest.approx(-1.0, abs=1e-9)

    def test_unbounded(self):
        prob = lp.LinearProgram(1, [-1.0], [0.0], [np.inf], [])
        assert lp.solve_lp(prob).status == lp.LpStatus.UNBOUNDED

    def test_equality_row(self):
        prob = lp.LinearProgram(2, [1.0, 2.0], [0.0, 0.0], [5.0, 5.0],
                                [lp.Row({0: 1.0, 1: 1.0}, "=", 3.0)])
        sol = lp.solve_lp(prob)
        assert sol.status == lp.LpStatus.OPTIMAL
        assert sol.objective_value == pytest.approx(3.0, abs=1e-9)
        assert sol.x[0] == pytest.approx(3.0, abs=1e-9)

    def test_fixed_variable(self):
        prob = lp.LinearProgram(2, [1.0, 1.0], [2.0, 0.0], [2.0, 1.0],
                                [lp.Row({0: 1.0, 1: 1.0}, ">=", 2.5)])
        sol = lp.solve_lp(prob)
        assert sol.status == lp.LpStatus.OPTIMAL
        assert sol.x[0] == pytest.approx(2.0)
        assert sol.x[1] == pytest.approx(0.5, abs=1e-9)

    def test_free_variables(self):
        prob = lp.LinearProgram(2, [1.0, 0.0], [-np.inf, -np.inf], [np.inf, np.inf],
                                [lp.Row({0: 1.0, 1: 1.0}, "=", 1.0),
                                 lp.Row({0: 1.0, 1: -1.0}, ">=", -3.0)])
        sol = lp.solve_lp(prob)
        assert sol.status == lp.LpStatus.OPTIMAL
        assert sol.objective_value == pytest.approx(-1.0, abs=1e-9)

    def test_empty_row_infeasible(self):
        prob = lp.LinearProgram(1, [0.0], [0.0], [1.0], [lp.Row({}, ">=", 1.0)])
        assert lp.solve_lp(prob).status == lp.LpStatus.INFEASIBLE

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ValueError):
            lp.LinearProgram(1, [np.inf], [0.0], [1.0], [])
        with pytest.raises(ValueError):
            lp.LinearProgram(1, [1.0], [2.0], [1.0], [])
        with pytest.raises(ValueError):
            lp.LinearProgram(1, [1.0], [0.0], [1.0], [lp.Row({0: 1.0}, "<", 1.0)])
        with pytest.raises(ValueError):
            lp.LinearProgram(1, [1.0], [0.0], [1.0], [lp.Row({2: 1.0}, "<=", 1.0)])


def random_bounded_lp(rng, n_max=6, m_max=6):
    """Random LP with finite box bounds, feasible by construction."""
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(0, m_max + 1))
    lower = rng.integers(-3, 1, size=n).astype(float)
    upper = lower + rng.integers(0, 5, size=n)
    x0 = rng.uniform(lower, upper)
    rows = []
    for _ in range(m):
        a = rng.integers(-2, 3, size=n).astype(float)
        sense = ("<=", ">=", "=")[int(rng.integers(0, 3))]
        v = float(a @ x0)
        if sense == "<=":
            rhs = v + float(rng.uniform(0, 2))
        elif sense == ">=":
            rhs = v - float(rng.uniform(0, 2))
        else:
            rhs = v
        coeffs = {i: float(a[i]) for i in range(n) if a[i] != 0.0}
        rows.append(lp.Row(coeffs, sense, rhs))
    objective = rng.integers(-5, 6, size=n).astype(float)
    return lp.LinearProgram(n, objective, lower, upper, rows)


class TestAgainstOracles:
    def test_vertex_enumeration_agreement(self):
        rng = np.random.default_rng(42)
        checked = 0
        for _ in range(60):
            prob = random_bounded_lp(rng, n_max=5, m_max=4)
            sol = lp.solve_lp(prob)
            assert sol.status == lp.LpStatus.OPTIMAL
            expected, _ = lp_min_by_vertex_enumeration(
                prob.objective, prob.lower, prob.upper,
                dense_rows(prob.rows, prob.num_vars),
            )
            assert sol.objective_value == pytest.approx(expected, abs=1e-8)
            checked += 1
        assert checked == 60

    def test_scipy_agreement(self):
        scipy_linprog = pytest.importorskip("scipy.optimize").linprog
        rng = np.random.default_rng(43)
        for _ in range(40):
            prob = random_bounded_lp(rng)
            sol = lp.solve_lp(prob)
            a_ub, b_ub, a_eq, b_eq = [], [], [], []
            for a, sense, rhs in dense_rows(prob.rows, prob.num_vars):
                if sense == "<=":
                    a_ub.append(a); b_ub.append(rhs)
                elif sense == ">=":
                    a_ub.append(-a); b_ub.append(-rhs)
                else:
                    a_eq.append(a); b_eq.append(rhs)
            ref = scipy_linprog(
                prob.objective,
                A_ub=np.array(a_ub) if a_ub else None,
                b_ub=np.array(b_ub) if b_ub else None,
                A_eq=np.array(a_eq) if a_eq else None,
                b_eq=np.array(b_eq) if b_eq else None,
                bounds=list(zip(prob.lower, prob.upper)), method="highs",
            )
            assert ref.success
            assert sol.objective_value == pytest.approx(ref.fun, abs=1e-7)

    def test_feasibility_tolerance(self):
        rng = np.random.default_rng(44)
        for _ in range(40):
            prob = random_bounded_lp(rng)
            sol = lp.solve_lp(prob)
            assert sol.status == lp.LpStatus.OPTIMAL
            assert sol.max_residual <= lp.FEAS_TOL

    def test_objective_scaling_invariance(self):
        rng = np.random.default_rng(45)
        for _ in range(20):
            prob = random_bounded_lp(rng)
            sol = lp.solve_lp(prob)
            for factor in (2.0, 0.5, 1024.0):
                scaled = lp.LinearProgram(
                    prob.num_vars, prob.objective * factor,
                    prob.lower, prob.upper, prob.rows,
                )
                sol2 = lp.solve_lp(scaled)
                assert sol2.status == sol.status
                assert sol2.objective_value == pytest.approx(
                    factor * sol.objective_value, rel=1e-12, abs=1e-12
                )

    def test_determinism(self):
        rng = np.random.default_rng(46)
        prob = random_bounded_lp(rng)
        a = lp.solve_lp(prob)
        b = lp.solve_lp(prob)
        assert a.objective_value == b.objective_value
        assert np.array_equal(a.x, b.x)
        assert a.iterations == b.iterations


class TestWarmStart:
    def test_warm_basis_same_solution(self):
        rng = np.random.default_rng(47)
        for _ in range(10):
            prob = random_bounded_lp(rng)
            cold = lp.solve_lp(prob, keep_factor=True)
            assert cold.status == lp.LpStatus.OPTIMAL
            # new objective, same constraint set
            prob2 = lp.LinearProgram(prob.num_vars, -prob.objective,
                                     prob.lower, prob.upper, prob.rows)
            warm = lp.solve_lp(prob2, basis=cold.basis)
            ref = lp.solve_lp(prob2)
            assert warm.status == ref.status == lp.LpStatus.OPTIMAL
            assert warm.objective_value == pytest.approx(ref.objective_value, abs=1e-9)

    def test_warm_solver_matches_cold(self):
        rng = np.random.default_rng(48)
        prob = random_bounded_lp(rng, n_max=6, m_max=5)
        solver = lp.WarmLpSolver(prob)
        for _ in range(15):
            objective = rng.integers(-5, 6, size=prob.num_vars).astype(float)
            hot = solver.solve(objective)
            cold = lp.solve_lp(lp.LinearProgram(
                prob.num_vars, objective, prob.lower, prob.upper, prob.rows))
            assert hot.status == cold.status == lp.LpStatus.OPTIMAL
            assert hot.objective_value == pytest.approx(cold.objective_value, abs=1e-9)


def test_jitted_kernel_matches_python_fallback(monkeypatch):
    kernel = lp._pivot_loop
    py_kernel = getattr(kernel, "py_func", None)
    if py_kernel is None:
        pytest.skip("pivot kernel is not jitted in this environment")
    rng = np.random.default_rng(49)
    problems = [random_bounded_lp(rng, n_max=5, m_max=4) for _ in range(8)]
    jitted = [lp.solve_lp(p) for p in problems]
    monkeypatch.setattr(lp, "_pivot_loop", py_kernel)
    plain = [lp.solve_lp(lp.LinearProgram(p.num_vars, p.objective, p.lower,
                                          p.upper, p.rows)) for p in problems]
    for a, b in zip(jitted, plain):
        assert a.status == b.status
        assert a.objective_value == b.objective_value
        assert np.array_equal(a.x, b.x)
        assert a.iterations == b.iterations
