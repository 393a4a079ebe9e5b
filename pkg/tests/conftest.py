import numpy as np
import pytest

from evuc import lp
from evuc.model import EVProfile, Instance, LinearRow, ProductionUnit, TimeHorizon

from oracles import integer_points, random_integer_profile


@pytest.fixture(scope="session", autouse=True)
def _jit_warmup():
    # first solve compiles the pivot kernel; keep it out of timed tests
    lp.solve_lp(lp.LinearProgram(1, [1.0], [0.0], [1.0], []))


@pytest.fixture
def derived_pair():
    """Two three-step profiles whose aggregate has a mixed facet.

    The first must deliver exactly one unit of energy over steps {0, 2};
    the second is pinned to the schedule (0, 1, 0).
    """
    p1 = EVProfile(p_min=[0, 0, 0], p_max=[1, 0, 1], s_min=[0, 0, 1], s_max=[1, 1, 1])
    p2 = EVProfile(p_min=[0, 0, 0], p_max=[0, 1, 0], s_min=[0, 1, 1], s_max=[0, 1, 1])
    return p1, p2


@pytest.fixture
def worked_instance(derived_pair):
    def build(cost=(1.0, 3.0, 1.0)):
        return Instance(
            horizon=TimeHorizon(3),
            demand=[0.0, 0.0, 0.0],
            units=[ProductionUnit("u1", cost=list(cost), p_min=[0.0] * 3, p_max=[3.0] * 3)],
            fleet=list(derived_pair),
        )
    return build


def random_small_instance(rng: np.random.Generator) -> Instance:
    """Random all-integer instance, feasible by construction.

    Unit schedules and per-vehicle schedules are sampled first; demand is
    set to their balance, so the extensive form always has a solution.
    """
    T = int(rng.integers(2, 6))
    n_units = int(rng.integers(1, 4))
    n_profiles = int(rng.integers(0, 5))
    fleet = [random_integer_profile(rng, T) for _ in range(n_profiles)]
    agg = np.zeros(T)
    for profile in fleet:
        x = rng.integers(profile.p_min.astype(int), profile.p_max.astype(int) + 1)
        c = np.cumsum(x)
        if np.any(c < profile.s_min) or np.any(c > profile.s_max):
            pts = integer_points(profile)
            x = pts[int(rng.integers(0, len(pts)))]
        agg += profile.count * np.asarray(x, dtype=float)
    units = []
    z_total = np.zeros(T)
    for m in range(n_units):
        lo = rng.integers(0, 2, size=T)
        hi = lo + rng.integers(1, 6, size=T)
        z = rng.integers(lo, hi + 1)
        z_total += z
        ramp = None
        if T > 1 and rng.random() < 0.4:
            ramp = float(np.max(np.abs(np.diff(z))) + rng.integers(1, 3))
        extra = ()
        if rng.random() < 0.3:
            cap = float(np.sum(z) + rng.integers(0, 4))
            extra = (LinearRow(tuple((t, 1.0) for t in range(T)), "<=", cap),)
        units.append(ProductionUnit(
            name=f"u{m}", cost=rng.integers(1, 10, size=T).astype(float),
            p_min=lo.astype(float), p_max=hi.astype(float),
            ramp_up=ramp, ramp_down=ramp, extra_rows=extra,
        ))
    demand = z_total - agg
    return Instance(horizon=TimeHorizon(T), demand=demand, units=units, fleet=fleet)
