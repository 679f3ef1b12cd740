import math

import numpy as np
import pytest

from zpgd import inviscid as iv
from zpgd import oracles as orc
from zpgd.profiles import ScalarProfile

P0 = ScalarProfile.piecewise_linear([0.0, 1.0, 2.0], [1.0, 1.0, 0.0])
ZERO = ScalarProfile.zero()
ONE = ScalarProfile.constant(1.0)


def make_problem(n=3, q0=ZERO, p0=P0, qb=None, pb=None):
    return iv.InviscidProblem(n, q0, p0, qb or ScalarProfile.constant(-1.0),
                              pb or ScalarProfile.constant(4 * math.pi * 1.5))


def test_interior_cost_examples():
    assert iv.interior_cost(1.0, 1.0, 0.7) == 0.0
    assert iv.interior_cost(1.0, 0.0, 1.0) == pytest.approx(0.5)
    # doubling t halves the cost
    assert iv.interior_cost(2.0, 0.5, 2.0) == pytest.approx(
        0.5 * iv.interior_cost(2.0, 0.5, 1.0))
    with pytest.raises(ValueError):
        iv.interior_cost(1.0, 1.0, 0.0)


def test_boundary_cost_examples():
    qb0 = ScalarProfile.zero()
    # costless sojourn: r^2/(2(t-t2)), minimized here over t2 -> 0
    t = 2.0
    vals = [iv.boundary_cost(1.0, 0.0, t, 0.0, t2, qb0)
            for t2 in (1e-6, 0.5, 1.0)]
    assert vals[0] == pytest.approx(1.0 / (2 * t), rel=1e-5)
    assert vals[0] < vals[1] < vals[2]
    # infinite sentinel: positive launch radius with t1 = 0
    assert iv.boundary_cost(1.0, 0.5, 2.0, 0.0, 1.0, qb0) == math.inf
    # t2 -> t diverges
    assert iv.boundary_cost(1.0, 0.0, 2.0, 0.0, 2.0 - 1e-12, qb0) > 1e10
    with pytest.raises(ValueError):
        iv.boundary_cost(1.0, 0.0, 2.0, 1.0, 0.5, qb0)


def test_boundary_cost_constant_inflow_closed_form():
    # q_B = c > 0, r0 = 0, t1 = 0: optimum t2 = t - r/c, value c r - c^2 t/2
    c, r, t = 0.8, 0.5, 2.0
    qb = ScalarProfile.constant(c)
    grid = np.linspace(1e-6, t - 1e-6, 40001)
    vals = np.array([iv.boundary_cost(r, 0.0, t, 0.0, t2, qb) for t2 in grid])
    k = int(np.argmin(vals))
    assert grid[k] == pytest.approx(t - r / c, abs=1e-4)
    assert vals[k] == pytest.approx(c * r - c * c * t / 2, abs=1e-7)


def test_minimize_trivial_stationary():
    prob = make_problem()
    m = iv.minimize_paths(prob, 1.3, 0.9)
    assert m.branch == "interior"
    assert m.r0 == pytest.approx(1.3, abs=1e-9)
    assert m.value == pytest.approx(0.0, abs=1e-12)


def test_minimize_boundary_wins_near_origin():
    c = 0.8
    prob = make_problem(qb=ScalarProfile.constant(c))
    mz = iv.PathMinimizer(prob, t_max=4.0)
    m = mz.minimize(0.5, 2.0)
    assert m.branch == "boundary"
    assert m.value == pytest.approx(c * 0.5 - c * c * 2.0 / 2, abs=1e-9)
    assert 0.5 / (2.0 - m.t2) == pytest.approx(c, abs=1e-6)
    assert m.check_value(prob, 0.5, 2.0) < 1e-10
    far = mz.minimize(2.5, 2.0)
    assert far.branch == "interior"


def test_minimum_lipschitz_in_r():
    q0 = ScalarProfile.piecewise_linear([0.0, 0.5, 1.5, 2.0], [0.6, 0.8, -0.4, 0.0])
    qb = ScalarProfile.piecewise_linear([0.0, 1.0, 2.0], [0.7, -0.3, 0.2])
    prob = iv.InviscidProblem(2, q0, P0, qb, ScalarProfile.constant(20.0))
    mz = iv.PathMinimizer(prob, t_max=4.0)
    t = 1.3
    bound = max(q0.sup_abs(), qb.sup_abs(), 3.0 / t) * 1.2 + 0.5
    rs = np.linspace(0.1, 3.0, 40)
    qs = np.array([mz.minimize(float(r), t).value for r in rs])
    slopes = np.abs(np.diff(qs) / np.diff(rs))
    assert slopes.max() <= bound


def test_brute_force_agreement_including_sign_change():
    q0 = ScalarProfile.piecewise_linear([0.0, 0.6, 1.4, 2.2], [0.5, 0.7, -0.3, 0.0])
    qb = ScalarProfile.piecewise_linear([0.0, 0.7, 1.5, 2.5], [0.9, 0.4, -0.5, 0.3])
    prob = iv.InviscidProblem(2, q0, P0, qb, ScalarProfile.constant(20.0))
    mz = iv.PathMinimizer(prob, t_max=5.0)
    rng = np.random.default_rng(7)
    for _ in range(20):
        r = float(rng.uniform(0.05, 2.5))
        t = float(rng.uniform(0.1, 2.0))
        vb, _ = orc.brute_force_Q(prob, r, t, grid_density=160, refine_rounds=2)
        assert abs(vb - mz.minimize(r, t).value) < 1e-6


def test_solution_examples():
    # q0 = c > 0, absorbing origin: interior branch, q = c, P = -tail(r - ct)
    c = 0.6
    q0 = ScalarProfile.constant(c)
    prob = make_problem(q0=ScalarProfile.piecewise_linear([0.0, 50.0], [c, c]))
    mz = iv.PathMinimizer(prob, t_max=3.0)
    r, t = 1.8, 1.0
    s = iv.solution(prob, r, t, minimizer=mz)
    assert s.q == pytest.approx(c, abs=1e-8)
    assert s.P == pytest.approx(-P0.tail_integral(r - c * t), abs=1e-8)
    # trivial data: q = 0, P = -tail(r), p = p0
    prob0 = make_problem()
    mz0 = iv.PathMinimizer(prob0, t_max=3.0)
    s0 = iv.solution(prob0, 0.8, 1.0, minimizer=mz0)
    assert s0.q == pytest.approx(0.0, abs=1e-10)
    assert s0.P == pytest.approx(-P0.tail_integral(0.8), abs=1e-10)
    assert s0.p == pytest.approx(float(P0(0.8)), abs=1e-4)
    assert not s0.discontinuity


def test_riemann_shock_speed_and_two_sided_sample():
    # q0 = a for r < r*, b < a beyond: front at r* + (a+b)/2 t
    a, b, rstar = 1.0, 0.0, 1.0
    q0 = ScalarProfile.from_pieces([0.0, rstar, 2.0], [[a], [b]])
    p0 = ScalarProfile.from_pieces([0.0, 3.0, 3.5], [[1.0], [0.0]])
    prob = iv.InviscidProblem(3, q0, p0, ScalarProfile.constant(-1.0),
                              ScalarProfile.constant(4 * math.pi * 3))
    mz = iv.PathMinimizer(prob, t_max=3.0)
    t = 1.0
    s_exact = rstar + 0.5 * (a + b) * t
    left = iv.solution(prob, s_exact - 1e-4, t, minimizer=mz)
    right = iv.solution(prob, s_exact + 1e-4, t, minimizer=mz)
    assert left.q == pytest.approx(a, abs=1e-6)
    assert right.q == pytest.approx(b, abs=1e-6)
    on = iv.solution(prob, s_exact, t, minimizer=mz)
    assert on.discontinuity
    assert on.left is not None and on.right is not None


def test_panel_monotone_primitive_and_branch_interval():
    c = 0.8
    prob = make_problem(qb=ScalarProfile.constant(c),
                        pb=ScalarProfile.piecewise_linear(
                            [0.0, 4.0], [4 * math.pi * 1.5, 4 * math.pi * 2.0]))
    panel = iv.solve_panel(prob, np.linspace(0.05, 2.5, 40),
                           np.linspace(0.2, 1.6, 8))
    assert np.min(np.diff(panel.P, axis=1)) > -1e-9
    assert (panel.branch == "B").any()
    for i in range(panel.grid_t.size):
        cols = panel.branch[i] == "B"
        if cols.any():
            last = np.nonzero(cols)[0].max()
            assert np.all(cols[: last + 1])
    finite_p = panel.p[~np.isnan(panel.p)]
    assert finite_p.min() > -1e-6


def test_weak_boundary_absorbing_and_inflow():
    # absorbing: q_B = -1, trivial interior data -> q(0+) ~ 0 allowed
    prob = make_problem()
    rows = iv.weak_boundary_check(prob, [0.5, 1.0, 1.5])
    assert all(r.ok for r in rows)
    assert all(r.mode in ("absorbing", "attained") for r in rows)
    # inflow: q_B = c > 0 must be attained at the origin with matching mass
    c = 0.8
    omega = 4 * math.pi
    pb = ScalarProfile.piecewise_linear([0.0, 4.0],
                                        [omega * 1.5, omega * 1.5 + 2.0])
    prob2 = make_problem(qb=ScalarProfile.constant(c), pb=pb)
    rows2 = iv.weak_boundary_check(prob2, [0.5, 1.0, 1.5])
    for r in rows2:
        assert r.ok
        assert r.mode == "attained"
        assert r.q_origin == pytest.approx(c, abs=1e-3)
        assert r.mass == pytest.approx(float(pb(r.t)), rel=1e-3)


def test_p0_integrability_validation():
    with pytest.raises(ValueError):
        iv.InviscidProblem(3, ZERO, ONE, ScalarProfile.constant(-1.0), ONE)


def test_panel_csv(tmp_path):
    prob = make_problem()
    panel = iv.solve_panel(prob, np.linspace(0.1, 2.0, 8), np.linspace(0.2, 1.0, 3))
    path = tmp_path / "panel.csv"
    iv.write_panel_csv(panel, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# n=3")
    assert lines[1] == "r,t,q,p,rho,branch,disc"
    assert len(lines) == 2 + 8 * 3
    assert lines[2].endswith(",I,0")
