import math

import numpy as np
import pytest
from numpy.polynomial import polynomial as P

from zpgd import bounded_green as bg
from zpgd import oracles as orc
from zpgd import radial_core as rc
from zpgd.profiles import ScalarProfile
from zpgd.specfun import DomainCase, bessel_all

CASES = {
    DomainCase.BALL_2D: dict(radius=1.0, q_boundary=0.3),
    DomainCase.BALL_3D: dict(radius=1.0, q_boundary=0.25),
    DomainCase.ANNULUS_2D: dict(r_inner=0.7, r_outer=1.9, q_inner=-0.2, q_outer=0.35),
    DomainCase.ANNULUS_3D: dict(r_inner=0.8, r_outer=2.1, q_inner=-0.3, q_outer=0.45),
}


def smooth_rho():
    base = P.polypow([1.0, 0.0, -0.25], 4)
    return ScalarProfile.from_pieces([0.0, 2.0, 3.0], [list(base), [0.0]])


def smoothstep_q0(R, qb):
    # q0(R) = qb with q0'(R) = 0, q0(0) = 0: first-order consistent data
    return ScalarProfile.from_pieces([0.0, R, 2 * R],
                                     [[0.0, 0.0, 3 * qb / R ** 2, -2 * qb / R ** 3],
                                      [qb]])


def ball3d_problem(eps=0.5, qb=0.25, R=1.0):
    return bg.BoundedProblem(DomainCase.BALL_3D, eps, smoothstep_q0(R, qb),
                             smooth_rho(), radius=R, q_boundary=qb)


def test_neumann_trivial_all_cases():
    # q0 == 0, zero wall velocities: a stays 1 and the velocity vanishes
    for case, kw in CASES.items():
        kw0 = {k: (0.0 if k.startswith("q_") else v) for k, v in kw.items()}
        pr = bg.BoundedProblem(case, 0.5, ScalarProfile.zero(),
                               ScalarProfile.constant(1.0), **kw0)
        st = bg.hopf_cole_boundary_state(pr)
        a, b = pr.domain
        rr = np.linspace(a + 0.05 * (b - a), b - 0.05 * (b - a), 9)
        assert np.abs(st.evaluate(rr, 0.4) - 1.0).max() < 1e-12
        assert np.abs(st.velocity(rr, 0.8)).max() < 1e-12
        assert bg.large_time_velocity(pr, rr[3]) == 0.0


def test_normalizations_match_tabulated_coefficients():
    # closed-form eigenfunction norms against the tabulated per-term
    # coefficient expressions, at the computed eigenvalues
    pr = bg.BoundedProblem(DomainCase.BALL_2D, 0.8, ScalarProfile.zero(),
                           ScalarProfile.constant(1.0), radius=1.3, q_boundary=0.4)
    ev = bg.build_green_evaluator(pr, n_terms=10)
    mu = ev.eigs.values
    kr = pr.eigen.robin_kr
    j0, j1, _, _ = bessel_all(mu)
    printed = (2.0 / pr.radius ** 2) * mu ** 2 / ((kr ** 2 + mu ** 2) * j0 ** 2)
    assert np.abs(printed / ev.inv_norms - 1).max() < 1e-12

    pr3 = bg.BoundedProblem(DomainCase.BALL_3D, 0.6, ScalarProfile.zero(),
                            ScalarProfile.constant(1.0), radius=1.1, q_boundary=0.5)
    ev3 = bg.build_green_evaluator(pr3, n_terms=10)
    mu3 = ev3.eigs.values
    kr3 = pr3.eigen.robin_kr
    printed3 = (2.0 / pr3.radius) * (mu3 ** 2 + (kr3 - 1) ** 2) \
        / (mu3 ** 2 + kr3 * (kr3 - 1))
    assert np.abs(printed3 * bg._eigen_norms(pr3, mu3, mu3 / pr3.radius) - 1).max() < 1e-12

    pra = bg.BoundedProblem(DomainCase.ANNULUS_3D, 0.7, ScalarProfile.zero(),
                            ScalarProfile.constant(1.0), **CASES[DomainCase.ANNULUS_3D])
    eva = bg.build_green_evaluator(pra, n_terms=10)
    lam = eva.eigs.values
    b1, b2 = pra.eigen.b1, pra.eigen.b2
    R1, R2 = pra.r_inner, pra.r_outer
    d = R2 - R1
    denom = (d * (b1 ** 2 + R1 ** 2 * lam ** 2) * (b2 ** 2 + R2 ** 2 * lam ** 2)
             + (b1 * R2 + b2 * R1) * (b1 * b2 + R1 * R2 * lam ** 2))
    printed_a = 2.0 * (b2 ** 2 + R2 ** 2 * lam ** 2) / denom
    assert np.abs(printed_a * bg._eigen_norms(pra, lam, lam) - 1).max() < 1e-11

    pr2a = bg.BoundedProblem(DomainCase.ANNULUS_2D, 0.9, ScalarProfile.zero(),
                             ScalarProfile.constant(1.0), **CASES[DomainCase.ANNULUS_2D])
    ev2a = bg.build_green_evaluator(pr2a, n_terms=10)
    lam = ev2a.eigs.values
    a1 = pr2a.q_inner / pr2a.epsilon
    a2 = pr2a.q_outer / pr2a.epsilon
    R1, R2 = pr2a.r_inner, pr2a.r_outer
    j0o, j1o, y0o, y1o = bessel_all(lam * R2)
    j0i, j1i, _, _ = bessel_all(lam * R1)
    d2 = a2 * j0o - lam * j1o
    bn = ((lam ** 2 + a2 ** 2) * (-a1 * j0i + lam * j1i) ** 2
          - (lam ** 2 + a1 ** 2) * (a2 * j0o - lam * j1o) ** 2)
    printed_2a = (math.pi ** 2 / 2.0) * lam ** 2 * d2 ** 2 / bn
    assert np.abs(printed_2a * bg._eigen_norms(pr2a, lam, lam) - 1).max() < 1e-10


def test_green_symmetry_weight_adjusted():
    rng = np.random.default_rng(4)
    for case, kw in CASES.items():
        pr = bg.BoundedProblem(case, 0.6, ScalarProfile.zero(),
                               ScalarProfile.constant(1.0), **kw)
        ev = bg.build_green_evaluator(pr)
        a, b = pr.domain
        n = pr.n
        for _ in range(100):
            r, xi = rng.uniform(a + 0.02 * (b - a), b - 0.02 * (b - a), 2)
            t = float(rng.uniform(max(0.05, ev.t_floor), 2.0))
            g1 = bg.green(ev, r, xi, t) / xi ** (n - 1)
            g2 = bg.green(ev, xi, r, t) / r ** (n - 1)
            assert abs(g1 - g2) <= 1e-12 * max(abs(g1), 1.0)


def test_green_time_domain_error():
    pr = ball3d_problem()
    ev = bg.build_green_evaluator(pr)
    with pytest.raises(ValueError):
        bg.green(ev, 0.5, 0.5, 0.0)


def test_green_large_time_one_term_dominance():
    pr = ball3d_problem()
    ev = bg.build_green_evaluator(pr)
    lam = ev.rates
    t = 2.0 * (2.0 * pr.radius ** 2) / pr.epsilon
    terms = ev._terms(0.5, 0.6, t)
    bound = math.exp(-0.5 * pr.epsilon * (lam[1] ** 2 - lam[0] ** 2) * t)
    assert abs(terms[1:]).sum() / abs(terms[0]) <= 2.0 * bound


def test_heat_kernel_property_against_fd_oracle():
    # int G(r, xi, t) f(xi) dxi ~ f evolved by the FD heat solver at small t
    pr = ball3d_problem(eps=0.5, qb=0.25)
    ev = bg.build_green_evaluator(pr, t_floor=2e-3)
    f = lambda r: np.exp(-((r - 0.5) / 0.22) ** 2)
    t = 0.01
    cells, a_fd = orc.fd_heat_solve(3, pr.epsilon, f, t, pr.radius,
                                    q_outer=pr.q_boundary, n_cells=1600)
    x, w = np.polynomial.legendre.leggauss(10)
    edges = np.linspace(0.0, pr.radius, 121)
    probe = np.linspace(0.15, 0.85, 8)
    for r in probe:
        total = 0.0
        for i in range(120):
            mid = 0.5 * (edges[i] + edges[i + 1])
            half = 0.5 * (edges[i + 1] - edges[i])
            xi = mid + half * x
            gv = np.array([bg.green(ev, float(r), float(z), t) for z in xi])
            total += half * float((gv * f(xi)) @ w)
        ref = np.interp(r, cells, a_fd)
        assert total == pytest.approx(ref, abs=3e-4)


def test_truncation_check_below_tolerance():
    pr = ball3d_problem()
    ev = bg.build_green_evaluator(pr)
    assert ev.truncation_check(0.4, 0.7, ev.t_floor) < 1e-14


def test_hopf_cole_state_heat_residual_refines():
    pr = ball3d_problem()
    st = bg.hopf_cole_boundary_state(pr)

    def resid(nr, nt):
        gr = np.linspace(0.05, 0.95, nr)
        gt = np.linspace(0.1, 0.5, nt)
        state = st.sample(gr, gt)
        return np.abs(rc.heat_residual(state, pr.epsilon, 3)).max() / np.abs(state.a).max()

    coarse, fine = resid(41, 41), resid(81, 81)
    assert math.log2(coarse / fine) > 1.8


def test_linearization_round_trip():
    # a sampled Hopf-Cole state with small heat residual must yield, via
    # q = -eps a_r/a, a velocity with a viscous residual of the same
    # discretization order
    pr = ball3d_problem()
    st = bg.hopf_cole_boundary_state(pr)

    def residuals(nr, nt):
        gr = np.linspace(0.1, 0.9, nr)
        gt = np.linspace(0.2, 0.6, nt)
        state = st.sample(gr, gt)
        heat = np.abs(rc.heat_residual(state, pr.epsilon, 3)).max() \
            / np.abs(state.a).max()
        q = rc.velocity_from_hopf_cole(state, pr.epsilon)
        fld = rc.RadialField(3, pr.epsilon, gr, gt, q, np.ones_like(q))
        visc = np.abs(rc.viscous_residual(fld)[0]).max()
        return heat, visc

    h1, v1 = residuals(41, 41)
    h2, v2 = residuals(81, 81)
    assert math.log2(h1 / h2) > 1.7
    assert math.log2(v1 / v2) > 1.7
    assert v1 < 5e-2


def test_robin_residual_small():
    for case in (DomainCase.BALL_2D, DomainCase.ANNULUS_3D):
        kw = CASES[case]
        pr = bg.BoundedProblem(case, 0.6, ScalarProfile.zero(),
                               ScalarProfile.constant(1.0), **kw)
        st = bg.hopf_cole_boundary_state(pr)
        assert st.robin_residual(0.5) < 1e-12


def test_boundary_attainment():
    pr = ball3d_problem()
    st = bg.hopf_cole_boundary_state(pr)
    assert st.velocity(pr.radius * (1 - 1e-9), 1.0) == pytest.approx(0.25, abs=1e-6)


def test_large_time_velocity_matches_series():
    pr = ball3d_problem()
    st = bg.hopf_cole_boundary_state(pr)
    mu1 = st.ev.eigs.values[0]
    t_big = 50.0 / pr.epsilon * pr.radius ** 2 / mu1 ** 2
    for r in (0.3, 0.6, 0.9):
        lt = bg.large_time_velocity(pr, r, ev=st.ev)
        assert st.velocity(r, t_big) == pytest.approx(lt, rel=1e-10)


def test_density_trivial_and_batch_consistency():
    rho0 = ScalarProfile.from_pieces([0.0, 1.0], [[1.0, 0.0, -0.5]])
    pz = bg.BoundedProblem(DomainCase.BALL_3D, 0.5, ScalarProfile.zero(), rho0,
                           radius=1.0)
    st = bg.hopf_cole_boundary_state(pz)
    for r in (0.2, 0.5, 0.9):
        assert bg.density(st, r, 0.7) == pytest.approx(rho0(r), rel=1e-8)
    pr = ball3d_problem()
    st2 = bg.hopf_cole_boundary_state(pr)
    rr = np.linspace(0.1, 0.9, 7)
    batch = bg.density_batch(st2, rr, 0.8)
    point = np.array([bg.density(st2, float(r), 0.8) for r in rr])
    assert np.abs(batch / point - 1).max() < 1e-6


def test_velocity_derivative_fd_vs_fused():
    pr = ball3d_problem()
    st = bg.hopf_cole_boundary_state(pr)
    rr = np.linspace(0.15, 0.9, 9)
    _, dq = st.velocity_and_derivative(rr, 0.7)
    dq_fd = st.velocity_derivative(rr, 0.7)
    assert np.abs(dq - dq_fd).max() < 1e-6


def test_mass_flux_identity_ball_and_annulus():
    pr = ball3d_problem()
    st = bg.hopf_cole_boundary_state(pr)
    rows = bg.mass_flux_report(st, [0.8], dt=0.02)
    assert abs(rows[0][3]) < 1e-4
    # annulus, outflow at both walls
    q0 = ScalarProfile.from_pieces([1.0, 2.0, 3.0],
                                   [[-0.2, 0.0, 1.2, -0.8], [0.2]])
    pra = bg.BoundedProblem(DomainCase.ANNULUS_3D, 0.6, q0,
                            ScalarProfile.constant(1.0), r_inner=1.0,
                            r_outer=2.0, q_inner=-0.2, q_outer=0.2)
    sta = bg.hopf_cole_boundary_state(pra)
    rows = bg.mass_flux_report(sta, [0.8], dt=0.02)
    assert abs(rows[0][3]) < 1e-4


def _inflow_annulus(rho_inner):
    # inflow at the inner wall (q_inner > 0), gentle enough that the Robin
    # spectrum stays positive and the series is complete
    q0 = ScalarProfile.from_pieces([1.0, 2.0, 3.0],
                                   [[0.15, 0.0, 0.15, -0.1], [0.2]])
    return bg.BoundedProblem(DomainCase.ANNULUS_3D, 0.6, q0,
                             ScalarProfile.constant(1.0), r_inner=1.0,
                             r_outer=2.0, q_inner=0.15, q_outer=0.2,
                             rho_inner=rho_inner)


def test_inflow_wall_requires_density():
    # the ball cannot host an inflow wall at all (growing Robin mode)
    with pytest.raises(ValueError):
        bg.BoundedProblem(DomainCase.BALL_3D, 0.5, ScalarProfile.zero(),
                          smooth_rho(), radius=1.0, q_boundary=-0.3)
    with pytest.raises(ValueError):
        _inflow_annulus(rho_inner=None)
    # with the wall density supplied, backward characteristics exiting the
    # inner wall pick up the boundary trace
    pr = _inflow_annulus(rho_inner=ScalarProfile.constant(0.7))
    st = bg.hopf_cole_boundary_state(pr)
    val = bg.density(st, 1.05, 1.5)
    assert np.isfinite(val) and val > 0


def test_data_insufficiency_error():
    pr = _inflow_annulus(rho_inner=ScalarProfile.constant(0.7))
    st = bg.hopf_cole_boundary_state(pr)
    pr.rho_inner = None
    with pytest.raises(bg.DataInsufficiencyError):
        bg.density(st, 1.05, 1.5)


def test_ball_inflow_series_rejected():
    pr = bg.BoundedProblem(DomainCase.BALL_3D, 0.5,
                           smoothstep_q0(1.0, -0.3), smooth_rho(), radius=1.0,
                           q_boundary=-0.3,
                           rho_boundary=ScalarProfile.constant(0.7))
    with pytest.raises(ValueError):
        bg.hopf_cole_boundary_state(pr)


def test_velocity_below_floor_raises():
    pr = ball3d_problem()
    st = bg.hopf_cole_boundary_state(pr)
    with pytest.raises(bg.TruncationError):
        st.velocity(0.5, st.time_floor / 10.0)


def test_eigenvalue_csv(tmp_path):
    pr = ball3d_problem()
    ev = bg.build_green_evaluator(pr, n_terms=5)
    path = tmp_path / "eig.csv"
    bg.write_eigenvalue_csv(ev.eigs, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "index,value,residual"
    assert len(lines) == 6
