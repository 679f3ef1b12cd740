import numpy as np
import pytest
from numpy.polynomial import polynomial as P

from zpgd import freespace as fs
from zpgd.profiles import ScalarProfile


def quadratic_potential(eps=0.7):
    # q0(r) = r on a range wide enough that the clamp never matters:
    # phi0 = |x|^2/2 and u = x/(1+t) exactly, for every eps
    q0 = ScalarProfile.piecewise_linear([0.0, 120.0], [0.0, 120.0])
    rho0 = smooth_bump_rho()
    return fs.FreespaceProblem(n=1, epsilon=eps, q0=q0, rho0=rho0, rho0_support=2.0)


def smooth_bump_rho():
    base = P.polypow([1.0, 0.0, -0.25], 4)   # (1 - r^2/4)^4, C^3 at r = 2
    return ScalarProfile.from_pieces([0.0, 2.0, 3.0], [list(base), [0.0]])


def smooth_bump_q0(amp=1.5):
    base = P.polypow([1.0, 0.0, -0.25], 4)
    coeffs = amp * 0.5 * P.polymul([0.0, 1.0], base)
    return ScalarProfile.from_pieces([0.0, 2.0, 3.0], [list(coeffs), [0.0]])


def compact_problem(n=1, eps=0.4):
    return fs.FreespaceProblem(n=n, epsilon=eps, q0=smooth_bump_q0(),
                               rho0=smooth_bump_rho(), rho0_support=2.0)


def test_velocity_zero_for_zero_data():
    pr = fs.FreespaceProblem(n=3, epsilon=0.5, q0=ScalarProfile.zero(),
                             rho0=smooth_bump_rho(), rho0_support=2.0)
    u = fs.velocity(pr, np.array([0.3, 0.2, 0.1]), 1.0)
    assert np.abs(u).max() < 1e-13


def test_velocity_closed_form_n1():
    pr = quadratic_potential()
    for x in (-4.0, -1.3, 0.7, 3.2):
        for t in (0.1, 1.0, 10.0):
            u = fs.velocity(pr, x, t)
            assert u == pytest.approx(x / (1 + t), rel=1e-9)


def test_velocity_closed_form_general_callable():
    pr = fs.FreespaceProblem(n=1, epsilon=0.7, phi0=lambda y: 0.5 * y * y,
                             grad_phi0=lambda y: float(y),
                             rho0=lambda x: 1.0, rho0_support=1.0)
    assert fs.velocity(pr, 2.5, 3.0) == pytest.approx(2.5 / 4.0, rel=1e-8)


def test_velocity_closed_form_radial_n3():
    pr = fs.FreespaceProblem(n=3, epsilon=0.5,
                             q0=ScalarProfile.piecewise_linear([0.0, 120.0], [0.0, 120.0]),
                             rho0=smooth_bump_rho(), rho0_support=2.0)
    x = np.array([1.0, 1.0, 0.5])
    u = fs.velocity(pr, x, 2.0)
    assert u == pytest.approx(x / 3.0, rel=1e-9)


def test_velocity_bound_random_samples():
    rng = np.random.default_rng(21)
    for pr in (compact_problem(1, 0.3), compact_problem(3, 0.5)):
        L0 = pr.q0.sup_abs()
        for _ in range(120):
            t = float(10 ** rng.uniform(-1.3, 1.3))
            if pr.n == 1:
                x = float(rng.uniform(-4, 4))
                u = abs(fs.velocity(pr, x, t))
            else:
                x = rng.uniform(-2, 2, 3)
                u = float(np.linalg.norm(fs.velocity(pr, x, t)))
            assert u <= L0 + 1e-8


def test_time_domain_error():
    with pytest.raises(fs.TimeDomainError):
        fs.velocity(compact_problem(), 1.0, 0.0)


def test_confinement_diagnostic():
    # concave potential past its caustic time: the integrand is unbounded
    pr = fs.FreespaceProblem(n=1, epsilon=0.3, phi0=lambda y: -y * y,
                             grad_phi0=lambda y: -2.0 * y,
                             rho0=lambda x: 1.0, rho0_support=1.0)
    with pytest.raises(fs.ConfinementError):
        fs.velocity(pr, 0.3, 2.0)


def test_trace_characteristic_examples():
    # u == 0: stationary
    pz = fs.FreespaceProblem(n=3, epsilon=0.5, q0=ScalarProfile.zero(),
                             rho0=smooth_bump_rho(), rho0_support=2.0)
    x = np.array([0.4, 0.2, 0.1])
    foot, jac = fs.trace_characteristic(pz, x, 1.0)
    assert foot == pytest.approx(x, abs=1e-10)
    assert jac == pytest.approx(1.0, abs=1e-9)
    # u = x/(1+t): foot x/(1+t), jac 1/(1+t)
    pr = quadratic_potential()
    foot, jac = fs.trace_characteristic(pr, 2.0, 1.5)
    assert foot == pytest.approx(2.0 / 2.5, rel=1e-6)
    assert jac == pytest.approx(1.0 / 2.5, rel=1e-5)
    # n = 3 radial version: jac = (1+t)^-3
    p3 = fs.FreespaceProblem(n=3, epsilon=0.5,
                             q0=ScalarProfile.piecewise_linear([0.0, 120.0], [0.0, 120.0]),
                             rho0=smooth_bump_rho(), rho0_support=2.0)
    foot3, jac3 = fs.trace_characteristic(p3, np.array([1.0, 1.0, 0.5]), 2.0)
    assert jac3 == pytest.approx(1.0 / 27.0, rel=1e-5)


def test_density_examples():
    rho0 = smooth_bump_rho()
    pz = fs.FreespaceProblem(n=3, epsilon=0.5, q0=ScalarProfile.zero(),
                             rho0=rho0, rho0_support=2.0)
    x = np.array([0.8, 0.0, 0.0])
    assert fs.density(pz, x, 0.7) == pytest.approx(rho0(0.8), rel=1e-8)
    pr = quadratic_potential()
    assert fs.density(pr, 1.2, 1.0) == pytest.approx(rho0(0.6) / 2.0, rel=1e-5)


def test_flow_sample_positive_jacobian():
    s = fs.flow_sample(compact_problem(), 0.8, 0.9)
    assert s.jac > 0
    assert abs(s.rho - fs.density(compact_problem(), 0.8, 0.9)) < 1e-10


def test_total_mass_conservation():
    pr = compact_problem(1, 0.4)
    m0, err0 = fs.total_mass(pr, 0.0)
    exact = 2.0 * smooth_bump_rho().integral(0.0, 2.0)
    assert m0 == pytest.approx(exact, rel=1e-10)
    for t in (0.5, 2.0):
        m, err = fs.total_mass(pr, t)
        assert abs(m - m0) / m0 < 1e-7
    z = fs.FreespaceProblem(n=1, epsilon=0.4, q0=smooth_bump_q0(),
                            rho0=ScalarProfile.zero(), rho0_support=2.0)
    mz, _ = fs.total_mass(z, 0.5)
    assert abs(mz) < 1e-12


def test_total_mass_radial_n3():
    pr = compact_problem(3, 0.5)
    m0, _ = fs.total_mass(pr, 0.0)
    m1, _ = fs.total_mass(pr, 1.0)
    assert abs(m1 - m0) / m0 < 1e-7


def test_large_time_decay_monotone():
    pr = compact_problem(1, 0.4)
    K = np.linspace(0.1, 2.0, 7)
    sups = []
    for t in (10.0, 100.0, 1000.0):
        sups.append(max(abs(fs.radial_velocity(pr, float(r), t)) for r in K))
    assert sups[0] > sups[1] > sups[2]


def test_smoothness_proxy_no_nans():
    pr = compact_problem(1, 0.05)
    h = 1e-4
    for x in np.linspace(-2.5, 2.5, 11):
        vals = [fs.velocity(pr, float(x) + k * h, 0.01) for k in (-1, 0, 1)]
        d2 = (vals[0] - 2 * vals[1] + vals[2]) / h ** 2
        assert np.isfinite(d2)


def test_angular_factor_bound_and_derivatives():
    # 0 <= G1 <= G0 keeps the velocity bound exact; derivatives match FD
    alpha = np.concatenate([np.array([1e-9, 1e-5]), np.linspace(0.01, 40, 200)])
    for n in (1, 2, 3):
        g0, g1, dg0, dg1 = fs._angular_factors(n, alpha, derivs=True)
        assert np.all(g1 >= -1e-15)
        assert np.all(g1 <= g0 + 1e-15)
        h = 1e-6
        g0p, g1p = fs._angular_factors(n, alpha + h)
        g0m, g1m = fs._angular_factors(n, np.maximum(alpha - h, 1e-12))
        den = alpha + h - np.maximum(alpha - h, 1e-12)
        assert np.abs((g0p - g0m) / den - dg0).max() < 5e-5
        assert np.abs((g1p - g1m) / den - dg1).max() < 5e-5


def test_batch_matches_scalar_adaptive():
    pr = compact_problem(1, 0.4)
    rr = np.linspace(0.05, 3.0, 17)
    for t in (0.1, 0.8):
        qb = fs._radial_velocity_batch(pr, rr, t)
        qs = np.array([fs.radial_velocity(pr, float(r), t) for r in rr])
        assert np.abs(qb - qs).max() < 1e-11


def test_separable_quadratic_2d_tensor_path():
    # phi0 = (a1 y1^2 + a2 y2^2)/2 separates: u_k = a_k x_k/(1 + a_k t)
    a1, a2 = 1.0, 2.0
    pr = fs.FreespaceProblem(
        n=2, epsilon=0.5,
        phi0=lambda y: 0.5 * (a1 * y[0] ** 2 + a2 * y[1] ** 2),
        grad_phi0=lambda y: np.array([a1 * y[0], a2 * y[1]]),
        rho0=lambda x: 1.0, rho0_support=1.0)
    x = np.array([0.8, -0.5])
    u = fs.velocity(pr, x, 1.5)
    exact = np.array([a1 * x[0] / (1 + a1 * 1.5), a2 * x[1] / (1 + a2 * 1.5)])
    assert u == pytest.approx(exact, abs=5e-4)
