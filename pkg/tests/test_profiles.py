import numpy as np
import pytest

from zpgd.profiles import ScalarProfile


def test_constant_and_clamp():
    p = ScalarProfile.constant(2.5)
    assert p(0.0) == 2.5
    assert p(17.0) == 2.5
    assert p(-3.0) == 2.5


def test_piecewise_linear_eval():
    p = ScalarProfile.piecewise_linear([0.0, 1.0, 3.0], [0.0, 2.0, 0.0])
    assert p(0.5) == pytest.approx(1.0)
    assert p(2.0) == pytest.approx(1.0)
    assert p(5.0) == 0.0          # clamped at the end value
    vals = p(np.array([0.25, 1.0, 2.5]))
    assert vals == pytest.approx([0.5, 2.0, 0.5])


def test_cumulative_matches_numeric_integral():
    rng = np.random.default_rng(3)
    bps = np.sort(rng.uniform(0.0, 3.0, 5))
    bps[0] = 0.0
    rows = [list(rng.uniform(-1, 1, 3)) for _ in range(4)]
    # make the profile continuous so the trapezoid oracle converges fast
    for i in range(1, 4):
        left_end = np.polynomial.polynomial.polyval(bps[i] - bps[i - 1], rows[i - 1])
        rows[i][0] = left_end
    p = ScalarProfile.from_pieces(bps, rows)
    for x in rng.uniform(0.0, 3.5, 12):
        grid = np.linspace(bps[0], x, 20001)
        numeric = np.trapezoid(p(grid), grid)
        assert p.cumulative(x) == pytest.approx(numeric, abs=2e-7)


def test_cumulative_outside_range_is_linear():
    p = ScalarProfile.piecewise_linear([0.0, 1.0], [1.0, 3.0])
    assert p.cumulative(2.0) == pytest.approx(2.0 + 3.0)  # area + clamp tail
    assert p.cumulative(-1.0) == pytest.approx(-1.0)      # left clamp value 1


def test_tail_integral_requires_vanishing_end():
    p = ScalarProfile.piecewise_linear([0.0, 1.0, 2.0], [1.0, 1.0, 0.0])
    assert p.tail_integral(0.0) == pytest.approx(1.5)
    assert p.tail_integral(1.0) == pytest.approx(0.5)
    assert p.tail_integral(5.0) == 0.0
    bad = ScalarProfile.constant(1.0)
    with pytest.raises(ValueError):
        bad.tail_integral(0.0)


def test_positive_part_and_squared():
    p = ScalarProfile.piecewise_linear([0.0, 1.0, 2.0], [1.0, -1.0, 1.0])
    plus = p.positive_part()
    xs = np.linspace(0, 2, 501)
    assert plus(xs) == pytest.approx(np.maximum(p(xs), 0.0), abs=1e-12)
    sq = p.squared()
    assert sq(xs) == pytest.approx(p(xs) ** 2, abs=1e-12)


def test_sup_abs_quadratic_interior_extremum():
    # f = x(2-x) on [0,2]: max 1 at the interior vertex
    p = ScalarProfile.from_pieces([0.0, 2.0], [[0.0, 2.0, -1.0]])
    assert p.sup_abs() == pytest.approx(1.0, abs=1e-12)


def test_times_monomial():
    p = ScalarProfile.piecewise_linear([0.0, 1.0, 2.0], [1.0, 2.0, 0.0])
    q = p.times_monomial(2)
    xs = np.linspace(0, 2, 301)
    assert q(xs) == pytest.approx(p(xs) * xs ** 2, abs=1e-12)


def test_derivative_profile():
    p = ScalarProfile.from_pieces([0.0, 2.0], [[1.0, 3.0, -1.0]])
    d = p.derivative_profile()
    assert d(0.5) == pytest.approx(3.0 - 1.0)


def test_validation():
    with pytest.raises(ValueError):
        ScalarProfile(np.array([1.0, 0.5]), np.array([[1.0]]))
    with pytest.raises(ValueError):
        ScalarProfile.piecewise_linear([0.0], [1.0])
