"""Bounded-domain radial adhesion solutions by eigenfunction series.

The linearizing heat problem on a disc/ball or planar/spherical annulus
with Robin walls (eps a_r + q a = 0) is solved by its eigenfunction
expansion; the velocity is the logarithmic-derivative ratio of two series
and the density rides backward characteristics to the parabolic boundary.

Per-term normalizations are computed from closed-form eigenfunction norms
valid at any frequency (tests confirm they coincide with the tabulated
coefficient forms at the eigenvalues).  When every boundary velocity is
zero the constant eigenfunction is a genuine zero mode and is included
explicitly; a positive-root-only series would lose it and degenerate to
0/0 on Neumann data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .profiles import ScalarProfile
from .radial_core import FLOAT_FMT, HopfColeState
from .specfun import (DomainCase, EigenProblem, EigenvalueList, bessel_all,
                      find_eigenvalues)

__all__ = [
    "BoundedProblem",
    "GreenEvaluator",
    "BoundedHopfCole",
    "build_green_evaluator",
    "green",
    "hopf_cole_boundary_state",
    "velocity",
    "velocity_vector",
    "density",
    "large_time_velocity",
    "radial_mass",
    "mass_flux_report",
    "write_eigenvalue_csv",
]


class TruncationError(RuntimeError):
    """Series truncation insufficient for the requested evaluation."""


class DataInsufficiencyError(RuntimeError):
    """A backward characteristic reached a wall whose density trace was not
    supplied (the inflow sign conditions are violated)."""


@dataclass
class BoundedProblem:
    """Radial initial/boundary data on a ball (radius, q_boundary) or an
    annulus (r_inner/r_outer, q_inner/q_outer).  Boundary densities are
    needed only on inflow walls: q_boundary < 0 for the ball, q_inner > 0
    at the inner wall, q_outer < 0 at the outer wall."""

    case: DomainCase
    epsilon: float
    q0: ScalarProfile
    rho0: ScalarProfile
    radius: float | None = None
    r_inner: float | None = None
    r_outer: float | None = None
    q_boundary: float = 0.0
    q_inner: float = 0.0
    q_outer: float = 0.0
    rho_boundary: ScalarProfile | None = None
    rho_inner: ScalarProfile | None = None
    rho_outer: ScalarProfile | None = None

    def __post_init__(self):
        self.eigen = EigenProblem(
            self.case, self.epsilon, radius=self.radius, r_inner=self.r_inner,
            r_outer=self.r_outer, q_boundary=self.q_boundary,
            q_inner=self.q_inner, q_outer=self.q_outer)
        if self.q_boundary < 0 and self.rho_boundary is None and not self.is_annulus:
            raise ValueError("inflow wall (q_boundary < 0) needs rho_boundary")
        if self.is_annulus:
            if self.q_inner > 0 and self.rho_inner is None:
                raise ValueError("inflow at the inner wall needs rho_inner")
            if self.q_outer < 0 and self.rho_outer is None:
                raise ValueError("inflow at the outer wall needs rho_outer")

    @property
    def n(self) -> int:
        return self.case.dimension

    @property
    def is_annulus(self) -> bool:
        return self.case.is_annulus

    @property
    def domain(self) -> tuple:
        if self.is_annulus:
            return (self.r_inner, self.r_outer)
        return (0.0, self.radius)

    @property
    def length_scale(self) -> float:
        a, b = self.domain
        return b - a

    def p0_profile(self) -> ScalarProfile:
        return self.rho0.times_monomial(self.n - 1)

    def p_boundary_profile(self):
        if self.rho_boundary is None:
            return None
        return self.rho_boundary.scaled(self.radius ** (self.n - 1))

    def p_inner_profile(self):
        if self.rho_inner is None:
            return None
        return self.rho_inner.scaled(self.r_inner ** (self.n - 1))

    def p_outer_profile(self):
        if self.rho_outer is None:
            return None
        return self.rho_outer.scaled(self.r_outer ** (self.n - 1))

    def consistency_gap(self) -> float:
        """First-order consistency of initial and boundary velocities at
        the space-time corners (0 when the data are compatible)."""
        if self.is_annulus:
            return max(abs(float(self.q0(self.r_inner)) - self.q_inner),
                       abs(float(self.q0(self.r_outer)) - self.q_outer))
        return abs(float(self.q0(self.radius)) - self.q_boundary)


@dataclass
class GreenEvaluator:
    """Assembled eigenfunction expansion of the Robin heat kernel."""

    problem: BoundedProblem
    eigs: EigenvalueList
    rates: np.ndarray          # decay wavenumbers (mu/R or lambda), zero mode first if present
    inv_norms: np.ndarray
    include_zero: bool
    t_floor: float

    # per-case eigenfunction tables ------------------------------------

    def active_modes(self, t: float) -> int:
        """Modes whose decay factor at time t still exceeds 1e-18 relative
        to the slowest mode; later modes cannot move the sums."""
        if t <= 0.0:
            return self.rates.size
        lam2_cut = self.rates.min() ** 2 + 2.0 * math.log(1e18) / (self.problem.epsilon * t)
        return int(np.searchsorted(self.rates ** 2, lam2_cut)) + 1

    def phi(self, r, deriv: int = 0, k: int | None = None) -> np.ndarray:
        """(len(r), k) matrix of eigenfunction values (or d/dr values) for
        the first k modes (all by default).  A zero-rate column, when
        present, is the constant eigenfunction."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        pr = self.problem
        rates = self.rates if k is None else self.rates[:k]
        zero_cols = rates == 0.0
        safe = np.where(zero_cols, 1.0, rates)
        lam = safe[None, :]
        z = r[:, None] * lam
        case = pr.case
        if case == DomainCase.BALL_2D:
            j0, j1, _, _ = bessel_all(z.ravel())
            j0 = j0.reshape(z.shape)
            j1 = j1.reshape(z.shape)
            out = j0 if deriv == 0 else -lam * j1
        elif case == DomainCase.BALL_3D:
            rr = r[:, None]
            if deriv == 0:
                out = np.sin(z) / rr
            else:
                out = lam * np.cos(z) / rr - np.sin(z) / rr ** 2
        elif case == DomainCase.ANNULUS_2D:
            a1 = pr.q_inner / pr.epsilon
            x1 = safe * pr.r_inner
            j0i, j1i, y0i, y1i = bessel_all(x1)
            ca = -a1 * y0i + safe * y1i
            cb = -a1 * j0i + safe * j1i
            j0, j1, y0, y1 = bessel_all(z.ravel())
            j0, j1 = j0.reshape(z.shape), j1.reshape(z.shape)
            y0, y1 = y0.reshape(z.shape), y1.reshape(z.shape)
            if deriv == 0:
                out = ca[None, :] * j0 - cb[None, :] * y0
            else:
                out = -lam * (ca[None, :] * j1 - cb[None, :] * y1)
        else:  # spherical annulus
            b1 = pr.eigen.b1
            rr = r[:, None]
            u = lam * (rr - pr.r_inner)
            psi = b1 * np.sin(u) + pr.r_inner * lam * np.cos(u)
            if deriv == 0:
                out = psi / rr
            else:
                dpsi = lam * (b1 * np.cos(u) - pr.r_inner * lam * np.sin(u))
                out = dpsi / rr - psi / rr ** 2
        if zero_cols.any():
            out = out.copy()
            out[:, zero_cols] = 1.0 if deriv == 0 else 0.0
        return out

    def decay(self, t: float, reference: bool = True,
              k: int | None = None) -> np.ndarray:
        """exp(-eps rate^2 t / 2), optionally relative to the slowest mode
        (the reference form keeps velocity ratios finite at large t)."""
        lam2 = (self.rates if k is None else self.rates[:k]) ** 2
        if reference:
            lam2 = lam2 - self.rates.min() ** 2
        return np.exp(-0.5 * self.problem.epsilon * lam2 * t)

    def truncation_check(self, r: float, xi: float, t: float) -> float:
        """|last term| relative to the partial sum at (r, xi, t)."""
        terms = self._terms(r, xi, t)
        total = terms.sum()
        return abs(terms[-1]) / max(abs(total), 1e-300)

    def _terms(self, r, xi, t):
        pr = self.problem
        w = xi ** (pr.n - 1)
        return (self.inv_norms * self.phi(np.array([r]))[0]
                * self.phi(np.array([xi]))[0] * w * self.decay(t, reference=False))


def _zero_mode_norm(problem: BoundedProblem) -> float:
    a, b = problem.domain
    n = problem.n
    return (b ** n - a ** n) / n


def build_green_evaluator(problem: BoundedProblem, n_terms: int | None = None,
                          t_floor: float | None = None) -> GreenEvaluator:
    """Assemble the series with enough modes that the tail at the time
    floor is below 1e-14 of the leading term (default floor:
    1e-3 * 2 L^2 / eps with L the domain width)."""
    if not problem.is_annulus and problem.q_boundary < 0.0:
        raise ValueError(
            "an inflow ball wall (q_boundary < 0) carries a growing Robin "
            "mode outside the positive-frequency series; the expansion "
            "would be incomplete")
    L = problem.length_scale
    eps = problem.epsilon
    explicit_terms = n_terms is not None
    if t_floor is None and not explicit_terms:
        t_floor = 1e-3 * 2.0 * L ** 2 / eps
    if n_terms is None:
        lam_target = math.sqrt(2.0 * math.log(1e18) / (eps * t_floor))
        n_terms = int(math.ceil(lam_target * L / math.pi)) + 8
        n_terms = min(max(n_terms, 8), 900)
    eigs = find_eigenvalues(problem.eigen, n_terms)
    if problem.case.is_annulus:
        rates = eigs.values.copy()
    else:
        rates = eigs.values / problem.radius
    inv_norms = 1.0 / _eigen_norms(problem, eigs.values, rates)
    include_zero = problem.eigen.has_zero_mode
    if include_zero:
        rates = np.concatenate([[0.0], rates])
        inv_norms = np.concatenate([[1.0 / _zero_mode_norm(problem)], inv_norms])
    if t_floor is None:
        # explicit term count: the floor is wherever its tail bound is met
        gap = rates[-1] ** 2 - rates.min() ** 2
        t_floor = 2.0 * math.log((1.0 + rates[-1]) * 1e14) / (eps * max(gap, 1e-300))
    ev = GreenEvaluator(problem, eigs, rates, inv_norms, include_zero, t_floor)
    tail = ev.decay(t_floor, reference=True)[-1] * (1.0 + rates[-1])
    if tail > 1e-10:
        raise TruncationError(
            f"series tail {tail:.2e} at the time floor; raise n_terms above {n_terms}")
    return ev


def _eigen_norms(problem: BoundedProblem, mu: np.ndarray, rates: np.ndarray):
    """Closed-form squared norms of the radial eigenfunctions with weight
    r^(n-1); valid for any frequency, no eigenvalue identities needed."""
    case = problem.case
    if case == DomainCase.BALL_2D:
        j0, j1, _, _ = bessel_all(mu)
        return 0.5 * problem.radius ** 2 * (j0 ** 2 + j1 ** 2)
    if case == DomainCase.BALL_3D:
        return 0.5 * problem.radius * (1.0 - np.sin(2.0 * mu) / (2.0 * mu))
    if case == DomainCase.ANNULUS_2D:
        a1 = problem.q_inner / problem.epsilon
        a2 = problem.q_outer / problem.epsilon
        r1, r2 = problem.r_inner, problem.r_outer
        x1 = rates * r1
        x2 = rates * r2
        j0i, j1i, y0i, y1i = bessel_all(x1)
        ca = -a1 * y0i + rates * y1i
        cb = -a1 * j0i + rates * j1i
        j0o, j1o, y0o, y1o = bessel_all(x2)
        h2 = ca * j0o - cb * y0o
        # H(R1) = -2/(pi R1) exactly (Wronskian), independent of the data
        h1_sq = (2.0 / (math.pi * r1)) ** 2
        return ((rates ** 2 + a2 ** 2) * r2 ** 2 * h2 ** 2
                - (rates ** 2 + a1 ** 2) * r1 ** 2 * h1_sq) / (2.0 * rates ** 2)
    b1 = problem.eigen.b1
    r1 = problem.r_inner
    d = problem.r_outer - problem.r_inner
    lam = rates
    s2 = np.sin(2.0 * lam * d)
    return (0.5 * d * (b1 ** 2 + r1 ** 2 * lam ** 2)
            + (r1 ** 2 * lam ** 2 - b1 ** 2) * s2 / (4.0 * lam)
            + b1 * r1 * np.sin(lam * d) ** 2)


def green(ev: GreenEvaluator, r: float, xi: float, t: float) -> float:
    """Heat kernel G(r, xi, t) (the series diverges pointwise at t <= 0)."""
    if t <= 0:
        raise ValueError("the series only converges for t > 0")
    return float(ev._terms(r, xi, t).sum())


# ---------------------------------------------------------------------------
# Hopf-Cole state built from the series


class BoundedHopfCole:
    """a(r,t) = integral G(r,xi,t) exp(-(1/eps) int_0^xi q0) dxi and the
    derived velocity; weight integrals are precomputed once."""

    def __init__(self, ev: GreenEvaluator, quad_points: int = 10):
        self.ev = ev
        pr = ev.problem
        a, b = pr.domain
        lam_max = float(ev.rates.max())
        n_panels = int(math.ceil((b - a) / max(0.5 * math.pi / max(lam_max, 1e-9), 1e-9)))
        n_panels = min(max(n_panels, 16), 4000)
        edges = np.unique(np.concatenate(
            [np.linspace(a, b, n_panels + 1),
             [k for k in pr.q0.breakpoints if a < k < b]]))
        x, w = np.polynomial.legendre.leggauss(quad_points)
        mids = 0.5 * (edges[:-1] + edges[1:])
        halves = 0.5 * np.diff(edges)
        nodes = (mids[:, None] + halves[:, None] * x[None, :]).ravel()
        wts = (halves[:, None] * w[None, :]).ravel()
        expo = -pr.q0.cumulative(nodes) / pr.epsilon
        self._shift = float(expo.max())
        weight = np.exp(expo - self._shift) * nodes ** (pr.n - 1) * wts
        self.W = ev.phi(nodes).T @ weight            # (N,)
        self.coef = ev.inv_norms * self.W
        # positivity probe on a coarse grid at and above the floor
        rs = np.linspace(a + 1e-3 * (b - a), b, 41)
        for tt in (ev.t_floor, 4.0 * ev.t_floor, 16.0 * ev.t_floor):
            if np.any(self.evaluate(rs, tt) <= 0.0):
                raise TruncationError(
                    "nonpositive Hopf-Cole variable near the floor; increase "
                    f"n_terms beyond {len(ev.eigs.values)} or raise t_floor")

    @property
    def time_floor(self) -> float:
        return self.ev.t_floor

    def evaluate(self, r, t: float, reference: bool = False) -> np.ndarray:
        """a(r, t) (up to the fixed positive normalization exp(shift));
        reference=True rescales by the slowest mode for large-t ratios."""
        k = self.ev.active_modes(t)
        e = self.ev.decay(t, reference=reference, k=k)
        return self.ev.phi(r, k=k) @ (self.coef[:k] * e)

    def derivative(self, r, t: float, reference: bool = False) -> np.ndarray:
        k = self.ev.active_modes(t)
        e = self.ev.decay(t, reference=reference, k=k)
        return self.ev.phi(r, deriv=1, k=k) @ (self.coef[:k] * e)

    def velocity(self, r, t: float):
        """q = -eps a_r / a, evaluated in the slow-mode-relative scaling."""
        if t < self.ev.t_floor:
            raise TruncationError(
                f"t={t:g} below the series floor {self.ev.t_floor:g}")
        den = self.evaluate(r, t, reference=True)
        if np.any(np.abs(den) < 1e-300):
            raise TruncationError("series denominator underflow")
        num = self.derivative(r, t, reference=True)
        out = -self.ev.problem.epsilon * num / den
        return float(out[0]) if np.isscalar(r) or np.asarray(r).ndim == 0 else out

    def velocity_smooth(self, r, t: float):
        """Velocity with the initial-data Taylor limit below the floor
        (used by characteristic tracing, which must reach t = 0)."""
        if t >= self.ev.t_floor:
            return self.velocity(r, t)
        pr = self.ev.problem
        q0 = pr.q0
        dq0 = q0.derivative_profile()
        d2q0 = dq0.derivative_profile()
        rr = np.atleast_1d(np.asarray(r, dtype=float))
        nm1 = pr.n - 1
        qdot = (-q0(rr) * dq0(rr) + 0.5 * pr.epsilon *
                (d2q0(rr) + nm1 / rr * dq0(rr) - nm1 / rr ** 2 * q0(rr)))
        out = q0(rr) + t * qdot
        return float(out[0]) if np.isscalar(r) or np.asarray(r).ndim == 0 else out

    def velocity_derivative(self, r, t: float, h: float | None = None):
        """dq/dr by centered differences of the series velocity."""
        pr = self.ev.problem
        a, b = pr.domain
        if h is None:
            h = 1e-6 * (b - a)
        rr = np.atleast_1d(np.asarray(r, dtype=float))
        lo = np.maximum(rr - h, a + 1e-12 * (b - a))
        hi = np.minimum(rr + h, b - 1e-12 * (b - a))
        if t >= self.ev.t_floor:
            qlo = self.velocity(lo, t)
            qhi = self.velocity(hi, t)
        else:
            qlo = self.velocity_smooth(lo, t)
            qhi = self.velocity_smooth(hi, t)
        out = (qhi - qlo) / (hi - lo)
        return float(out[0]) if np.isscalar(r) or np.asarray(r).ndim == 0 else out

    def velocity_and_derivative(self, r, t: float):
        """(q, dq/dr) from one eigenfunction evaluation: the second radial
        derivative comes for free from phi'' = -rate^2 phi - (n-1)/r phi',
        so a_rr needs only an extra weighted sum of the same phi matrix."""
        pr = self.ev.problem
        rr = np.atleast_1d(np.asarray(r, dtype=float))
        if t < self.ev.t_floor:
            q0 = pr.q0
            dq0 = q0.derivative_profile()
            d2q0 = dq0.derivative_profile()
            nm1 = pr.n - 1
            qdot = (-q0(rr) * dq0(rr) + 0.5 * pr.epsilon *
                    (d2q0(rr) + nm1 / rr * dq0(rr) - nm1 / rr ** 2 * q0(rr)))
            q = q0(rr) + t * qdot
            dq = dq0(rr)   # O(t) correction dropped; only used below the floor
            return q, dq
        k = self.ev.active_modes(t)
        e = self.ev.decay(t, reference=True, k=k)
        c = self.coef[:k] * e
        phi0 = self.ev.phi(rr, k=k)
        phi1 = self.ev.phi(rr, deriv=1, k=k)
        a = phi0 @ c
        a_r = phi1 @ c
        a_rr = -(phi0 @ (c * self.ev.rates[:k] ** 2)) - (pr.n - 1) / rr * a_r
        if np.any(np.abs(a) < 1e-300):
            raise TruncationError("series denominator underflow")
        q = -pr.epsilon * a_r / a
        dq = -pr.epsilon * a_rr / a + q * q / pr.epsilon
        return q, dq

    def robin_residual(self, t: float) -> float:
        """Boundary-condition residual of the series, relative to sup|a|."""
        pr = self.ev.problem
        a, b = pr.domain
        probe = np.linspace(a + 1e-6 * (b - a), b, 101)
        scale = float(np.max(np.abs(self.evaluate(probe, t, reference=True))))
        res = 0.0
        walls = [(b, pr.q_boundary)] if not pr.is_annulus else \
            [(pr.r_inner, pr.q_inner), (pr.r_outer, pr.q_outer)]
        for wall_r, qw in walls:
            val = self.evaluate(np.array([wall_r]), t, reference=True)[0]
            der = self.derivative(np.array([wall_r]), t, reference=True)[0]
            res = max(res, abs(pr.epsilon * der + qw * val))
        return res / max(scale, 1e-300)

    def sample(self, grid_r: np.ndarray, grid_t: np.ndarray) -> HopfColeState:
        """HopfColeState on a grid (true time scaling, for residual tests)."""
        vals = np.empty((len(grid_t), len(grid_r)))
        for i, tt in enumerate(grid_t):
            vals[i] = self.evaluate(grid_r, float(tt))
        return HopfColeState(np.asarray(grid_r, float), np.asarray(grid_t, float), vals)


def hopf_cole_boundary_state(problem: BoundedProblem, n_terms: int | None = None,
                             t_floor: float | None = None) -> BoundedHopfCole:
    return BoundedHopfCole(build_green_evaluator(problem, n_terms, t_floor))


# ---------------------------------------------------------------------------
# public operations


def velocity(state: BoundedHopfCole, r, t: float):
    return state.velocity(r, t)


def velocity_vector(state: BoundedHopfCole, x, t: float):
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise ValueError("radial direction undefined at the origin")
    return (x / r) * state.velocity(r, t)


def large_time_velocity(problem: BoundedProblem, r,
                        ev: GreenEvaluator | None = None):
    """One-mode limit of the velocity; identically 0 for Neumann walls
    (the zero mode dominates) and the weight integrals cancel otherwise."""
    ev = ev or build_green_evaluator(problem, n_terms=8)
    if ev.include_zero:
        return 0.0 if np.isscalar(r) else np.zeros(np.asarray(r).shape)
    rr = np.atleast_1d(np.asarray(r, dtype=float))
    num = ev.phi(rr, deriv=1)[:, 0]
    den = ev.phi(rr)[:, 0]
    out = -problem.epsilon * num / den
    return float(out[0]) if np.isscalar(r) or np.asarray(r).ndim == 0 else out


def density(state: BoundedHopfCole, r: float, t: float,
            rtol: float = 1e-8) -> float:
    """rho(r,t): trace the characteristic of p_t + (qp)_r = 0 back to the
    parabolic boundary, then amplify the boundary trace by
    exp(-int q_r ds) and divide by r^(n-1)."""
    pr = state.ev.problem
    a, b = pr.domain
    if not (a < r < b):
        raise ValueError("r outside the open domain")
    if t <= 0:
        raise ValueError("t must be positive")

    def rhs(s, y):
        beta = min(max(y[0], a + 1e-13), b - 1e-13)
        q, dq = state.velocity_and_derivative(beta, s)
        return [float(q[0]), float(dq[0])]

    events = []

    def hit_outer(s, y):
        return y[0] - (b - 1e-11 * (b - a))

    hit_outer.terminal = True
    events.append(hit_outer)
    if pr.is_annulus:
        def hit_inner(s, y):
            return y[0] - (a + 1e-11 * (b - a))

        hit_inner.terminal = True
        events.append(hit_inner)

    sol = solve_ivp(rhs, (t, 0.0), [r, 0.0], rtol=rtol, atol=1e-10,
                    events=events, dense_output=False, max_step=max(t / 8, 1e-3))
    if not sol.success:
        raise RuntimeError(f"characteristic integration failed: {sol.message}")
    beta0 = float(sol.y[0, -1])
    integral_qr = float(sol.y[1, -1])   # int_t^{t0} q_r ds  (negative orientation)
    if sol.status == 1:   # hit a wall
        t0 = float(sol.t[-1])
        outer_hit = abs(beta0 - b) < abs(beta0 - a) or not pr.is_annulus
        if outer_hit:
            pw = pr.p_boundary_profile() if not pr.is_annulus else pr.p_outer_profile()
            wall = "outer"
        else:
            pw = pr.p_inner_profile()
            wall = "inner"
        if pw is None:
            raise DataInsufficiencyError(
                f"characteristic reached the {wall} wall at t={t0:g} but no "
                "boundary density was supplied (inflow sign conditions violated)")
        p_gamma = float(pw(t0))
    else:
        p_gamma = float(pr.p0_profile()(beta0))
    return p_gamma * math.exp(integral_qr) / r ** (pr.n - 1)


def _no_inflow(pr: BoundedProblem) -> bool:
    if pr.is_annulus:
        return pr.q_inner <= 0.0 <= pr.q_outer
    return pr.q_boundary >= 0.0


def density_batch(state: BoundedHopfCole, radii, t: float,
                  rtol: float = 1e-8) -> np.ndarray:
    """rho at many radii, one backward trace for the whole batch.

    Only valid when no wall is an inflow wall (backward characteristics
    then stay interior and no exit events can fire); otherwise this falls
    back to the event-aware pointwise tracer."""
    from .freespace import _rk4_doubling  # shared adaptive RK pair

    pr = state.ev.problem
    radii = np.asarray(radii, dtype=float)
    if not _no_inflow(pr):
        return np.array([density(state, float(r), t, rtol=rtol) for r in radii])
    a, b = pr.domain
    m = radii.size

    def rhs(sigma, y):
        s = t - sigma
        beta = np.clip(y[:m], a + 1e-13 * (b - a), b - 1e-13 * (b - a))
        q, dq = state.velocity_and_derivative(beta, max(s, 0.0))
        return np.concatenate([-q, -dq])

    # state: feet and the accumulated d(log p)/ds integral
    y = _rk4_doubling(rhs, np.concatenate([radii, np.zeros(m)]), 0.0, t,
                      rtol=rtol, atol=1e-10)
    feet = np.clip(y[:m], a + 1e-13 * (b - a), b - 1e-13 * (b - a))
    integral_qr = y[m:]   # = -int_{t0}^{t} q_r ds
    p0 = pr.p0_profile()
    return p0(feet) * np.exp(integral_qr) / radii ** (pr.n - 1)


def radial_mass(state: BoundedHopfCole, t: float, n_panels: int = 16,
                quad_points: int = 6) -> float:
    """m(t) = integral of p = r^(n-1) rho over the domain width."""
    pr = state.ev.problem
    a, b = pr.domain
    lo = a + 1e-4 * (b - a) if not pr.is_annulus else a + 1e-9 * (b - a)
    hi = b - 1e-9 * (b - a)
    x, w = np.polynomial.legendre.leggauss(quad_points)
    edges = np.linspace(lo, hi, n_panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halves = 0.5 * np.diff(edges)
    nodes = (mids[:, None] + halves[:, None] * x[None, :]).ravel()
    wts = (halves[:, None] * w[None, :]).ravel()
    dens = density_batch(state, nodes, t)
    total = float((dens * nodes ** (pr.n - 1)) @ wts)
    if not pr.is_annulus:
        # the skipped sliver [a, lo) carries p ~ p(lo) (r/lo)^(n-1)
        p_lo = float(dens[0] * nodes[0] ** (pr.n - 1))
        total += p_lo * lo / pr.n
    return total


def mass_flux_report(state: BoundedHopfCole, times, dt: float = 0.02):
    """Check dm/dt against the wall fluxes -[q p] by centered differences.

    Returns rows (t, dm_dt, flux, residual).  The identity is stated for
    the radial mass integral of p; the full mass is omega_{n-1} times it.
    """
    pr = state.ev.problem
    a, b = pr.domain
    rows = []
    for t in times:
        m_lo = radial_mass(state, t - dt)
        m_hi = radial_mass(state, t + dt)
        dm_dt = (m_hi - m_lo) / (2.0 * dt)
        eps_off = 1e-7 * (b - a)
        q_out = state.velocity(b - eps_off, t)
        p_out = float(density_batch(state, np.array([b - eps_off]), t)[0]) \
            * (b - eps_off) ** (pr.n - 1)
        flux = -q_out * p_out
        if pr.is_annulus:
            q_in = state.velocity(a + eps_off, t)
            p_in = float(density_batch(state, np.array([a + eps_off]), t)[0]) \
                * (a + eps_off) ** (pr.n - 1)
            flux = -(q_out * p_out - q_in * p_in)
        rows.append((t, dm_dt, flux, dm_dt - flux))
    return rows


def write_eigenvalue_csv(eigs: EigenvalueList, path):
    with open(path, "w") as fh:
        fh.write("index,value,residual\n")
        for i, (v, res) in enumerate(zip(eigs.values, eigs.residuals), start=1):
            fh.write(f"{i},{FLOAT_FMT % v},{FLOAT_FMT % res}\n")
