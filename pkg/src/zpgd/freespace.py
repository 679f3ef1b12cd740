"""Free-space adhesion solution in R^n via the Gaussian-ratio formula.

The velocity is the ratio of two Gaussian-weighted integrals of the
initial potential; the density rides along backward characteristics of
that velocity field.  For radial potentials phi0 = int_0^|x| q0 the n-dim
integrals collapse to one radial integral with exact angular factors:

    q(r,t) = [int s^{n-1} q0(s) G1(a) e^{-A}] / [int s^{n-1} G0(a) e^{-A}]

with A(s) = ((r-s)^2/(2t) + int_0^s q0)/eps, a = r s/(eps t), and

    n=1: G0 = 1 + e^{-2a},        G1 = 1 - e^{-2a}        (fold of the line)
    n=2: G0 = e^{-a} I0(a),       G1 = e^{-a} I1(a)
    n=3: G0 = (1 - e^{-2a})/a,    G1 = (a(1+e^{-2a}) - (1-e^{-2a}))/a^2

Since 0 <= G1 <= G0 and all weights are positive, the quadrature inherits
the exact bound |q| <= sup|q0| up to rounding.  Exponents are evaluated
relative to their sampled minimum (log-sum-exp shift) so small eps is
safe.  General (non-radial) potentials use an adaptive line integral for
n = 1 and a tensor-grid reference path for n = 2, 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import i0e, i1e

from .profiles import ScalarProfile

__all__ = [
    "FreespaceProblem",
    "FlowSample",
    "MassQuadrature",
    "surface_measure",
    "velocity",
    "radial_velocity",
    "trace_characteristic",
    "density",
    "total_mass",
    "flow_sample",
]


class ConfinementError(RuntimeError):
    """The exponent never confines the integrand: unbounded-gradient
    potential past its caustic time (or genuinely divergent data)."""


class TimeDomainError(ValueError):
    pass


def surface_measure(n: int) -> float:
    """|S^{n-1}|: 2, 2*pi, 4*pi for n = 1, 2, 3."""
    return {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}[n]


@dataclass
class FreespaceProblem:
    """Initial data for the free-space adhesion flow.

    Radial problems give q0 (phi0 = int_0^|x| q0) and a radial rho0
    profile.  General problems give callables phi0 / grad_phi0 / rho0 on
    R^n.  rho0_support bounds the support radius of rho0.
    """

    n: int
    epsilon: float
    q0: ScalarProfile | None = None
    rho0: object = None              # ScalarProfile (radial) or callable
    phi0: object = None              # callable, general case
    grad_phi0: object = None         # callable, general case
    rho0_support: float = 1.0

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ValueError("n must be 1, 2 or 3")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.q0 is None and self.phi0 is None:
            raise ValueError("give either a radial q0 or a potential phi0")
        if self.q0 is not None and not isinstance(self.q0, ScalarProfile):
            raise TypeError("q0 must be a ScalarProfile")

    @property
    def is_radial(self) -> bool:
        return self.q0 is not None

    def grad(self, y):
        if self.grad_phi0 is not None:
            return np.asarray(self.grad_phi0(y), dtype=float)
        h = 1e-6
        y = np.asarray(y, dtype=float)
        if self.n == 1:
            return np.asarray((self.phi0(y + h) - self.phi0(y - h)) / (2 * h))
        g = np.zeros(self.n)
        for k in range(self.n):
            e = np.zeros(self.n)
            e[k] = h
            g[k] = (self.phi0(y + e) - self.phi0(y - e)) / (2 * h)
        return g


@dataclass
class FlowSample:
    x: np.ndarray
    t: float
    u: np.ndarray
    X0: np.ndarray
    jac: float
    rho: float


@dataclass
class MassQuadrature:
    panels: int = 32
    points: int = 10
    radius: float | None = None   # integration radius; inferred if None


# ---------------------------------------------------------------------------
# quadrature helpers

_GL_CACHE: dict = {}


def _gl(npts: int):
    if npts not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(npts)
        _GL_CACHE[npts] = (x, w)
    return _GL_CACHE[npts]


def _gl_panel(fn, a, b, npts=15):
    x, w = _gl(npts)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    vals = fn(mid + half * x)
    return half * (vals @ w)


def _adaptive(fn, edges, scale_fn, rtol=1e-11, max_depth=16, budget=24000):
    """Adaptive panel integration of a vector integrand fn(s)->(k,m).

    scale_fn maps the composite rough estimate to per-component tolerance
    scales (a single-panel estimate can miss a narrow peak entirely and
    drive runaway refinement, so the rough pass is composite).
    """
    coarse0 = [_gl_panel(fn, edges[i], edges[i + 1]) for i in range(len(edges) - 1)]
    rough = np.abs(np.sum(coarse0, axis=0))
    tol = rtol * np.asarray(scale_fn(rough))
    stack = [(edges[i], edges[i + 1], 0, coarse0[i]) for i in range(len(edges) - 1)]
    total = np.zeros(len(rough))
    splits = 0
    while stack:
        a, b, depth, coarse = stack.pop()
        m = 0.5 * (a + b)
        left = _gl_panel(fn, a, m)
        right = _gl_panel(fn, m, b)
        fine = left + right
        if depth >= max_depth or splits >= budget or np.all(np.abs(fine - coarse) <= tol):
            total += fine
        else:
            splits += 1
            stack.append((a, m, depth + 1, left))
            stack.append((m, b, depth + 1, right))
    return total


def _angular_factors(n, alpha, derivs=False):
    """Angular factors (G0, G1) and, when asked, their alpha-derivatives.
    All are bounded with 0 <= G1 <= G0."""
    if n == 1:
        e = np.exp(-2.0 * alpha)
        if not derivs:
            return 1.0 + e, 1.0 - e
        return 1.0 + e, 1.0 - e, -2.0 * e, 2.0 * e
    if n == 2:
        g0 = i0e(alpha)
        g1 = i1e(alpha)
        if not derivs:
            return g0, g1
        small = alpha < 1e-5
        a = np.where(small, 1.0, alpha)
        dg0 = g1 - g0
        dg1 = np.where(small, 0.5 - alpha + (15.0 / 16.0) * alpha ** 2,
                       g0 - g1 * (1.0 + 1.0 / a))
        return g0, g1, dg0, dg1
    small = alpha < 1e-4
    a = np.where(small, 1.0, alpha)
    e = np.exp(-2.0 * a)
    g0 = np.where(small, 2.0 - 2.0 * alpha + (4.0 / 3.0) * alpha ** 2,
                  (1.0 - e) / a)
    g1 = np.where(small, (2.0 / 3.0) * alpha * (1.0 - alpha),
                  (a * (1.0 + e) - (1.0 - e)) / (a * a))
    if not derivs:
        return g0, g1
    dg0 = np.where(small, -2.0 + (8.0 / 3.0) * alpha,
                   (2.0 * e * a - (1.0 - e)) / (a * a))
    dg1 = np.where(small, 2.0 / 3.0 - (4.0 / 3.0) * alpha,
                   (-a - 3.0 * a * e - 2.0 * a * a * e + 2.0 - 2.0 * e) / (a ** 3))
    return g0, g1, dg0, dg1


# ---------------------------------------------------------------------------
# radial velocity


def _radial_window(problem: FreespaceProblem, r, t):
    """Confining half-width for the s-integral (provable for Lipschitz
    radial data: the well sits within t*sup|q0| of r and the Gaussian tail
    adds sqrt(2 t eps ln 1e18))."""
    L0 = problem.q0.sup_abs()
    cut = 2.0 * t * problem.epsilon * math.log(1e18)
    return t * L0 + math.sqrt(cut) * 1.05 + 1e-9


def _radial_integrand(problem, r, t, shift):
    eps, n = problem.epsilon, problem.n
    q0 = problem.q0

    def fn(s):
        s = np.maximum(s, 0.0)
        a_exp = ((r - s) ** 2 / (2.0 * t) + q0.cumulative(s)) / eps
        w = np.exp(np.minimum(shift - a_exp, 700.0))
        alpha = r * s / (eps * t)
        g0, g1 = _angular_factors(n, alpha)
        sw = s ** (n - 1) * w
        return np.stack([sw * g0, sw * g1 * q0(s)])

    return fn


def radial_velocity(problem: FreespaceProblem, r: float, t: float,
                    rtol: float = 1e-11) -> float:
    """Radial velocity component q(r, t) by adaptive quadrature."""
    if t <= 0:
        raise TimeDomainError("t must be positive")
    if not problem.is_radial:
        raise ValueError("radial_velocity needs a radial problem")
    if r == 0.0:
        return 0.0
    if t < 1e-12:
        return float(problem.q0(r))
    eps = problem.epsilon
    w = _radial_window(problem, r, t)
    lo, hi = max(0.0, r - w), r + w
    kinks = [k for k in problem.q0.breakpoints if lo < k < hi]
    scan = np.unique(np.concatenate([np.linspace(lo, hi, 2049), kinks, [r]]))
    a_scan = ((r - scan) ** 2 / (2.0 * t) + problem.q0.cumulative(scan)) / eps
    shift = float(a_scan.min())
    # trim to the region that matters plus a pad
    live = scan[a_scan <= shift + math.log(1e19)]
    lo = max(0.0, live.min() - (scan[1] - scan[0]))
    hi = live.max() + (scan[1] - scan[0])
    width_cap = max((hi - lo) / 512.0, min(math.sqrt(2.0 * eps * t), (hi - lo) / 12.0))
    edges = np.unique(np.concatenate([
        np.linspace(lo, hi, max(13, int(math.ceil((hi - lo) / width_cap)) + 1)),
        [k for k in kinks if lo < k < hi]]))
    L0 = max(problem.q0.sup_abs(), 1e-300)
    fn = _radial_integrand(problem, r, t, shift)
    den, num = _adaptive(fn, edges,
                         scale_fn=lambda rough: [rough[0], rough[0] * L0],
                         rtol=rtol)
    if den <= 0.0 or not math.isfinite(den):
        raise ConfinementError("velocity quadrature denominator degenerate")
    return float(num / den)


def _radial_velocity_batch(problem: FreespaceProblem, r: np.ndarray, t: float,
                           panels: int = 32, npts: int = 8, derivs: bool = False):
    """Vectorized radial velocity at many radii, one time (fixed composite
    rule per point; intended for smooth profiles inside the tracer).

    With derivs=True also returns dq/dr obtained by differentiating the
    quadrature (same nodes), which feeds the variational equation for the
    characteristic Jacobian without noise-amplifying differencing.
    """
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    eps, n = problem.epsilon, problem.n
    q0 = problem.q0
    # all points share one absolute node grid so panel edges can sit
    # exactly on the profile kinks; below the resolvable time the well is
    # narrower than any affordable panel and the initial data is the limit
    span = float(np.max(r) - np.min(r))
    well = math.sqrt(2.0 * eps * max(t, 0.0))
    max_panels = 224
    if t < 1e-12 or span / max(well, 1e-300) > 0.7 * max_panels:
        pos = r > 0
        out[pos] = problem.q0(r[pos])
        if not derivs:
            return out
        dq = problem.q0.derivative_profile()(np.maximum(np.abs(r), 0.0))
        return out, dq
    w = _radial_window(problem, float(np.max(r)), t)
    lo = max(0.0, float(np.min(r)) - w)
    hi = float(np.max(r)) + w
    cap = max(0.7 * well, (hi - lo) / max_panels)
    edges = np.unique(np.concatenate([
        np.linspace(lo, hi, int(math.ceil((hi - lo) / cap)) + 1),
        [k for k in q0.breakpoints if lo < k < hi]]))
    x, gw = _gl(npts)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halves = 0.5 * np.diff(edges)
    s = (mids[:, None] + halves[:, None] * x[None, :]).ravel()
    wts = (halves[:, None] * gw[None, :]).ravel()
    q0s = q0(s)
    phi = q0.cumulative(s)
    sn = s ** (n - 1) * wts
    a_exp = ((r[:, None] - s[None, :]) ** 2 / (2.0 * t) + phi[None, :]) / eps
    shift = a_exp.min(axis=1, keepdims=True)
    wgt = np.exp(np.minimum(shift - a_exp, 700.0))
    alpha = r[:, None] * s[None, :] / (eps * t)
    sw = sn[None, :] * wgt
    mask = (r > 0)
    if not derivs:
        g0, g1 = _angular_factors(n, alpha)
        den = (sw * g0).sum(axis=1)
        num = (sw * g1 * q0s[None, :]).sum(axis=1)
        ok = mask & (den > 0)
        out[ok] = num[ok] / den[ok]
        return out
    g0, g1, dg0, dg1 = _angular_factors(n, alpha, derivs=True)
    da_dr = (r[:, None] - s[None, :]) / (t * eps)
    dal_dr = s[None, :] / (eps * t)
    den = (sw * g0).sum(axis=1)
    num = (sw * g1 * q0s[None, :]).sum(axis=1)
    den_r = (sw * (dg0 * dal_dr - g0 * da_dr)).sum(axis=1)
    num_r = (sw * q0s[None, :] * (dg1 * dal_dr - g1 * da_dr)).sum(axis=1)
    dq = np.zeros_like(r)
    ok = mask & (den > 0)
    out[ok] = num[ok] / den[ok]
    dq[ok] = (num_r[ok] - out[ok] * den_r[ok]) / den[ok]
    return out, dq


# ---------------------------------------------------------------------------
# general potentials


def _line_velocity(problem: FreespaceProblem, x: float, t: float,
                   rtol: float = 1e-11) -> float:
    """General 1-D potential: adaptive integral over the whole line with an
    expanding confinement window."""
    eps = problem.epsilon
    phi0 = problem.phi0

    w = math.sqrt(2.0 * t * (45.0 * eps + 4.0)) + 4.0
    cut = eps * math.log(1e18)
    for _ in range(60):
        scan = np.linspace(x - w, x + w, 4097)
        f_scan = (x - scan) ** 2 / (2.0 * t) + np.asarray([phi0(y) for y in scan])
        fmin = f_scan.min()
        edgezone = np.r_[f_scan[:120], f_scan[-120:]]
        if edgezone.min() - fmin > cut * 1.2 + 2.0:
            break
        w *= 2.0
    else:
        raise ConfinementError("potential does not confine the integrand")
    shift = fmin / eps
    live = scan[f_scan <= fmin + cut * 1.3 + 2.0]
    lo, hi = live.min() - w / 2048.0, live.max() + w / 2048.0

    def fn(y):
        f = (x - y) ** 2 / (2.0 * t) + np.asarray([phi0(v) for v in y])
        wgt = np.exp(np.minimum(shift - f / eps, 700.0))
        g = np.asarray([problem.grad(v) for v in y]).reshape(-1)
        return np.stack([wgt, wgt * g])

    width_cap = max((hi - lo) / 512.0, min(math.sqrt(2.0 * eps * t), (hi - lo) / 12.0))
    edges = np.linspace(lo, hi, max(13, int(math.ceil((hi - lo) / width_cap)) + 1))
    gscale = max(float(np.max(np.abs([problem.grad(v) for v in np.linspace(lo, hi, 65)]))),
                 1e-6)
    den, num = _adaptive(fn, edges,
                         scale_fn=lambda rough: [rough[0], rough[0] * gscale],
                         rtol=rtol)
    if den <= 0 or not math.isfinite(den):
        raise ConfinementError("velocity quadrature denominator degenerate")
    return float(num / den)


def _tensor_velocity(problem: FreespaceProblem, x: np.ndarray, t: float,
                     half_points: int = 28) -> np.ndarray:
    """Reference tensor-grid evaluation for general n = 2, 3 potentials
    (moderate tolerance; the radial path is the accurate one)."""
    eps, n = problem.epsilon, problem.n
    w = math.sqrt(2.0 * t * (45.0 * eps + 4.0)) + 2.0
    for _ in range(40):
        axes = [np.linspace(x[k] - w, x[k] + w, 2 * half_points + 1) for k in range(n)]
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        f = np.array([problem.phi0(p) for p in pts])
        f = f + ((pts - x[None, :]) ** 2).sum(axis=1) / (2.0 * t)
        fmin = f.min()
        interior = f.reshape([2 * half_points + 1] * n)
        edge_min = min(interior[0].min(), interior[-1].min(),
                       interior[:, 0].min(), interior[:, -1].min())
        if edge_min - fmin > eps * math.log(1e17):
            break
        w *= 1.6
    else:
        raise ConfinementError("potential does not confine the integrand")
    wgt = np.exp(np.minimum((fmin - f) / eps, 700.0))
    grads = np.array([problem.grad(p) for p in pts])
    den = wgt.sum()
    num = (wgt[:, None] * grads).sum(axis=0)
    return num / den


# ---------------------------------------------------------------------------
# public velocity / characteristics / density / mass


def velocity(problem: FreespaceProblem, x, t: float):
    """u(x, t); x is a scalar for n = 1, else a length-n point."""
    if t <= 0:
        raise TimeDomainError("t must be positive")
    if problem.is_radial:
        if problem.n == 1:
            xs = float(np.asarray(x).reshape(()))
            return math.copysign(1.0, xs) * radial_velocity(problem, abs(xs), t) \
                if xs != 0.0 else 0.0
        xv = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(xv))
        if r == 0.0:
            return np.zeros(problem.n)
        return (xv / r) * radial_velocity(problem, r, t)
    if problem.n == 1:
        return _line_velocity(problem, float(np.asarray(x).reshape(())), t)
    return _tensor_velocity(problem, np.asarray(x, dtype=float), t)


def _rk4_doubling(rhs, y0, s0, s1, rtol=1e-8, atol=1e-10, h_min_frac=1.0 / 1500.0):
    """Step-doubled classic RK4 with Richardson extrapolation (an embedded
    4th/5th-order pair); vectorized over the state.  A step-size floor
    keeps quadrature noise in the right side from stalling the controller.
    """
    y = np.asarray(y0, dtype=float).copy()
    s = s0
    span = s1 - s0
    h = span / 16.0
    h_min = abs(span) * h_min_frac

    def step(y, s, h):
        k1 = rhs(s, y)
        k2 = rhs(s + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(s + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(s + h, y + h * k3)
        return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    guard = 0
    while (s1 - s) * np.sign(span) > 1e-14 * abs(span):
        guard += 1
        if guard > 100000:
            raise RuntimeError("step underflow in characteristic integration "
                               f"at s={s!r}")
        if (s + h - s1) * np.sign(span) > 0:
            h = s1 - s
        y_full = step(y, s, h)
        y_half = step(step(y, s, 0.5 * h), s + 0.5 * h, 0.5 * h)
        err = np.max(np.abs(y_half - y_full) / (atol + rtol * np.maximum(np.abs(y_half), 1.0)))
        if err <= 15.0 or abs(h) <= h_min:
            y = y_half + (y_half - y_full) / 15.0
            s = s + h
            h = h * min(3.0, max(0.3, 0.9 * (15.0 / max(err, 1e-14)) ** 0.2))
        else:
            h *= max(0.3, 0.9 * (15.0 / err) ** 0.2)
    return y


def _trace_radial_batch(problem: FreespaceProblem, radii: np.ndarray, t: float,
                        rtol=1e-8, with_jacobian: bool = False):
    """Backward feet for a batch of radii at a common time; optionally also
    d(foot)/dr via the variational equation integrated alongside."""
    radii = np.asarray(radii, dtype=float)
    m = radii.size

    if not with_jacobian:
        def rhs(sigma, beta):
            s = t - sigma
            return -_radial_velocity_batch(problem, np.maximum(beta, 0.0), s)

        return _rk4_doubling(rhs, radii, 0.0, t, rtol=rtol)

    def rhs(sigma, state):
        s = t - sigma
        beta, w = state[:m], state[m:]
        q, dq = _radial_velocity_batch(problem, np.maximum(beta, 0.0), s, derivs=True)
        return np.concatenate([-q, -dq * w])

    state = _rk4_doubling(rhs, np.concatenate([radii, np.ones(m)]), 0.0, t, rtol=rtol)
    return state[:m], state[m:]


def trace_characteristic(problem: FreespaceProblem, x, t: float, fd_step=2e-3):
    """Backward characteristic foot X0 = X(x,t,0) and the Jacobian
    determinant of x -> X0, by a finite-difference cloud of neighbor
    trajectories (radial problems trace 3 radii; general ones 2n+1 points).
    """
    if t <= 0:
        raise TimeDomainError("t must be positive")
    if problem.is_radial:
        xv = np.atleast_1d(np.asarray(x, dtype=float))
        r = float(np.linalg.norm(xv))
        if r == 0.0:
            return (x * 0.0, 1.0) if problem.n > 1 else (0.0, 1.0)
        feet, dr0 = _trace_radial_batch(problem, np.array([r]), t, with_jacobian=True)
        jac = float((max(feet[0], 1e-300) / r) ** (problem.n - 1) * dr0[0])
        if problem.n == 1:
            return float(np.sign(np.sum(xv)) * feet[0]), jac
        return (xv / r) * feet[0], jac
    # general callable
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    n = problem.n
    cloud = [xv]
    h = fd_step * (1.0 + float(np.linalg.norm(xv)))
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        cloud.extend([xv + e, xv - e])
    cloud = np.array(cloud)

    def rhs(sigma, flat):
        pts = flat.reshape(-1, n)
        s = t - sigma
        if s <= 1e-12:
            return -np.array([problem.grad(p) for p in pts]).ravel()
        return -np.array([velocity(problem, p, s) for p in pts]).reshape(-1)

    feet = _rk4_doubling(rhs, cloud.ravel(), 0.0, t).reshape(-1, n)
    jac_mat = np.empty((n, n))
    for k in range(n):
        jac_mat[:, k] = (feet[1 + 2 * k] - feet[2 + 2 * k]) / (2.0 * h)
    jac = float(np.linalg.det(jac_mat))
    foot = feet[0]
    return (foot if n > 1 else float(foot[0])), jac


def _rho0_value(problem: FreespaceProblem, pt):
    if isinstance(problem.rho0, ScalarProfile):
        r = float(np.linalg.norm(np.atleast_1d(pt)))
        return float(problem.rho0(r))
    if callable(problem.rho0):
        return float(problem.rho0(pt))
    raise ValueError("problem has no initial density")


def density(problem: FreespaceProblem, x, t: float) -> float:
    """rho(x,t) = rho0(X0) * J(X0) along the backward characteristic."""
    foot, jac = trace_characteristic(problem, x, t)
    if jac <= 0:
        raise RuntimeError("non-positive characteristic Jacobian")
    return _rho0_value(problem, foot) * jac


def flow_sample(problem: FreespaceProblem, x, t: float) -> FlowSample:
    u = velocity(problem, x, t)
    foot, jac = trace_characteristic(problem, x, t)
    if jac <= 0:
        raise RuntimeError("non-positive characteristic Jacobian")
    rho = _rho0_value(problem, foot) * jac
    return FlowSample(np.asarray(x, dtype=float), t, np.asarray(u), np.asarray(foot),
                      jac, rho)


def _support_image_radius(problem, t, quad):
    if quad.radius is not None:
        return quad.radius
    L0 = problem.q0.sup_abs() if problem.is_radial else 1.0
    return problem.rho0_support + t * L0 + 1e-6


def _density_radial_batch(problem, radii, t):
    """rho at many radii, one time; one backward trace for the whole batch."""
    rr = np.maximum(np.abs(np.asarray(radii, dtype=float)), 1e-12)
    feet, dr0 = _trace_radial_batch(problem, rr, t, with_jacobian=True)
    jac = (np.maximum(feet, 1e-300) / rr) ** (problem.n - 1) * dr0
    if np.any(jac <= 0):
        raise RuntimeError("non-positive characteristic Jacobian in mass grid")
    if isinstance(problem.rho0, ScalarProfile):
        vals = problem.rho0(feet)
    else:
        vals = np.array([_rho0_value(problem, f) for f in feet])
    return vals * jac


def _panel_nodes(lo, hi, panels, pts):
    x, w = _gl(pts)
    edges = np.linspace(lo, hi, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halves = 0.5 * np.diff(edges)
    nodes = (mids[:, None] + halves[:, None] * x[None, :]).ravel()
    weights = (halves[:, None] * w[None, :]).ravel()
    return nodes, weights


def total_mass(problem: FreespaceProblem, t: float,
               quad: MassQuadrature | None = None):
    """Mass of rho(., t) over a ball containing the image of the initial
    support.  Returns (mass, error estimate) where the estimate compares
    against half the panel count (the two node sets share one backward
    trace)."""
    quad = quad or MassQuadrature()
    radius = _support_image_radius(problem, t, quad)
    lo = 0.0 if problem.n > 1 else -radius
    n1, w1 = _panel_nodes(lo, radius, quad.panels, quad.points)
    n2, w2 = _panel_nodes(lo, radius, max(quad.panels // 2, 4), quad.points)
    nodes = np.concatenate([n1, n2])
    if t == 0.0:
        vals = np.array([_rho0_value(problem, r) for r in nodes])
    elif problem.is_radial:
        vals = _density_radial_batch(problem, nodes, t)
    elif problem.n == 1:
        vals = np.array([density(problem, r, t) for r in nodes])
    else:
        raise NotImplementedError("mass quadrature is radial or 1-D")
    if problem.n > 1:
        vals = vals * surface_measure(problem.n) * np.abs(nodes) ** (problem.n - 1)
    m1 = float(vals[: n1.size] @ w1)
    m2 = float(vals[n1.size:] @ w2)
    return m1, abs(m1 - m2)
