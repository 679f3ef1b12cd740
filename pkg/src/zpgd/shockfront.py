"""Discontinuity detection and Rankine-Hugoniot verification.

Front positions are localized per time slice from velocity jumps in a
sampled panel, refined by bisection on the pointwise solution when one is
attached, and linked across slices by nearest-neighbor continuation.  The
delta amplitude is the primitive jump e(t) = P(s+, t) - P(s-, t) >= 0.

Jump brackets are oriented inner-minus-outer, [f] = f(s-) - f(s+); with
that orientation the front relations read

    ds/dt = (q_- + q_+)/2,        de/dt = [q p] - [p] ds/dt,

where q_- is the inner (smaller radius) trace.  The multi-dimensional
residual is assembled from the radial geometric identities (S_t = -ds/dt,
grad S = x/r, mean curvature K = -(n-1)/(2r), surface divergence
(n-1)/r ds/dt e_hat) and reported in the same p-variable units as the 1-D
residual, i.e. scaled by s^(n-1); in density units the comparison against
the 1-D residual would be distorted by a pure unit factor whenever s < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .radial_core import FLOAT_FMT

__all__ = [
    "ShockFront",
    "detect_fronts",
    "rh_residual_1d",
    "rh_residual_multid",
    "mean_curvature",
    "write_front_csv",
]


@dataclass
class ShockFront:
    """Sampled trajectory of one discontinuity."""

    n: int
    times: np.ndarray
    s: np.ndarray
    e: np.ndarray
    q_minus: np.ndarray   # inner trace (r < s)
    q_plus: np.ndarray    # outer trace (r > s)
    p_minus: np.ndarray
    p_plus: np.ndarray
    merged_into: int | None = None   # index of the successor front, if any

    def __post_init__(self):
        for name in ("times", "s", "e", "q_minus", "q_plus", "p_minus", "p_plus"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("front times must increase")
        if np.any(self.s <= 0):
            raise ValueError("front radius must stay positive")
        if np.any(self.e < -1e-10):
            raise ValueError("delta amplitude must be nonnegative")
        if np.any(self.q_minus < self.q_plus - 1e-8):
            raise ValueError("entropy violated: inner trace below outer trace")

    @property
    def e_hat(self) -> np.ndarray:
        """Density-units delta amplitude e / s^(n-1)."""
        return self.e / self.s ** (self.n - 1)


def _slice_jumps(grid_r, q_row, threshold):
    dq = np.abs(np.diff(q_row))
    cells = np.nonzero(dq > threshold)[0]
    groups = []
    for c in cells:
        if groups and c <= groups[-1][-1] + 1:
            groups[-1].append(c)
        else:
            groups.append([c])
    return groups


def _refine_jump(q_of_r, lo, hi, iters=60):
    """Bisect toward the jump of a piecewise-smooth function: recurse into
    the half with the larger variation."""
    qlo, qhi = q_of_r(lo), q_of_r(hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if hi - lo < 1e-12 * max(1.0, abs(mid)):
            break
        qm = q_of_r(mid)
        if abs(qm - qlo) >= abs(qhi - qm):
            hi, qhi = mid, qm
        else:
            lo, qlo = mid, qm
    return 0.5 * (lo + hi)


def detect_fronts(panel, threshold_frac: float = 1e-3, refine: bool = True,
                  side_offset: float = 1e-7, trace_offset: float = 1e-4):
    """Locate discontinuities in an inviscid SolutionPanel.

    Per slice, radii where q jumps by more than threshold_frac * sup|q|
    are linked across slices by nearest-neighbor continuation; colliding
    fronts are terminated and a merged front started (merged_into points
    at the successor).  With refine=True (and the panel's attached
    problem) positions are bisected on the pointwise solution and the
    traces/e(t) are read off one-sided evaluations.
    """
    from .inviscid import SolutionPanel, _q_P_of_minimum  # local import

    assert isinstance(panel, SolutionPanel)
    grid_r = panel.grid_r
    grid_t = panel.grid_t
    sup_q = max(float(np.abs(panel.q).max()), 1e-30)
    threshold = threshold_frac * sup_q
    mz = panel.minimizer
    problem = panel.problem

    def q_at(r, t):
        m = mz.minimize(float(r), float(t))
        return _q_P_of_minimum(problem, m, float(r), float(t))[0]

    def P_at(r, t):
        m = mz.minimize(float(r), float(t))
        return _q_P_of_minimum(problem, m, float(r), float(t))[1]

    # per-slice detections; candidates that refine to a smooth steep region
    # (no genuine one-sided gap, e.g. a rarefaction fan) are discarded
    per_slice = []
    for i, t in enumerate(grid_t):
        locs = []
        for grp in _slice_jumps(grid_r, panel.q[i], threshold):
            lo = grid_r[grp[0]]
            hi = grid_r[min(grp[-1] + 1, grid_r.size - 1)]
            if refine:
                srad = _refine_jump(lambda r: q_at(r, t), lo, hi)
                d = 1e-9 * max(1.0, srad)
                gap = q_at(srad - d, t) - q_at(srad + d, t)
                if gap <= max(threshold, 1e-6):
                    continue
            else:
                srad = 0.5 * (lo + hi)
            locs.append(srad)
        per_slice.append(locs)

    # nearest-neighbor linking
    max_speed = sup_q * 1.5 + 1e-6
    open_tracks = []
    all_fronts_raw = []
    for i, t in enumerate(grid_t):
        dt_prev = grid_t[i] - grid_t[i - 1] if i > 0 else 0.0
        locs = list(per_slice[i])
        new_open = []
        claimed = {}
        for tr in open_tracks:
            best_j, best_d = None, math.inf
            for j, s in enumerate(locs):
                d = abs(s - tr["s"][-1])
                if d < best_d:
                    best_j, best_d = j, d
            window = max_speed * dt_prev + 2.0 * float(np.max(np.diff(grid_r)))
            if best_j is not None and best_d <= window:
                claimed.setdefault(best_j, []).append(tr)
            else:
                all_fronts_raw.append(tr)
        for j, s in enumerate(locs):
            owners = claimed.get(j, [])
            if len(owners) == 1:
                tr = owners[0]
                tr["times"].append(t)
                tr["s"].append(s)
                new_open.append(tr)
            else:
                # collision (or fresh front): terminate the parents and
                # start a merged track at this slice
                for tr in owners:
                    tr["merged"] = True
                    all_fronts_raw.append(tr)
                new_open.append({"times": [t], "s": [s], "merged": False})
        open_tracks = new_open
    all_fronts_raw.extend(open_tracks)
    all_fronts_raw = [tr for tr in all_fronts_raw if len(tr["times"]) >= 1]

    # assemble ShockFront objects with one-sided traces
    fronts = []
    for tr in all_fronts_raw:
        times = np.asarray(tr["times"])
        if times.size < 1:
            continue
        svals = np.asarray(tr["s"])
        qm = np.empty_like(svals)
        qp = np.empty_like(svals)
        pm = np.empty_like(svals)
        pp = np.empty_like(svals)
        ev = np.empty_like(svals)
        for k, (t, s) in enumerate(zip(times, svals)):
            d = side_offset * max(1.0, s)
            dtr = trace_offset * max(1.0, s)
            qm[k] = q_at(s - dtr, t)
            qp[k] = q_at(s + dtr, t)
            ev[k] = P_at(s + d, t) - P_at(s - d, t)
            pm[k] = (P_at(s - d, t) - P_at(s - d - dtr, t)) / dtr
            pp[k] = (P_at(s + d + dtr, t) - P_at(s + d, t)) / dtr
        fronts.append(ShockFront(panel.n, times, svals, ev, qm, qp, pm, pp))
    fronts.sort(key=lambda f: f.times[0])
    return fronts


def _time_derivative(times, values):
    """2nd-order derivative on a (possibly nonuniform) time grid."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    out = np.empty_like(values)
    if times.size < 3:
        out[:] = np.gradient(values, times) if times.size > 1 else 0.0
        return out
    out = np.gradient(values, times, edge_order=2)
    return out


def rh_residual_1d(front: ShockFront):
    """(res_speed, res_mass): deviations from ds/dt = (q_- + q_+)/2 and
    de/dt = [qp] - [p] ds/dt with inner-minus-outer brackets."""
    if front.times.size < 3:
        raise ValueError("need at least 3 samples along the front")
    ds_dt = _time_derivative(front.times, front.s)
    de_dt = _time_derivative(front.times, front.e)
    res_speed = ds_dt - 0.5 * (front.q_minus + front.q_plus)
    qp_jump = front.q_minus * front.p_minus - front.q_plus * front.p_plus
    p_jump = front.p_minus - front.p_plus
    res_mass = de_dt - (qp_jump - p_jump * ds_dt)
    return res_speed, res_mass


def mean_curvature(n: int, r):
    """Mean curvature of the sphere |x| = r: K = -(n-1)/(2r)."""
    return -(n - 1) / (2.0 * np.asarray(r, dtype=float))


def rh_residual_multid(front: ShockFront):
    """Residual of the generalized front relations for S(x,t) = r - s(t).

    Pieces: S_t = -ds/dt and grad S = x/r collapse the first relation to
    the 1-D speed residual; the second combines d(e_hat)/dt, the surface
    divergence -2 K G e_hat with K = -(n-1)/(2r) and G = ds/dt, and the
    source ([p q] - [p] ds/dt)/r^(n-1).  Reported in p-units (scaled by
    s^(n-1)), where the algebra collapses it onto the 1-D mass residual.
    """
    if front.times.size < 3:
        raise ValueError("need at least 3 samples along the front")
    ds_dt = _time_derivative(front.times, front.s)
    de_dt = _time_derivative(front.times, front.e)
    s = front.s
    nm1 = front.n - 1
    e_hat = front.e_hat
    # chain-rule composition keeps the derivative estimates consistent
    de_hat_dt = de_dt / s ** nm1 - nm1 * e_hat * ds_dt / s
    growth = ds_dt  # G = -S_t/S_r along the front
    surface_div = -2.0 * mean_curvature(front.n, s) * growth * e_hat
    source = (front.q_minus * front.p_minus - front.q_plus * front.p_plus
              - (front.p_minus - front.p_plus) * ds_dt) / s ** nm1
    res_density_units = de_hat_dt + surface_div - source
    return res_density_units * s ** nm1


def write_front_csv(front: ShockFront, path):
    res_speed, res_mass = rh_residual_1d(front)
    res_multi = rh_residual_multid(front)
    with open(path, "w") as fh:
        fh.write("# jump brackets: inner trace minus outer trace, "
                 "[f] = f(s-) - f(s+)\n")
        fh.write("t,s,e,q_plus,q_minus,p_plus,p_minus,res_speed,res_mass,res_multid\n")
        for k in range(front.times.size):
            fh.write(",".join(FLOAT_FMT % v for v in (
                front.times[k], front.s[k], front.e[k], front.q_plus[k],
                front.q_minus[k], front.p_plus[k], front.p_minus[k],
                res_speed[k], res_mass[k], res_multi[k])) + "\n")
