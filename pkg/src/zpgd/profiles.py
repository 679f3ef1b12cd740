"""Piecewise-polynomial scalar profiles.

A ScalarProfile is a function of one nonnegative variable (a radius or a
time) given by polynomial pieces on consecutive intervals.  It is the
common carrier for initial data q0, p0, rho0 and boundary data q_B, p_B,
rho_B.  Outside its breakpoint range the profile is extended by its end
values (clamped), so constants and compactly supported data are both easy
to express.  Integrals, positive parts and squares are exact, which the
path functionals downstream rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["ScalarProfile"]


def _as_coeff_matrix(coeffs):
    """Pad a ragged list of local coefficient lists into one 2-D array."""
    deg = max(len(c) for c in coeffs)
    out = np.zeros((len(coeffs), deg))
    for i, c in enumerate(coeffs):
        out[i, : len(c)] = np.asarray(c, dtype=float)
    return out


def _polyval_local(coeffs, dx):
    """Evaluate sum_k coeffs[k] * dx**k (Horner, highest term first)."""
    acc = np.zeros_like(dx)
    for k in range(coeffs.shape[-1] - 1, -1, -1):
        acc = acc * dx + coeffs[..., k]
    return acc


@dataclass(frozen=True)
class ScalarProfile:
    """Piecewise polynomial with clamped extension beyond the breakpoints.

    breakpoints : (m+1,) strictly increasing
    coeffs      : (m, d) local coefficients; piece i evaluates
                  sum_k coeffs[i, k] * (x - breakpoints[i])**k
    """

    breakpoints: np.ndarray
    coeffs: np.ndarray
    _piece_integrals: np.ndarray = field(init=False, repr=False, compare=False)
    _widths: np.ndarray = field(init=False, repr=False, compare=False)
    _int_coeffs: np.ndarray = field(init=False, repr=False, compare=False)
    _cum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        cf = np.asarray(self.coeffs, dtype=float)
        if bp.ndim != 1 or bp.size < 2:
            raise ValueError("need at least two breakpoints")
        if np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if cf.ndim != 2 or cf.shape[0] != bp.size - 1:
            raise ValueError("coefficient rows must match interval count")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "coeffs", cf)
        # Exact integral of each piece over its interval, for cumulative().
        widths = np.diff(bp)
        ks = np.arange(1, cf.shape[1] + 1)
        piece = (cf / ks) * widths[:, None] ** ks
        object.__setattr__(self, "_piece_integrals", piece.sum(axis=1))
        object.__setattr__(self, "_widths", widths)
        object.__setattr__(self, "_int_coeffs", cf / ks)
        object.__setattr__(self, "_cum",
                           np.concatenate([[0.0], np.cumsum(piece.sum(axis=1))]))

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def constant(cls, value: float) -> "ScalarProfile":
        return cls(np.array([0.0, 1.0]), np.array([[float(value)]]))

    @classmethod
    def piecewise_linear(cls, points, values) -> "ScalarProfile":
        """Linear interpolation through (points, values), clamped outside."""
        x = np.asarray(points, dtype=float)
        y = np.asarray(values, dtype=float)
        if x.size != y.size or x.size < 2:
            raise ValueError("need matching points/values, at least two")
        slopes = np.diff(y) / np.diff(x)
        coeffs = np.column_stack([y[:-1], slopes])
        return cls(x, coeffs)

    @classmethod
    def from_pieces(cls, breakpoints, coeff_rows) -> "ScalarProfile":
        return cls(np.asarray(breakpoints, dtype=float), _as_coeff_matrix(coeff_rows))

    @classmethod
    def zero(cls) -> "ScalarProfile":
        return cls.constant(0.0)

    # ------------------------------------------------------------------
    # evaluation

    def _locate(self, x):
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        idx = np.clip(idx, 0, len(self.breakpoints) - 2)
        dx = x - self.breakpoints[idx]
        # clamp: freeze dx at the ends so out-of-range queries see end values
        dx = np.clip(dx, 0.0, self._widths[idx])
        return idx, dx

    def _gather_horner(self, cf, idx, dx):
        d = cf.shape[1]
        acc = cf[idx, d - 1]
        for k in range(d - 2, -1, -1):
            acc = acc * dx + cf[idx, k]
        return acc

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xf = np.atleast_1d(x)
        idx, dx = self._locate(xf)
        val = self._gather_horner(self.coeffs, idx, dx)
        return float(val[0]) if scalar else val

    def cumulative(self, x):
        """Exact integral from breakpoints[0] to x (clamped pieces extend
        linearly with the end values outside the breakpoint range)."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xf = np.atleast_1d(x)
        bp = self.breakpoints
        idx, dx = self._locate(xf)
        partial = self._gather_horner(self._int_coeffs, idx, dx) * dx
        out = self._cum[idx] + partial
        below = xf < bp[0]
        above = xf > bp[-1]
        if below.any():
            out = np.where(below, (xf - bp[0]) * self(bp[0]), out)
        if above.any():
            out = np.where(above, self._cum[-1] + (xf - bp[-1]) * self(bp[-1]), out)
        return float(out[0]) if scalar else out

    def integral(self, a: float, b: float) -> float:
        return float(self.cumulative(b) - self.cumulative(a))

    def tail_integral(self, r) -> float:
        """Integral from r to infinity; requires the clamped right end value
        to vanish (compactly supported data)."""
        if abs(self(self.breakpoints[-1])) > 0.0:
            raise ValueError("tail integral requires a vanishing end value")
        total = self.cumulative(self.breakpoints[-1])
        return total - self.cumulative(np.minimum(r, self.breakpoints[-1]))

    # ------------------------------------------------------------------
    # structure

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    def sup_abs(self, lo: float | None = None, hi: float | None = None) -> float:
        """Max of |f| over [lo, hi] (defaults to the whole real line, where
        the clamped extension makes it the max over the breakpoint range).
        Exact for degree <= 2; higher degrees add dense sampling."""
        lo = self.breakpoints[0] if lo is None else max(lo, self.breakpoints[0])
        hi = self.breakpoints[-1] if hi is None else min(hi, self.breakpoints[-1])
        if hi < lo:
            lo = hi = min(max(lo, self.breakpoints[0]), self.breakpoints[-1])
        cand = [lo, hi]
        cand.extend(b for b in self.breakpoints if lo <= b <= hi)
        if self.degree >= 2:
            for i in range(len(self.breakpoints) - 1):
                c = self.coeffs[i]
                dcf = c[1:] * np.arange(1, len(c))
                roots = np.roots(dcf[::-1]) if len(dcf) > 1 else []
                for rt in np.atleast_1d(roots):
                    if abs(np.imag(rt)) < 1e-12:
                        x = self.breakpoints[i] + float(np.real(rt))
                        if lo <= x <= hi:
                            cand.append(x)
            if self.degree > 2:
                cand.extend(np.linspace(lo, hi, 4097))
        return float(np.max(np.abs(self(np.asarray(cand)))))

    def _split_at(self, new_points) -> "ScalarProfile":
        """Insert breakpoints (values unchanged)."""
        pts = np.unique(np.concatenate([self.breakpoints, np.asarray(new_points)]))
        pts = pts[(pts >= self.breakpoints[0]) & (pts <= self.breakpoints[-1])]
        rows = []
        for i in range(len(pts) - 1):
            j = np.searchsorted(self.breakpoints, pts[i], side="right") - 1
            j = min(j, len(self.breakpoints) - 2)
            shift = pts[i] - self.breakpoints[j]
            rows.append(_shift_poly(self.coeffs[j], shift))
        return ScalarProfile(pts, _as_coeff_matrix(rows))

    def positive_part(self) -> "ScalarProfile":
        """max(f, 0) as a new profile (pieces split at real sign changes)."""
        roots = []
        for i in range(len(self.breakpoints) - 1):
            c = self.coeffs[i]
            nz = np.nonzero(np.abs(c) > 0)[0]
            if len(nz) == 0:
                continue
            rts = np.roots(c[: nz[-1] + 1][::-1]) if nz[-1] > 0 else []
            for rt in np.atleast_1d(rts):
                if abs(np.imag(rt)) < 1e-13:
                    x = self.breakpoints[i] + float(np.real(rt))
                    if self.breakpoints[i] < x < self.breakpoints[i + 1]:
                        roots.append(x)
        split = self._split_at(roots) if roots else self
        mids = 0.5 * (split.breakpoints[:-1] + split.breakpoints[1:])
        keep = split(mids) > 0
        coeffs = np.where(keep[:, None], split.coeffs, 0.0)
        return ScalarProfile(split.breakpoints, coeffs)

    def squared(self) -> "ScalarProfile":
        rows = [np.convolve(c, c) for c in self.coeffs]
        return ScalarProfile(self.breakpoints, _as_coeff_matrix(rows))

    def scaled(self, factor: float) -> "ScalarProfile":
        return ScalarProfile(self.breakpoints, self.coeffs * float(factor))

    def derivative_profile(self) -> "ScalarProfile":
        ks = np.arange(1, self.coeffs.shape[1])
        dcf = self.coeffs[:, 1:] * ks
        if dcf.shape[1] == 0:
            dcf = np.zeros((self.coeffs.shape[0], 1))
        return ScalarProfile(self.breakpoints, dcf)

    def times_monomial(self, k: int) -> "ScalarProfile":
        """Profile multiplied by x**k (exact, piecewise)."""
        if k == 0:
            return self
        rows = []
        for i in range(len(self.breakpoints) - 1):
            b = self.breakpoints[i]
            # x^k = sum_j C(k,j) b^(k-j) u^j in the local variable u
            mono = np.array([_binom(k, j) * b ** (k - j) for j in range(k + 1)])
            rows.append(np.convolve(self.coeffs[i], mono))
        return ScalarProfile(self.breakpoints, _as_coeff_matrix(rows))

    def kinks(self):
        """Interior breakpoints, where derivatives may jump."""
        return self.breakpoints[1:-1].copy()


def _shift_poly(c, s):
    """Re-expand sum c_k x^k around x = s (binomial shift)."""
    c = np.asarray(c, dtype=float)
    d = len(c)
    out = np.zeros(d)
    for k in range(d):
        for j in range(k + 1):
            out[j] += c[k] * _binom(k, j) * s ** (k - j)
    return out


def _binom(n, k):
    from math import comb

    return comb(n, k)
