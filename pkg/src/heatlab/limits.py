"""Limit extraction from sampled sequences.

The theory constants of this package are defined as u -> infinity limits of
smooth diagnostics (f'(u)F(u), u f'(u)/f(u), ratio tests).  For log-corrected
nonlinearities those sequences converge like powers of 1/log(u), so the
extrapolation variable is h = 1/log(u) and the limit is read off a Neville
tableau at h = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


@dataclass
class LimitEstimate:
    value: float
    error: float
    converged: bool
    raw_u: np.ndarray = field(default_factory=lambda: np.array([]))
    raw_y: np.ndarray = field(default_factory=lambda: np.array([]))

    @property
    def is_infinite(self) -> bool:
        return np.isinf(self.value)


def neville_extrapolate(h: Sequence[float], y: Sequence[float]):
    """Polynomial extrapolation of y(h) to h = 0.

    Returns (value, error_estimate).  The tableau entry with the smallest
    inter-column difference wins; this guards against the instability of
    high-degree extrapolation on noisy data.
    """
    h = np.asarray(h, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(h)
    if n == 0:
        raise ValueError("empty sequence")
    if n == 1:
        return float(y[0]), np.inf
    rows = [list(y)]
    best = float(y[-1])
    best_err = abs(y[-1] - y[-2])
    for j in range(1, n):
        prev = rows[-1]
        row = []
        for i in range(n - j):
            denom = h[i] - h[i + j]
            row.append((h[i] * prev[i + 1] - h[i + j] * prev[i]) / denom)
        rows.append(row)
        err = abs(row[-1] - prev[-1])
        if err < best_err:
            best_err = err
            best = float(row[-1])
    return best, best_err


def sequence_limit(u: Sequence[float], y: Sequence[float],
                   infinite_threshold: float = 1e8,
                   converge_rel: float = 5e-2) -> LimitEstimate:
    """Estimate lim y(u) as u -> infinity along a geometric u-sequence.

    Divergence to +infinity (monotone growth past infinite_threshold) is
    reported as an infinite limit, not a failure: several diagnostics
    (growth rate of a rapidly varying f) legitimately have value infinity.
    """
    u = np.asarray(u, dtype=float)
    y = np.asarray(y, dtype=float)
    mask = np.isfinite(y)
    if mask.sum() < 3:
        inf_mask = np.isinf(np.asarray(y)) & (np.asarray(y) > 0)
        if inf_mask.any():
            return LimitEstimate(np.inf, 0.0, True, u, y)
        return LimitEstimate(np.nan, np.inf, False, u, y)
    uu, yy = u[mask], y[mask]
    tail = yy[-min(6, len(yy)):]
    diffs = np.diff(tail)
    if tail[-1] > infinite_threshold and np.all(diffs > 0):
        return LimitEstimate(np.inf, 0.0, True, uu, yy)
    # increments that keep growing (or fail to shrink) flag divergence long
    # before any fixed threshold: convergent log-corrected sequences shrink
    # their increments by a factor well below 0.8 per step at the window end
    if len(diffs) >= 4 and np.all(diffs > 0) and diffs[-1] >= 0.8 * diffs[0] \
            and tail[-1] > max(10.0, 3.0 * abs(yy[0])):
        return LimitEstimate(np.inf, 0.0, True, uu, yy)
    h = 1.0 / np.log(uu)
    value, err = neville_extrapolate(h, yy)
    converged = bool(np.isfinite(value)
                     and err <= converge_rel * max(1.0, abs(value)))
    return LimitEstimate(float(value), float(err), converged, uu, yy)


@dataclass
class TailBehavior:
    """Asymptotics of a positive sequence g(u) sampled on a geometric grid.

    power_exponent is d log g / d log u fitted over the last decade;
    log_exponent is d log g / d log log u, meaningful when the power part is
    flat (|power_exponent| small).
    """
    power_exponent: float
    log_exponent: float
    drift: float


def fit_tail_behavior(u: np.ndarray, g: np.ndarray, window: int = None) -> TailBehavior:
    u = np.asarray(u, float)
    g = np.asarray(g, float)
    ok = np.isfinite(g) & (g > 0)
    u, g = u[ok], g[ok]
    if len(u) < 8:
        return TailBehavior(np.nan, np.nan, np.inf)
    w = window or max(8, len(u) // 4)
    uu, gg = u[-w:], g[-w:]
    lp = np.polyfit(np.log(uu), np.log(gg), 1)[0]
    ll = np.polyfit(np.log(np.log(uu)), np.log(gg), 1)[0]
    half = w // 2
    lp1 = np.polyfit(np.log(uu[:half]), np.log(gg[:half]), 1)[0]
    lp2 = np.polyfit(np.log(uu[half:]), np.log(gg[half:]), 1)[0]
    return TailBehavior(float(lp), float(ll), float(abs(lp2 - lp1)))


@dataclass
class LimSupEstimate:
    value: float
    inconclusive: bool
    per_decade: np.ndarray


def limsup_estimate(u: Sequence[float], y: Sequence[float],
                    decades: int = 2, disagree_tol: float = 0.05,
                    kind: str = "sup") -> LimSupEstimate:
    """limsup/liminf over the top `decades` decades of the window.

    Flagged inconclusive when the top two decades disagree by more than
    disagree_tol (relative), per deciding fixed policy for 'for large u'
    statements.
    """
    u = np.asarray(u, float)
    y = np.asarray(y, float)
    u_hi = u.max()
    pick = np.maximum if kind == "sup" else np.minimum
    vals = []
    for d in range(decades):
        lo, hi = u_hi / 10.0 ** (d + 1), u_hi / 10.0 ** d
        m = (u > lo) & (u <= hi)
        if m.any():
            vals.append(float(pick.reduce(y[m])))
    if not vals:
        return LimSupEstimate(np.nan, True, np.array([]))
    vals = np.array(vals[::-1])  # oldest decade first
    value = float(pick.reduce(vals))
    scale = max(abs(v) for v in vals)
    inconclusive = bool(scale > 0 and abs(vals[-1] - vals[0]) > disagree_tol * scale)
    return LimSupEstimate(value, inconclusive, vals)


def kappa_root() -> float:
    """Largest positive root of log(k) + 2 = k, bracketed on [3, 4]."""
    from scipy.optimize import brentq
    return float(brentq(lambda k: np.log(k) + 2.0 - k, 3.0, 4.0,
                        xtol=1e-14, rtol=8.9e-16))
