"""Monotone function utilities: bracketing, inversion, cached interpolants.

Every inverse in this package (F^-1, h^-1, g^-1, J^-1) is the inverse of a
strictly monotone function known only through (possibly expensive)
evaluation.  MonotoneInterpolant samples the function once on a log grid,
interpolates with a shape-preserving PCHIP in log-log space and inverts by
swapping axes; exact root polishing against the original callable is
available where tests demand it.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import RangeError


def expand_bracket(fn: Callable[[float], float], target: float,
                   x0: float = 1.0, increasing: bool = True,
                   factor: float = 4.0, max_steps: int = 200):
    """Geometrically expand from x0 until fn brackets the target.

    Works on (0, inf); raises RangeError when no bracket is found, which
    means the target is outside the function's range on representable
    floats.
    """
    sign = 1.0 if increasing else -1.0

    def h(x):
        return sign * (fn(x) - target)

    lo = hi = x0
    flo = fhi = h(x0)
    for _ in range(max_steps):
        if flo <= 0 <= fhi:
            return lo, hi
        if flo > 0:
            lo /= factor
            flo = h(lo)
        if fhi < 0:
            hi *= factor
            fhi = h(hi)
        if lo < 1e-280 or hi > 1e280:
            break
    if flo <= 0 <= fhi:
        return lo, hi
    raise RangeError(f"target {target!r} not attainable by monotone function")


def solve_monotone(fn: Callable[[float], float], target: float,
                   x0: float = 1.0, increasing: bool = True,
                   rel_tol: float = 1e-12) -> float:
    lo, hi = expand_bracket(fn, target, x0=x0, increasing=increasing)
    if lo == hi:
        return lo
    # solve in log-x for scale invariance
    f = (lambda w: fn(np.exp(w)) - target) if increasing else \
        (lambda w: target - fn(np.exp(w)))
    return float(np.exp(brentq(f, np.log(lo), np.log(hi), xtol=1e-14, rtol=8.9e-16)))


class MonotoneInterpolant:
    """Cached strictly monotone map on a log grid with a cheap inverse.

    Positive-valued functions are interpolated in log-log coordinates.  The
    cache auto-extends on demand; nodes sit on a fixed lattice
    x = 10^(i / points_per_decade) and evaluated values are memoized, so an
    extension only pays for the new nodes.
    """

    def __init__(self, fn: Callable, lo: float, hi: float,
                 points_per_decade: int = 24, log_y: bool = True):
        if not (0 < lo < hi):
            raise ValueError("need 0 < lo < hi")
        self.fn = fn
        self.points_per_decade = points_per_decade
        self.log_y = log_y
        self._memo = {}
        self._build(lo, hi)

    def _lattice(self, lo: float, hi: float):
        ppd = self.points_per_decade
        i0 = int(np.floor(np.log10(lo) * ppd))
        i1 = int(np.ceil(np.log10(hi) * ppd))
        return np.arange(i0, i1 + 1)

    def _build(self, lo: float, hi: float):
        idx = self._lattice(lo, hi)
        x = 10.0 ** (idx / self.points_per_decade)
        y = np.empty(len(idx), dtype=float)
        for j, i in enumerate(idx):
            if i not in self._memo:
                self._memo[i] = float(self.fn(float(x[j])))
            y[j] = self._memo[i]
        if not np.all(np.isfinite(y)):
            raise ValueError("non-finite values while sampling monotone function")
        ty = np.log(y) if self.log_y else y
        d = np.diff(ty)
        if np.all(d > 0):
            self.increasing = True
        elif np.all(d < 0):
            self.increasing = False
            ty = -ty
        else:
            raise ValueError("sampled function is not strictly monotone on the grid")
        self.lo, self.hi = float(x[0]), float(x[-1])
        self._x = x
        self._ty = ty
        self._fwd = PchipInterpolator(np.log(x), ty, extrapolate=False)
        self._inv = PchipInterpolator(ty, np.log(x), extrapolate=False)

    def _ensure_x(self, x: float):
        lo, hi = self.lo, self.hi
        changed = False
        while x < lo * 1.0000001:
            lo /= 16.0
            changed = True
            if lo < 1e-290:
                raise RangeError(f"argument {x} below representable cache range")
        while x > hi * 0.9999999:
            hi *= 16.0
            changed = True
            if hi > 1e290:
                raise RangeError(f"argument {x} above representable cache range")
        if changed:
            self._build(lo, hi)

    def value(self, x):
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        self._ensure_x(float(xs.min()))
        self._ensure_x(float(xs.max()))
        ty = self._fwd(np.log(xs))
        if not self.increasing:
            ty = -ty
        out = np.exp(ty) if self.log_y else ty
        return out if np.ndim(x) else float(out[0])

    def _ensure_y(self, ty: float):
        # _ty is stored increasing in x (decreasing maps are negated), so a
        # low target extends the grid downward and a high one upward; the
        # extension factor accelerates so far-away targets cost O(log) builds
        factor = 16.0
        for _ in range(60):
            t0, t1 = self._ty[0], self._ty[-1]
            if t0 <= ty <= t1:
                return
            try:
                if ty < t0:
                    if self.lo < 1e-290:
                        break
                    self._build(max(self.lo / factor, 1e-292), self.hi)
                else:
                    if self.hi > 1e290:
                        break
                    self._build(self.lo, min(self.hi * factor, 1e292))
            except ValueError:
                # extension ran into float-resolution ties: range exhausted
                break
            factor = min(factor * factor, 1e120)
        t0, t1 = self._ty[0], self._ty[-1]
        if not (t0 <= ty <= t1):
            raise RangeError("target outside attainable range of monotone function")

    def inverse(self, y, exact: bool = False):
        ys = np.atleast_1d(np.asarray(y, dtype=float))
        if self.log_y and np.any(ys <= 0):
            raise RangeError("inverse of a positive function needs positive target")
        ty = np.log(ys) if self.log_y else ys.astype(float)
        if not self.increasing:
            ty = -ty
        self._ensure_y(float(ty.min()))
        self._ensure_y(float(ty.max()))
        out = np.exp(self._inv(ty))
        if exact:
            out = np.array([
                solve_monotone(self.fn, float(t), x0=float(g),
                               increasing=self.increasing)
                for t, g in zip(ys, out)
            ])
        return out if np.ndim(y) else float(out[0])
