"""Monitor functions: the convex gauges J that encode integrability classes.

A monitor is a positive increasing C^2 function J with J' eventually
nondecreasing; J(u0) in L^1_ul is the integrability condition the existence
theory trades against the growth of f.  The catalog covers the gauges the
theory actually uses:

* Identity / PowerMonitor        J = u, J = u^r
* LogWeight(gamma)               J = u [log(u+e)]^gamma
* TailGauge(f, r)                J = F(u)^-r
* LogTailGauge(f, alpha, N)      J = h [log(h+e)]^alpha with h = F(u)^-N/2

TailGauge and LogTailGauge carry analytic first derivatives through F' =
-1/f; higher derivatives fall back to finite differences of the analytic
J', which is all the hypothesis diagnostics need.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .monotone import MonotoneInterpolant
from .nonlinearity import Nonlinearity, eval_log_F
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, central_difference

_E = float(np.e)


class Monitor:
    name = "abstract"

    def value(self, u):
        raise NotImplementedError

    def deriv(self, u):
        raise NotImplementedError

    def log_value(self, u):
        """log J(u); gauges built on rapidly varying f override this so the
        tail diagnostics stay finite where J itself overflows."""
        with np.errstate(divide="ignore"):
            return np.log(self.value(u))

    def log_deriv(self, u):
        with np.errstate(divide="ignore"):
            return np.log(self.deriv(u))

    def curvature_ratio(self, u):
        """J J'' / J'^2, the gauge-limit diagnostic."""
        J = np.asarray(self.value(u), dtype=float)
        Jp = np.asarray(self.deriv(u), dtype=float)
        return J * np.asarray(self.deriv2(u), dtype=float) / Jp ** 2

    def deriv2(self, u):
        u = np.asarray(u, dtype=float)
        return np.array([central_difference(lambda x: float(self.deriv(x)), v)
                         for v in np.atleast_1d(u)]).reshape(u.shape)

    def deriv3(self, u):
        u = np.asarray(u, dtype=float)
        return np.array([central_difference(lambda x: float(self.deriv2(x)), v, 1e-4)
                         for v in np.atleast_1d(u)]).reshape(u.shape)

    def inverse(self, v):
        raise NotImplementedError

    def convexity_floor(self, window=(1e-2, 1e8), n: int = 200) -> float:
        """Smallest sampled u beyond which J'' stays nonnegative."""
        u = np.geomspace(window[0], window[1], n)
        d2 = np.asarray(self.deriv2(u), dtype=float)
        bad = np.where(d2 < -1e-12 * np.maximum(1.0, np.abs(d2)))[0]
        if len(bad) == 0:
            return float(u[0])
        if bad[-1] == n - 1:
            raise ValueError("monitor is not eventually convex on the window")
        return float(u[bad[-1] + 1])

    def __repr__(self):
        return f"{type(self).__name__}()"


class Identity(Monitor):
    name = "identity"

    def value(self, u):
        return np.asarray(u, dtype=float)

    def deriv(self, u):
        return np.ones_like(np.asarray(u, dtype=float))

    def deriv2(self, u):
        return np.zeros_like(np.asarray(u, dtype=float))

    def deriv3(self, u):
        return np.zeros_like(np.asarray(u, dtype=float))

    def inverse(self, v):
        return np.asarray(v, dtype=float)


class PowerMonitor(Monitor):
    def __init__(self, r: float):
        if r <= 0:
            raise ValueError("power monitor needs r > 0")
        self.r = float(r)
        self.name = f"power[{r}]"

    def value(self, u):
        return np.asarray(u, dtype=float) ** self.r

    def deriv(self, u):
        return self.r * np.asarray(u, dtype=float) ** (self.r - 1.0)

    def deriv2(self, u):
        return self.r * (self.r - 1.0) * np.asarray(u, dtype=float) ** (self.r - 2.0)

    def deriv3(self, u):
        r = self.r
        return r * (r - 1.0) * (r - 2.0) * np.asarray(u, dtype=float) ** (r - 3.0)

    def inverse(self, v):
        return np.asarray(v, dtype=float) ** (1.0 / self.r)


class LogWeight(Monitor):
    """J(u) = u [log(u+e)]^gamma."""

    def __init__(self, gamma: float):
        self.gamma = float(gamma)
        self.name = f"log_weight[{gamma}]"
        self._inv: Optional[MonotoneInterpolant] = None

    def value(self, u):
        u = np.asarray(u, dtype=float)
        return u * np.log(u + _E) ** self.gamma

    def deriv(self, u):
        u = np.asarray(u, dtype=float)
        L = np.log(u + _E)
        return L ** (self.gamma - 1.0) * (L + self.gamma * u / (u + _E))

    def deriv2(self, u):
        u = np.asarray(u, dtype=float)
        g = self.gamma
        L = np.log(u + _E)
        return g * L ** (g - 2.0) / (u + _E) * \
            (2.0 * L + (g - 1.0) * u / (u + _E) - u * L / (u + _E))

    def inverse(self, v):
        if self._inv is None:
            self._inv = MonotoneInterpolant(
                lambda x: float(self.value(x)), 1e-8, 1e12, points_per_decade=48)
        return self._inv.inverse(v)


class TailGauge(Monitor):
    """J(u) = F(u)^-r for a given nonlinearity.

    J'' = r (r + 1 - f'F) / (f^2 F^(r+2)) changes sign exactly where the
    f'F <= r+1 bound does, which is why this gauge separates the regimes.
    """

    def __init__(self, spec: Nonlinearity, r: float,
                 cfg: QuadratureConfig = DEFAULT_CONFIG,
                 cache_range=(1e-4, 1e10)):
        if r <= 0:
            raise ValueError("tail gauge needs r > 0")
        self.spec = spec
        self.r = float(r)
        self.cfg = cfg
        self.name = f"tail_gauge[r={r}]"
        self._logF = MonotoneInterpolant(
            lambda u: eval_log_F(spec, u, cfg), cache_range[0], cache_range[1],
            points_per_decade=48, log_y=False)

    def log_F(self, u):
        return self._logF.value(u)

    def value(self, u):
        return np.exp(-self.r * np.asarray(self.log_F(u), dtype=float))

    def deriv(self, u):
        u = np.asarray(u, dtype=float)
        logF = np.asarray(self.log_F(u), dtype=float)
        return self.r * np.exp(-(self.r + 1.0) * logF - self.spec.log_f(u))

    def deriv2(self, u):
        u = np.asarray(u, dtype=float)
        logF = np.asarray(self.log_F(u), dtype=float)
        fF = np.exp(self.spec.log_fprime(u) + logF)
        return self.r * (self.r + 1.0 - fF) * \
            np.exp(-(self.r + 2.0) * logF - 2.0 * self.spec.log_f(u))

    def log_value(self, u):
        return -self.r * np.asarray(self.log_F(u), dtype=float)

    def log_deriv(self, u):
        u = np.asarray(u, dtype=float)
        logF = np.asarray(self.log_F(u), dtype=float)
        return np.log(self.r) - (self.r + 1.0) * logF - self.spec.log_f(u)

    def curvature_ratio(self, u):
        u = np.asarray(u, dtype=float)
        fF = np.exp(self.spec.log_fprime(u) + np.asarray(self.log_F(u), dtype=float))
        return (self.r + 1.0 - fF) / self.r

    def inverse(self, v):
        # J = v  <=>  log F(u) = -log(v)/r; _logF holds log F directly
        v = np.asarray(v, dtype=float)
        target = -np.log(v) / self.r
        return self._logF.inverse(target) if v.ndim else float(self._logF.inverse(float(target)))


class LogTailGauge(Monitor):
    """J(u) = h(u) [log(h(u)+e)]^alpha with h = F^(-N/2)."""

    def __init__(self, spec: Nonlinearity, alpha: float, N: int,
                 cfg: QuadratureConfig = DEFAULT_CONFIG,
                 cache_range=(1e-4, 1e10)):
        if alpha < 0:
            raise ValueError("log tail gauge needs alpha >= 0")
        self.spec = spec
        self.alpha = float(alpha)
        self.N = int(N)
        self.cfg = cfg
        self.name = f"log_tail_gauge[alpha={alpha},N={N}]"
        self._g = LogWeight(alpha)
        self._h = TailGauge(spec, N / 2.0, cfg, cache_range)

    def h(self, u):
        return self._h.value(u)

    def value(self, u):
        return self._g.value(self._h.value(u))

    def deriv(self, u):
        return self._g.deriv(self._h.value(u)) * self._h.deriv(u)

    def deriv2(self, u):
        h = self._h.value(u)
        hp = self._h.deriv(u)
        return self._g.deriv2(h) * hp ** 2 + self._g.deriv(h) * self._h.deriv2(u)

    def _log_h_terms(self, u):
        log_h = np.asarray(self._h.log_value(u), dtype=float)
        # log(h+e) and h/(h+e), stable for huge h
        big = log_h > 35.0
        h_small = np.exp(np.where(big, 0.0, log_h))
        L = np.where(big, log_h, np.log(h_small + _E))
        w = np.where(big, 1.0, h_small / (h_small + _E))
        return log_h, L, w

    def log_value(self, u):
        log_h, L, _ = self._log_h_terms(u)
        return log_h + self.alpha * np.log(L)

    def log_deriv(self, u):
        # J' = g'(h) h'
        log_h, L, w = self._log_h_terms(u)
        log_gp = (self.alpha - 1.0) * np.log(L) + np.log(L + self.alpha * w)
        return log_gp + np.asarray(self._h.log_deriv(u), dtype=float)

    def inverse(self, v):
        return self._h.inverse(self._g.inverse(v))


class CallableMonitor(Monitor):
    """Wrap ad hoc callables (tests, user experiments)."""

    def __init__(self, fn: Callable, dfn: Callable = None, name: str = "callable",
                 inverse: Callable = None, d2fn: Callable = None):
        self._fn = fn
        self._dfn = dfn
        self._d2fn = d2fn
        self._inverse = inverse
        self.name = name
        self._inv_interp: Optional[MonotoneInterpolant] = None

    def value(self, u):
        return np.asarray(self._fn(np.asarray(u, dtype=float)), dtype=float)

    def deriv(self, u):
        if self._dfn is not None:
            return np.asarray(self._dfn(np.asarray(u, dtype=float)), dtype=float)
        u = np.asarray(u, dtype=float)
        out = np.array([central_difference(lambda x: float(self._fn(x)), v)
                        for v in np.atleast_1d(u)])
        return out.reshape(u.shape)

    def deriv2(self, u):
        if self._d2fn is not None:
            return np.asarray(self._d2fn(np.asarray(u, dtype=float)), dtype=float)
        return super().deriv2(u)

    def inverse(self, v):
        if self._inverse is not None:
            return self._inverse(np.asarray(v, dtype=float))
        if self._inv_interp is None:
            self._inv_interp = MonotoneInterpolant(
                lambda x: float(self._fn(x)), 1e-8, 1e10, points_per_decade=48)
        return self._inv_interp.inverse(v)
