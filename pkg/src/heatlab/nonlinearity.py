"""Source-term catalog and the calculus built on it: f, f', the tail
integral F(u) = int_u^inf dtau/f(tau), its inverse, the conjugate exponents

    q = lim_{u->inf} f'(u) F(u),     p = lim_{u->inf} u f'(u)/f(u),

and the structural hypothesis checks (the f'F <= q bound, the Karamata
representation and the regular-variation index).

All catalog kinds carry analytic log f and log f', so every diagnostic is
computed in log space and stays finite far beyond the overflow range of f
itself.  The cancellation-free primitive is ``log_f_increment(u, s) =
log f(u+s) - log f(u)``, from which

    f'(u) F(u) = int_0^inf exp(-increment(u, sigma/lambda)) dsigma,
    lambda = f'(u)/f(u),

holds for every admissible kind and evaluates stably even for iterated
exponentials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import (DivergentTailError, ParameterError, QuadratureError,
                     RangeError, UnsupportedOperationError)
from .limits import (LimitEstimate, kappa_root, limsup_estimate,
                     sequence_limit)
from .monotone import MonotoneInterpolant, solve_monotone
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, adaptive_quad

_E = float(np.e)


class Nonlinearity:
    """Base class: a nonnegative nondecreasing C^1 source term f.

    Subclasses provide vectorized ``log_f`` / ``log_fprime`` and, where a
    naive difference would cancel, ``log_f_increment``.  ``rapidly_varying``
    marks kinds whose ratio f(2u)/f(u) diverges; it selects the exponential
    tail substitution for F.
    """

    kind = "abstract"
    rapidly_varying = False
    u_min = 0.0

    # -- evaluation ------------------------------------------------------
    def f(self, u):
        with np.errstate(over="ignore"):
            return np.exp(self.log_f(u))

    def log_f(self, u):
        raise NotImplementedError

    def fprime(self, u):
        with np.errstate(over="ignore"):
            return np.exp(self.log_fprime(u))

    def log_fprime(self, u):
        raise NotImplementedError

    def dlog_f(self, u):
        """f'/f, the local exponential rate.

        The generic log difference cancels catastrophically once log f
        dwarfs log(f'/f) (towers of exponentials), so kinds where that
        happens override this with an analytic form.
        """
        return np.exp(self.log_fprime(u) - self.log_f(u))

    def log_f_increment(self, u, s):
        """log f(u+s) - log f(u); override where cancellation matters."""
        return self.log_f(u + s) - self.log_f(u)

    # -- metadata --------------------------------------------------------
    def params(self) -> dict:
        return {}

    def closed_form_F(self, u) -> Optional[float]:
        return None

    def diagnostic_window(self):
        """Geometric u-range on which limit diagnostics are sampled."""
        return 100.0, 100.0 * 2.0 ** 20

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": self.params()}

    def __repr__(self):
        ps = ", ".join(f"{k}={v}" for k, v in self.params().items())
        return f"{type(self).__name__}({ps})"

    def check_monotone(self, window=(1e-6, 1e6), n: int = 400) -> bool:
        """Sampled monotonicity of f (the structural hypothesis is only
        assertable by sampling, never proved)."""
        u = np.geomspace(window[0], window[1], n)
        lf = self.log_f(u)
        return bool(np.all(np.diff(lf) >= -1e-12))


class PowerLaw(Nonlinearity):
    """f(u) = u^p, p > 1.  F and its inverse are closed-form."""

    kind = "power"

    def __init__(self, p: float):
        if p <= 1:
            raise ParameterError("power law needs p > 1 for an integrable tail")
        self.p = float(p)

    def params(self):
        return {"p": self.p}

    def log_f(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            return self.p * np.log(u)

    def log_fprime(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(self.p) + (self.p - 1.0) * np.log(u)

    def log_f_increment(self, u, s):
        return self.p * np.log1p(np.asarray(s, dtype=float) / u)

    def dlog_f(self, u):
        return self.p / np.asarray(u, dtype=float)

    def closed_form_F(self, u):
        return u ** (1.0 - self.p) / (self.p - 1.0)

    def closed_form_F_inverse(self, v):
        return ((self.p - 1.0) * v) ** (-1.0 / (self.p - 1.0))


class LogPowerLaw(Nonlinearity):
    """f(u) = u^p [log(u+e)]^beta.

    Monotonicity requires beta >= -p*kappa with kappa the root of
    log k + 2 = k; construction rejects parameters below the floor.
    """

    kind = "log_power"

    def __init__(self, p: float, beta: float):
        if p <= 1:
            raise ParameterError("log-power law needs p > 1")
        floor = -p * kappa_root()
        if beta < floor - 1e-12:
            raise ParameterError(
                f"beta={beta} breaks monotonicity; needs beta >= {floor:.6f}")
        self.p = float(p)
        self.beta = float(beta)

    @classmethod
    def doubly_critical(cls, N: int, beta: float) -> "LogPowerLaw":
        """The doubly critical family u^(1+2/N) [log(u+e)]^beta."""
        return cls(1.0 + 2.0 / N, beta)

    def params(self):
        return {"p": self.p, "beta": self.beta}

    def log_f(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            return self.p * np.log(u) + self.beta * np.log(np.log(u + _E))

    def log_fprime(self, u):
        u = np.asarray(u, dtype=float)
        L = np.log(u + _E)
        inner = self.p * L + self.beta * u / (u + _E)
        with np.errstate(divide="ignore"):
            return (self.p - 1.0) * np.log(u) + (self.beta - 1.0) * np.log(L) \
                + np.log(inner)

    def log_f_increment(self, u, s):
        s = np.asarray(s, dtype=float)
        t1 = self.p * np.log1p(s / u)
        L0 = np.log(u + _E)
        t2 = self.beta * np.log1p(np.log1p(s / (u + _E)) / L0)
        return t1 + t2

    def dlog_f(self, u):
        u = np.asarray(u, dtype=float)
        return self.p / u + self.beta / ((u + _E) * np.log(u + _E))


class ExpPowerLaw(Nonlinearity):
    """f(u) = exp(u^p), p > 0.  Rapidly varying; q = 1."""

    kind = "exp_power"
    rapidly_varying = True

    def __init__(self, p: float):
        if p <= 0:
            raise ParameterError("exp-power needs p > 0")
        self.p = float(p)

    def params(self):
        return {"p": self.p}

    def log_f(self, u):
        return np.asarray(u, dtype=float) ** self.p

    def log_fprime(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(self.p) + (self.p - 1.0) * np.log(u) + u ** self.p

    def log_f_increment(self, u, s):
        s = np.asarray(s, dtype=float)
        # (u+s)^p - u^p without cancellation
        return u ** self.p * np.expm1(self.p * np.log1p(s / u))

    def dlog_f(self, u):
        u = np.asarray(u, dtype=float)
        return self.p * u ** (self.p - 1.0)

    def diagnostic_window(self):
        # keep u^p representable
        u_hi = 100.0 * 2.0 ** 20
        if 250.0 / self.p < 300.0:
            u_hi = min(u_hi, 10.0 ** (250.0 / self.p))
        return 100.0, max(u_hi, 1e4)


class ExpLogPowerLaw(Nonlinearity):
    """f(u) = exp(|log u|^(p-1) log u), p > 1.  Rapidly varying; q = 1."""

    kind = "exp_log_power"
    rapidly_varying = True

    def __init__(self, p: float):
        if p <= 1:
            raise ParameterError("exp-log-power needs p > 1")
        self.p = float(p)

    def params(self):
        return {"p": self.p}

    def log_f(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            L = np.log(u)
        return np.abs(L) ** (self.p - 1.0) * L

    def log_fprime(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            L = np.log(u)
        # d/du |L|^{p-1} L = p |L|^{p-1} / u
        return np.log(self.p) + (self.p - 1.0) * np.log(np.abs(L)) - L \
            + np.abs(L) ** (self.p - 1.0) * L

    def dlog_f(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            L = np.log(u)
        return self.p * np.abs(L) ** (self.p - 1.0) / u


class LogDampedPower(Nonlinearity):
    """f(u) = (u+a)^p / ((p-1) log(u+a) - 1) with a = e^(2/(p-1)).

    The shift a makes the denominator >= 1 on u >= 0, and
    F(u) = log(u+a) / (u+a)^(p-1) exactly.  f'F approaches q = p/(p-1)
    from above.
    """

    kind = "log_damped_power"

    def __init__(self, p: float):
        if p <= 1:
            raise ParameterError("log-damped power needs p > 1")
        self.p = float(p)
        self.a = float(np.exp(2.0 / (p - 1.0)))

    def params(self):
        return {"p": self.p}

    def _denom(self, u):
        return (self.p - 1.0) * np.log(u + self.a) - 1.0

    def log_f(self, u):
        u = np.asarray(u, dtype=float)
        return self.p * np.log(u + self.a) - np.log(self._denom(u))

    def fprime(self, u):
        u = np.asarray(u, dtype=float)
        D = self._denom(u)
        return (u + self.a) ** (self.p - 1.0) * (self.p * D - (self.p - 1.0)) / D ** 2

    def log_fprime(self, u):
        u = np.asarray(u, dtype=float)
        D = self._denom(u)
        return (self.p - 1.0) * np.log(u + self.a) \
            + np.log(self.p * D - (self.p - 1.0)) - 2.0 * np.log(D)

    def dlog_f(self, u):
        u = np.asarray(u, dtype=float)
        D = self._denom(u)
        return (self.p * D - (self.p - 1.0)) / ((u + self.a) * D)

    def closed_form_F(self, u):
        return np.log(u + self.a) / (u + self.a) ** (self.p - 1.0)


class IteratedExp(Nonlinearity):
    """f(u) = exp(exp(...exp(u)...)), n levels.  Rapidly varying; q = 1."""

    kind = "iterated_exp"
    rapidly_varying = True

    def __init__(self, n: int):
        if n < 1 or int(n) != n:
            raise ParameterError("iterated exp needs integer n >= 1")
        self.n = int(n)

    def params(self):
        return {"n": self.n}

    def _tower(self, u, levels):
        v = np.asarray(u, dtype=float)
        with np.errstate(over="ignore"):
            for _ in range(levels):
                v = np.exp(v)
        return v

    def log_f(self, u):
        return self._tower(u, self.n - 1) if self.n > 1 else np.asarray(u, dtype=float)

    def log_fprime(self, u):
        # f' = prod_{k=1..n} exp_k(u), so log f' = u + e^u + ... + exp_{n-1}(u)
        u = np.asarray(u, dtype=float)
        total = np.zeros_like(u)
        v = u.copy()
        with np.errstate(over="ignore"):
            for _ in range(self.n - 1):
                total = total + v
                v = np.exp(v)
            total = total + v
        return total

    def log_f_increment(self, u, s):
        # Delta_1 = s; Delta_k = exp_{k-1}(u) * expm1(Delta_{k-1})
        s = np.asarray(s, dtype=float)
        delta = s
        with np.errstate(over="ignore"):
            tier = np.asarray(u, dtype=float)
            for _ in range(self.n - 1):
                e_tier = np.exp(tier)
                delta = e_tier * np.expm1(np.minimum(delta, 700.0))
                tier = e_tier
        return delta

    def dlog_f(self, u):
        # log(f'/f) = u + e^u + ... + exp_{n-2}(u); exact, no cancellation
        u = np.asarray(u, dtype=float)
        log_lam = np.zeros_like(u)
        v = u.copy()
        with np.errstate(over="ignore"):
            for _ in range(self.n - 1):
                log_lam = log_lam + v
                v = np.exp(v)
            return np.exp(log_lam)

    def closed_form_F(self, u):
        if self.n == 1:
            return np.exp(-np.asarray(u, dtype=float))
        return None

    def diagnostic_window(self):
        if self.n == 1:
            return 100.0, 100.0 * 2.0 ** 20
        if self.n == 2:
            return 2.0, 512.0
        if self.n == 3:
            return 0.5, 5.0
        return 0.25, 1.5


class CriticalCompositeThreshold(Nonlinearity):
    """The threshold growth for log-weighted mass integrability:

        f(u) = (N/2) g'(g^-1(u)) g^-1(u)^(1+2/N),  g(v) = v [log(v+e)]^alpha.

    It satisfies F(u) = g^-1(u)^(-2/N) exactly, q = 1 + N/2, and the excess
    f'F - q decays exactly at the borderline rate rho = 1 of the refined
    doubly-critical test, making it the canonical counterexample to any
    strict-rho variant.
    """

    kind = "critical_composite_threshold"

    def __init__(self, alpha: float, N: int):
        if alpha < 0:
            raise ParameterError("alpha must be >= 0")
        if N < 1:
            raise ParameterError("N must be >= 1")
        self.alpha = float(alpha)
        self.N = int(N)
        self._ginv = MonotoneInterpolant(self._g, 1e-8, 1e12, points_per_decade=64)

    def params(self):
        return {"alpha": self.alpha, "N": self.N}

    def _g(self, v):
        return v * np.log(v + _E) ** self.alpha

    def _gprime(self, v):
        L = np.log(v + _E)
        return L ** (self.alpha - 1.0) * (L + self.alpha * v / (v + _E))

    def g_inverse(self, u):
        return self._ginv.inverse(u)

    def f(self, u):
        u = np.asarray(u, dtype=float)
        v = self._ginv.inverse(u)
        return 0.5 * self.N * self._gprime(v) * v ** (1.0 + 2.0 / self.N)

    def log_f(self, u):
        return np.log(self.f(u))

    def _gprime2(self, v):
        L = np.log(v + _E)
        return self.alpha * L ** (self.alpha - 2.0) / (v + _E) * \
            (2.0 * L + (self.alpha - 1.0) * v / (v + _E) - v * L / (v + _E))

    def fprime(self, u):
        # chain rule through v = g^-1(u): dv/du = 1/g'(v)
        u = np.asarray(u, dtype=float)
        v = self._ginv.inverse(u)
        gp = self._gprime(v)
        dfdv = 0.5 * self.N * (self._gprime2(v) * v ** (1.0 + 2.0 / self.N)
                               + (1.0 + 2.0 / self.N) * gp * v ** (2.0 / self.N))
        return dfdv / gp

    def log_fprime(self, u):
        return np.log(self.fprime(u))

    def dlog_f(self, u):
        return self.fprime(u) / self.f(u)

    def closed_form_F(self, u):
        v = self._ginv.inverse(u)
        return v ** (-2.0 / self.N)

    def excess_over_q(self, u):
        """Exact f'F - q, which reduces to (N/2) h g''(h)/g'(h) at h = g^-1(u).

        The excess decays like (N alpha / 2) / log h, i.e. exactly the
        borderline rho = 1 rate of the refined doubly-critical inequality.
        """
        u = np.asarray(u, dtype=float)
        h = self._ginv.inverse(u)
        L = np.log(h + _E)
        w = h / ((h + _E) * L)
        num = 1.0 + _E / (h + _E) + (self.alpha - 1.0) * w
        den = 1.0 + self.alpha * w
        return 0.5 * self.N * self.alpha * w * num / den


class TabulatedNonlinearity(Nonlinearity):
    """f given by positive samples; log-log linear interpolation in range.

    The tail of F beyond the sample range is undefined, so eval_F refuses
    rather than extrapolates.
    """

    kind = "tabulated"

    def __init__(self, u: Sequence[float], f: Sequence[float]):
        u = np.asarray(u, dtype=float)
        f = np.asarray(f, dtype=float)
        if len(u) < 2 or np.any(np.diff(u) <= 0) or np.any(u <= 0):
            raise ParameterError("need increasing positive sample abscissae")
        if np.any(f <= 0) or np.any(np.diff(f) < 0):
            raise ParameterError("samples must be positive and nondecreasing")
        self.u_samples = u
        self.f_samples = f
        self.u_min = float(u[0])

    def params(self):
        return {"u": self.u_samples.tolist(), "f": self.f_samples.tolist()}

    def log_f(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u < self.u_samples[0] * (1 - 1e-12)) or \
                np.any(u > self.u_samples[-1] * (1 + 1e-12)):
            raise RangeError("tabulated spec evaluated outside sample range")
        return np.interp(np.log(u), np.log(self.u_samples), np.log(self.f_samples))

    def log_fprime(self, u):
        from .quadrature import central_difference
        u = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.array([central_difference(lambda x: float(np.exp(self.log_f(x))), v)
                        for v in u])
        return np.log(out) if out.ndim else float(np.log(out))


_KIND_TABLE = {
    "power": lambda p: PowerLaw(p["p"]),
    "log_power": lambda p: LogPowerLaw(p["p"], p["beta"]),
    "f_beta": lambda p: LogPowerLaw.doubly_critical(p["N"], p["beta"]),
    "exp_power": lambda p: ExpPowerLaw(p["p"]),
    "exp_log_power": lambda p: ExpLogPowerLaw(p["p"]),
    "log_damped_power": lambda p: LogDampedPower(p["p"]),
    "iterated_exp": lambda p: IteratedExp(p["n"]),
    "critical_composite_threshold":
        lambda p: CriticalCompositeThreshold(p["alpha"], p["N"]),
    "tabulated": lambda p: TabulatedNonlinearity(p["u"], p["f"]),
}


def spec_from_dict(doc: dict) -> Nonlinearity:
    """Build a spec from its JSON document {"kind": ..., "params": {...}}."""
    try:
        kind = doc["kind"]
        maker = _KIND_TABLE[kind]
    except KeyError as exc:
        raise ParameterError(f"unknown or missing nonlinearity kind: {exc}") from exc
    try:
        return maker(doc.get("params", {}))
    except KeyError as exc:
        raise ParameterError(f"missing parameter {exc} for kind {kind!r}") from exc


# ---------------------------------------------------------------------------
# operations


def eval_f(spec: Nonlinearity, u):
    """f(u); u >= 0, vectorized."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise RangeError("f is defined on u >= 0")
    return spec.f(u) if np.ndim(u) else float(spec.f(u))


def eval_fprime(spec: Nonlinearity, u):
    u = np.asarray(u, dtype=float)
    return spec.fprime(u) if np.ndim(u) else float(spec.fprime(u))


def _check_tail_superlinear(spec: Nonlinearity, u: float):
    # an at-most-linear f has a divergent tail; probe the local exponent
    base = max(u, 1.0)
    for scale in (1e2, 1e4, 1e6):
        t = base * scale
        a_eff = (spec.log_f(2.0 * t) - spec.log_f(t)) / np.log(2.0)
        if a_eff > 1.0 + 1e-9:
            return
    raise DivergentTailError(
        "f grows at most linearly on the probed range; F(u) diverges")


def eval_log_F(spec: Nonlinearity, u: float,
               cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """log of F(u) = int_u^inf dtau / f(tau), stable for rapidly varying f."""
    if u <= 0:
        raise RangeError("F is evaluated at u > 0")
    if isinstance(spec, TabulatedNonlinearity):
        raise UnsupportedOperationError(
            "tail of F beyond the tabulated range is undefined; refusing to extrapolate")
    transform = cfg.tail_transform
    if transform == "auto":
        transform = "exponential" if spec.rapidly_varying else "reciprocal"
    if transform == "reciprocal":
        _check_tail_superlinear(spec, u)
        # tau = u/s maps the tail to (0, 1]; factoring out u/f(u) keeps the
        # integrand O(1) no matter how extreme u is
        scale = float(spec.log_f(u)) - np.log(u)

        def g(s):
            with np.errstate(divide="ignore", over="ignore"):
                return np.exp(-2.0 * np.log(s)
                              - spec.log_f_increment(u, u * (1.0 - s) / s))

        val = adaptive_quad(g, 0.0, 1.0, cfg)
        if val <= 0:
            raise QuadratureError("tail integral evaluated to a non-positive value")
        return float(np.log(val) - scale)
    # exponential: F = e^(-log f(u)) / lambda * int_0^inf e^(-inc(u, s/lambda)) ds
    lam = float(spec.dlog_f(u))
    if not np.isfinite(lam) or lam <= 0:
        raise QuadratureError("local rate f'/f unavailable for exponential transform")
    if lam < 0.5 and float(spec.dlog_f(2.0 * u)) > lam:
        # f is still flat at u but steepens ahead: the 1/lambda decay scale
        # overshoots badly, so integrate directly up to where the rate
        # reaches order one.  (A rate that *decreases* in u, as for
        # exp(u^p) with p < 1, is the correct local scale already.)
        u_mid = u
        for _ in range(200):
            u_mid *= 2.0
            if float(spec.dlog_f(u_mid)) >= 0.5:
                break
        head = adaptive_quad(lambda tt: np.exp(-spec.log_f(tt)), u, u_mid, cfg)
        return float(np.log(head + np.exp(eval_log_F(spec, u_mid, cfg))))

    def h(sig):
        return np.exp(-spec.log_f_increment(u, sig / lam))

    val = adaptive_quad(h, 0.0, np.inf, cfg)
    return float(-spec.log_f(u) - np.log(lam) + np.log(val))


def eval_F(spec: Nonlinearity, u: float,
           cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """F(u) in (0, inf); strictly decreasing in u.  May underflow to 0 for
    rapidly varying f at large u; use eval_log_F there."""
    with np.errstate(over="ignore"):
        return float(np.exp(eval_log_F(spec, u, cfg)))


def F_at_zero(spec: Nonlinearity, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """F(0+) = F(1) + int_0^1 dtau/f; +inf when 1/f is not integrable at 0."""
    from .quadrature import geometric_tail
    head = eval_F(spec, 1.0, cfg)
    # descend dyadically toward zero; panels [2^-k-1, 2^-k]
    total = 0.0
    hi = 1.0
    prev = None
    for _ in range(200):
        lo = hi * 0.5
        from .quadrature import gauss_panel
        p = gauss_panel(lambda t: np.exp(-spec.log_f(t)), lo, hi)
        total += p
        if prev is not None and p >= prev * (1.0 - 1e-12):
            return np.inf
        if p < cfg.rel_tol * max(total, head):
            return float(head + total)
        prev = p
        hi = lo
    return np.inf


def eval_F_inverse(spec: Nonlinearity, v: float,
                   cfg: QuadratureConfig = DEFAULT_CONFIG,
                   clamp: bool = False) -> float:
    """u with F(u) = v, by bracketed root finding on log F against log v.

    With clamp=True a target above F(0+) returns the domain floor instead of
    raising, matching the min(.., F(0)) convention for capped data.
    """
    if v <= 0:
        raise RangeError("F inverse needs a positive target")
    if isinstance(spec, PowerLaw):
        return float(spec.closed_form_F_inverse(v))
    target = np.log(v)

    def lf(u):
        return eval_log_F(spec, u, cfg)

    try:
        return solve_monotone(lf, target, x0=1.0, increasing=False)
    except RangeError:
        if clamp:
            f0 = F_at_zero(spec, cfg)
            if np.isfinite(f0) and v >= f0:
                return float(spec.u_min)
        raise


def fF_product(spec: Nonlinearity, u: float,
               cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """f'(u) F(u) through the increment representation (finite even where
    f, f' and F all overflow or underflow)."""
    lam = float(spec.dlog_f(u))
    if not np.isfinite(lam) or lam <= 0:
        raise QuadratureError(f"local rate f'/f not usable at u={u}")

    def g(sig):
        return np.exp(-spec.log_f_increment(u, sig / lam))

    return adaptive_quad(g, 0.0, np.inf, cfg)


def growth_rate(spec: Nonlinearity, u):
    """p(u) = u f'(u)/f(u)."""
    u = np.asarray(u, dtype=float)
    return u * spec.dlog_f(u)


# ---------------------------------------------------------------------------
# exponent profile


@dataclass
class KaramataProfile:
    """Samples of the canonical representation f = b(u) exp(int a(s)/s ds).

    a(u) = u f'/f; b is recovered by subtracting the integrated rate.  The
    regular-variation index is estimated independently by ratio tests
    f(lambda u)/f(u) at lambda in {2, 4}; rapid variation reports inf.
    """
    u: np.ndarray
    a: np.ndarray
    b: np.ndarray
    a_limit: float
    b_limit: float
    rv_index: float
    representation_residual: float
    base_point: float = 10.0


@dataclass
class FBoundCheck:
    holds: bool
    worst_margin: float   # max over window of f'F - q (<= slack when holds)
    at_u: float
    samples: list = field(default_factory=list)


@dataclass
class ExponentProfile:
    q_estimate: float
    p_estimate: float
    q_error: float
    conjugacy_residual: float
    q_converged: bool
    diagnostics: list            # (u, f'F) pairs
    p_diagnostics: list          # (u, u f'/f) pairs
    bound_holds_fFq: Optional[bool] = None
    karamata: Optional[KaramataProfile] = None

    def to_dict(self):
        return {
            "q_estimate": self.q_estimate,
            "p_estimate": None if np.isinf(self.p_estimate) else self.p_estimate,
            "q_error": self.q_error,
            "conjugacy_residual": self.conjugacy_residual,
            "q_converged": self.q_converged,
            "bound_holds_fFq": self.bound_holds_fFq,
        }


def exponent_profile(spec: Nonlinearity,
                     cfg: QuadratureConfig = DEFAULT_CONFIG,
                     u0: Optional[float] = None,
                     doublings: int = 20,
                     with_karamata: bool = True,
                     with_bound_check: bool = True) -> ExponentProfile:
    """Estimate q and p along u = u0 * 2^k with extrapolation at h = 1/log u.

    The raw diagnostic sequences are kept on the profile so convergence
    quality stays auditable.
    """
    lo, hi = spec.diagnostic_window()
    if u0 is None:
        u0 = lo
    kmax = min(doublings, int(np.floor(np.log2(hi / u0))))
    if kmax >= 4:
        us = u0 * 2.0 ** np.arange(0, kmax + 1)
    else:
        us = np.geomspace(u0, hi, 6)
    fF = np.array([fF_product(spec, float(u), cfg) for u in us])
    q_lim = sequence_limit(us, fF)

    p_raw = growth_rate(spec, us)
    p_lim = sequence_limit(us, p_raw)
    p_est = p_lim.value
    if np.isinf(p_est) or (q_lim.converged and abs(q_lim.value - 1.0) < 1e-6
                           and not np.isfinite(p_est)):
        p_est = np.inf

    q_est = q_lim.value
    if q_est is not None and np.isfinite(q_est) and q_est > 1.0 and np.isfinite(p_est):
        conj = abs(1.0 / p_est + 1.0 / q_est - 1.0)
    elif np.isinf(p_est) and np.isfinite(q_est):
        conj = abs(1.0 / q_est - 1.0)  # q = 1 expected in the superpower case
    else:
        conj = np.nan

    profile = ExponentProfile(
        q_estimate=float(q_est),
        p_estimate=float(p_est) if np.isfinite(p_est) else np.inf,
        q_error=q_lim.error,
        conjugacy_residual=float(conj),
        q_converged=q_lim.converged,
        diagnostics=list(zip(us.tolist(), fF.tolist())),
        p_diagnostics=list(zip(us.tolist(), np.asarray(p_raw, dtype=float).tolist())),
    )
    if with_bound_check:
        win = (min(1e3, hi / 8.0), hi)
        profile.bound_holds_fFq = check_fF_bound(spec, q_est, win, cfg).holds
    if with_karamata:
        profile.karamata = karamata_profile(spec, cfg)
    return profile


def check_fF_bound(spec: Nonlinearity, q: float,
                   window=(1e3, 1e9),
                   cfg: QuadratureConfig = DEFAULT_CONFIG,
                   n: int = 40, slack_rel: float = 1e-8) -> FBoundCheck:
    """Does f'(u) F(u) <= q hold on a geometric sample of the window?

    Reports the worst margin max(f'F - q); `holds` allows slack for
    quadrature noise.
    """
    lo, hi = window
    dlo, dhi = spec.diagnostic_window()
    lo, hi = max(lo, dlo * 1e-2), min(hi, dhi)
    us = np.geomspace(lo, hi, n)
    vals = np.array([fF_product(spec, float(u), cfg) for u in us])
    margins = vals - q
    i = int(np.argmax(margins))
    slack = slack_rel * max(1.0, abs(q))
    return FBoundCheck(holds=bool(margins[i] <= slack),
                       worst_margin=float(margins[i]),
                       at_u=float(us[i]),
                       samples=list(zip(us.tolist(), vals.tolist())))


def karamata_profile(spec: Nonlinearity,
                     cfg: QuadratureConfig = DEFAULT_CONFIG,
                     window=None, base_point: float = 10.0,
                     n: int = 60) -> KaramataProfile:
    lo, hi = window or spec.diagnostic_window()
    lo = max(lo, base_point)
    us = np.geomspace(lo, hi, n)
    a = np.asarray(growth_rate(spec, us), dtype=float)

    # cumulative int_{u0}^{u} a(s)/s ds on the log grid (Gauss per panel)
    from .quadrature import gauss_panel
    edges = np.concatenate([[base_point], us])
    pieces = []
    for x0, x1 in zip(edges[:-1], edges[1:]):
        pieces.append(gauss_panel(lambda w: growth_rate(spec, np.exp(w)),
                                  np.log(x0), np.log(x1)))
    integral = np.cumsum(pieces)
    log_b = spec.log_f(us) - integral
    with np.errstate(over="ignore"):
        b = np.exp(log_b)

    # consistency of the quadrature: recompute one checkpoint at double rank
    mid = len(us) // 2
    fine = 0.0
    for x0, x1 in zip(np.geomspace(base_point, us[mid], 2 * mid + 2)[:-1],
                      np.geomspace(base_point, us[mid], 2 * mid + 2)[1:]):
        fine += gauss_panel(lambda w: growth_rate(spec, np.exp(w)),
                            np.log(x0), np.log(x1))
    residual = abs(fine - integral[mid]) / max(1.0, abs(integral[mid]))

    # ratio tests for the variation index
    probes = us[us >= us[-1] / 2 ** 8]
    r2 = (spec.log_f(2.0 * probes) - spec.log_f(probes)) / np.log(2.0)
    r4 = (spec.log_f(4.0 * probes) - spec.log_f(probes)) / np.log(4.0)
    lim2 = sequence_limit(probes, r2, infinite_threshold=50.0)
    lim4 = sequence_limit(probes, r4, infinite_threshold=50.0)
    if lim2.is_infinite or lim4.is_infinite or \
            (np.isfinite(r2[-1]) and r2[-1] > 50.0 and r2[-1] > 1.5 * r2[0]):
        rv = np.inf
    else:
        rv = 0.5 * (lim2.value + lim4.value)

    a_lim = sequence_limit(us, a, infinite_threshold=1e6)
    b_lim = sequence_limit(us, b) if np.all(np.isfinite(b)) else None
    return KaramataProfile(
        u=us, a=a, b=b,
        a_limit=a_lim.value if a_lim.converged or a_lim.is_infinite else np.nan,
        b_limit=(b_lim.value if b_lim and b_lim.converged else np.nan),
        rv_index=float(rv),
        representation_residual=float(residual),
        base_point=base_point,
    )


def build_F_interpolant(spec: Nonlinearity, lo: float, hi: float,
                        cfg: QuadratureConfig = DEFAULT_CONFIG) -> MonotoneInterpolant:
    """Cached monotone view of F for inner loops (profiles, monitors)."""
    return MonotoneInterpolant(lambda u: eval_F(spec, u, cfg), lo, hi,
                               points_per_decade=32)
