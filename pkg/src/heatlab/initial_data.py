"""Singular radial initial data: construction, uniformly-local norms,
weighted integrability near the core and the closure-class heuristic.

The data families here all share one shape: a radially nonincreasing core
u0(s) that blows up at s = 0 slowly enough to stay locally integrable,
capped at a constant beyond a cutoff radius m.  The two catalog cores are

* the log-corrected family  h^-1( s^-N (log 1/s)^(-N/2-1+eps) ),
  whose weighted mass barely converges and which defeats solvability in the
  doubly critical regime, and
* the tail-inverse family   F^-1(min(s^alpha, F(0+))),
  the standard example separating integrability exponents below N/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import gamma as _gamma_fn

from .errors import ParameterError, RangeError
from .monitors import LogWeight, Monitor, TailGauge
from .monotone import MonotoneInterpolant
from .nonlinearity import (LogPowerLaw, Nonlinearity, F_at_zero,
                           eval_F_inverse, eval_log_F)
from .quadrature import (DEFAULT_CONFIG, IntegralResult, QuadratureConfig,
                         graded_radial_integral, log_singular_closed_form,
                         log_singular_integral)

_E = float(np.e)


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere in R^N (2 for N = 1)."""
    return 2.0 * np.pi ** (N / 2.0) / _gamma_fn(N / 2.0)


def ball_volume(N: int, radius: float = 1.0) -> float:
    return sphere_area(N) / N * radius ** N


@dataclass
class RadialProfile:
    """Radially nonincreasing datum: singular core up to the cutoff radius,
    constant cap beyond it."""
    kind: str
    N: int
    cutoff: float
    cap: float
    core: Callable
    params: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        out = np.empty_like(s)
        inside = s <= self.cutoff
        if inside.any():
            with np.errstate(divide="ignore", over="ignore"):
                out[inside] = self.core(np.maximum(s[inside], 1e-300))
        out[~inside] = self.cap
        return out if out.ndim else float(out)

    def value(self, s: float) -> float:
        return float(self(np.asarray([s]))[0])

    def ball_integral(self, rho: float, weight: Optional[Callable] = None,
                      cfg: QuadratureConfig = DEFAULT_CONFIG,
                      levels: int = 60) -> IntegralResult:
        """omega_{N-1} * int_0^rho w(u0(s)) s^(N-1) ds, graded toward 0."""
        w = weight if weight is not None else (lambda x: x)

        def g(s):
            return np.asarray(w(self(s)), dtype=float)

        res = graded_radial_integral(g, min(rho, self.cutoff), self.N, cfg,
                                     levels=levels)
        if rho > self.cutoff and np.isfinite(res.value):
            shell = (rho ** self.N - self.cutoff ** self.N) / self.N
            res = IntegralResult(res.value + float(w(self.cap)) * shell,
                                 res.error, res.divergent, res.decay_exponent)
        omega = sphere_area(self.N)
        return IntegralResult(omega * res.value, omega * res.error,
                              res.divergent, res.decay_exponent)

    def to_dict(self):
        return {"kind": self.kind, "N": self.N, "cutoff": self.cutoff,
                "cap": self.cap, "params": self.params}


def constant_profile(c: float, N: int, cutoff: float = 1.0) -> RadialProfile:
    return RadialProfile("constant", N, cutoff, float(c),
                         lambda s: np.full_like(np.asarray(s, dtype=float), float(c)),
                         params={"c": c})


def gaussian_profile(t: float, N: int, mass: float = 1.0,
                     cutoff: float = 12.0) -> RadialProfile:
    """Heat kernel at time t (radial), used as a smooth test datum."""
    def core(s):
        s = np.asarray(s, dtype=float)
        return mass * (4.0 * np.pi * t) ** (-N / 2.0) * np.exp(-s ** 2 / (4.0 * t))
    return RadialProfile("gaussian", N, cutoff, float(core(np.array([cutoff]))[0]),
                         core, params={"t": t, "mass": mass})


def truncate_profile(profile: RadialProfile, n: int) -> RadialProfile:
    """Cap the core at radius 2^-n m: the regularized approximants whose
    convergence tests closure-class membership."""
    r_n = profile.cutoff * 2.0 ** (-n)
    top = profile.value(r_n)

    def core(s):
        s = np.asarray(s, dtype=float)
        return np.where(s <= r_n, top, profile(s))

    return RadialProfile(profile.kind + f"+trunc[{n}]", profile.N,
                         profile.cutoff, profile.cap, core,
                         params={**profile.params, "trunc_level": n})


def _core_floor_scan(psi: Callable[[float], float], floor: float,
                     m_max: float = 1.0 / np.e, k_max: int = 200) -> float:
    """Largest dyadic m in (0, m_max) with psi(m) >= floor."""
    k = max(2, int(np.ceil(-np.log2(m_max))))
    while 2.0 ** (-k) >= m_max:
        k += 1
    while k <= k_max:
        m = 2.0 ** (-k)
        if psi(m) >= floor:
            return m
        k += 1
    raise ParameterError("no cutoff radius m in (0, 1/e) satisfies the core floor")


def _convexity_floor(spec: Nonlinearity, window=(1e-3, 1e6), n: int = 400) -> float:
    """Smallest sampled u beyond which f'' stays nonnegative (second
    difference scan of the analytic f')."""
    u = np.geomspace(window[0], window[1], n)
    fp = np.asarray(spec.fprime(u), dtype=float)
    d2 = np.diff(fp)  # f' nondecreasing <=> f'' >= 0
    bad = np.where(d2 < -1e-12 * np.maximum(np.abs(fp[:-1]), 1.0))[0]
    if len(bad) == 0:
        return float(u[0])
    if bad[-1] >= n - 2:
        raise ParameterError("source term is not eventually convex on the scan window")
    return float(u[bad[-1] + 1])


def build_counterexample(beta: float, eps: float, N: int,
                         f_spec: Optional[Nonlinearity] = None,
                         cfg: QuadratureConfig = DEFAULT_CONFIG,
                         c_floor: Optional[float] = None) -> RadialProfile:
    """The log-corrected singular datum

        u0(s) = h^-1( s^-N (log 1/s)^(-N/2-1+eps) )   for s <= m,

    capped at its cutoff value beyond m, where h = F^(-N/2) of the
    doubly-critical log family (beta > 0), or of a supplied f for the
    transplanted variant.  The cutoff m is the largest dyadic radius in
    (0, 1/e) at which the core clears h evaluated at the convexity floor.
    """
    if beta <= 0:
        raise ParameterError("counterexample core needs beta > 0")
    if not 0.0 < eps < 0.5 * N:
        raise ParameterError("eps must lie in (0, N/2)")
    fb = LogPowerLaw.doubly_critical(N, beta)
    base = f_spec if f_spec is not None else fb

    c0 = _convexity_floor(fb)
    if c_floor is not None:
        c0 = max(c0, c_floor)
    c0 = max(c0, 1.0)

    h_gauge = TailGauge(base, N / 2.0, cfg, cache_range=(max(c0 * 1e-3, 1e-6), 1e9))
    floor = float(h_gauge.value(c0))

    expo = -0.5 * N - 1.0 + eps

    def psi(s):
        s = np.asarray(s, dtype=float)
        return s ** (-float(N)) * np.log(1.0 / s) ** expo

    # keep the cutoff where the core is already decreasing:
    # d/ds psi < 0 exactly for log(1/s) > -expo/N
    m_mono = float(np.exp(expo / N))
    m = _core_floor_scan(lambda s: float(psi(s)), floor,
                         m_max=min(1.0 / np.e, m_mono))

    def core(s):
        return h_gauge.inverse(psi(s))

    cap = float(core(np.asarray([m]))[0])
    return RadialProfile(
        "counterexample", N, m, cap, core,
        params={"beta": beta, "eps": eps,
                "transplanted": f_spec is not None},
        notes={"convexity_floor": c0, "core_floor": floor})


def build_F_inverse_power(f_spec: Nonlinearity, alpha: float, r: float, N: int,
                          cfg: QuadratureConfig = DEFAULT_CONFIG,
                          q: Optional[float] = None,
                          cutoff: float = 8.0) -> RadialProfile:
    """The tail-inverse datum u0(s) = F^-1(min(s^alpha, F(0+))).

    Valid for 2 < alpha < N/r (which forces r < N/2) and q <= 1+r; the
    clamp at F(0+) applies when 1/f is integrable at zero.
    """
    if not (2.0 < alpha):
        raise ParameterError("alpha must exceed 2")
    if not (alpha < N / r):
        raise ParameterError("alpha must stay below N/r")
    if q is not None and q > 1.0 + r + 1e-9:
        raise ParameterError("requires q <= 1+r")
    F0 = F_at_zero(f_spec, cfg)
    logF = MonotoneInterpolant(lambda u: eval_log_F(f_spec, u, cfg),
                               1e-6, 1e10, points_per_decade=48, log_y=False)

    def core(s):
        # when F(0+) is finite the datum is compactly supported: the clamp
        # min(s^alpha, F(0+)) saturates at radius F(0+)^(1/alpha) and the
        # inverse there is the domain floor
        s = np.asarray(s, dtype=float)
        v = alpha * np.log(s)
        if np.isfinite(F0):
            log_F0 = np.log(F0)
            out = np.zeros_like(v)
            live = v < log_F0 - 1e-12
            if live.any():
                out[live] = logF.inverse(v[live])
            return out
        return logF.inverse(v)

    cap = float(core(np.asarray([cutoff]))[0])
    return RadialProfile("f_inverse_power", N, cutoff, cap, core,
                         params={"alpha": alpha, "r": r,
                                 "f": f_spec.to_dict()},
                         notes={"F_at_zero": F0})


@dataclass
class ULNormEstimate:
    r: float
    value: float
    center_norm: float
    method: str
    diverged: bool = False
    divergence_exponent: Optional[float] = None
    offcenter_max: Optional[float] = None

    def to_dict(self):
        return {"r": self.r,
                "value": None if not np.isfinite(self.value) else self.value,
                "method": self.method, "diverged": self.diverged,
                "divergence_exponent": self.divergence_exponent}


def _sphere_cap_fraction(s, d: float, N: int):
    """Fraction of the sphere of radius s (centered at the origin) lying
    inside the unit ball centered at distance d."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        cosg = np.where(s > 0, (d * d + s * s - 1.0) / (2.0 * d * s), -1.0)
    cosg = np.clip(cosg, -1.0, 1.0)
    if N == 1:
        # the 0-sphere is the pair {+s, -s}
        inside_plus = np.abs(s - d) < 1.0
        inside_minus = np.abs(-s - d) < 1.0
        return 0.5 * (inside_plus.astype(float) + inside_minus.astype(float))
    if N == 2:
        return np.arccos(cosg) / np.pi
    if N == 3:
        return 0.5 * (1.0 - cosg)
    from scipy.special import betainc
    # fraction = I_{sin^2(g*/2)}((N-1)/2, (N-1)/2) via the half-angle map
    x = 0.5 * (1.0 - cosg)
    return betainc((N - 1) / 2.0, (N - 1) / 2.0, x)


def off_center_ball_integral(profile: RadialProfile, d: float,
                             r: float = 1.0,
                             cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """int_{B(y,1)} u0^r dx for |y| = d, by the cap-fraction reduction.

    Spheres of radius s < 1 - d lie fully inside the ball; the remaining
    shell contributes through the cap fraction.  The inner part reuses the
    graded core quadrature so singular cores are handled exactly like the
    origin-centered estimate they are compared against.
    """
    N = profile.N
    omega = sphere_area(N)

    def wr(x):
        return np.asarray(profile(x), dtype=float) ** r

    total = 0.0
    a = 1.0 - d
    if a > 0:
        res = graded_radial_integral(wr, a, N, cfg)
        if res.divergent:
            return np.inf
        total += omega * res.value

    lo, hi = abs(a), 1.0 + d

    def shell(s):
        return wr(s) * _sphere_cap_fraction(s, d, N)

    if lo > 0:
        from numpy.polynomial.legendre import leggauss
        xg, wg = leggauss(48)
        edges = np.linspace(lo, hi, 40)
        for e0, e1 in zip(edges[:-1], edges[1:]):
            mid, half = 0.5 * (e0 + e1), 0.5 * (e1 - e0)
            ss = mid + half * xg
            total += omega * half * float(np.sum(wg * shell(ss) * ss ** (N - 1)))
    else:
        res = graded_radial_integral(shell, hi, N, cfg)
        if res.divergent:
            return np.inf
        total += omega * res.value
    return float(total)


def ul_norm(profile: RadialProfile, r: float = 1.0, N: Optional[int] = None,
            cfg: QuadratureConfig = DEFAULT_CONFIG,
            cross_check_centers: int = 0,
            rng_seed: int = 0) -> ULNormEstimate:
    """Uniformly local L^r norm: sup over unit-ball integrals.

    For a radially nonincreasing profile the sup sits at the origin, so the
    estimate is the origin ball integral by graded radial quadrature; an
    optional coarse sweep over off-origin centers cross-checks dominance.
    """
    if r < 1:
        raise ParameterError("uniformly local norms need r >= 1")
    N = N if N is not None else profile.N
    res = profile.ball_integral(1.0, weight=lambda x: x ** r, cfg=cfg)
    if res.divergent:
        return ULNormEstimate(r, np.inf, np.inf, "radial-reduction",
                              diverged=True,
                              divergence_exponent=res.decay_exponent)
    value = res.value ** (1.0 / r)
    offmax = None
    if cross_check_centers > 0:
        rng = np.random.default_rng(rng_seed)
        ds = rng.uniform(0.05, profile.cutoff + 2.0, cross_check_centers)
        offmax = max(off_center_ball_integral(profile, float(d), r) for d in ds) ** (1.0 / r)
    return ULNormEstimate(r, float(value), float(value), "radial-reduction",
                          offcenter_max=offmax)


@dataclass
class SingularIntegralReport:
    value: float
    divergent: bool
    exponent_fit: Optional[float]
    closed_form_value: Optional[float] = None
    model_lambda: Optional[float] = None

    def to_dict(self):
        return {"value": None if not np.isfinite(self.value) else self.value,
                "divergent": self.divergent, "exponent_fit": self.exponent_fit,
                "closed_form_value": self.closed_form_value,
                "model_lambda": self.model_lambda}


def model_singular_integral(lam: float, rho: float,
                            cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Quadrature and closed form of the model core integral
    int_0^rho (1/s)(log 1/s)^-lam ds; the pair every graded-mesh test
    calibrates against."""
    quad = log_singular_integral(lam, rho, cfg)
    return quad, log_singular_closed_form(lam, rho)


def singular_integrability(profile: RadialProfile, monitor: Monitor,
                           rho: float, N: Optional[int] = None,
                           cfg: QuadratureConfig = DEFAULT_CONFIG) -> SingularIntegralReport:
    """int_{B(0,rho)} J(u0) dx by graded radial quadrature.

    For the log-corrected core with a log-weight style gauge the integrand
    behaves like the model (1/s)(log 1/s)^-lam; the fitted core exponent and
    (when the profile carries the parameters) the matching closed-form value
    are reported for comparison.
    """
    if rho > profile.cutoff:
        raise ParameterError("rho must not exceed the profile cutoff")
    res = profile.ball_integral(rho, weight=lambda x: np.asarray(monitor.value(x)),
                                cfg=cfg)
    lam = None
    closed = None
    if profile.kind.startswith("counterexample"):
        eps = profile.params.get("eps")
        alpha = getattr(monitor, "alpha", None)
        if eps is not None and alpha is not None:
            lam = 0.5 * profile.N + 1.0 - eps - alpha
            closed = log_singular_closed_form(lam, rho)
    return SingularIntegralReport(
        value=float(res.value), divergent=res.divergent,
        exponent_fit=res.decay_exponent,
        closed_form_value=closed, model_lambda=lam)


@dataclass
class ClosureMembershipReport:
    in_closure_likely: bool
    truncation_errors: list
    monotone: bool
    note: str = ""

    def to_dict(self):
        return {"in_closure_likely": self.in_closure_likely,
                "truncation_errors": self.truncation_errors,
                "monotone": self.monotone, "note": self.note}


def closure_membership_heuristic(profile: RadialProfile,
                                 cfg: QuadratureConfig = DEFAULT_CONFIG,
                                 levels: int = 24,
                                 tol: float = 1e-4) -> ClosureMembershipReport:
    """Does the truncated sequence converge to the profile in the uniformly
    local L^1 norm?

    The truncation error at level n is the core mass above the cap radius
    2^-n m; membership in the closure class is declared likely when the
    errors decay monotonically below tol across >= 10 levels.  This is a
    heuristic: it cannot certify membership, only exhibit the convergence
    the definition demands.
    """
    base = profile.ball_integral(profile.cutoff, cfg=cfg)
    if base.divergent:
        return ClosureMembershipReport(False, [], False,
                                       note="core is not locally integrable")
    errors = []
    for n_lev in range(levels):
        r_n = profile.cutoff * 2.0 ** (-n_lev)
        top = profile.value(r_n)
        res = profile.ball_integral(r_n, weight=lambda x: np.maximum(x - top, 0.0),
                                    cfg=cfg)
        errors.append(float(res.value))
    err = np.asarray(errors, dtype=float)
    finite = np.isfinite(err)
    if not finite.all():
        return ClosureMembershipReport(False, errors, False,
                                       note="truncation error not finite")
    monotone = bool(np.all(np.diff(err) <= 1e-12 + 1e-9 * np.abs(err[:-1])))

    # the borderline members decay only like a power of the level, so accept
    # either an error already below tol or a fitted decay with a vanishing
    # extrapolated limit
    decayed = bool(err[-1] < tol)
    decay_to_zero = False
    pos = err > 0
    if pos[-10:].all() and len(err) >= 12:
        lev = np.arange(1.0, len(err) + 1.0)
        slope = float(np.polyfit(np.log(lev[-10:]), np.log(err[-10:]), 1)[0])
        decay_to_zero = slope < -5e-2
    likely = bool(monotone and (decayed or decay_to_zero))
    note = ""
    if not likely and err[-1] >= tol:
        note = f"truncation error plateaued at {err[-1]:.3e}"
    return ClosureMembershipReport(likely, errors, monotone, note)
