"""Quadrature kernels for improper integrals with power-law and logarithmic
tails and for radially graded singular integrands.

The integrals this package meets are of two shapes:

* tail integrals ``int_a^inf g`` whose integrand decays like ``x^-p`` or like
  ``x^-1 (log x)^-lam``; these are summed over geometric panels with a
  stabilized-ratio extrapolation of the remainder,
* singular core integrals ``int_0^rho g(s) s^(N-1) ds`` whose integrand
  behaves like ``(1/s)(log 1/s)^-lam`` near zero; these are graded dyadically
  toward the origin.

Both shapes report divergence as a distinct outcome instead of a quadrature
failure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from .errors import DivergentTailError, QuadratureError

_GAUSS_X, _GAUSS_W = leggauss(24)


@dataclass
class QuadratureConfig:
    """Tolerances and transform policy for the quadrature layer.

    tail_transform selects how ``F(u) = int_u^inf dtau/f`` is mapped to a
    bounded domain: 'reciprocal' substitutes tau = u/s, 'exponential'
    substitutes tau = u + sigma/lambda (for rapidly varying f), 'auto' picks
    per spec.
    """

    rel_tol: float = 1e-11
    abs_tol: float = 0.0
    max_subdivisions: int = 200
    tail_transform: str = "auto"
    fd_step_rel: float = 1e-6
    max_panels: int = 400
    overflow_guard: float = 1e300

    def __post_init__(self):
        if self.rel_tol <= 0 and self.abs_tol <= 0:
            raise ValueError("at least one of rel_tol/abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.tail_transform not in ("auto", "reciprocal", "exponential"):
            raise ValueError(f"unknown tail_transform {self.tail_transform!r}")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass
class IntegralResult:
    value: float
    error: float
    divergent: bool = False
    # fitted decay exponent of the panel sums; < 0 means decaying panels
    decay_exponent: Optional[float] = None
    panels: list = field(default_factory=list)


def gauss_panel(g: Callable, a: float, b: float) -> float:
    """24-point Gauss-Legendre integral of a vectorized g over [a, b]."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return float(half * np.sum(_GAUSS_W * g(mid + half * _GAUSS_X)))


def adaptive_quad(g: Callable, a: float, b: float,
                  cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """scipy adaptive quadrature with the package's error contract.

    scipy's roundoff warnings are silenced; the returned error estimate is
    checked against the configured tolerance instead.
    """
    import warnings
    with np.errstate(over="ignore", invalid="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore", category=integrate.IntegrationWarning)
        val, err = integrate.quad(g, a, b, epsabs=cfg.abs_tol,
                                  epsrel=cfg.rel_tol, limit=cfg.max_subdivisions)
    if not np.isfinite(val):
        raise QuadratureError(f"non-finite quadrature result on [{a}, {b}]")
    # fail well above the requested tolerance only; integrands backed by
    # cached interpolants bottom out around 1e-9 relative
    ceiling = max(1e3 * max(cfg.abs_tol, cfg.rel_tol * abs(val)),
                  5e-9 * abs(val), 1e-300)
    if err > ceiling:
        raise QuadratureError(
            f"quadrature error {err:.3e} exceeds tolerance for value {val:.6e}")
    return val


def geometric_tail(g: Callable, a: float,
                   cfg: QuadratureConfig = DEFAULT_CONFIG,
                   ratio: float = 2.0) -> IntegralResult:
    """Integrate ``int_a^inf g`` over panels [a r^k, a r^(k+1)].

    The remainder beyond the last panel is extrapolated from the stabilized
    panel ratio; a panel sequence that fails to decay raises
    DivergentTailError.
    """
    if a <= 0:
        raise ValueError("geometric_tail needs a positive lower endpoint")
    panels = []
    total = 0.0
    lo = a
    for k in range(cfg.max_panels):
        hi = lo * ratio
        p = gauss_panel(g, lo, hi)
        panels.append(p)
        total += p
        lo = hi
        if k >= 8:
            recent = panels[-6:]
            if all(q > 0 for q in recent):
                ratios = [recent[i + 1] / recent[i] for i in range(5)]
                if max(ratios) >= 1.0 - 1e-12 and total > 0:
                    raise DivergentTailError(
                        "tail panels are not decaying; integral diverges")
                r_est = ratios[-1]
                drift = max(abs(ratios[i + 1] - ratios[i]) for i in range(4))
                if r_est < 1.0:
                    rem = panels[-1] * r_est / (1.0 - r_est)
                    rem_err = rem * (drift / max(1.0 - r_est, 1e-12) + 1e-12)
                    if rem + rem_err <= max(cfg.rel_tol * total, cfg.abs_tol) \
                            or (drift < 1e-9 * r_est and k > 20):
                        return IntegralResult(total + rem, rem_err + cfg.rel_tol * total,
                                              decay_exponent=np.log(r_est) / np.log(ratio),
                                              panels=panels)
            elif abs(panels[-1]) <= max(cfg.rel_tol * abs(total), cfg.abs_tol, 1e-300):
                return IntegralResult(total, abs(panels[-1]), panels=panels)
    # panels exhausted: extrapolate what we have
    if len(panels) >= 2 and panels[-2] > 0:
        r_est = panels[-1] / panels[-2]
        if r_est >= 1.0:
            raise DivergentTailError("tail panels are not decaying; integral diverges")
        rem = panels[-1] * r_est / (1.0 - r_est)
        return IntegralResult(total + rem, rem, decay_exponent=np.log(max(r_est, 1e-300)) / np.log(ratio),
                              panels=panels)
    raise QuadratureError("geometric tail did not converge")


def log_singular_integral(lam: float, rho: float,
                          cfg: QuadratureConfig = DEFAULT_CONFIG) -> IntegralResult:
    """Quadrature of the model core integral ``int_0^rho (1/s)(log 1/s)^-lam ds``.

    The substitution s = e^-w turns it into ``int_W^inf w^-lam dw`` with
    W = log(1/rho), handled by the geometric tail scheme.  Diverges for
    lam <= 1.
    """
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    W = np.log(1.0 / rho)
    try:
        return geometric_tail(lambda w: w ** (-lam), W, cfg)
    except DivergentTailError:
        return IntegralResult(np.inf, np.inf, divergent=True, decay_exponent=-lam)


def log_singular_closed_form(lam: float, rho: float) -> float:
    """Exact value of the model core integral, finite only for lam > 1."""
    if lam <= 1:
        return np.inf
    return np.log(1.0 / rho) ** (1.0 - lam) / (lam - 1.0)


def graded_radial_integral(g: Callable, rho: float, N: int,
                           cfg: QuadratureConfig = DEFAULT_CONFIG,
                           levels: int = 60) -> IntegralResult:
    """``int_0^rho g(s) s^(N-1) ds`` with dyadic grading toward s = 0.

    Panels are [rho 2^-(k+1), rho 2^-k].  Algebraic cores s^-a (a < N) give
    geometrically decaying panels; the critical log cores (1/s)(log 1/s)^-lam
    give panels decaying like a power of the level only.  Both remainder
    models are fitted and the better one extrapolates below the last level;
    a sequence decaying slower than level^-1 (or growing) is a divergent
    core, reported with the fitted exponent.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")

    def integrand(s):
        return g(s) * s ** (N - 1)

    panels = []
    total = 0.0
    hi = rho
    for k in range(levels):
        lo = hi * 0.5
        p = gauss_panel(integrand, lo, hi)
        panels.append(p)
        total += p
        hi = lo
        if not np.isfinite(p):
            return IntegralResult(np.inf, np.inf, divergent=True, panels=panels)
        if k >= 10 and abs(p) <= max(cfg.abs_tol, cfg.rel_tol * abs(total), 1e-300):
            return IntegralResult(total, abs(p), panels=panels)

    tail = np.array(panels[-12:])
    if np.any(tail <= 0):
        return IntegralResult(total, abs(panels[-1]), panels=panels)

    # quick exit for geometrically decaying (algebraic) cores: the ratio of
    # a pure power core is exactly constant, log-corrected cores drift
    ratios = tail[1:] / tail[:-1]
    r_est = float(ratios[-1])
    if r_est < 1.0 - 1e-3 and float(np.max(np.abs(np.diff(ratios)))) < 1e-6 * (1.0 - r_est):
        rem = panels[-1] * r_est / (1.0 - r_est)
        return IntegralResult(total + rem, abs(rem) * 1e-6 + cfg.rel_tol * abs(total),
                              decay_exponent=float(np.log(r_est) / np.log(2.0)),
                              panels=panels)

    # log-type cores decay like a power of w = log(1/s) only; continue in
    # geometric w-panels while s = e^-w stays representable, then fit the
    # power of w over that wide window for the sub-float remainder
    w0 = np.log(1.0 / rho) + levels * np.log(2.0)
    # cap so integrands built from s^-N cores stay representable
    w_cap = 300.0 / max(N, 1)
    cont = []
    ws = [w0]
    w_lo = w0
    ratio_w = 1.5
    while w_lo * ratio_w <= w_cap:
        w_hi = w_lo * ratio_w

        def gw(w):
            s = np.exp(-w)
            return g(s) * np.exp(-N * w)

        cont.append(gauss_panel(gw, w_lo, w_hi))
        w_lo = w_hi
        ws.append(w_lo)
    cont_total = float(np.sum(cont)) if cont else 0.0

    if cont and np.all(np.asarray(cont) > 0) and len(cont) >= 3:
        mids = np.sqrt(np.asarray(ws[:-1]) * np.asarray(ws[1:]))
        m_pow = float(np.polyfit(np.log(mids), np.log(cont), 1)[0]) - 1.0
        if m_pow <= -1.02:
            # panels of a pure power of w are geometric with ratio r^(m+1)
            rr = ratio_w ** (m_pow + 1.0)
            rem = cont[-1] * rr / (1.0 - rr)
            return IntegralResult(total + cont_total + rem, abs(rem) * 0.02,
                                  decay_exponent=float(m_pow), panels=panels)
        return IntegralResult(np.inf, np.inf, divergent=True,
                              decay_exponent=float(m_pow), panels=panels)

    # no room to continue (already near the float floor): fit the dyadic
    # panels themselves
    ks = np.arange(levels - 12, levels, dtype=float)
    wk = np.log(1.0 / rho) + (ks + 1.0) * np.log(2.0)
    m_pow = float(np.polyfit(np.log(wk), np.log(tail), 1)[0])
    if m_pow <= -1.02:
        rem = panels[-1] * wk[-1] / ((-m_pow - 1.0) * np.log(2.0))
        return IntegralResult(total + cont_total + rem, abs(rem) * 0.05,
                              decay_exponent=float(m_pow), panels=panels)
    return IntegralResult(np.inf, np.inf, divergent=True,
                          decay_exponent=float(m_pow), panels=panels)


def central_difference(fn: Callable, u: float, rel_step: float = 1e-6) -> float:
    """Central finite difference with a relative step h = max(|u|,1)*rel."""
    h = max(abs(u), 1.0) * rel_step
    return (fn(u + h) - fn(u - h)) / (2.0 * h)
