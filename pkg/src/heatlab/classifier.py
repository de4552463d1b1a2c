"""Regime classification: decide which existence / nonexistence rule fires
for a (nonlinearity, data-class) pair, and evaluate every checkable
hypothesis behind those rules.

The decision rules live in a small registry so each outcome can cite the
exact clauses it used; reports carry those tags verbatim for auditability.
All "for large u" hypotheses are sampled on configurable geometric windows
and summarized with the package's limit extractors; nothing here proves a
statement, it checks it numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ParameterError
from .limits import (fit_tail_behavior, kappa_root, limsup_estimate,
                     sequence_limit)
from .monitors import LogWeight, Monitor
from .nonlinearity import Nonlinearity, eval_log_F, fF_product
from .quadrature import DEFAULT_CONFIG, QuadratureConfig

_E = float(np.e)

# Decision rulebook: tag -> human-readable clause.  Tags are stable
# identifiers used in reports.
RULES = {
    "A.i": "existence (subcritical 1): r > N/2, q < 1+r, tail-gauge data in L1_ul",
    "A.ii": "existence (subcritical 2): r > N/2, q = 1+r, requires f'F <= q for large u",
    "A.iii": "existence (critical): r = N/2, q < 1+r, tail-gauge data in the closure class",
    "P2.ii": "nonexistence family: 0 < r < N/2, q <= 1+r",
    "DC": "doubly critical corner: q = 1+N/2, r = N/2; deferred to refined checks",
    "B.i": "doubly critical existence: log-weighted gauge alpha > N/2, gauge convex",
    "B.ii": "doubly critical existence: alpha = N/2 plus the refined f'F bound with rho < 1",
    "C": "doubly critical nonexistence: convex transplant from the log family",
    "D.i.a": "log family existence: alpha > N/2, beta >= -1",
    "D.i.b": "log family existence: alpha = N/2, beta > -1, closure-class gauge data",
    "D.i.c": "log family existence: -(1+2/N)kappa <= beta < -1, any L1_ul data",
    "D.ii.a": "log family nonexistence: beta > -1, alpha in [0, N/2)",
    "D.ii.b": "log family nonexistence: beta = -1, alpha in [0, N/2]",
    "OSGOOD.1": "solvable for every L1_ul datum iff int_1^inf sup(f/tau)/u^(1+2/N) du < inf",
    "RATIO.r": "solvable for every Lr_ul datum iff limsup f(u)/u^(1+2r/N) < inf",
    "G.ex.eps": "growth condition for existence with an epsilon of room",
    "G.ex.log": "growth condition for existence with a logarithmic weight",
    "G.nx.eps": "growth condition for nonexistence with an epsilon of room",
    "G.nx.log": "growth condition for nonexistence with a logarithmic weight",
}

VERDICTS = ("existence-subcritical-1", "existence-subcritical-2",
            "existence-critical", "nonexistence", "doubly-critical",
            "outside-theory")


@dataclass
class HypothesisRecord:
    name: str
    passed: Optional[bool]
    margin: float = np.nan
    note: str = ""

    def to_dict(self):
        return {"name": self.name, "passed": self.passed,
                "margin": None if not np.isfinite(self.margin) else self.margin,
                "note": self.note}


@dataclass
class ClassificationOutcome:
    verdict: str
    citations: list
    fired_hypotheses: list = field(default_factory=list)
    data_condition: str = ""
    subverdict: str = ""
    notes: str = ""

    def __post_init__(self):
        if self.verdict not in VERDICTS and self.verdict not in ("existence",):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if not self.citations:
            raise ValueError("every verdict must cite at least one rule")

    @property
    def exists(self) -> Optional[bool]:
        if self.verdict.startswith("existence"):
            return True
        if self.verdict == "nonexistence":
            return False
        return None

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "subverdict": self.subverdict,
            "citations": self.citations,
            "data_condition": self.data_condition,
            "hypotheses": [h.to_dict() for h in self.fired_hypotheses],
            "notes": self.notes,
        }


@dataclass
class RegimeQuery:
    N: int
    r: float
    q: float
    data_class: str = "L1ul"        # "L1ul" | "closure"
    bound_1_3_holds: Optional[bool] = None

    def __post_init__(self):
        if self.N < 1:
            raise ParameterError("N must be >= 1")
        if self.r <= 0:
            raise ParameterError("r must be positive")
        if self.q < 1.0 - 1e-12:
            raise ParameterError("q must be >= 1")
        if self.data_class not in ("L1ul", "closure"):
            raise ParameterError("data_class must be 'L1ul' or 'closure'")


@dataclass
class KappaConstant:
    value: float
    residual: float


def solve_kappa() -> KappaConstant:
    """Largest positive root of log(k) + 2 = k (approximately 3.1462)."""
    k = kappa_root()
    return KappaConstant(value=k, residual=abs(np.log(k) + 2.0 - k))


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def classify_qr_regime(query: RegimeQuery, tol: float = 1e-9) -> ClassificationOutcome:
    """Partition of the (q, r) quarter-plane into solvability regimes.

    Equality against the critical lines r = N/2 and q = 1+r is matched
    within a relative tolerance band; the doubly critical corner defers to
    the refined checks.  Total on valid queries.
    """
    N, r, q = query.N, query.r, query.q
    half_N = 0.5 * N
    hyps = []

    on_r_crit = _close(r, half_N, tol)
    on_q_crit = _close(q, 1.0 + r, tol)
    hyps.append(HypothesisRecord("r vs N/2", None, margin=r - half_N))
    hyps.append(HypothesisRecord("q vs 1+r", None, margin=q - (1.0 + r)))

    if on_r_crit and _close(q, 1.0 + half_N, tol):
        return ClassificationOutcome(
            "doubly-critical", ["DC"], hyps,
            data_condition="decision requires the refined doubly-critical checks",
            notes="corner point (q, r) = (1+N/2, N/2)")

    if r < half_N and not on_r_crit:
        # below the critical line the nonexistence family decides; for
        # q > 1+r the example built at r' = q-1 < N/2 lands in the weaker
        # r-class by the inclusion of uniformly local integrability classes
        if q <= 1.0 + r or _close(q, 1.0 + r, tol):
            return ClassificationOutcome(
                "nonexistence", ["P2.ii"], hyps,
                data_condition="some u0 with F(u0)^-r in L1_ul admits no "
                               "nonnegative solution",
                notes="integrability at exponent r < N/2 does not guarantee "
                      "solvability")
        if q < 1.0 + half_N and not _close(q, 1.0 + half_N, tol):
            return ClassificationOutcome(
                "nonexistence", ["P2.ii"], hyps,
                data_condition="some u0 with F(u0)^-r in L1_ul admits no "
                               "nonnegative solution",
                notes="via the nonexistence family at r' = q-1 < N/2 and the "
                      "inclusion of unit-ball integrability classes")
        return ClassificationOutcome(
            "outside-theory", ["DC"], hyps,
            notes="r < N/2 with q >= 1+N/2 is not covered by the theory")

    if q > 1.0 + r and not on_q_crit:
        return ClassificationOutcome(
            "outside-theory", ["DC"], hyps,
            notes="q > 1+r lies outside the reasonable region covered by the theory")

    if r > half_N and not on_r_crit:
        if on_q_crit:
            if query.bound_1_3_holds:
                return ClassificationOutcome(
                    "existence-subcritical-2", ["A.ii"], hyps,
                    data_condition="F(u0)^-r in L1_ul")
            return ClassificationOutcome(
                "outside-theory", ["A.ii"], hyps,
                notes="q = 1+r needs the f'F <= q bound; not established for this query")
        # q < 1+r
        return ClassificationOutcome(
            "existence-subcritical-1", ["A.i"], hyps,
            data_condition="F(u0)^-r in L1_ul")

    # r = N/2 with q < 1+r strictly (the corner was handled above)
    if query.data_class == "closure":
        return ClassificationOutcome(
            "existence-critical", ["A.iii"], hyps,
            data_condition="F(u0)^-(N/2) in the closure class")
    return ClassificationOutcome(
        "outside-theory", ["A.iii"], hyps,
        notes="critical line r = N/2 decides only for closure-class data")


def classify_f_beta(N: int, alpha: float, beta: float,
                    tol: float = 1e-9) -> ClassificationOutcome:
    """Complete classification for f(u) = u^(1+2/N) [log(u+e)]^beta.

    Solvability is decided by (alpha, beta) alone: existence holds for
    alpha > N/2 with beta >= -1, at alpha = N/2 for beta > -1 with
    closure-class gauge data, and for every datum once beta < -1;
    nonexistence data exist below the alpha threshold, including alpha =
    N/2 when beta = -1.
    """
    if N < 1:
        raise ParameterError("N must be >= 1")
    if alpha < 0:
        raise ParameterError("alpha must be >= 0")
    floor = -(1.0 + 2.0 / N) * kappa_root()
    if beta < floor - 1e-9:
        raise ParameterError(
            f"beta={beta} is below the monotonicity floor {floor:.6f}")
    half_N = 0.5 * N
    hyps = [
        HypothesisRecord("alpha vs N/2", None, margin=alpha - half_N),
        HypothesisRecord("beta vs -1", None, margin=beta + 1.0),
        HypothesisRecord("beta vs monotonicity floor", beta >= floor - 1e-9,
                         margin=beta - floor),
    ]
    beta_is_m1 = _close(beta, -1.0, tol)
    alpha_is_crit = _close(alpha, half_N, tol)

    if beta < -1.0 and not beta_is_m1:
        return ClassificationOutcome(
            "existence", ["D.i.c"], hyps,
            data_condition="every nonnegative u0 in L1_ul",
            subverdict="existence")
    if beta_is_m1:
        if alpha > half_N and not alpha_is_crit:
            return ClassificationOutcome(
                "existence", ["D.i.a"], hyps,
                data_condition="J_alpha(u0) in L1_ul", subverdict="existence")
        return ClassificationOutcome(
            "nonexistence", ["D.ii.b"], hyps,
            data_condition="some u0 in the closure class with J_alpha(u0) in it "
                           "admits no solution",
            subverdict="nonexistence")
    # beta > -1
    if alpha > half_N and not alpha_is_crit:
        return ClassificationOutcome(
            "existence", ["D.i.a"], hyps,
            data_condition="J_alpha(u0) in L1_ul", subverdict="existence")
    if alpha_is_crit:
        return ClassificationOutcome(
            "existence", ["D.i.b"], hyps,
            data_condition="J_(N/2)(u0) in the closure class",
            subverdict="existence")
    return ClassificationOutcome(
        "nonexistence", ["D.ii.a"], hyps,
        data_condition="some u0 in L1_ul with J_alpha(u0) in L1_ul admits no solution",
        subverdict="nonexistence")


# ---------------------------------------------------------------------------
# hypothesis checks behind the doubly-critical machinery


@dataclass
class TailConditionReport:
    """Outcome of the supersolution tail test.

    limit_estimate extrapolates G(eta) = Jtilde(eta) * T(eta) to eta = inf,
    where T is the tail integral of ftilde J' / J^(1+2/N); is_zero_limit and
    is_bounded grade the two usable conclusions (zero limit gives existence
    for plain L1_ul gauge data, boundedness for closure-class data).  A
    divergent tail clears both flags.
    """
    limit_estimate: float
    is_zero_limit: bool
    is_bounded: bool
    divergent: bool
    eta: np.ndarray
    G: np.ndarray
    tail: np.ndarray
    theta: float
    xi: float

    def to_dict(self):
        return {"limit_estimate": self.limit_estimate,
                "is_zero_limit": self.is_zero_limit,
                "is_bounded": self.is_bounded,
                "divergent": self.divergent}


def _log_tail_with_remainder(tau: np.ndarray, log_gt: np.ndarray):
    """log of the right-cumulative integral of g dtau on a geometric grid,
    with a fitted remainder beyond the grid.

    log_gt = log(g * tau); the trapezoid runs in w = log tau and accumulates
    through log-sum-exp so tails spanning hundreds of orders of magnitude
    stay representable.  Two remainder models compete on the last two
    decades: power decay in tau (integrand ~ tau^(m-1)) and power decay in
    log tau (integrand ~ (1/tau) w^m); the model with the smaller fit
    residual wins.  Anything slower than w^-1 per unit dlog(tau) is
    divergent.

    Returns (log_T, divergent) with log_T[i] ~= log int_{tau_i}^inf g dtau.
    """
    w = np.log(tau)
    if not np.all(np.isfinite(log_gt) | (log_gt == -np.inf)):
        return np.full_like(log_gt, np.inf), True

    log_seg = np.logaddexp(log_gt[1:], log_gt[:-1]) + np.log(0.5 * np.diff(w))
    log_inner = np.concatenate(
        [np.logaddexp.accumulate(log_seg[::-1])[::-1], [-np.inf]])

    if log_gt[-1] == -np.inf:
        return log_inner, False

    # fit on the last half decade: local enough that curvature of genuinely
    # faster-than-power tails does not bias the remainder
    k = max(8, int(len(tau) * (0.5 / max(np.log10(tau[-1] / tau[0]), 0.5))))
    x1, x2, y = w[-k:], np.log(w[-k:]), log_gt[-k:]
    m1, a1 = np.polyfit(x1, y, 1)
    m2, a2 = np.polyfit(x2, y, 1)
    res1 = float(np.sum((y - (a1 + m1 * x1)) ** 2))
    res2 = float(np.sum((y - (a2 + m2 * x2)) ** 2))

    def power_rem():
        return log_gt[-1] - np.log(-m1) if m1 < -0.02 else None

    def log_rem():
        return log_gt[-1] + np.log(w[-1]) - np.log(-m2 - 1.0) if m2 < -1.02 else None

    first, second = (power_rem, log_rem) if res1 <= res2 else (log_rem, power_rem)
    log_remainder = first()
    if log_remainder is None:
        alt = second()
        if alt is not None and ((second is power_rem and m1 < -0.05)
                                or (second is log_rem and m2 < -1.05)):
            log_remainder = alt
        else:
            return np.full_like(log_gt, np.inf), True
    return np.logaddexp(log_inner, log_remainder), False


def _tail_with_remainder(tau: np.ndarray, g: np.ndarray):
    """Value-space wrapper of _log_tail_with_remainder for moderate tails."""
    with np.errstate(divide="ignore"):
        log_gt = np.log(np.maximum(g, 0.0)) + np.log(tau)
    log_T, divergent = _log_tail_with_remainder(tau, log_gt)
    if divergent:
        return np.full_like(g, np.inf), True
    with np.errstate(over="ignore"):
        return np.exp(log_T), False


def check_tail_condition(spec: Nonlinearity, monitor: Monitor,
                         theta: float = 1.0, xi: float = 1.0, N: int = 1,
                         cfg: QuadratureConfig = DEFAULT_CONFIG,
                         u_max: float = 1e12,
                         points_per_decade: int = 2000) -> TailConditionReport:
    """Evaluate the running-sup tail conditions behind the supersolution
    construction.

    With ftilde(u) = sup_(xi<=s<=u) f(s)/J(s)^theta and Jtilde(u) =
    sup_(xi<=s<=u) J'(s)/J(s)^(1-theta), the quantity

        G(eta) = Jtilde(eta) * int_eta^inf ftilde J' / J^(1+2/N) dtau

    must tend to zero (existence from plain gauge data) or stay bounded
    (existence from closure-class data).  Sups are cumulative maxima over a
    dense geometric grid; the tail integral carries a fitted remainder for
    the slowly decaying logarithmic cases.
    """
    if not 0.0 < theta <= 1.0:
        raise ParameterError("theta must lie in (0, 1]")
    lo = max(xi, 1e-8)
    decades = np.log10(u_max / lo)
    n = max(int(decades * points_per_decade), 2000)
    tau = np.geomspace(lo, u_max, n)

    logJ = np.asarray(monitor.log_value(tau), dtype=float)
    logJp = np.asarray(monitor.log_deriv(tau), dtype=float)
    log_ftil = np.maximum.accumulate(spec.log_f(tau) - theta * logJ)
    log_Jtil = np.maximum.accumulate(logJp - (1.0 - theta) * logJ)

    log_g = log_ftil + logJp - (1.0 + 2.0 / N) * logJ
    log_T, divergent = _log_tail_with_remainder(tau, log_g + np.log(tau))

    # sample G from two decades above the sup base point up to half a decade
    # below the window end (the remainder fit contaminates the last stretch)
    eta_lo = max(lo * 100.0, 50.0)
    eta_hi = u_max * 10.0 ** (-0.5)
    idx = np.unique(np.searchsorted(tau, np.geomspace(eta_lo, eta_hi, 30)))
    idx = idx[idx < n]
    eta = tau[idx]
    with np.errstate(over="ignore"):
        G = np.exp(log_Jtil[idx] + log_T[idx])
        tail_at_eta = np.exp(log_T[idx])

    if divergent:
        return TailConditionReport(np.inf, False, False, True,
                                   eta, G, tail_at_eta, theta, xi)

    # grade the limit on the top decades, where the sups have settled.  A
    # limit that vanishes like a fractional power of 1/log(eta) defeats pure
    # polynomial extrapolation, so the verdict combines the extrapolated
    # value with half-window slopes of log G against log log eta.
    top = eta >= np.sqrt(eta[0] * eta[-1])
    eta_top, G_top = eta[top], np.maximum(G[top], 0.0)
    lim = sequence_limit(eta_top, G_top)
    x = np.log(np.log(eta_top))
    with np.errstate(divide="ignore"):
        y = np.log(np.maximum(G_top, 1e-300))
    half = len(eta_top) // 2
    s1 = float(np.polyfit(x[:half], y[:half], 1)[0]) if half >= 2 else 0.0
    s2 = float(np.polyfit(x[half:], y[half:], 1)[0]) if len(x) - half >= 2 else 0.0

    growing = s2 >= 0.3 and s1 >= 0.15
    g_end = float(G_top[-1])
    if g_end <= 1e-300:
        zero = True
    else:
        ratio = abs(lim.value) / g_end if np.isfinite(lim.value) else np.inf
        zero = (not growing) and (ratio <= 0.6 or abs(lim.value) <= 1e-12)
    bounded = bool(not growing and np.all(np.isfinite(G_top)))
    limit_value = 0.0 if zero else float(lim.value)
    return TailConditionReport(limit_value, zero, bounded, False,
                               eta, G, tail_at_eta, theta, xi)


@dataclass
class RefinedBoundReport:
    holds: bool
    margin: float
    at_u: float
    samples: list

    def to_dict(self):
        return {"holds": self.holds, "margin": self.margin, "at_u": self.at_u}


def check_refined_critical_bound(spec: Nonlinearity, alpha: float, rho: float,
                                 N: int,
                                 cfg: QuadratureConfig = DEFAULT_CONFIG,
                                 window=(1e3, 1e9), n: int = 30,
                                 tol: float = 1e-9) -> RefinedBoundReport:
    """Check the refined doubly-critical inequality

        f'(u) F(u) - q <= (N alpha / 2) rho / log(F(u)^(-N/2) + e),  q = 1+N/2,

    on a geometric window.  rho < 1 is the usable range; the threshold
    growth family attains exactly rho = 1 and must fail any strict check.
    """
    q = 1.0 + 0.5 * N
    lo, hi = window
    dlo, dhi = spec.diagnostic_window()
    lo, hi = max(lo, dlo), min(hi, dhi)
    us = np.geomspace(lo, hi, n)
    samples = []
    worst = np.inf
    at = us[0]
    for u in us:
        lhs = fF_product(spec, float(u), cfg) - q
        logF = eval_log_F(spec, float(u), cfg)
        h = np.exp(-0.5 * N * logF)
        rhs = 0.5 * N * alpha * rho / np.log(h + _E)
        m = rhs - lhs
        samples.append((float(u), float(lhs), float(rhs)))
        if m < worst:
            worst, at = m, u
    return RefinedBoundReport(holds=bool(worst >= -tol), margin=float(worst),
                              at_u=float(at), samples=samples)


@dataclass
class TransplantHypothesesReport:
    convexity_ok: bool
    growth_ok: bool
    delta_found: Optional[float]
    convexity_margins: list
    growth_note: str = ""

    def to_dict(self):
        return {"convexity_ok": self.convexity_ok, "growth_ok": self.growth_ok,
                "delta_found": self.delta_found, "note": self.growth_note}


def check_transplant_hypotheses(spec: Nonlinearity, beta: float, N: int,
                                cfg: QuadratureConfig = DEFAULT_CONFIG,
                                window=(1e2, 1e8),
                                n: int = 24) -> TransplantHypothesesReport:
    """Hypotheses under which nonexistence transplants from the log family.

    (i) convexity of F^-1 o F_beta on a ray, tested through the equivalent
        derivative comparison f'(F^-1(v)) >= f_beta'(F_beta^-1(v)) for small
        v > 0;
    (ii) a growth cap F(u) <= C u^(-2/N) [log(u+e)]^delta with delta < 1,
        tested by fitting the smallest admissible delta on the window.
    """
    from .nonlinearity import LogPowerLaw
    fb = LogPowerLaw.doubly_critical(N, beta)
    lo, hi = window

    # (i): compare derivatives at matched tail values
    u_ref = np.geomspace(np.sqrt(lo * hi), hi, n)
    margins = []
    ok = True
    for u in u_ref:
        from .errors import HeatLabError
        from .nonlinearity import eval_F_inverse
        v = np.exp(eval_log_F(fb, float(u), cfg))      # small tail value
        try:
            u_f = eval_F_inverse(spec, float(v), cfg)
        except HeatLabError:
            ok = False
            margins.append((float(v), np.nan))
            continue
        lhs = float(spec.fprime(u_f))
        rhs = float(fb.fprime(u))
        margins.append((float(v), lhs - rhs))
        if lhs < rhs * (1.0 - 1e-6) - 1e-12:
            ok = False

    # (ii): smallest delta in (0,1) with F(u) u^(2/N) [log(u+e)]^-delta bounded
    us = np.geomspace(lo, hi, 60)
    logF = np.array([eval_log_F(spec, float(u), cfg) for u in us])
    delta_found = None
    note = ""
    for delta in np.arange(0.05, 1.0, 0.05):
        R = logF + (2.0 / N) * np.log(us) - delta * np.log(np.log(us + _E))
        # bounded iff not increasing over the last decade
        m = us >= us[-1] / 10.0
        slope = np.polyfit(np.log(np.log(us[m] + _E)), R[m], 1)[0]
        if slope <= 1e-3 or np.max(R[m]) <= np.max(R) - 1e-12:
            delta_found = float(round(delta, 2))
            break
    if delta_found is None:
        note = "no delta < 1 keeps F(u) u^(2/N) log^-delta bounded on the window"
    return TransplantHypothesesReport(convexity_ok=bool(ok),
                                      growth_ok=delta_found is not None,
                                      delta_found=delta_found,
                                      convexity_margins=margins,
                                      growth_note=note)


@dataclass
class SourcewiseReport:
    r: float
    criterion_value: float
    solvable_for_all_data: bool
    citation: str
    trace: list

    def to_dict(self):
        return {"r": self.r,
                "criterion_value": (None if not np.isfinite(self.criterion_value)
                                    else self.criterion_value),
                "solvable_for_all_data": self.solvable_for_all_data,
                "citation": self.citation}


def check_sourcewise_solvability(spec: Nonlinearity, r: float, N: int,
                                 cfg: QuadratureConfig = DEFAULT_CONFIG,
                                 u_max: float = 1e12,
                                 points_per_decade: int = 2000) -> SourcewiseReport:
    """Solvability of the problem for *every* datum of a given integrability.

    r = 1: finiteness of the Osgood-type integral of sup(f(s)/s) / u^(1+2/N);
    r > 1: finiteness of limsup f(u)/u^(1+2r/N).  Divergence is reported with
    a per-decade partial-sum trace.
    """
    if r < 1:
        raise ParameterError("sourcewise criterion needs r >= 1")
    n = max(int(np.log10(u_max) * points_per_decade), 2000)
    u = np.geomspace(1.0, u_max, n)
    if abs(r - 1.0) <= 1e-12:
        log_ftil = np.maximum.accumulate(spec.log_f(u) - np.log(u))
        with np.errstate(over="ignore"):
            g = np.exp(log_ftil - (1.0 + 2.0 / N) * np.log(u))
        T, divergent = _tail_with_remainder(u, g)
        # partial sums from the finite inner part so the trace survives a
        # divergent remainder
        w = np.log(u)
        seg = 0.5 * (g[1:] * u[1:] + g[:-1] * u[:-1]) * np.diff(w)
        partial = np.concatenate([[0.0], np.cumsum(seg)])
        decade_marks = np.unique(np.searchsorted(u, 10.0 ** np.arange(1, int(np.log10(u_max)) + 1)))
        decade_marks = decade_marks[decade_marks < n]
        trace = [(float(u[i]), float(partial[i])) for i in decade_marks]
        value = np.inf if divergent else float(T[0])
        return SourcewiseReport(r=1.0, criterion_value=value,
                                solvable_for_all_data=not divergent,
                                citation="OSGOOD.1", trace=trace)
    ratio = np.exp(spec.log_f(u) - (1.0 + 2.0 * r / N) * np.log(u))
    behavior = fit_tail_behavior(u, ratio)
    growing = np.isfinite(behavior.power_exponent) and behavior.power_exponent > 2e-2
    est = limsup_estimate(u, ratio)
    value = np.inf if growing else float(est.value)
    trace = [(float(x), float(y)) for x, y in
             zip(u[:: max(n // 20, 1)], ratio[:: max(n // 20, 1)])]
    return SourcewiseReport(r=float(r), criterion_value=value,
                            solvable_for_all_data=bool(np.isfinite(value)),
                            citation="RATIO.r", trace=trace)


@dataclass
class ConditionVerdict:
    holds: Optional[bool]
    limit_value: float
    inconclusive: bool
    note: str = ""

    def to_dict(self):
        return {"holds": self.holds,
                "limit_value": (None if not np.isfinite(self.limit_value)
                                else self.limit_value),
                "inconclusive": self.inconclusive, "note": self.note}


@dataclass
class GrowthCorollariesReport:
    existence_eps: ConditionVerdict
    existence_log: ConditionVerdict
    nonexistence_eps: ConditionVerdict
    nonexistence_log: ConditionVerdict
    gamma_J: float
    delta_J: float

    def to_dict(self):
        return {"G.ex.eps": self.existence_eps.to_dict(),
                "G.ex.log": self.existence_log.to_dict(),
                "G.nx.eps": self.nonexistence_eps.to_dict(),
                "G.nx.log": self.nonexistence_log.to_dict(),
                "gamma_J": self.gamma_J, "delta_J": self.delta_J}


def check_growth_corollaries(spec: Nonlinearity, monitor: Monitor, N: int,
                             eps: float = 0.1, gamma: Optional[float] = None,
                             cfg: QuadratureConfig = DEFAULT_CONFIG,
                             window=(1e2, 1e10), n: int = 240) -> GrowthCorollariesReport:
    """Ratio conditions trading growth of f against a gauge J.

    existence_eps:   limsup f J' / J^(1+2/N-eps) < inf
    existence_log:   limsup f J' [log(J+e)]^(2 gamma/N) / J^(1+2/N) < inf, gamma > N/2
    nonexistence_eps: liminf f J' / J^(1+2/N+eps) > 0
    nonexistence_log: liminf of the same log-weighted ratio > 0 with
                      gamma in (0, N/2) and concavity of g_gamma^-1 o J

    Each verdict also requires its gauge-limit hypothesis (existence of the
    J J''/J'^2 limit, resp. its vanishing, resp. the third-derivative
    ratio limit).
    """
    u = np.geomspace(window[0], window[1], n)
    logJ = np.asarray(monitor.log_value(u), dtype=float)
    logJp = np.asarray(monitor.log_deriv(u), dtype=float)
    log_f = spec.log_f(u)
    two_over_N = 2.0 / N

    curvature = np.asarray(monitor.curvature_ratio(u), dtype=float)
    gma = sequence_limit(u, curvature)
    affine_gauge = bool(np.all(np.abs(curvature) < 1e-9))
    if affine_gauge:
        gma = sequence_limit(u, np.zeros_like(u))
        dlt = sequence_limit(u, np.zeros_like(u))
    else:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            J = np.exp(logJ)
            Jp = np.exp(logJp)
            Jpp = np.asarray(monitor.deriv2(u), dtype=float)
            Jppp = np.asarray(monitor.deriv3(u), dtype=float)
            third = J * Jppp / (Jp * Jpp)
        dlt = sequence_limit(u[np.isfinite(third)], third[np.isfinite(third)]) \
            if np.isfinite(third).sum() >= 4 else sequence_limit(u, np.full_like(u, np.nan))

    def ratio_verdict(log_ratio, want_sup: bool, extra_ok=True, note=""):
        with np.errstate(over="ignore"):
            ratio = np.exp(log_ratio)
        behavior = fit_tail_behavior(u, ratio)
        est = limsup_estimate(u, ratio, kind="sup" if want_sup else "inf")
        if want_sup:
            growing = np.isfinite(behavior.power_exponent) and behavior.power_exponent > 2e-2
            ok = (not growing) and np.isfinite(est.value) and bool(extra_ok)
            val = np.inf if growing else est.value
        else:
            vanishing = np.isfinite(behavior.power_exponent) and behavior.power_exponent < -2e-2
            ok = (not vanishing) and est.value > 0 and bool(extra_ok)
            val = 0.0 if vanishing else est.value
        return ConditionVerdict(holds=bool(ok), limit_value=float(val),
                                inconclusive=est.inconclusive, note=note)

    base = log_f + logJp - (1.0 + two_over_N) * logJ
    ex_eps = ratio_verdict(base + eps * logJ, True,
                           extra_ok=gma.converged,
                           note="" if gma.converged else "gauge limit J J''/J'^2 did not converge")

    # log(J+e) computed stably even where J overflows
    with np.errstate(over="ignore"):
        log_JpE = np.where(logJ > 35.0, logJ, np.log(np.exp(np.minimum(logJ, 35.0)) + _E))

    g_here = gamma if gamma is not None else 0.5 * N + 0.5
    logw = (2.0 * g_here / N) * np.log(log_JpE)
    g0 = gma.converged and abs(gma.value) <= 5e-2
    ex_log = ratio_verdict(base + logw, True,
                           extra_ok=g0 and g_here > 0.5 * N,
                           note="needs gamma > N/2 and J J''/J'^2 -> 0")

    nx_eps = ratio_verdict(base - eps * logJ, False,
                           extra_ok=dlt.converged or dlt.is_infinite,
                           note="" if (dlt.converged or dlt.is_infinite)
                           else "third-derivative ratio limit did not converge")

    g_nx = gamma if gamma is not None else 0.25 * N
    logw_nx = (2.0 * g_nx / N) * np.log(log_JpE)
    concave_ok = True
    if 0 < g_nx < 0.5 * N and np.all(logJ < 500.0):
        gg = LogWeight(g_nx)
        with np.errstate(over="ignore"):
            J = np.exp(logJ)
        w = np.asarray(gg.inverse(J), dtype=float)
        # divided second differences on the geometric grid (sign probe only)
        s1 = np.diff(w) / np.diff(u)
        d2 = 2.0 * np.diff(s1) / (u[2:] - u[:-2])
        scale = np.abs(w[1:-1]) / u[1:-1] ** 2 + 1e-300
        large = u[1:-1] > np.sqrt(window[0] * window[1])
        concave_ok = bool(np.all(d2[large] <= 1e-6 * scale[large]))
    else:
        concave_ok = False
    nx_log = ratio_verdict(base + logw_nx, False,
                           extra_ok=g0 and concave_ok,
                           note="needs gamma in (0, N/2), J J''/J'^2 -> 0 and "
                                "concavity of g_gamma^-1 o J")

    return GrowthCorollariesReport(
        existence_eps=ex_eps, existence_log=ex_log,
        nonexistence_eps=nx_eps, nonexistence_log=nx_log,
        gamma_J=float(gma.value) if gma.converged else np.nan,
        delta_J=float(dlt.value) if dlt.converged else np.nan)
