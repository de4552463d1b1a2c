"""Figure rendering for the CLI report path.

Every command that emits a delimited trace also renders a PNG of it next to
the data, so a run directory is self-describing.  Rendering is headless
(Agg) and deterministic.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

VERDICT_COLORS = {
    0: "#2a7f3f",   # existence (subcritical)
    1: "#6fbf73",   # existence (critical line)
    2: "#d1495b",   # nonexistence
    3: "#e8b23a",   # doubly critical corner
    4: "#9aa0a6",   # outside theory
}

VERDICT_CODES = {
    "existence-subcritical-1": 0,
    "existence-subcritical-2": 0,
    "existence-critical": 1,
    "nonexistence": 2,
    "doubly-critical": 3,
    "outside-theory": 4,
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)
    return path


def render_region_map(qs, rs, codes, N, path) -> Path:
    """Color map of verdict codes over the (q, r) plane."""
    qs = np.asarray(qs)
    rs = np.asarray(rs)
    codes = np.asarray(codes)
    fig, ax = plt.subplots(figsize=(6, 5))
    colors = [VERDICT_COLORS.get(int(c), "#000000") for c in codes]
    ax.scatter(qs, rs, c=colors, s=18, marker="s", linewidths=0)
    ax.axhline(N / 2.0, color="k", lw=0.6, ls="--")
    qq = np.linspace(1.0, max(qs.max(), 1 + rs.max()), 50)
    ax.plot(qq, qq - 1.0, color="k", lw=0.6)
    ax.plot([1 + N / 2.0], [N / 2.0], "k*", ms=12)
    ax.set_xlabel("q")
    ax.set_ylabel("r")
    ax.set_title(f"solvability regimes, N={N}")
    return _save(fig, path)


def render_profile(s, values, path, title="initial datum") -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(s, values, lw=1.2)
    ax.set_xlabel("radius s")
    ax.set_ylabel("u0(s)")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def render_exponent_profile(profile, path) -> Path:
    u = np.array([p[0] for p in profile.diagnostics])
    v = np.array([p[1] for p in profile.diagnostics])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogx(u, v, "o-", ms=3, lw=1.0, label="f'(u) F(u)")
    ax.axhline(profile.q_estimate, color="r", lw=0.8, ls="--",
               label=f"q = {profile.q_estimate:.6g}")
    ax.set_xlabel("u")
    ax.set_ylabel("f'F")
    ax.legend()
    ax.grid(alpha=0.3)
    return _save(fig, path)


def render_trace(steps, path, title="iteration trace") -> Path:
    ns = [s["n"] for s in steps]
    sup = [s["sup_norm"] for s in steps]
    ul = [s["ul_norm"] for s in steps]
    fig, ax = plt.subplots(figsize=(6, 4))
    ok = [i for i, v in enumerate(sup) if v is not None]
    ax.semilogy([ns[i] for i in ok], [sup[i] for i in ok], "o-", label="sup norm")
    ok = [i for i, v in enumerate(ul) if v is not None]
    ax.semilogy([ns[i] for i in ok], [ul[i] for i in ok], "s-", label="u.l. norm")
    ax.set_xlabel("iterate n")
    ax.legend()
    ax.set_title(title)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def render_H_trajectory(bf, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(bf.t, bf.H, lw=1.2)
    ax.set_xlabel("t")
    ax.set_ylabel("H(t)")
    title = "blow-up functional"
    if bf.blow_up_time:
        title += f" (blow-up near t = {bf.blow_up_time:.3g})"
    ax.set_title(title)
    ax.grid(alpha=0.3)
    return _save(fig, path)
