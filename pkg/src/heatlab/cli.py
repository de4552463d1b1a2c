"""Command-line front end: reproducible experiments with JSON + CSV reports
and rendered figures.

Exit codes: 0 success, 2 spec error, 3 numerical failure, 4 inconclusive.
Every report embeds the manifest hash of the run's parameters; reruns with
an identical manifest produce byte-identical data files (timestamps live in
a separate field).
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import figures
from .classifier import (RULES, RegimeQuery, check_refined_critical_bound,
                         check_sourcewise_solvability, check_tail_condition,
                         classify_f_beta, classify_qr_regime, solve_kappa)
from .errors import HeatLabError, ParameterError
from .heat_solver import (GridFunction, H0_from_mass, RadialGrid,
                          contradiction_sides, integrate_H, picard_iterate,
                          smoothing_exponent_probe, verify_supersolution)
from .initial_data import (build_counterexample, build_F_inverse_power,
                           closure_membership_heuristic, constant_profile,
                           gaussian_profile, ul_norm)
from .monitors import (Identity, LogTailGauge, LogWeight, PowerMonitor,
                       TailGauge)
from .nonlinearity import (eval_F, eval_f, eval_fprime, exponent_profile,
                           fF_product, spec_from_dict)
from .quadrature import QuadratureConfig
from .serialize import build_manifest, write_csv, write_json

EXIT_SPEC_ERROR = 2
EXIT_NUMERICAL = 3
EXIT_INCONCLUSIVE = 4


def _out_root(out):
    if out:
        return Path(out)
    return Path(os.environ.get("HEATLAB_OUT", "heatlab-runs"))


def _load_spec(path_or_json):
    """Nonlinearity spec from a JSON file path or an inline JSON string."""
    if path_or_json is None:
        raise click.UsageError("missing required option '--spec'")
    text = path_or_json
    p = Path(path_or_json)
    if p.exists():
        text = p.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"spec is not valid JSON: {exc}") from exc
    try:
        return spec_from_dict(doc)
    except ParameterError as exc:
        raise click.UsageError(str(exc)) from exc


def _parse_window(text):
    if text is None:
        return None
    try:
        lo, hi = (float(x) for x in text.split(":"))
        return lo, hi
    except ValueError as exc:
        raise click.UsageError(f"--window wants lo:hi, got {text!r}") from exc


def _parse_grid(text, N):
    if text is None:
        return RadialGrid(N)
    try:
        smin, smax, ppd = text.split(":")
        return RadialGrid(N, float(smin), float(smax), int(ppd))
    except (ValueError, ParameterError) as exc:
        raise click.UsageError(f"--grid wants smin:smax:ppd, got {text!r}") from exc


def _parse_sweep(text):
    if text is None:
        return None
    try:
        name, rng = text.split("=")
        lo, hi, n = rng.split(":")
        return name, np.geomspace(float(lo), float(hi), int(n))
    except ValueError as exc:
        raise click.UsageError(f"--sweep wants name=lo:hi:n, got {text!r}") from exc


def _build_data(family, params, N):
    if family == "counterexample":
        return build_counterexample(params.get("beta", 1.0),
                                    params.get("eps", 0.1), N)
    if family == "f-inverse-power":
        spec = spec_from_dict(params["f"])
        return build_F_inverse_power(spec, params["alpha"], params["r"], N)
    if family == "constant":
        return constant_profile(params.get("c", 1.0), N)
    if family == "gaussian":
        return gaussian_profile(params.get("t", 0.01), N,
                                params.get("mass", 1.0))
    raise click.UsageError(f"unknown data family {family!r}; expected one of "
                           "counterexample, f-inverse-power, constant, gaussian")


def _load_data(data, family, N, beta, eps, alpha, r, spec):
    if data:
        p = Path(data)
        doc = json.loads(p.read_text() if p.exists() else data)
        return _build_data(doc.get("family"), doc.get("params", {}), N)
    if family is None:
        raise click.UsageError("missing required option '--data' or '--family'")
    params = {}
    if beta is not None:
        params["beta"] = beta
    if eps is not None:
        params["eps"] = eps
    if alpha is not None:
        params["alpha"] = alpha
    if r is not None:
        params["r"] = r
    if family == "f-inverse-power":
        if spec is None:
            raise click.UsageError("f-inverse-power data needs '--spec'")
        params["f"] = spec.to_dict()
    return _build_data(family, params, N)


def _monitor_from_text(text, spec, N):
    if text is None or text == "identity":
        return Identity()
    kind, _, args = text.partition(":")
    kv = dict(item.split("=") for item in args.split(",") if item)
    if kind == "power":
        return PowerMonitor(float(kv.get("r", 1.0)))
    if kind == "log-weight":
        return LogWeight(float(kv.get("gamma", 1.0)))
    if kind == "tail-gauge":
        if spec is None:
            raise click.UsageError("tail-gauge monitor needs '--spec'")
        return TailGauge(spec, float(kv.get("r", 0.5 * N)))
    if kind == "log-tail-gauge":
        if spec is None:
            raise click.UsageError("log-tail-gauge monitor needs '--spec'")
        return LogTailGauge(spec, float(kv.get("alpha", 0.5 * N)), N)
    raise click.UsageError(f"unknown monitor {text!r}")


@click.group()
@click.option("--out", default=None, help="output directory "
              "(default: $HEATLAB_OUT or ./heatlab-runs)")
@click.option("--tol", default=1e-11, type=float, show_default=True,
              help="quadrature relative tolerance")
@click.option("--figures/--no-figures", "render", default=True,
              show_default=True, help="render PNG figures next to the data")
@click.pass_context
def main(ctx, out, tol, render):
    """Numerical laboratory for semilinear heat equations with singular
    initial data."""
    ctx.ensure_object(dict)
    ctx.obj["out"] = _out_root(out)
    ctx.obj["cfg"] = QuadratureConfig(rel_tol=tol)
    ctx.obj["render"] = render


def _finish(ctx, name, manifest, payload, exit_code=0):
    outdir = ctx.obj["out"] / name
    payload = {"manifest": manifest, **payload}
    path = write_json(outdir / f"{name}.json", payload)
    click.echo(f"report: {path}")
    if exit_code:
        sys.exit(exit_code)


@main.command()
@click.pass_context
def kappa(ctx):
    """Solve the transcendental monotonicity threshold log(k)+2 = k."""
    k = solve_kappa()
    manifest = build_manifest("kappa", {})
    _finish(ctx, "kappa", manifest,
            {"kappa": k.value, "residual": k.residual})


@main.command()
@click.option("--spec", default=None, help="nonlinearity spec (path or JSON)")
@click.option("--N", "N", type=int, required=True)
@click.option("--r", "r", type=float, default=None,
              help="integrability exponent for the (q, r) regime map")
@click.option("--q", "q", type=float, default=None,
              help="override the computed q exponent")
@click.option("--alpha", type=float, default=None,
              help="log-weight exponent (doubly critical log family mode)")
@click.option("--beta", type=float, default=None,
              help="log exponent of the doubly critical family")
@click.option("--data-class", type=click.Choice(["L1ul", "closure"]),
              default="L1ul", show_default=True)
@click.pass_context
def classify(ctx, spec, N, r, q, alpha, beta, data_class):
    """Classify a (nonlinearity, data-class) pair into a solvability regime."""
    cfg = ctx.obj["cfg"]
    try:
        if alpha is not None:
            if beta is None:
                spec_obj = _load_spec(spec)
                beta = spec_obj.params().get("beta")
                if beta is None:
                    raise click.UsageError(
                        "missing required field 'beta' (give --beta or a log_power spec)")
            outcome = classify_f_beta(N, alpha, beta)
            params = {"mode": "f_beta", "N": N, "alpha": alpha, "beta": beta}
        else:
            if r is None:
                raise click.UsageError("missing required option '--r' (or '--alpha')")
            spec_obj = _load_spec(spec) if (spec or q is None) else None
            prof = None
            if q is None:
                prof = exponent_profile(spec_obj, cfg, with_karamata=False,
                                        with_bound_check=True)
                q = prof.q_estimate
            bound = prof.bound_holds_fFq if prof is not None else None
            outcome = classify_qr_regime(
                RegimeQuery(N=N, r=r, q=q, data_class=data_class,
                            bound_1_3_holds=bound))
            params = {"mode": "qr", "N": N, "r": r, "q": q,
                      "data_class": data_class}
    except ParameterError as exc:
        click.echo(f"spec error: {exc}", err=True)
        sys.exit(EXIT_SPEC_ERROR)
    manifest = build_manifest("classify", params)
    _finish(ctx, "classify", manifest, {
        "verdict": outcome.verdict,
        "citations": outcome.citations,
        "cited_rules": {c: RULES.get(c, "") for c in outcome.citations},
        "outcome": outcome.to_dict(),
    })


@main.command()
@click.option("--spec", required=False, default=None)
@click.option("--window", default=None, help="hypothesis window lo:hi")
@click.pass_context
def profile(ctx, spec, window):
    """Exponent profile of a nonlinearity: q, p, diagnostics, Karamata data."""
    cfg = ctx.obj["cfg"]
    spec_obj = _load_spec(spec)
    win = _parse_window(window)
    try:
        prof = exponent_profile(spec_obj, cfg)
        if win:
            bound = None
            from .nonlinearity import check_fF_bound
            bound = check_fF_bound(spec_obj, prof.q_estimate, win, cfg)
            prof.bound_holds_fFq = bound.holds
    except HeatLabError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    manifest = build_manifest("profile", {"spec": spec_obj.to_dict(),
                                          "window": win})
    outdir = ctx.obj["out"] / "profile"
    rows = []
    for u, fF in prof.diagnostics:
        rows.append([u, eval_f(spec_obj, u), eval_fprime(spec_obj, u),
                     eval_F(spec_obj, u, cfg), fF])
    csv_path = write_csv(outdir / "profile.csv",
                         ["u", "f", "fprime", "F", "fF"], rows)
    click.echo(f"trace: {csv_path}")
    if ctx.obj["render"]:
        fig = figures.render_exponent_profile(prof, outdir / "profile.png")
        click.echo(f"figure: {fig}")
    karamata = None
    if prof.karamata is not None:
        karamata = {"rv_index": prof.karamata.rv_index,
                    "a_limit": prof.karamata.a_limit,
                    "b_limit": prof.karamata.b_limit,
                    "representation_residual": prof.karamata.representation_residual}
    _finish(ctx, "profile", manifest, {
        "exponents": prof.to_dict(),
        "karamata": karamata,
        "converged": prof.q_converged,
    }, exit_code=0 if prof.q_converged else EXIT_INCONCLUSIVE)


@main.command()
@click.option("--family", default=None,
              type=click.Choice(["counterexample", "f-inverse-power",
                                 "constant", "gaussian"]))
@click.option("--spec", default=None)
@click.option("--N", "N", type=int, required=True)
@click.option("--beta", type=float, default=None)
@click.option("--eps", type=float, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--r", "r", type=float, default=None)
@click.pass_context
def data(ctx, family, spec, N, beta, eps, alpha, r):
    """Build a catalogued initial datum and report its norms."""
    cfg = ctx.obj["cfg"]
    spec_obj = _load_spec(spec) if spec else None
    try:
        prof = _load_data(None, family, N, beta, eps, alpha, r, spec_obj)
        est = ul_norm(prof, 1.0, cfg=cfg)
        membership = closure_membership_heuristic(prof, cfg, levels=18)
    except ParameterError as exc:
        click.echo(f"spec error: {exc}", err=True)
        sys.exit(EXIT_SPEC_ERROR)
    manifest = build_manifest("data", {"family": family, "N": N,
                                       "params": prof.params})
    outdir = ctx.obj["out"] / "data"
    s = np.geomspace(max(prof.cutoff * 1e-8, 1e-12), prof.cutoff * 4.0, 400)
    csv_path = write_csv(outdir / "data.csv", ["s", "u0"],
                         list(zip(s.tolist(), prof(s).tolist())))
    click.echo(f"trace: {csv_path}")
    if ctx.obj["render"]:
        fig = figures.render_profile(s, prof(s), outdir / "data.png",
                                     title=prof.kind)
        click.echo(f"figure: {fig}")
    _finish(ctx, "data", manifest, {
        "profile": prof.to_dict(),
        "ul_norm": est.to_dict(),
        "closure_membership": membership.to_dict(),
    })


@main.command()
@click.option("--spec", default=None)
@click.option("--experiment", default="picard", show_default=True,
              type=click.Choice(["picard", "blowup", "smoothing"]))
@click.option("--data", "data_", default=None, help="data spec (path or JSON)")
@click.option("--family", default=None)
@click.option("--N", "N", type=int, default=1, show_default=True)
@click.option("--beta", type=float, default=None)
@click.option("--eps", type=float, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--r", "r", type=float, default=None)
@click.option("--T", "T", type=float, default=0.05, show_default=True)
@click.option("--steps", type=int, default=16, show_default=True)
@click.option("--max-iter", type=int, default=25, show_default=True)
@click.option("--grid", default=None, help="radial grid smin:smax:ppd")
@click.option("--rho", type=float, default=1e-2, show_default=True,
              help="ball radius for the blow-up functional")
@click.option("--h0", type=float, default=None,
              help="opening value of the blow-up functional")
@click.option("--c-star", type=float, default=1.0, show_default=True,
              help="free constant scaling the mass-derived H0")
@click.option("--sweep", default=None, help="parameter sweep name=lo:hi:n")
@click.pass_context
def simulate(ctx, spec, experiment, data_, family, N, beta, eps, alpha, r,
             T, steps, max_iter, grid, rho, h0, c_star, sweep):
    """Run a desk-scale experiment: Picard iteration, blow-up functional
    integration or the smoothing-exponent probe."""
    cfg = ctx.obj["cfg"]
    outdir = ctx.obj["out"] / "simulate"
    if experiment == "blowup":
        beta_b = beta if beta is not None else 1.0
        sweep_spec = _parse_sweep(sweep)
        rhos = sweep_spec[1] if sweep_spec and sweep_spec[0] == "rho_ball" else [rho]
        rows = []
        last = None
        for rh in rhos:
            H0 = h0
            if H0 is None:
                prof = _load_data(data_, family or "counterexample", N,
                                  beta_b, eps or 0.1, alpha, r, None)
                mass = prof.ball_integral(min(rh, prof.cutoff)).value
                H0 = H0_from_mass(mass, N, c_star)
            bf = integrate_H(beta_b, float(rh), H0, N=N, cfg=cfg)
            bs, gs = contradiction_sides(float(rh), beta_b, eps or 0.1, N)
            rows.append([rh, H0, bf.blow_up_time or "", bf.identity_residual,
                         bs, gs])
            last = bf
        csv_path = write_csv(outdir / "blowup.csv",
                             ["rho_ball", "H0", "blow_up_time",
                              "identity_residual", "bounded_side", "growing_side"],
                             rows)
        click.echo(f"trace: {csv_path}")
        if ctx.obj["render"] and last is not None:
            click.echo(f"figure: {figures.render_H_trajectory(last, outdir / 'blowup.png')}")
        manifest = build_manifest("simulate", {
            "experiment": "blowup", "beta": beta_b, "N": N,
            "rho": [float(x) for x in rhos], "c_star": c_star})
        _finish(ctx, "simulate", manifest, {
            "experiment": "blowup",
            "last": last.to_dict() if last else None})
        return

    spec_obj = _load_spec(spec)
    gr = _parse_grid(grid, N)
    try:
        prof = _load_data(data_, family, N, beta, eps, alpha, r, spec_obj)
    except ParameterError as exc:
        click.echo(f"spec error: {exc}", err=True)
        sys.exit(EXIT_SPEC_ERROR)

    if experiment == "smoothing":
        probe = smoothing_exponent_probe(prof, grid=gr, cfg=cfg)
        manifest = build_manifest("simulate", {
            "experiment": "smoothing", "spec": spec_obj.to_dict(), "N": N})
        write_csv(outdir / "smoothing.csv", ["t", "norm"],
                  list(zip(probe.ts.tolist(), probe.norms.tolist())))
        _finish(ctx, "simulate", manifest, {"experiment": "smoothing",
                                            "slope": probe.slope})
        return

    try:
        trace = picard_iterate(spec_obj, prof, T, n_time=steps,
                               max_iter=max_iter, grid=gr, cfg=cfg)
    except HeatLabError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    manifest = build_manifest("simulate", {
        "experiment": "picard", "spec": spec_obj.to_dict(),
        "data": prof.to_dict(), "T": T, "steps": steps,
        "grid": gr.key()})
    rows = [[s.n, s.sup_norm, s.ul_norm, s.residual, s.monotone]
            for s in trace.steps]
    csv_path = write_csv(outdir / "trace.csv",
                         ["n", "sup_norm", "ul_norm", "residual", "monotone"],
                         rows)
    click.echo(f"trace: {csv_path}")
    if ctx.obj["render"]:
        fig = figures.render_trace([s.to_dict() for s in trace.steps],
                                   outdir / "trace.png",
                                   title=f"{spec_obj.kind}: {trace.verdict}")
        click.echo(f"figure: {fig}")
    click.echo(f"verdict: {trace.verdict}")
    code = {"Converged": 0, "DivergedInf": EXIT_NUMERICAL,
            "Inconclusive": EXIT_INCONCLUSIVE}[trace.verdict]
    _finish(ctx, "simulate", manifest, {"experiment": "picard",
                                        "trace": trace.to_dict()},
            exit_code=code)


@main.command()
@click.option("--spec", required=False, default=None)
@click.option("--monitor", default="identity", show_default=True,
              help="gauge: identity | power:r=.. | log-weight:gamma=.. | "
                   "tail-gauge:r=.. | log-tail-gauge:alpha=..")
@click.option("--sigma", type=float, default=0.5, show_default=True)
@click.option("--data", "data_", default=None)
@click.option("--family", default=None)
@click.option("--N", "N", type=int, default=1, show_default=True)
@click.option("--beta", type=float, default=None)
@click.option("--eps", type=float, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--r", "r", type=float, default=None)
@click.option("--T", "T", type=float, default=0.01, show_default=True)
@click.option("--steps", type=int, default=12, show_default=True)
@click.option("--grid", default=None)
@click.pass_context
def verify(ctx, spec, monitor, sigma, data_, family, N, beta, eps, alpha, r,
           T, steps, grid):
    """Verify the gauge supersolution inequality on a space-time grid."""
    cfg = ctx.obj["cfg"]
    spec_obj = _load_spec(spec)
    gr = _parse_grid(grid, N)
    mon_obj = _monitor_from_text(monitor, spec_obj, N)
    try:
        prof = _load_data(data_, family, N, beta, eps, alpha, r, spec_obj)
        rep = verify_supersolution(spec_obj, mon_obj, sigma, prof, T,
                                   n_time=steps, grid=gr, cfg=cfg)
    except ParameterError as exc:
        click.echo(f"spec error: {exc}", err=True)
        sys.exit(EXIT_SPEC_ERROR)
    except HeatLabError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    manifest = build_manifest("verify", {
        "spec": spec_obj.to_dict(), "monitor": monitor, "sigma": sigma,
        "T": T, "N": N})
    outdir = ctx.obj["out"] / "verify"
    write_csv(outdir / "margins.csv", ["t", "min_margin"],
              [[p["t"], p["min_margin"]] for p in rep.per_time])
    click.echo(f"holds: {rep.holds} (min margin {rep.min_margin:.3e})")
    _finish(ctx, "verify", manifest, {
        "holds": rep.holds, "min_margin": rep.min_margin,
        "jensen_min_margin": rep.jensen_min_margin,
    }, exit_code=0 if rep.holds else EXIT_INCONCLUSIVE)


@main.command("figure-map")
@click.option("--N", "N", type=int, required=True)
@click.option("--q", "q_range", default=None, help="q grid lo:hi:n")
@click.option("--r", "r_range", default=None, help="r grid lo:hi:n")
@click.pass_context
def figure_map(ctx, N, q_range, r_range):
    """Region map of the (q, r) plane as CSV (+ rendered map)."""
    def parse_range(text, default):
        if text is None:
            return default
        lo, hi, n = text.split(":")
        return np.linspace(float(lo), float(hi), int(n))

    qs = parse_range(q_range, np.linspace(1.0, 1.0 + N, 41))
    rs = parse_range(r_range, np.linspace(0.05, float(N), 40))
    if qs.min() < 1.0 - 1e-12 or qs.max() > 1.0 + N + 1e-9:
        raise click.UsageError(f"q grid must stay within [1, 1+N]")
    if rs.min() <= 0 or rs.max() > N + 1e-9:
        raise click.UsageError(f"r grid must stay within (0, N]")
    rows = []
    for r in rs:
        for q in qs:
            out = classify_qr_regime(RegimeQuery(N=N, r=float(r), q=float(q),
                                                 data_class="closure",
                                                 bound_1_3_holds=True))
            rows.append([q, r, figures.VERDICT_CODES[out.verdict]])
    manifest = build_manifest("figure-map", {
        "N": N, "q": [float(qs.min()), float(qs.max()), len(qs)],
        "r": [float(rs.min()), float(rs.max()), len(rs)]})
    outdir = ctx.obj["out"] / "figure-map"
    csv_path = write_csv(outdir / "region_map.csv", ["q", "r", "verdict_code"], rows)
    click.echo(f"trace: {csv_path}")
    if ctx.obj["render"]:
        arr = np.array(rows, dtype=float)
        fig = figures.render_region_map(arr[:, 0], arr[:, 1], arr[:, 2], N,
                                        outdir / "region_map.png")
        click.echo(f"figure: {fig}")
    _finish(ctx, "figure-map", manifest,
            {"codes": sorted({int(r[2]) for r in rows}),
             "legend": {v: k for k, v in figures.VERDICT_CODES.items()}})


if __name__ == "__main__":
    main()
