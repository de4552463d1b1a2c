import numpy as np
import pytest

from heatlab import heat_solver as hs
from heatlab import initial_data as idata
from heatlab import monitors as mon
from heatlab import nonlinearity as nl
from heatlab.errors import ParameterError, QuadratureError


class ZeroSource(nl.Nonlinearity):
    kind = "zero"

    def f(self, u):
        return np.zeros_like(np.asarray(u, dtype=float))

    def log_f(self, u):
        return np.full_like(np.asarray(u, dtype=float), -np.inf)

    def fprime(self, u):
        return np.zeros_like(np.asarray(u, dtype=float))


@pytest.fixture(scope="module")
def gaussian_gf(grid_n1):
    return hs.GridFunction.from_profile(idata.gaussian_profile(0.01, 1), grid_n1)


class TestSemigroupInvariants:
    def test_constant_preserved_exactly(self, grid_n1):
        # force the kernel path (is_constant shortcut bypassed by the cap)
        u = hs.GridFunction(grid_n1, np.full_like(grid_n1.nodes, 3.0), 3.0 + 1e-15)
        out = hs.apply_semigroup(u, 0.01)
        assert np.max(np.abs(out.values - 3.0)) <= 1e-10

    @pytest.mark.parametrize("N", [2, 3])
    def test_constant_preserved_other_dims(self, N):
        g = hs.RadialGrid(N, 1e-6, 12.0, 48)
        u = hs.GridFunction(g, np.full_like(g.nodes, 2.0), 2.0 + 1e-15)
        out = hs.apply_semigroup(u, 0.02)
        assert np.max(np.abs(out.values - 2.0)) <= 1e-10

    def test_order_preserved(self, grid_n1, gaussian_gf):
        hi = hs.GridFunction(grid_n1, gaussian_gf.values + 0.25,
                             gaussian_gf.far_value + 0.25)
        a = hs.apply_semigroup(gaussian_gf, 0.01)
        b = hs.apply_semigroup(hi, 0.01)
        assert np.min(b.values - a.values) >= 0.25 - 1e-9

    def test_gaussian_self_reproduction(self, grid_n1):
        s0, t = 0.01, 0.02
        u = hs.GridFunction.from_profile(idata.gaussian_profile(s0, 1), grid_n1)
        out = hs.apply_semigroup(u, t)
        want = idata.gaussian_profile(s0 + t, 1)(grid_n1.nodes)
        assert np.max(np.abs(out.values - want)) / np.max(want) < 1e-6

    def test_semigroup_composition(self, grid_n1, gaussian_gf):
        a = hs.apply_semigroup(hs.apply_semigroup(gaussian_gf, 0.01), 0.01)
        b = hs.apply_semigroup(gaussian_gf, 0.02)
        err = np.max(np.abs(a.values - b.values))
        assert err <= 1e-6 * gaussian_gf.sup_norm()

    def test_t_zero_rejected(self, gaussian_gf):
        with pytest.raises(ParameterError):
            hs.apply_semigroup(gaussian_gf, 0.0)

    def test_time_floor_for_singular_core(self, grid_n1):
        prof = idata.build_counterexample(1.0, 0.1, 1)
        u = hs.GridFunction.from_profile(prof, grid_n1)
        with pytest.raises(QuadratureError):
            hs.apply_semigroup(u, grid_n1.s_min ** 2 * 0.5)


class TestSmoothingProbe:
    def test_spike_slope_n1(self, grid_n1):
        probe = hs.smoothing_exponent_probe(idata.gaussian_profile(1e-5, 1),
                                            grid=grid_n1)
        assert abs(probe.slope + 0.5) <= 0.025

    def test_spike_slope_n2(self):
        g = hs.RadialGrid(2, 1e-6, 12.0, 48)
        probe = hs.smoothing_exponent_probe(idata.gaussian_profile(1e-5, 2),
                                            grid=g)
        assert abs(probe.slope + 1.0) <= 0.05

    def test_constant_slope_zero(self, grid_n1):
        probe = hs.smoothing_exponent_probe(idata.constant_profile(2.0, 1),
                                            grid=grid_n1)
        assert abs(probe.slope) <= 1e-6

    def test_l2_to_sup_slope_n2(self):
        # N/2 (1/2 - 0) = 1/2 for a datum saturating square integrability:
        # a narrow gaussian is in L2 with the sup norm decaying at -N/4 ...
        # use the analytic gaussian: ||S(t) G(, s0)||_inf = (4 pi (t+s0))^(-N/2)
        g = hs.RadialGrid(2, 1e-6, 12.0, 48)
        probe = hs.smoothing_exponent_probe(idata.gaussian_profile(1e-5, 2),
                                            r_from=2.0, r_to=np.inf,
                                            t_lo=1e-3, t_hi=1e-2, grid=g)
        # the spike saturates every L^r, so the sup slope is the full -N/2
        assert abs(probe.slope + 1.0) <= 0.05


class TestPicard:
    def test_zero_source_converges_immediately(self, grid_n1):
        prof = idata.constant_profile(1.5, 1)
        tr = hs.picard_iterate(ZeroSource(), prof, T=0.05, n_time=8,
                               first_step_levels=4, grid=grid_n1)
        assert tr.verdict == "Converged"
        assert tr.steps[-1].n == 2  # u_2 = u_1 exactly
        assert tr.steps[-1].residual <= 1e-12

    @pytest.mark.parametrize("T,want", [(0.25, 4.0 / 3.0), (0.5, 2.0)])
    def test_square_source_matches_ode(self, grid_n1, T, want):
        tr = hs.picard_iterate(nl.PowerLaw(2.0),
                               hs.GridFunction.constant(grid_n1, 1.0),
                               T=T, n_time=int(256 * T), first_step_levels=6,
                               max_iter=60, conv_tol=1e-9)
        assert tr.verdict == "Converged"
        got = tr.final_states[-1].sup_norm()
        assert abs(got - want) / want <= 1e-4

    def test_ladder_monotone(self, grid_n1):
        prof = idata.RadialProfile("d", 1, 1.0, 1.0,
                                   lambda s: np.asarray(s, float) ** -0.2)
        tr = hs.picard_iterate(nl.PowerLaw(3.0), prof, T=0.02, n_time=8,
                               first_step_levels=6, max_iter=12, grid=grid_n1)
        assert all(s.monotone for s in tr.steps)
        sups = [s.sup_norm for s in tr.steps if np.isfinite(s.sup_norm)]
        assert all(b >= a - 1e-9 for a, b in zip(sups, sups[1:]))

    def test_divergence_detected(self, grid_n1):
        # enormous constant datum under u^2 blows up long before T
        tr = hs.picard_iterate(nl.PowerLaw(2.0),
                               hs.GridFunction.constant(grid_n1, 50.0),
                               T=0.5, n_time=16, first_step_levels=4,
                               max_iter=40)
        assert tr.verdict == "DivergedInf"
        assert tr.diverged_at is not None


class TestJensen:
    def test_convex_gauges_never_violated(self, grid_n1, rng):
        profiles = [idata.constant_profile(2.0, 1),
                    idata.gaussian_profile(0.02, 1, mass=1.5),
                    idata.RadialProfile("p", 1, 1.0, 1.0,
                                        lambda s: np.minimum(np.asarray(s, float) ** -0.3, 40.0))]
        gauges = [mon.PowerMonitor(2.0), mon.PowerMonitor(3.5), mon.LogWeight(1.0)]
        worst = -np.inf
        for prof in profiles:
            u = hs.GridFunction.from_profile(prof, grid_n1)
            for J in gauges:
                Ju = hs.GridFunction(grid_n1, np.asarray(J.value(u.values)),
                                     float(J.value(u.far_value)))
                for t in (0.004, 0.02, 0.09):
                    viol = np.max(np.asarray(J.value(hs.apply_semigroup(u, t).values))
                                  - hs.apply_semigroup(Ju, t).values)
                    worst = max(worst, float(viol))
        assert worst <= 1e-8

    def test_concave_reversed(self, grid_n1):
        u = hs.GridFunction.from_profile(
            idata.gaussian_profile(0.02, 1, mass=2.0), grid_n1)
        u = hs.GridFunction(grid_n1, u.values + 1.0, u.far_value + 1.0)
        K = mon.PowerMonitor(0.5)       # concave
        Ku = hs.GridFunction(grid_n1, np.asarray(K.value(u.values)),
                             float(K.value(u.far_value)))
        gap = np.asarray(K.value(hs.apply_semigroup(u, 0.02).values)) \
            - hs.apply_semigroup(Ku, 0.02).values
        assert np.min(gap) >= -1e-8


class TestSupersolution:
    def test_zero_source_holds(self, grid_n1):
        prof = idata.RadialProfile("d", 1, 1.0, 1.0,
                                   lambda s: np.asarray(s, float) ** -0.2)
        rep = hs.verify_supersolution(ZeroSource(), mon.PowerMonitor(2.0), 0.5,
                                      prof, T=0.01, n_time=6,
                                      first_step_levels=4, grid=grid_n1)
        assert rep.holds and rep.min_margin > 0

    def test_subcritical_tail_gauge_holds(self, grid_n1):
        f3 = nl.PowerLaw(3.0)
        J = mon.TailGauge(f3, 2.0)
        prof = idata.RadialProfile("d", 1, 1.0, 1.0,
                                   lambda s: np.asarray(s, float) ** -0.2)
        rep = hs.verify_supersolution(f3, J, 0.5, prof, T=0.01, n_time=8,
                                      first_step_levels=5, grid=grid_n1)
        assert rep.holds
        assert rep.jensen_min_margin >= -1e-8

    def test_margin_stable_under_refinement(self):
        f3 = nl.PowerLaw(3.0)
        prof = idata.RadialProfile("d", 1, 1.0, 1.0,
                                   lambda s: np.asarray(s, float) ** -0.2)
        margins = []
        for ppd in (24, 48):
            g = hs.RadialGrid(1, 1e-6, 12.0, ppd)
            J = mon.TailGauge(f3, 2.0)
            rep = hs.verify_supersolution(f3, J, 0.5, prof, T=0.01, n_time=6,
                                          first_step_levels=4, grid=g)
            margins.append(rep.min_margin)
        assert abs(margins[1] - margins[0]) <= 0.05 * abs(margins[1]) + 1e-6


class TestBlowupFunctional:
    def test_identity_residual(self):
        bf = hs.integrate_H(1.0, 1e-2, 0.05, N=1)
        assert bf.identity_residual <= 1e-6

    def test_ratio_limit(self):
        # the bracketed ratio tends to (2^(beta+1) - 1)^(-N/2)
        vals = [hs.contradiction_sides(rho, 1.0, 0.1, 1)[0]
                for rho in (1e-1, 1e-2, 1e-3, 1e-4)]
        assert all(abs(v - 3.0 ** -0.5) <= 1e-3 for v in vals)

    def test_growing_side_grows(self):
        g = [hs.contradiction_sides(rho, 1.0, 0.1, 1)[1]
             for rho in (1e-1, 1e-2, 1e-3, 1e-4)]
        assert all(b > a for a, b in zip(g, g[1:]))

    def test_small_mass_no_blowup(self):
        bf = hs.integrate_H(1.0, 1e-2, 1e-6, N=1)
        assert bf.blow_up_time is None

    def test_large_mass_blows_up_inside(self):
        bf = hs.integrate_H(1.0, 1e-2, 10.0, N=1, guard=1e9)
        assert bf.blow_up_time is not None
        assert 1e-4 < bf.blow_up_time < 1e-2

    def test_H0_from_mass_prefactor(self):
        got = hs.H0_from_mass(2.0, 1, c_star=1.0)
        want = 2.0 * 3.0 ** -0.5 * (4.0 * np.pi) ** -0.5
        assert got == pytest.approx(want, rel=1e-12)

    def test_parameter_validation(self):
        with pytest.raises(ParameterError):
            hs.integrate_H(1.0, 2.0, 0.1)
        with pytest.raises(ParameterError):
            hs.integrate_H(-1.0, 0.1, 0.1)


class TestScaleInvariance:
    def test_critical_exponent_preserves_mass(self):
        # || lam^(2/(p-1)) u0(lam .) ||_{L^rc} is lam-independent exactly at
        # rc = N(p-1)/2, checked on whole-space integrals of compact data
        p, N = 3.0, 1
        rc = N * (p - 1.0) / 2.0

        def bump(s):
            # smooth compact bump: quartic contact keeps the panel
            # quadrature at the identity's accuracy for every scaling
            s = np.asarray(s, dtype=float)
            return np.maximum(1.0 - s ** 2, 0.0) ** 4

        base = idata.RadialProfile("bump", N, 4.0, 0.0, bump)
        ref = base.ball_integral(4.0, weight=lambda x: x ** rc).value
        for lam in (0.5, 2.0, 5.0):
            scaled = idata.RadialProfile(
                "bump", N, 4.0, 0.0,
                lambda s, lam=lam: lam ** (2.0 / (p - 1.0)) * bump(lam * np.asarray(s)))
            val = scaled.ball_integral(4.0, weight=lambda x: x ** rc).value
            assert abs(val - ref) / ref <= 1e-8

    def test_non_critical_exponent_breaks_it(self):
        p, N = 3.0, 1

        def bump(s):
            return np.maximum(1.0 - np.asarray(s, dtype=float) ** 2, 0.0) ** 4

        base = idata.RadialProfile("bump", N, 4.0, 0.0, bump)
        r = 2.0  # != rc = 1
        ref = base.ball_integral(4.0, weight=lambda x: x ** r).value
        scaled = idata.RadialProfile(
            "bump", N, 4.0, 0.0,
            lambda s: 2.0 ** (2.0 / (p - 1.0)) * bump(2.0 * np.asarray(s)))
        val = scaled.ball_integral(4.0, weight=lambda x: x ** r).value
        assert abs(val - ref) / ref > 0.1


class TestBoundedGaugeNorm:
    def test_converged_run_keeps_tail_gauge_norm_bounded(self, grid_n1):
        # numerical reflection of the a-priori bound on ||F(u(t))^-r||
        f3 = nl.PowerLaw(3.0)
        prof = idata.RadialProfile("d", 1, 1.0, 1.0,
                                   lambda s: np.asarray(s, float) ** -0.2)
        tr = hs.picard_iterate(f3, prof, T=0.05, n_time=16,
                               first_step_levels=8, max_iter=30, grid=grid_n1)
        assert tr.verdict == "Converged"
        J = mon.TailGauge(f3, 2.0)

        def gauge_norm(state):
            vals = np.asarray(J.value(np.maximum(state.values, 1e-8)))
            return hs.GridFunction(grid_n1, vals,
                                   float(J.value(max(state.far_value, 1e-8)))).ul_norm(1.0)

        u0 = hs.GridFunction.from_profile(prof, grid_n1)
        base = gauge_norm(u0)
        along = [gauge_norm(st) for st in tr.final_states[::5]]
        assert all(x <= 3.0 * base for x in along)


class TestGridFunction:
    def test_ul_norm_constant(self, grid_n1):
        u = hs.GridFunction.constant(grid_n1, 2.0)
        assert u.ul_norm(1.0) == pytest.approx(4.0, rel=1e-6)

    def test_from_profile_carries_core_mass(self, grid_n1):
        prof = idata.build_counterexample(1.0, 0.1, 1)
        u = hs.GridFunction.from_profile(prof, grid_n1)
        assert u.core_mass_fn is not None
        m = u.core_mass_fn(grid_n1.s_min)
        assert np.isfinite(m) and m > 0

    def test_grid_mismatch_rejected(self, grid_n1):
        other = hs.RadialGrid(1, 1e-6, 12.0, 24)
        with pytest.raises(ParameterError):
            hs.GridFunction.constant(grid_n1, 1.0) + hs.GridFunction.constant(other, 1.0)
