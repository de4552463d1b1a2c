import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heatlab import classifier as cls
from heatlab import monitors as mon
from heatlab import nonlinearity as nl
from heatlab.errors import ParameterError

KAPPA = 3.1461932206205825


class TestKappa:
    def test_value_and_residual(self):
        k = cls.solve_kappa()
        assert k.residual <= 1e-9
        assert 3.0 < k.value < 3.2
        assert abs(k.value - 3.146) <= 1e-3

    def test_defining_equation(self):
        k = cls.solve_kappa()
        assert abs(np.log(k.value) + 2.0 - k.value) <= 1e-9


class TestQRRegime:
    @pytest.mark.parametrize("N,r,q,dc,expected", [
        (2, 2.0, 1.2, "L1ul", "existence-subcritical-1"),
        (2, 0.4, 1.2, "L1ul", "nonexistence"),
        (2, 1.0, 2.0, "closure", "doubly-critical"),
        (2, 1.0, 1.5, "closure", "existence-critical"),
        (2, 1.0, 1.5, "L1ul", "outside-theory"),
        (1, 2.0, 2.5, "L1ul", "existence-subcritical-1"),
        (3, 0.5, 1.4, "L1ul", "nonexistence"),
    ])
    def test_examples(self, N, r, q, dc, expected):
        out = cls.classify_qr_regime(cls.RegimeQuery(N=N, r=r, q=q, data_class=dc))
        assert out.verdict == expected
        assert out.citations

    def test_boundary_case_needs_bound(self):
        q1 = cls.RegimeQuery(N=1, r=2.0, q=3.0)
        assert cls.classify_qr_regime(q1).verdict == "outside-theory"
        q2 = cls.RegimeQuery(N=1, r=2.0, q=3.0, bound_1_3_holds=True)
        assert cls.classify_qr_regime(q2).verdict == "existence-subcritical-2"

    def test_beyond_reasonable_region(self):
        out = cls.classify_qr_regime(cls.RegimeQuery(N=2, r=0.5, q=3.0))
        assert out.verdict == "outside-theory"

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 4), st.floats(0.01, 5.0),
           st.floats(0.0, 1.0))
    def test_partition_property(self, N, r, frac):
        # every admissible (q, r) receives exactly one verdict with a citation
        q = 1.0 + frac * r
        out = cls.classify_qr_regime(
            cls.RegimeQuery(N=N, r=r, q=q, data_class="closure",
                            bound_1_3_holds=True))
        assert out.verdict in cls.VERDICTS
        assert len(out.citations) >= 1

    def test_invalid_queries(self):
        with pytest.raises(ParameterError):
            cls.RegimeQuery(N=0, r=1.0, q=1.5)
        with pytest.raises(ParameterError):
            cls.RegimeQuery(N=1, r=-1.0, q=1.5)
        with pytest.raises(ParameterError):
            cls.RegimeQuery(N=1, r=1.0, q=0.5)


class TestLogFamilyClassification:
    @pytest.mark.parametrize("N,alpha,beta,verdict,clause", [
        (2, 1.5, 0.0, "existence", "D.i.a"),
        (2, 0.5, 0.0, "nonexistence", "D.ii.a"),
        (2, 1.0, -2.0, "existence", "D.i.c"),
        (2, 1.0, 0.5, "existence", "D.i.b"),
        (2, 1.0, -1.0, "nonexistence", "D.ii.b"),
        (2, 1.2, -1.0, "existence", "D.i.a"),
        (1, 0.2, 3.0, "nonexistence", "D.ii.a"),
        (3, 2.0, -1.0, "existence", "D.i.a"),
    ])
    def test_examples(self, N, alpha, beta, verdict, clause):
        out = cls.classify_f_beta(N, alpha, beta)
        assert out.verdict == verdict
        assert out.citations == [clause]

    def test_below_floor_rejected(self):
        with pytest.raises(ParameterError):
            cls.classify_f_beta(2, 1.0, -(1 + 1.0) * KAPPA - 0.5)

    def test_totality_and_disjointness(self):
        # every admissible pair classifies, and the clause sets partition
        N = 2
        floor = -(1.0 + 2.0 / N) * KAPPA
        seen = set()
        betas = np.concatenate([np.linspace(floor + 1e-6, 2.0, 21), [-1.0]])
        for alpha in np.linspace(0.0, 2.0, 21):
            for beta in betas:
                out = cls.classify_f_beta(N, float(alpha), float(beta))
                assert out.verdict in ("existence", "nonexistence")
                assert len(out.citations) == 1
                seen.add(out.citations[0])
        assert seen == {"D.i.a", "D.i.b", "D.i.c", "D.ii.a", "D.ii.b"}


class TestTailCondition:
    def test_subcritical_gauge_zero_limit_with_closed_form_bound(self, cfg):
        # f = u^3, J = F^-r with r = 2, N = 1: the quantity is bounded by
        # r^2 F(eta)^(2r/N - 1)/(2r/N - 1) and tends to zero
        f3 = nl.PowerLaw(3.0)
        J = mon.TailGauge(f3, 2.0)
        rep = cls.check_tail_condition(f3, J, theta=0.5, xi=1.0, N=1, u_max=1e8)
        assert rep.is_zero_limit
        for e, g in zip(rep.eta, rep.G):
            F = f3.closed_form_F(float(e))
            bound = 4.0 * F ** 3 / 3.0
            assert g <= bound * 1.05

    def test_log_family_beta_minus2_zero_limit(self):
        fb = nl.LogPowerLaw.doubly_critical(1, -2.0)
        rep = cls.check_tail_condition(fb, mon.Identity(), theta=1.0, xi=1.0, N=1)
        assert rep.is_zero_limit and rep.is_bounded
        # the tail itself decays like the first power of 1/log(eta+e)
        for e, t in zip(rep.eta, rep.tail):
            if 1e3 <= e <= 1e6:
                assert t * np.log(e + np.e) == pytest.approx(1.0, abs=0.05)

    def test_pure_critical_power_divergent(self):
        f0 = nl.LogPowerLaw.doubly_critical(1, 0.0)
        rep = cls.check_tail_condition(f0, mon.Identity(), theta=1.0, xi=1.0, N=1)
        assert rep.divergent
        assert not rep.is_zero_limit and not rep.is_bounded

    def test_doubly_critical_gauge_paths(self):
        # alpha > N/2 gives a zero limit, alpha = N/2 only boundedness
        fb = nl.LogPowerLaw.doubly_critical(2, 1.0)
        rep_hi = cls.check_tail_condition(fb, mon.LogTailGauge(fb, 1.5, 2),
                                          theta=1.0, xi=2.0, N=2,
                                          u_max=1e10, points_per_decade=400)
        assert rep_hi.is_zero_limit
        rep_crit = cls.check_tail_condition(fb, mon.LogTailGauge(fb, 1.0, 2),
                                            theta=1.0, xi=2.0, N=2,
                                            u_max=1e10, points_per_decade=400)
        assert rep_crit.is_bounded and not rep_crit.is_zero_limit

    def test_theta_validated(self):
        with pytest.raises(ParameterError):
            cls.check_tail_condition(nl.PowerLaw(2.0), mon.Identity(), theta=1.5)


class TestRefinedCriticalBound:
    def test_log_family_positive_beta_holds(self, cfg):
        fb = nl.LogPowerLaw.doubly_critical(2, 1.0)
        rep = cls.check_refined_critical_bound(fb, 1.0, 0.5, 2,
                                               window=(1e3, 1e8), n=10)
        assert rep.holds

    def test_threshold_family_fails_strict_rho(self, cfg):
        # this family attains the inequality exactly at rho = 1
        spec = nl.CriticalCompositeThreshold(1.0, 2)
        rep = cls.check_refined_critical_bound(spec, 1.0, 0.9, 2,
                                               window=(1e3, 1e8), n=10)
        assert not rep.holds

    def test_pure_power_any_rho(self, cfg):
        # f'F - q vanishes identically, so any rho > 0 works
        rep = cls.check_refined_critical_bound(nl.PowerLaw(2.0), 1.0, 0.3, 2,
                                               window=(1e3, 1e8), n=8)
        assert rep.holds and rep.margin > 0

    def test_negative_beta_needs_big_rho(self, cfg):
        # for beta in (-1, 0) the bound needs rho > -N beta/(2 alpha)
        fb = nl.LogPowerLaw.doubly_critical(2, -0.5)
        ok = cls.check_refined_critical_bound(fb, 1.0, 0.8, 2,
                                              window=(1e4, 1e9), n=10)
        bad = cls.check_refined_critical_bound(fb, 1.0, 0.2, 2,
                                               window=(1e4, 1e9), n=10)
        assert ok.holds and not bad.holds


class TestTransplantHypotheses:
    def test_log_family_itself(self):
        # F^-1 o F_beta is the identity for f = f_beta: trivially convex
        fb = nl.LogPowerLaw.doubly_critical(2, 1.0)
        rep = cls.check_transplant_hypotheses(fb, 1.0, 2)
        assert rep.convexity_ok and rep.growth_ok

    def test_strong_fF_bound_gives_convexity(self):
        # f'F = 3 >= 1 + N/2 = 2 for f = u^1.5, N = 2
        rep = cls.check_transplant_hypotheses(nl.PowerLaw(1.5), 1.0, 2)
        assert rep.convexity_ok

    def test_growth_cap_fitted_delta(self):
        # for the log family with beta' in (-1, 0], any delta > -beta' works
        rep = cls.check_transplant_hypotheses(
            nl.LogPowerLaw.doubly_critical(2, -0.5), 1.0, 2)
        assert rep.growth_ok
        assert rep.delta_found is not None and rep.delta_found > 0.45

    def test_growth_fails_below_minus_one(self):
        rep = cls.check_transplant_hypotheses(
            nl.LogPowerLaw.doubly_critical(2, -1.5), 1.0, 2)
        assert not rep.growth_ok


class TestSourcewise:
    def test_linear_source_r1(self):
        lin = nl.TabulatedNonlinearity(np.geomspace(1e-3, 1e13, 60),
                                       np.geomspace(1e-3, 1e13, 60))
        rep = cls.check_sourcewise_solvability(lin, 1.0, 2)
        assert rep.solvable_for_all_data
        assert rep.criterion_value == pytest.approx(1.0, rel=1e-3)

    def test_critical_power_diverges(self):
        rep = cls.check_sourcewise_solvability(
            nl.LogPowerLaw.doubly_critical(2, 0.0), 1.0, 2)
        assert not rep.solvable_for_all_data
        assert np.isinf(rep.criterion_value)
        assert len(rep.trace) > 3  # partial sums recorded

    def test_strong_log_damping_converges(self):
        rep = cls.check_sourcewise_solvability(
            nl.LogPowerLaw.doubly_critical(2, -2.0), 1.0, 2)
        assert rep.solvable_for_all_data and np.isfinite(rep.criterion_value)

    def test_supercritical_ratio_r2(self):
        rep = cls.check_sourcewise_solvability(nl.PowerLaw(3.0), 2.0, 2)
        assert rep.solvable_for_all_data
        assert rep.criterion_value == pytest.approx(1.0, rel=1e-6)

    def test_ratio_divergent(self):
        rep = cls.check_sourcewise_solvability(nl.PowerLaw(4.0), 2.0, 2)
        assert not rep.solvable_for_all_data


class TestGrowthCorollaries:
    def test_exact_threshold_ratio(self):
        # f = J^(1+2/N)/J' up to a constant (J = u, N = 2, f = u^2):
        # the eps-room conditions fail on both sides
        J = mon.PowerMonitor(1.0)
        f0 = nl.LogPowerLaw.doubly_critical(2, 0.0)
        rep = cls.check_growth_corollaries(f0, J, 2, eps=0.1, gamma=0.5)
        assert not rep.existence_eps.holds
        assert not rep.nonexistence_eps.holds

    def test_eps_room_flips_the_verdicts(self):
        J = mon.PowerMonitor(1.0)
        rep_lo = cls.check_growth_corollaries(nl.PowerLaw(1.5), J, 2, eps=0.1)
        assert rep_lo.existence_eps.holds
        rep_hi = cls.check_growth_corollaries(nl.PowerLaw(2.1), J, 2, eps=0.1)
        assert rep_hi.nonexistence_eps.holds

    def test_log_weighted_nonexistence(self):
        # J = u [log(u+e)]^gamma with gamma in (0, N/2) and
        # liminf f/u^(1+2/N) > 0
        J = mon.LogWeight(0.5)
        f0 = nl.LogPowerLaw.doubly_critical(2, 0.0)
        rep = cls.check_growth_corollaries(f0, J, 2, gamma=0.5)
        assert rep.nonexistence_log.holds
        assert abs(rep.gamma_J) < 1e-3


class TestCrossModuleConsistency:
    @pytest.mark.parametrize("alpha,beta", [(1.5, 1.0), (1.5, -0.5)])
    def test_existence_clause_matches_tail_condition(self, alpha, beta):
        # classification says existence via the gauge clause; the tail
        # machinery run end-to-end on the same pair must agree
        N = 2
        out = cls.classify_f_beta(N, alpha, beta)
        assert out.verdict == "existence"
        fb = nl.LogPowerLaw.doubly_critical(N, beta)
        rep = cls.check_tail_condition(fb, mon.LogTailGauge(fb, alpha, N),
                                       theta=1.0, xi=2.0, N=N,
                                       u_max=1e10, points_per_decade=400)
        assert rep.is_zero_limit

    def test_classification_split_matches_sourcewise(self):
        # the beta = 0 / beta = -2 split matches the classification clauses
        sw0 = cls.check_sourcewise_solvability(
            nl.LogPowerLaw.doubly_critical(2, 0.0), 1.0, 2)
        sw2 = cls.check_sourcewise_solvability(
            nl.LogPowerLaw.doubly_critical(2, -2.0), 1.0, 2)
        assert not sw0.solvable_for_all_data
        assert sw2.solvable_for_all_data
        assert cls.classify_f_beta(2, 0.5, -2.0).verdict == "existence"
        assert cls.classify_f_beta(2, 0.5, 0.0).verdict == "nonexistence"
