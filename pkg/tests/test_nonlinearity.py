import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heatlab import nonlinearity as nl
from heatlab.errors import (DivergentTailError, ParameterError,
                            UnsupportedOperationError)
from heatlab.quadrature import central_difference

CATALOG = [
    nl.PowerLaw(2.0),
    nl.PowerLaw(3.0),
    nl.LogPowerLaw(2.0, 1.0),
    nl.LogPowerLaw.doubly_critical(2, -1.0),
    nl.ExpPowerLaw(1.0),
    nl.ExpPowerLaw(0.5),
    nl.ExpLogPowerLaw(2.0),
    nl.LogDampedPower(2.0),
    nl.IteratedExp(2),
    nl.CriticalCompositeThreshold(1.0, 2),
]


class TestEvalF:
    def test_power_square(self):
        assert nl.eval_f(nl.PowerLaw(2.0), 3.0) == pytest.approx(9.0, rel=1e-12)

    def test_log_power_zero_exponent_is_pure_power(self):
        # beta = 0 removes the log factor entirely
        spec = nl.LogPowerLaw(3.0, 0.0)
        assert nl.eval_f(spec, 2.0) == pytest.approx(8.0, rel=1e-12)

    def test_log_damped_power_at_zero(self):
        # denominator equals 1 at u = 0 by the choice of the shift, so
        # f(0) = a^p = e^4 for p = 2 (frozen from exp(4))
        spec = nl.LogDampedPower(2.0)
        assert nl.eval_f(spec, 0.0) == pytest.approx(54.598150033144236, rel=1e-12)

    def test_negative_argument_rejected(self):
        with pytest.raises(Exception):
            nl.eval_f(nl.PowerLaw(2.0), -1.0)

    def test_monotonicity_floor_rejected(self):
        floor = -(1.0 + 2.0 / 2) * 3.1461932206205825
        with pytest.raises(ParameterError):
            nl.LogPowerLaw.doubly_critical(2, floor - 0.01)
        # exactly at the floor is allowed
        nl.LogPowerLaw.doubly_critical(2, floor + 1e-6)


class TestEvalBigF:
    def test_power2(self):
        assert nl.eval_F(nl.PowerLaw(2.0), 4.0) == pytest.approx(0.25, rel=1e-10)

    def test_power3(self):
        # u^(1-p)/(p-1) at p=3, u=2
        assert nl.eval_F(nl.PowerLaw(3.0), 2.0) == pytest.approx(0.125, rel=1e-10)

    def test_log_damped_closed_form_value(self):
        # log(u+a)/(u+a)^(p-1) at p=2, u=10; frozen from the closed form
        got = nl.eval_F(nl.LogDampedPower(2.0), 10.0)
        assert got == pytest.approx(0.16423209127988964, rel=1e-10)

    @pytest.mark.parametrize("spec", [nl.PowerLaw(2.0), nl.PowerLaw(3.5),
                                      nl.LogDampedPower(2.0),
                                      nl.LogDampedPower(3.0)])
    def test_closed_form_oracle(self, spec, cfg):
        for u in np.geomspace(1.0, 1e6, 13):
            quad = nl.eval_F(spec, float(u), cfg)
            closed = spec.closed_form_F(float(u))
            assert abs(quad - closed) / closed < 1e-8

    def test_divergent_tail_reported_distinctly(self):
        class Linear(nl.Nonlinearity):
            kind = "linear"

            def log_f(self, u):
                return np.log(np.asarray(u, dtype=float))

            def log_fprime(self, u):
                return np.zeros_like(np.asarray(u, dtype=float))

        with pytest.raises(DivergentTailError):
            nl.eval_F(Linear(), 1.0)

    def test_tabulated_refuses_tail(self):
        spec = nl.TabulatedNonlinearity([1.0, 10.0, 100.0], [1.0, 100.0, 10000.0])
        with pytest.raises(UnsupportedOperationError):
            nl.eval_F(spec, 2.0)

    def test_F_strictly_decreasing(self):
        spec = nl.LogPowerLaw(2.0, 1.0)
        us = np.geomspace(0.5, 1e4, 9)
        Fs = [nl.eval_F(spec, float(u)) for u in us]
        assert all(a > b for a, b in zip(Fs, Fs[1:]))

    def test_F_at_zero(self):
        import scipy.special as sp
        assert np.isinf(nl.F_at_zero(nl.PowerLaw(3.0)))
        got = nl.F_at_zero(nl.ExpPowerLaw(2.0))
        assert got == pytest.approx(sp.gamma(1.5), rel=1e-8)


class TestFInverse:
    def test_power2(self):
        assert nl.eval_F_inverse(nl.PowerLaw(2.0), 0.5) == pytest.approx(2.0, rel=1e-10)

    def test_power3_inverse_of_example(self):
        assert nl.eval_F_inverse(nl.PowerLaw(3.0), 0.125) == pytest.approx(2.0, rel=1e-10)

    def test_log_power_root_validated_by_reevaluation(self, cfg):
        # bracketing root against the quadrature F, checked by plugging back
        spec = nl.LogPowerLaw.doubly_critical(2, 1.0)
        v = 0.01
        u = nl.eval_F_inverse(spec, v, cfg)
        assert abs(nl.eval_F(spec, u, cfg) - v) <= 1e-9 * max(1.0, v)

    def test_inverse_consistency_six_decades(self, cfg):
        spec = nl.LogPowerLaw(2.0, 1.0)
        for v in np.geomspace(1e-5, 10.0, 13):
            u = nl.eval_F_inverse(spec, float(v), cfg)
            assert abs(nl.eval_F(spec, u, cfg) - v) <= 10 * cfg.rel_tol * max(1.0, v) + 1e-13

    def test_clamped_inverse_at_finite_F0(self, cfg):
        spec = nl.ExpPowerLaw(2.0)  # F(0+) finite
        F0 = nl.F_at_zero(spec, cfg)
        assert nl.eval_F_inverse(spec, F0 * 2.0, cfg, clamp=True) == spec.u_min

    def test_monotone_decreasing_in_v(self):
        spec = nl.PowerLaw(3.0)
        vs = np.geomspace(1e-4, 1.0, 8)
        us = [nl.eval_F_inverse(spec, float(v)) for v in vs]
        assert all(a > b for a, b in zip(us, us[1:]))


class TestDerivatives:
    @staticmethod
    def _representable_us(spec, n=7):
        # keep f and f' inside float range so the direct forms exist
        lo, hi = spec.diagnostic_window()
        us = np.geomspace(max(lo, 1.0), min(hi, 1e6), 24)
        ok = [float(u) for u in us
              if float(spec.log_fprime(u)) < 280.0 and float(spec.log_f(u)) < 280.0]
        return ok[:: max(len(ok) // n, 1)]

    @pytest.mark.parametrize("spec", CATALOG, ids=lambda s: repr(s))
    def test_fd_matches_analytic(self, spec):
        for u in self._representable_us(spec):
            analytic = float(spec.fprime(u))
            fd = central_difference(lambda x: float(spec.f(x)), float(u))
            assert abs(fd - analytic) <= 1e-6 * max(abs(analytic), 1e-12)

    @pytest.mark.parametrize("spec", CATALOG, ids=lambda s: repr(s))
    def test_dlog_f_consistent(self, spec):
        u = self._representable_us(spec)[-1]
        assert float(spec.dlog_f(u)) == pytest.approx(
            float(spec.fprime(u)) / float(spec.f(u)), rel=1e-8)

    @pytest.mark.parametrize("spec", CATALOG, ids=lambda s: repr(s))
    def test_increment_consistent(self, spec):
        lo, hi = spec.diagnostic_window()
        u = float(np.sqrt(max(lo, 1.0) * min(hi, 1e4)))
        for s in (u * 1e-4, u * 0.1, u):
            direct = float(spec.log_f(u + s) - spec.log_f(u))
            inc = float(spec.log_f_increment(u, s))
            assert abs(inc - direct) <= 1e-7 * max(1.0, abs(direct))


@st.composite
def catalog_specs(draw):
    which = draw(st.integers(0, 3))
    if which == 0:
        return nl.PowerLaw(draw(st.floats(1.2, 6.0)))
    if which == 1:
        return nl.LogPowerLaw(draw(st.floats(1.5, 4.0)), draw(st.floats(-1.5, 3.0)))
    if which == 2:
        return nl.ExpPowerLaw(draw(st.floats(0.5, 2.0)))
    return nl.LogDampedPower(draw(st.floats(1.5, 4.0)))


class TestStructuralInvariants:
    @settings(max_examples=25, deadline=None)
    @given(catalog_specs())
    def test_f_nondecreasing_on_samples(self, spec):
        lo, hi = spec.diagnostic_window()
        u = np.geomspace(1e-3, min(hi, 1e8), 120)
        lf = spec.log_f(u)
        assert np.all(np.diff(lf) >= -1e-10)

    @settings(max_examples=10, deadline=None)
    @given(catalog_specs())
    def test_F_decreasing_on_samples(self, spec):
        us = np.geomspace(1.0, 1e4, 6)
        logFs = [nl.eval_log_F(spec, float(u)) for u in us]
        assert all(a > b for a, b in zip(logFs, logFs[1:]))


class TestExponentProfile:
    def test_power_conjugacy(self):
        prof = nl.exponent_profile(nl.PowerLaw(3.0), with_karamata=False,
                                   with_bound_check=False)
        assert prof.q_estimate == pytest.approx(1.5, abs=1e-8)
        assert prof.p_estimate == pytest.approx(3.0, abs=1e-6)
        assert prof.conjugacy_residual < 1e-8

    def test_exp_power_superpower(self):
        prof = nl.exponent_profile(nl.ExpPowerLaw(1.0), with_karamata=False,
                                   with_bound_check=False)
        assert prof.q_estimate == pytest.approx(1.0, abs=1e-6)
        assert np.isinf(prof.p_estimate)

    def test_log_power_family(self):
        prof = nl.exponent_profile(nl.LogPowerLaw(2.0, 5.0),
                                   with_karamata=False, with_bound_check=False)
        assert prof.q_estimate == pytest.approx(2.0, abs=1e-3)
        assert prof.conjugacy_residual < 1e-3

    def test_diagnostics_are_kept(self):
        prof = nl.exponent_profile(nl.PowerLaw(2.0), with_karamata=False,
                                   with_bound_check=False)
        assert len(prof.diagnostics) >= 5
        us = [d[0] for d in prof.diagnostics]
        assert all(b == pytest.approx(2 * a) for a, b in zip(us, us[1:]))

    @pytest.mark.parametrize("spec", CATALOG, ids=lambda s: repr(s))
    def test_q_at_least_one(self, spec):
        # the conjugate exponent lives in [1, inf] whenever the limit exists
        prof = nl.exponent_profile(spec, with_karamata=False,
                                   with_bound_check=False)
        assert prof.q_estimate >= 1.0 - 1e-6


class TestFBoundCheck:
    def test_exp_power_superlinear_exponent_holds(self):
        # p >= 1 keeps f'/f^(1/q) nondecreasing and the bound holds
        assert nl.check_fF_bound(nl.ExpPowerLaw(2.0), 1.0).holds

    def test_exp_power_sublinear_exponent_fails(self):
        rep = nl.check_fF_bound(nl.ExpPowerLaw(0.5), 1.0)
        assert not rep.holds
        assert rep.worst_margin > 1e-4

    def test_log_damped_exceeds_q(self):
        rep = nl.check_fF_bound(nl.LogDampedPower(3.0), 1.5)
        assert not rep.holds

    def test_iterated_exp_holds(self):
        assert nl.check_fF_bound(nl.IteratedExp(2), 1.0, window=(2.0, 512.0)).holds


class TestKaramata:
    def test_power_homogeneous(self):
        kp = nl.karamata_profile(nl.PowerLaw(3.0))
        assert np.allclose(kp.a, 3.0, atol=1e-9)
        assert kp.rv_index == pytest.approx(3.0, abs=1e-6)
        assert kp.representation_residual < 1e-8

    def test_exp_is_rapidly_varying(self):
        kp = nl.karamata_profile(nl.ExpPowerLaw(1.0))
        assert np.isinf(kp.rv_index)

    def test_log_power_index_against_ratio_oracle(self):
        # independent ratio-test oracle at u = 1e6, 1e8 with linear
        # extrapolation in 1/log(u)
        spec = nl.LogPowerLaw(2.0, 1.0)
        r = []
        for u in (1e6, 1e8):
            r.append(float((spec.log_f(2 * u) - spec.log_f(u)) / np.log(2.0)))
        h1, h2 = 1.0 / np.log(1e6), 1.0 / np.log(1e8)
        oracle = r[1] + (r[1] - r[0]) * h2 / (h1 - h2)
        kp = nl.karamata_profile(spec)
        assert kp.rv_index == pytest.approx(2.0, abs=5e-3)
        assert kp.rv_index == pytest.approx(oracle, abs=5e-3)

    def test_b_limit_positive_for_regular_variation(self):
        kp = nl.karamata_profile(nl.PowerLaw(2.5), base_point=10.0)
        assert np.isfinite(kp.b_limit) and kp.b_limit > 0


class TestCriticalComposite:
    def test_closed_form_F_matches_quadrature(self, cfg):
        spec = nl.CriticalCompositeThreshold(1.0, 2)
        for u in (5.0, 50.0, 5e3):
            quad = nl.eval_F(spec, float(u), cfg)
            closed = float(spec.closed_form_F(u))
            assert abs(quad - closed) / closed < 5e-6

    def test_exact_excess_matches_quadrature(self, cfg):
        spec = nl.CriticalCompositeThreshold(1.0, 2)
        for u in (1e3, 1e6):
            exact = float(spec.excess_over_q(u))
            quad = nl.fF_product(spec, float(u), cfg) - 2.0
            assert abs(exact - quad) <= 2e-6 * max(abs(exact), 1e-6)


def test_serialization_roundtrip():
    for spec in CATALOG:
        doc = spec.to_dict()
        back = nl.spec_from_dict(doc)
        assert back.to_dict() == doc
    with pytest.raises(ParameterError):
        nl.spec_from_dict({"kind": "nope"})
    with pytest.raises(ParameterError):
        nl.spec_from_dict({"kind": "power", "params": {}})
