import numpy as np
import pytest

from heatlab import monitors as mon
from heatlab import nonlinearity as nl
from heatlab.quadrature import central_difference


class TestTailGauge:
    def test_power_closed_forms(self):
        # f = u^3: F = u^-2/2, so F^-2 = 4 u^4 with derivatives 16u^3, 48u^2
        tg = mon.TailGauge(nl.PowerLaw(3.0), 2.0)
        for u in (1.0, 5.0, 40.0):
            assert float(tg.value(u)) == pytest.approx(4 * u ** 4, rel=1e-7)
            assert float(tg.deriv(u)) == pytest.approx(16 * u ** 3, rel=1e-7)
            assert float(tg.deriv2(u)) == pytest.approx(48 * u ** 2, rel=1e-7)

    def test_inverse_roundtrip(self):
        tg = mon.TailGauge(nl.PowerLaw(3.0), 2.0)
        assert float(tg.inverse(4.0 * 5.0 ** 4)) == pytest.approx(5.0, rel=1e-8)

    def test_curvature_ratio_formula(self):
        # J J''/J'^2 = (r + 1 - f'F)/r, constant for pure powers
        tg = mon.TailGauge(nl.PowerLaw(3.0), 2.0)
        got = np.asarray(tg.curvature_ratio(np.array([2.0, 20.0])))
        assert np.allclose(got, (2.0 + 1.0 - 1.5) / 2.0, atol=1e-7)

    def test_log_forms_match_direct(self):
        tg = mon.TailGauge(nl.LogPowerLaw(2.0, 1.0), 1.0)
        u = np.array([3.0, 30.0, 300.0])
        assert np.allclose(tg.log_value(u), np.log(tg.value(u)), atol=1e-10)
        assert np.allclose(tg.log_deriv(u), np.log(tg.deriv(u)), atol=1e-10)

    def test_log_forms_survive_overflow(self):
        # exp nonlinearity: J = F^-r overflows while log J stays finite
        ep = nl.ExpPowerLaw(1.0)
        tg = mon.TailGauge(ep, 0.5, cache_range=(1e-2, 1e4))
        lv = float(tg.log_value(2000.0))
        assert np.isfinite(lv) and lv > 700.0


class TestLogTailGauge:
    def test_value_and_deriv_against_direct(self, cfg):
        fb = nl.LogPowerLaw.doubly_critical(2, 1.0)
        jg = mon.LogTailGauge(fb, 1.0, 2)
        u = 50.0
        F = nl.eval_F(fb, u, cfg)
        h = 1.0 / F
        want = h * np.log(h + np.e)
        assert float(jg.value(u)) == pytest.approx(want, rel=1e-7)
        fd = central_difference(lambda x: float(jg.value(x)), u)
        assert float(jg.deriv(u)) == pytest.approx(fd, rel=1e-5)

    def test_inverse_roundtrip(self):
        fb = nl.LogPowerLaw.doubly_critical(2, 1.0)
        jg = mon.LogTailGauge(fb, 1.0, 2)
        v = float(jg.value(80.0))
        assert float(jg.inverse(v)) == pytest.approx(80.0, rel=1e-6)

    def test_log_value_matches_direct_in_moderate_range(self):
        fb = nl.LogPowerLaw.doubly_critical(1, 0.5)
        jg = mon.LogTailGauge(fb, 0.5, 1)
        u = np.array([5.0, 50.0])
        assert np.allclose(jg.log_value(u), np.log(jg.value(u)), rtol=1e-9)


class TestLogWeight:
    def test_derivatives_match_fd(self):
        g = mon.LogWeight(1.5)
        for u in (0.5, 7.0, 300.0):
            fd1 = central_difference(lambda x: float(g.value(x)), u)
            assert float(g.deriv(u)) == pytest.approx(fd1, rel=1e-7)
            fd2 = central_difference(lambda x: float(g.deriv(x)), u)
            assert float(g.deriv2(u)) == pytest.approx(fd2, rel=1e-5, abs=1e-12)

    def test_inverse(self):
        g = mon.LogWeight(0.5)
        assert float(g.inverse(float(g.value(12.0)))) == pytest.approx(12.0, rel=1e-7)


class TestConvexityFloor:
    def test_power_monitor_convex_everywhere(self):
        assert mon.PowerMonitor(2.0).convexity_floor() <= 1e-2

    def test_tail_gauge_floor_finite_in_subcritical_regime(self):
        # q = 1.5 < 1 + r for r = 2: gauge eventually convex
        tg = mon.TailGauge(nl.PowerLaw(3.0), 2.0)
        floor = tg.convexity_floor()
        assert np.isfinite(floor)

    def test_identity_all_floors(self):
        ident = mon.Identity()
        assert ident.convexity_floor() <= 1e-2
        assert np.allclose(ident.curvature_ratio(np.array([1.0, 2.0])), 0.0)
