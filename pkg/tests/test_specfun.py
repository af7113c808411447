import math
import threading

import numpy as np
import pytest
from scipy.special import exp1 as scipy_exp1

from fbrate import gauss_laguerre, ln_gamma, tricomi_u_int_a
from fbrate.specfun import _RULE_CACHE, _exp1

from conftest import E1_AT_1, U_2_1_2, U_3_HALF_2


class TestLnGamma:
    def test_one(self):
        assert ln_gamma(1.0) == 0.0

    def test_half(self):
        assert ln_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-14)

    def test_ten(self):
        assert ln_gamma(10.0) == pytest.approx(math.log(362880.0), rel=1e-14)

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            ln_gamma(0.0)


class TestExp1Oracle:
    def test_at_one(self):
        assert _exp1(1.0) == pytest.approx(E1_AT_1, rel=1e-14)

    def test_against_scipy_grid(self):
        for z in np.geomspace(1e-3, 50.0, 60):
            assert _exp1(float(z)) == pytest.approx(float(scipy_exp1(z)), rel=1e-13)


class TestTricomiU:
    def test_u_1_0_1_identity(self):
        # integral of e^{-t}(1+t)^{-2} equals 1 - e*E1(1)
        expected = 1.0 - math.e * _exp1(1.0)
        assert tricomi_u_int_a(1, 0.0, 1.0) == pytest.approx(expected, rel=1e-12)

    def test_u_1_1_identity(self):
        # U(1;1;z) = e^z E1(z)
        for z in (0.3, 1.0, 7.0, 80.0):
            expected = math.exp(z) * _exp1(z) if z < 700 else None
            assert tricomi_u_int_a(1, 1.0, z) == pytest.approx(expected, rel=1e-11)

    def test_frozen_goldens(self):
        assert tricomi_u_int_a(3, 0.5, 2.0) == pytest.approx(U_3_HALF_2, rel=1e-11)
        assert tricomi_u_int_a(2, 1.0, 2.0) == pytest.approx(U_2_1_2, rel=1e-11)

    def test_rate_bridge_identity(self):
        # U(1; 2-A; z) equals the direct integral of (1+g)^-A e^{-z g}
        from scipy.integrate import quad
        for a_exp in (0.5, 1.0, 2.0, 3.7):
            for z in (0.05, 0.4, 2.0, 25.0):
                direct = quad(lambda g: (1.0 + g) ** -a_exp * math.exp(-z * g),
                              0.0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
                assert tricomi_u_int_a(1, 2.0 - a_exp, z) == pytest.approx(
                    direct, rel=1e-9)

    def test_kummer_recurrence_in_a(self):
        # U(a-1,b,z) + (b - 2a - z) U(a,b,z) + a (a - b + 1) U(a+1,b,z) = 0
        for b in (-1.5, 0.0, 0.5, 2.0):
            for z in (0.2, 1.0, 5.0, 40.0):
                for a in (2, 3, 5):
                    u_m = tricomi_u_int_a(a - 1, b, z)
                    u_0 = tricomi_u_int_a(a, b, z)
                    u_p = tricomi_u_int_a(a + 1, b, z)
                    residual = u_m + (b - 2 * a - z) * u_0 + a * (a - b + 1) * u_p
                    scale = max(abs(u_m), abs((b - 2 * a - z) * u_0),
                                abs(a * (a - b + 1) * u_p))
                    assert abs(residual) <= 1e-8 * scale

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            tricomi_u_int_a(0, 1.0, 1.0)
        with pytest.raises(ValueError):
            tricomi_u_int_a(2, 1.0, 0.0)

    def test_asymptotic_and_quadrature_agree(self):
        # straddle the internal switchover
        for j, b in ((1, 0.0), (3, 1.5), (6, 6.0)):
            for z in (30.0, 80.0, 300.0):
                loose = tricomi_u_int_a(j, b, z, rel_tol=1e-8)
                tight = tricomi_u_int_a(j, b, z, rel_tol=1e-12)
                assert loose == pytest.approx(tight, rel=1e-9)


class TestGaussLaguerre:
    def test_order_one_plain(self):
        rule = gauss_laguerre(1, 0.0)
        np.testing.assert_allclose(rule.nodes, [1.0], rtol=1e-14)
        np.testing.assert_allclose(rule.weights, [1.0], rtol=1e-14)

    def test_order_two_closed_form(self):
        rule = gauss_laguerre(2, 0.0)
        np.testing.assert_allclose(rule.nodes, [2.0 - math.sqrt(2.0), 2.0 + math.sqrt(2.0)],
                                   rtol=1e-14)
        np.testing.assert_allclose(rule.weights,
                                   [(2.0 + math.sqrt(2.0)) / 4.0, (2.0 - math.sqrt(2.0)) / 4.0],
                                   rtol=1e-13)

    def test_moment_identity_generalized(self):
        rule = gauss_laguerre(64, 1.5)
        assert rule.weights.sum() == pytest.approx(math.exp(ln_gamma(2.5)), rel=1e-13)
        assert rule.normalized_weights.sum() == pytest.approx(1.0, rel=1e-14)

    @pytest.mark.parametrize("alpha", [0.0, -0.5, 1.5, 4.0])
    def test_first_two_moments(self, alpha):
        rule = gauss_laguerre(16, alpha)
        g1 = math.exp(ln_gamma(alpha + 1.0))
        assert rule.integrate(lambda s: np.ones_like(s)) == pytest.approx(g1, rel=1e-12)
        assert rule.integrate(lambda s: s) == pytest.approx(g1 * (alpha + 1.0), rel=1e-12)

    @pytest.mark.parametrize("degree", range(10))
    def test_polynomial_exactness_order8(self, degree):
        # an order-n rule is exact through degree 2n-1 = 15 >= 9
        alpha = 0.7
        rule = gauss_laguerre(8, alpha)
        exact = math.exp(ln_gamma(alpha + degree + 1.0))
        assert rule.integrate(lambda s: s**degree) == pytest.approx(exact, rel=1e-12)

    def test_nodes_increasing_positive(self):
        rule = gauss_laguerre(128, 0.25)
        assert np.all(rule.nodes > 0)
        assert np.all(np.diff(rule.nodes) > 0)
        assert np.all(rule.weights > 0)

    def test_extreme_order_weights_representable_part(self):
        # at order 256 the smallest true weights sit below the double floor
        # (~e^-1000) and underflow to zero; everything representable is positive
        rule = gauss_laguerre(256, 0.0)
        assert np.all(rule.weights >= 0)
        assert rule.weights.sum() == pytest.approx(1.0, rel=1e-13)

    def test_large_alpha_normalized_only(self):
        rule = gauss_laguerre(32, 200.0)
        assert np.all(np.isinf(rule.weights))  # full mass not representable
        assert rule.normalized_weights.sum() == pytest.approx(1.0, rel=1e-13)
        # first normalized moment: integral of s equals alpha + 1 in unit mass
        assert float(rule.normalized_weights @ rule.nodes) == pytest.approx(
            201.0, rel=1e-12)

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            gauss_laguerre(0, 0.0)
        with pytest.raises(ValueError):
            gauss_laguerre(600, 0.0)
        with pytest.raises(ValueError):
            gauss_laguerre(8, -1.0)

    def test_cache_is_thread_safe_and_stable(self):
        _RULE_CACHE.clear()
        results = []

        def worker():
            results.append(gauss_laguerre(96, 0.33))

        threads = [threading.Thread(target=worker) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        first = results[0]
        assert all(r is first or np.array_equal(r.nodes, first.nodes) for r in results)
        assert gauss_laguerre(96, 0.33) is _RULE_CACHE[(96, 0.33)]
