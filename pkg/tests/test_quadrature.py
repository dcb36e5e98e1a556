import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cusped_spectra import geometry as G
from cusped_spectra import quadrature as Q
from cusped_spectra.geometry import NodeMetricData
from cusped_spectra.quadrature import (
    BottChernPair,
    FitError,
    QuadratureError,
    RegIntegralSchedule,
)


class TestAnnulusIntegrate:
    def test_constant(self):
        val = Q.annulus_integrate(lambda z: np.ones_like(np.real(z)), 1.0, 2.0)
        assert val == pytest.approx(3.0 * math.pi, rel=1e-12)

    @given(st.floats(-3.0, 3.0), st.floats(0.2, 1.0), st.floats(1.5, 4.0))
    @settings(max_examples=20, deadline=None)
    def test_constant_random(self, c, r_in, r_out):
        val = Q.annulus_integrate(lambda z: c * np.ones_like(np.real(z)), r_in, r_out)
        assert val == pytest.approx(c * math.pi * (r_out**2 - r_in**2), rel=1e-10, abs=1e-10)

    def test_radial_pole(self):
        # 1/(r^2 log^2 r) has radial antiderivative -2 pi / log r
        val = Q.annulus_integrate(
            lambda z: 1.0 / (np.abs(z) ** 2 * np.log(np.abs(z)) ** 2),
            math.exp(-10.0),
            math.exp(-1.0),
        )
        assert val == pytest.approx(2.0 * math.pi * 0.9, rel=1e-11)

    def test_angular_harmonic(self):
        # int cos^2(theta) r dr dtheta
        val = Q.annulus_integrate(
            lambda z: (np.real(z) / np.abs(z)) ** 2, 1.0, 2.0
        )
        assert val == pytest.approx(math.pi / 2.0 * 3.0, rel=1e-10)

    def test_domain_validation(self):
        with pytest.raises(QuadratureError):
            Q.annulus_integrate(lambda z: np.real(z), 2.0, 1.0)

    def test_plane_integral_limit_of_annuli(self):
        # (1/pi) * node profile integrates to 2 over the plane
        val = Q.plane_integral(
            lambda z: 4.0 * np.abs(z) ** 2 / (np.abs(z) ** 4 + 1.0) ** 2 / math.pi
        )
        assert val == pytest.approx(2.0, abs=1e-8)

    def test_plane_integral_gaussian(self):
        val = Q.plane_integral(lambda z: np.exp(-np.abs(z) ** 2))
        assert val == pytest.approx(math.pi, rel=1e-9)

    def test_plane_integral_offcenter_gaussian(self):
        # translation-invariant mass through the radial compactification
        val = Q.plane_integral(lambda z: np.exp(-np.abs(z - (1.5 + 0.5j)) ** 2))
        assert val == pytest.approx(math.pi, rel=1e-8)


class TestMeasureConvention:
    def test_canaries(self):
        v1, v2 = Q.node_profile_integrals()
        assert v1 == pytest.approx(-2.0, abs=1e-9)
        assert v2 == pytest.approx(-2.0, abs=1e-9)

    def test_dzdzbar_2pii_integral_sign(self):
        # positive density, measure factor makes the form integral negative
        val = Q.dzdzbar_2pii_integral(
            lambda z: np.ones_like(np.real(z)), 1.0, 2.0
        )
        assert val == pytest.approx(-3.0, rel=1e-10)

    def test_gauss_bonnet_round_sphere(self):
        # chern form of the round tangent bundle over an annulus:
        # exact value 2 (1/(1+r0^2) - 1/(1+R^2)), tending to 2 over the sphere
        def log_h(z):
            return np.log(4.0) - 2.0 * np.log1p(np.abs(z) ** 2)

        r0, big_r = 1e-2, 1e2
        val = Q.chern_form_integral(
            lambda z: G.c1_density(log_h, z), r0, big_r, tol=1e-6
        )
        expected = 2.0 * (1.0 / (1.0 + r0**2) - 1.0 / (1.0 + big_r**2))
        assert val == pytest.approx(expected, abs=1e-5)
        assert val == pytest.approx(2.0, abs=1e-3)


class TestRegularizedIntegral:
    def test_schedule_validation(self):
        with pytest.raises(ValueError):
            RegIntegralSchedule((1e-3, 1e-4))
        with pytest.raises(ValueError):
            RegIntegralSchedule((1e-4, 1e-3, 1e-5))
        RegIntegralSchedule((1e-3, 1e-4, 1e-5))

    def test_integrable_density_has_zero_coefficient(self):
        sched = RegIntegralSchedule((1e-2, 1e-3, 1e-4, 1e-5))
        res = Q.regularized_integral(
            lambda z: np.ones_like(np.real(z)), [0.0], sched, 0.5
        )
        assert res.cusp_coefficient == pytest.approx(0.0, abs=1e-5)
        # the o(1) term pi eps^2 leaks slightly into the affine fit
        assert res.finite_part == pytest.approx(math.pi * 0.25, abs=1e-4)

    def test_pure_cusp_pole(self):
        # f = 1/(pi r^2 |log r|): raw(eps) = 2 log|log eps| - 2 log log 2
        def f(z):
            r = np.abs(np.asarray(z))
            return 1.0 / (math.pi * r**2 * np.abs(np.log(r)))

        sched = RegIntegralSchedule((1e-3, 1e-4, 1e-5, 1e-6))
        res = Q.regularized_integral(f, [0.0], sched, 0.5)
        assert res.cusp_coefficient == pytest.approx(-1.0 / (2.0 * math.pi), rel=1e-5)
        assert res.finite_part == pytest.approx(-2.0 * math.log(math.log(2.0)), abs=1e-4)
        for eps, raw in res.per_epsilon:
            expected = 2.0 * math.log(-math.log(eps)) - 2.0 * math.log(math.log(2.0))
            assert raw == pytest.approx(expected, abs=1e-6)

    def test_green_cusp_computation(self):
        kap = G.kappa_cusp_tangent_density()

        def f(z):
            z = np.asarray(z, dtype=complex)
            return np.log(np.abs(z)) * G.c1_density(kap.log_density, z)

        sched = RegIntegralSchedule(tuple(10.0 ** (-3 - 0.75 * k) for k in range(5)))
        res = Q.regularized_integral(f, [0.0], sched, 0.5)
        assert res.finite_part == pytest.approx(1.0, abs=1e-3)
        assert 4.0 * math.pi * res.cusp_coefficient == pytest.approx(1.0, abs=1e-3)
        for eps, raw in res.per_epsilon:
            assert raw == pytest.approx(1.0 - math.log(-math.log(eps)), abs=1e-3)

    def test_residual_decreases_along_tail(self):
        kap = G.kappa_cusp_tangent_density()

        def f(z):
            z = np.asarray(z, dtype=complex)
            return np.log(np.abs(z)) * G.c1_density(kap.log_density, z)

        sched = RegIntegralSchedule(tuple(10.0 ** (-2 - 1.0 * k) for k in range(5)))
        res = Q.regularized_integral(f, [0.0], sched, 0.5)
        gaps = [
            abs(raw + 4.0 * math.pi * res.cusp_coefficient * math.log(-math.log(e)) - res.finite_part)
            for e, raw in res.per_epsilon
        ]
        assert gaps[-1] <= gaps[0] + 1e-9

    def test_wrong_expansion_raises(self):
        # a 1/r^2 pole is not of log-log type: the affine fit must fail
        def f(z):
            return 1.0 / np.abs(np.asarray(z)) ** 2

        sched = RegIntegralSchedule((1e-2, 1e-3, 1e-4))
        with pytest.raises(FitError):
            Q.regularized_integral(f, [0.0], sched, 0.5)

    def test_disjointness_check(self):
        sched = RegIntegralSchedule((1e-2, 1e-3, 1e-4))
        with pytest.raises(ValueError):
            Q.regularized_integral(
                lambda z: np.real(z) * 0.0, [0.0, 0.5], sched, 0.5
            )


class TestBottChern:
    def test_deg0(self):
        pair = BottChernPair(
            lambda z: np.log(np.abs(z) ** 2 + 2.0), lambda z: np.log(np.abs(z) ** 2 + 1.0)
        )
        z = 0.3 + 0.1j
        expected = math.log((abs(z) ** 2 + 2.0) / (abs(z) ** 2 + 1.0))
        assert Q.bott_chern_deg0(pair, z) == pytest.approx(expected, rel=1e-13)

    def test_deg0_equal_metrics(self):
        f = lambda z: np.log(np.abs(z) ** 2 + 1.0)
        assert Q.bott_chern_deg0(BottChernPair(f, f), 0.4 + 0.2j) == 0.0

    def test_deg0_constant_ratio(self):
        pair = BottChernPair(lambda z: 3.0 + 0.0 * np.real(z), lambda z: 0.0 * np.real(z))
        assert Q.bott_chern_deg0(pair, 1.0 + 0.0j) == 3.0

    @given(st.complex_numbers(min_magnitude=0.1, max_magnitude=2.0))
    @settings(max_examples=25, deadline=None)
    def test_antisymmetry(self, z):
        f1 = lambda w: np.log(np.abs(w) ** 2 + 2.0)
        f2 = lambda w: np.log(np.abs(w) ** 2 + 1.0)
        p12, p21 = BottChernPair(f1, f2), BottChernPair(f2, f1)
        assert Q.bott_chern_deg0(p12, z) == pytest.approx(-Q.bott_chern_deg0(p21, z), rel=1e-12)
        assert Q.bott_chern_deg2(p12, z) == pytest.approx(
            -Q.bott_chern_deg2(p21, z), rel=1e-10, abs=1e-12
        )

    def test_deg2_equal_vanishes(self):
        f = lambda z: np.log(np.abs(z) ** 2 + 1.0)
        assert Q.bott_chern_deg2(BottChernPair(f, f), 0.5 + 0.1j) == 0.0

    def test_cocycle_integrates_to_zero(self):
        # compactly supported differences on the annulus (0.1, 2.5)
        def bump(z, center, width, amp):
            x = np.clip((np.abs(np.asarray(z)) - center) / width, -1.0, 1.0)
            return amp * (1.0 - x * x) ** 4

        base = lambda z: np.log(np.abs(z) ** 2 + 1.0)
        h1 = lambda z: base(z) + bump(z, 0.8, 0.35, 0.7)
        h2 = lambda z: base(z) + bump(z, 1.1, 0.4, -0.4)
        h3 = lambda z: base(z) + bump(z, 0.9, 0.3, 0.5)

        def cocycle(z):
            return (
                Q.bott_chern_deg2(BottChernPair(h1, h3), z)
                - Q.bott_chern_deg2(BottChernPair(h1, h2), z)
                - Q.bott_chern_deg2(BottChernPair(h2, h3), z)
            )

        val = Q.chern_form_integral(cocycle, 0.2, 2.2, tol=1e-7)
        assert abs(val) < 1e-6

    def test_weak_derivative_identity(self):
        # int psi * (Delta/4pi)(ch0) = int psi (c1(h1) - c1(h2)) for smooth
        # compactly supported test factors
        def bump(z, center, width, amp):
            x = np.clip((np.abs(np.asarray(z)) - center) / width, -1.0, 1.0)
            return amp * (1.0 - x * x) ** 4

        h1 = lambda z: np.log(np.abs(z) ** 2 + 1.0) + bump(z, 0.9, 0.4, 0.6)
        h2 = lambda z: np.log(np.abs(z) ** 2 + 1.0)
        psi = lambda z: bump(z, 0.9, 0.55, 1.0)
        pair = BottChernPair(h1, h2)

        lhs = Q.annulus_integrate(
            lambda z: psi(z) * G.c1_density(lambda w: Q.bott_chern_deg0(pair, w), z),
            0.2,
            2.0,
            tol=1e-7,
        )
        rhs = Q.annulus_integrate(
            lambda z: psi(z) * (G.c1_density(h1, z) - G.c1_density(h2, z)),
            0.2,
            2.0,
            tol=1e-7,
        )
        assert lhs == pytest.approx(rhs, abs=1e-4)


class TestDoubleIntegralIdentity:
    def test_trivial_triple(self):
        numeric, closed = Q.double_integral_identity(1.0, 0.0, 1.0)
        assert closed == 0.0
        assert abs(numeric) < 1e-10

    def test_known_value(self):
        numeric, closed = Q.double_integral_identity(2.0, 0.0, 1.0)
        assert closed == pytest.approx(4.0 * math.pi * math.log(2.0), rel=1e-15)
        assert numeric == pytest.approx(closed, abs=1e-4)

    def test_negative_log(self):
        numeric, closed = Q.double_integral_identity(1.0, 0.5, 1.0)
        assert closed < 0.0
        assert numeric == pytest.approx(4.0 * math.pi * math.log(0.75), abs=1e-4)

    def test_random_triples(self):
        rng = np.random.default_rng(20240817)
        count = 0
        while count < 20:
            a, b, c = rng.uniform(0.1, 10.0, size=3)
            if a * c - b * b <= 0.05 * a * c:
                continue
            numeric, closed = Q.double_integral_identity(a, b, c)
            assert abs(numeric - closed) <= 1e-3 * (1.0 + abs(closed))
            count += 1

    def test_validation(self):
        with pytest.raises(ValueError):
            Q.double_integral_identity(-1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            Q.double_integral_identity(1.0, 1.0, 1.0)


class TestNodeLimit:
    def test_identity_matrix(self):
        val = Q.node_limit_check(
            NodeMetricData(1.0, 0.0, 1.0), (1e-6, 1e-8, 1e-10), (1e-1, 1e-2)
        )
        assert abs(val) < 1e-6

    def test_against_closed_form(self):
        ts = (1e-6, 1e-8, 1e-10, 1e-12)
        es = (1e-1, 1e-2)
        for a, b, c in ((2.0, 0.0, 1.0), (1.0, 0.5, 1.0)):
            data = NodeMetricData(a, b, c)
            val = Q.node_limit_check(data, ts, es)
            assert val == pytest.approx(data.log_det, abs=1e-3)

    def test_phase_invariance(self):
        ts = (1e-6, 1e-8, 1e-10, 1e-12)
        es = (1e-1, 1e-2)
        base = Q.node_limit_check(NodeMetricData(1.0, 0.5, 1.0), ts, es)
        for phase in (0.7, 2.3):
            rot = Q.node_limit_check(
                NodeMetricData(1.0, 0.5 * complex(math.cos(phase), math.sin(phase)), 1.0),
                ts,
                es,
            )
            assert abs(base - rot) < 1e-6

    def test_unsettled_schedule_raises(self):
        # coarse t schedule: annuli exist but the extrapolation cannot settle
        with pytest.raises(QuadratureError):
            Q.node_limit_check(
                NodeMetricData(2.0, 0.0, 1.0), (1e-2, 5e-3, 2e-3), (0.5,)
            )

    def test_empty_annulus_rejected(self):
        with pytest.raises(ValueError):
            Q.node_limit_check(
                NodeMetricData(2.0, 0.0, 1.0), (1e-1, 3e-2, 1e-2), (0.5, 0.25)
            )


class TestCylinderDecomposition:
    @pytest.mark.parametrize("t", [1e-4, 1e-6])
    def test_coefficients_near_minus_two(self, t):
        rep = Q.cylinder_decomposition_check(t)
        assert rep.log_coeff_dist < 5e-3
        assert rep.finite_coeff_dist < 5e-3
        assert rep.consistency < 1e-6

    def test_monotone_improvement(self):
        d4 = Q.cylinder_decomposition_check(1e-4)
        d8 = Q.cylinder_decomposition_check(1e-8)
        assert d8.log_coeff_dist < d4.log_coeff_dist
        assert d8.finite_coeff_dist < d4.finite_coeff_dist

    def test_domain(self):
        with pytest.raises(ValueError):
            Q.cylinder_decomposition_check(0.5)


class TestAnomalyChart:
    @staticmethod
    def conformal_pair(amp, r_lo, r_hi, r_max=0.9):
        pc = G.poincare_cusp(r_max)

        def phi(r):
            x = np.clip((np.asarray(r) - r_lo) / (r_hi - r_lo) * 2.0 - 1.0, -1.0, 1.0)
            return amp * (1.0 - x * x) ** 4

        def lam2(z):
            return pc.density(z) * np.exp(2.0 * phi(np.abs(np.asarray(z))))

        return pc, G.ChartMetric(0.0, r_max, lam2, "conformal-bump"), phi

    def test_equal_inputs_vanish(self):
        pc = G.poincare_cusp(0.9)
        val = Q.anomaly_rhs_chart(pc, pc, None, None, 0, 0.05, 0.8)
        assert abs(val) <= 1e-10

    def test_equal_inputs_with_bundle(self):
        pc = G.poincare_cusp(0.9)
        h = lambda z: np.log(np.abs(z) ** 2 + 1.0)
        val = Q.anomaly_rhs_chart(pc, pc, h, h, -1, 0.05, 0.8)
        assert abs(val) <= 1e-10

    def test_green_identity_oracle(self):
        from scipy.integrate import quad

        for amp, r_lo, r_hi in ((0.8, 0.15, 0.55), (-0.5, 0.2, 0.7), (1.2, 0.1, 0.35)):
            m1, m2, phi = self.conformal_pair(amp, r_lo, r_hi)
            val = Q.anomaly_rhs_chart(m1, m2, None, None, 0, 0.05, 0.8)
            i1 = quad(
                lambda r: float(phi(r)) / (r * math.log(r) ** 2), r_lo, r_hi, limit=200
            )[0]
            i2 = quad(
                lambda r: ((float(phi(r + 1e-6)) - float(phi(r - 1e-6))) / 2e-6) ** 2
                * 2.0
                * math.pi
                * r,
                r_lo,
                r_hi,
                limit=200,
            )[0]
            oracle = (2.0 * i1 - i2 / (2.0 * math.pi)) / 6.0
            assert val == pytest.approx(oracle, abs=1e-4)

    def test_swap_negates(self):
        m1, m2, _phi = self.conformal_pair(0.6, 0.2, 0.6)
        v12 = Q.anomaly_rhs_chart(m1, m2, None, None, 0, 0.05, 0.8)
        v21 = Q.anomaly_rhs_chart(m2, m1, None, None, 0, 0.05, 0.8)
        assert v12 == pytest.approx(-v21, rel=1e-6)

    def test_twist_scaling_for_conformal_pairs(self):
        # with trivial bundle the degree-2 terms collect to
        # (1 - 6n + 6n^2)/12 * log-ratio * (c1 + c2): exact in n
        m1, m2, _phi = self.conformal_pair(0.5, 0.2, 0.6)
        base = Q.anomaly_rhs_chart(m1, m2, None, None, 0, 0.05, 0.8)
        for n in (-1, -2):
            val = Q.anomaly_rhs_chart(m1, m2, None, None, n, 0.05, 0.8)
            assert val == pytest.approx((1.0 - 6.0 * n + 6.0 * n * n) * base, rel=1e-8)

    def test_regularized_route_matches_plain(self):
        # compactly supported difference: the regularized finite part must
        # coincide with the plain integral and the fitted coefficient with 0
        m1, m2, _phi = self.conformal_pair(0.7, 0.25, 0.6)
        plain = Q.anomaly_rhs_chart(m1, m2, None, None, 0, 1e-4, 0.8)
        sched = RegIntegralSchedule((1e-2, 1e-3, 1e-4))
        reg = Q.anomaly_rhs_chart(m1, m2, None, None, 0, 1e-4, 0.8, schedule=sched)
        assert reg == pytest.approx(plain, abs=1e-5)

    def test_bundle_tilde_term(self):
        # equal surface metrics, different bundle metrics: only the middle
        # term survives and reduces to a weighted chern integral
        pc = G.poincare_cusp(0.9)

        def bump(z):
            x = np.clip((np.abs(np.asarray(z)) - 0.4) / 0.2, -1.0, 1.0)
            return 0.5 * (1.0 - x * x) ** 4

        h1 = lambda z: np.log(np.abs(z) ** 2 + 1.0) + bump(z)
        h2 = lambda z: np.log(np.abs(z) ** 2 + 1.0)
        val = Q.anomaly_rhs_chart(pc, pc, h1, h2, 0, 0.05, 0.8)

        def middle_density(z):
            bxi = np.asarray(h1(z)) - np.asarray(h2(z))
            cxi = (G.c1_density(h1, z) + G.c1_density(h2, z)) / 2.0
            c2 = G.c1_density(pc.log_density, z)
            return bxi * (cxi + c2 / 2.0)

        direct = Q.chern_form_integral(middle_density, 0.05, 0.8, tol=1e-8)
        assert val == pytest.approx(direct, rel=1e-8, abs=1e-10)
