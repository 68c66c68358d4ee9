import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from usfspec import presets
from usfspec.bounds import (
    CrbReport,
    bernoulli_residue_stats,
    crb_closed_form,
    crb_conventional,
    crb_conventional_asymptotic,
    crb_fim,
    crb_leading_order,
    gamma,
    invert_fim,
    noise_model,
    pdf_approx_error,
    r_matrix_asymptotic,
    trig_power_sum,
)
from usfspec.errors import DegenerateFrequency, SingularFim, ValidationError
from usfspec.signal import ResidueSpec, SamplingConfig, SoSParams, residue

# Reference values below were computed once with 30-digit mpmath arithmetic.
GAMMA_REF = {1.05: 1.99033116185649439801, 0.63: 5.20907965098470445016, 1.0: 2.17534264967002141078}
E2_REF = (0.03, 1.0, 0.1, 0.0107714415708386823044)
TRIG_REF = (37, 0.9, 0.2, 2, 848.457665534104770112, 1373.26094147368275653)


class TestGamma:
    @pytest.mark.parametrize("wT", sorted(GAMMA_REF))
    def test_frozen(self, wT):
        assert gamma(wT) == pytest.approx(GAMMA_REF[wT], rel=1e-14)

    def test_degenerate(self):
        with pytest.raises(DegenerateFrequency):
            gamma(0.0)
        with pytest.raises(DegenerateFrequency):
            gamma(2 * math.pi)

    @given(st.floats(1e-3, math.pi), st.floats(1e-3, math.pi))
    def test_decreasing_on_zero_pi(self, x, y):
        lo, hi = sorted((x, y))
        assert gamma(lo) >= gamma(hi)
        assert gamma(math.pi) == pytest.approx(0.5)


class TestClosedForm:
    def test_equals_gamma_times_conventional(self):
        for wT in (0.63, 1.0, 1.05, math.pi / 2):
            cf = crb_closed_form(2.0, wT, 0.3, 500).as_matrix()
            conv = crb_conventional_asymptotic(2.0, wT, 0.3, 500).as_matrix()
            np.testing.assert_allclose(cf, gamma(wT) * conv, rtol=1e-14)

    def test_frozen_fig1(self):
        rep = crb_closed_form(1.0, 1.05, 0.1, 100)
        g = GAMMA_REF[1.05]
        assert rep.a[0] == pytest.approx(2 * g * 0.01 / 100, rel=1e-14)
        assert rep.omegaT[0] == pytest.approx(2 * g * 0.01 * 12 / 100**3, rel=1e-14)
        assert rep.phi[0] == pytest.approx(8 * g * 0.01 / 100, rel=1e-14)

    @given(st.floats(0.1, 10), st.floats(0.05, 3.1), st.floats(0.01, 3), st.integers(4, 10**6))
    @settings(max_examples=200)
    def test_matches_leading_order_inversion(self, a1, wT, sigma, N):
        ref = crb_closed_form(a1, wT, sigma, N).as_matrix()[:, 0]
        np.testing.assert_allclose(crb_leading_order(a1, wT, sigma, N), ref, rtol=1e-12)

    @given(st.floats(0.1, 10), st.floats(0.05, 3.1), st.integers(4, 10**5))
    def test_monotone_in_sigma_and_n(self, a1, wT, N):
        lo = crb_closed_form(a1, wT, 0.1, N).as_matrix()
        hi = crb_closed_form(a1, wT, 0.2, N).as_matrix()
        more = crb_closed_form(a1, wT, 0.1, N + 1).as_matrix()
        assert np.all(hi > lo)
        assert np.all(more < lo)

    def test_validation(self):
        with pytest.raises(ValidationError):
            crb_closed_form(1.0, 1.0, 0.1, 3)
        with pytest.raises(ValidationError):
            crb_closed_form(1.0, 1.0, 0.0, 100)


class TestLeadingOrderR:
    def test_r12_within_bound(self):
        for N in (200, 2000):
            for wT in (0.63, 1.05):
                p = SoSParams.from_arrays([1.0], [wT], [0.4])
                fims, _ = crb_fim(p, SamplingConfig(np.inf, 1.0, N, 0.1))
                _, bound = r_matrix_asymptotic(1.0, wT, 1.0, N)
                assert abs(fims.gram[0, 1]) <= bound

    def test_leading_terms_converge(self):
        wT = 1.05
        devs = []
        for N in (200, 2000, 20000):
            p = SoSParams.from_arrays([1.0], [wT], [0.4])
            R = crb_fim(p, SamplingConfig(np.inf, 1.0, N, 0.1))[0].gram
            lead, _ = r_matrix_asymptotic(1.0, wT, 1.0, N)
            idx = [(0, 0), (1, 1), (1, 2), (2, 2)]
            devs.append(max(abs(R[i] / lead[i] - 1) for i in idx))
        assert devs[0] > devs[1] > devs[2]
        assert devs[2] < 1e-3


class TestFim:
    def test_positive_definite(self):
        fims, rep = crb_fim(presets.fig2_params(), presets.fig2_config(noise_sigma=0.1))
        assert np.all(np.linalg.eigvalsh(fims.fim) > 0)
        assert np.allclose(fims.fim, fims.fim.T)
        assert rep.K == 2

    def test_scales_with_sigma_squared(self):
        p = presets.fig1_params()
        r1 = crb_fim(p, presets.fig1_config(noise_sigma=0.1))[1].as_matrix()
        r2 = crb_fim(p, presets.fig1_config(noise_sigma=0.2))[1].as_matrix()
        np.testing.assert_allclose(r2, 4 * r1, rtol=1e-12)

    def test_differenced_worse_than_conventional(self):
        # the differenced model discards information, so its bounds are larger
        p = presets.fig2_params()
        fim = crb_fim(p, presets.fig2_config(noise_sigma=0.1))[1].as_matrix()
        conv = crb_conventional(p, 0.1, 1.0, 100).as_matrix()
        assert np.all(fim > conv)

    def test_singular(self):
        with pytest.raises(SingularFim):
            invert_fim(np.array([[1.0, 1.0, 0], [1.0, 1.0, 0], [0, 0, 1.0]]))
        with pytest.raises(SingularFim):
            invert_fim(np.zeros((3, 3)))

    def test_near_coincident_frequencies_singular(self):
        p = SoSParams.from_arrays([1.0, 1.0], [1.0, 1.0 + 1e-9], [0.0, 0.0])
        with pytest.raises(SingularFim):
            crb_fim(p, SamplingConfig(np.inf, 1.0, 100, 0.1))

    def test_report_round_trip(self):
        rep = crb_fim(presets.fig2_params(), presets.fig2_config(noise_sigma=0.1))[1]
        assert CrbReport.from_dict(rep.to_dict()) == rep
        assert len(rep.csv_row()) == len(rep.csv_header())


class TestTrigSums:
    def test_frozen(self):
        N, w, phi, L, c_ref, s_ref = TRIG_REF
        c, s = trig_power_sum(N, w, phi, L)
        assert c == pytest.approx(c_ref, rel=1e-12)
        assert s == pytest.approx(s_ref, rel=1e-12)

    @given(st.integers(1, 500), st.floats(-7, 7), st.floats(-math.pi, math.pi), st.integers(0, 2))
    @settings(max_examples=200)
    def test_vs_direct(self, N, w, phi, L):
        n = np.arange(1, N + 1, dtype=float)
        c, s = trig_power_sum(N, w, phi, L)
        scale = math.fsum(n**L)
        assert abs(c - math.fsum(n**L * np.cos(n * w + phi))) <= 1e-9 * scale
        assert abs(s - math.fsum(n**L * np.sin(n * w + phi))) <= 1e-9 * scale

    def test_rejects_negative_order(self):
        with pytest.raises(ValidationError):
            trig_power_sum(10, 1.0, 0.0, -1)


class TestNoiseModel:
    def test_frozen_e2(self):
        p, lam, sigma, ref = E2_REF
        assert pdf_approx_error(p, lam, sigma) == pytest.approx(ref, rel=1e-13)

    def test_limits(self):
        assert pdf_approx_error(0.0, 1.0, 0.1) == 0.0
        # wide separation: exponentials vanish, leaving 6 p^2 / (2 sqrt(2 pi) sigma)
        assert pdf_approx_error(0.1, 100.0, 0.1) == pytest.approx(6 * 0.01 / (2 * math.sqrt(2 * math.pi) * 0.1))
        # lam -> 0: spikes collapse onto the Gaussian
        assert pdf_approx_error(0.1, 1e-8, 1.0) == pytest.approx(0.0, abs=1e-15)

    @given(st.floats(0, 0.5), st.floats(1e-3, 10), st.floats(1e-3, 10))
    def test_non_negative(self, p, lam, sigma):
        assert pdf_approx_error(p, lam, sigma) >= 0

    def test_bernoulli_stats(self):
        res = ResidueSpec(((3, 2.0), (7, -2.0)))
        stats = bernoulli_residue_stats(res, 100)
        assert stats.p == stats.q == 0.01
        with pytest.raises(ValidationError):
            bernoulli_residue_stats(res, 1)

    def test_noise_model_fig2(self):
        res = residue(presets.fig2_params(), presets.fig2_config())
        nm = noise_model(res, 100, presets.fig2_config().threshold, 0.1)
        assert nm.p == nm.q == 0.01
        assert nm.e2 > 0
