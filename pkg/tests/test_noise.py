import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy import stats as sps
from scipy.special import gammaincc

from shotmax.noise import (
    NoiseParams,
    extremal_process,
    max_order_statistic_cdf,
    sample_perturbation,
    sample_perturbations,
    sample_point_process,
)
from shotmax.stats import ks_vs_cdf

hursts = st.floats(min_value=0.05, max_value=0.95)
kappas = st.floats(min_value=0.1, max_value=10.0)
uniforms = st.floats(min_value=0.0, max_value=1.0, exclude_max=True)

SIGNED = "pareto-with-negative-part"


class TestParams:
    def test_auto_picks_law(self):
        assert NoiseParams.auto(0.5).law == "pure-pareto"
        assert NoiseParams.auto(0.5, theta=0.4).law == SIGNED

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(kappa=0.0),
            dict(kappa=-1.0),
            dict(law="cauchy"),
            dict(theta=0.5),
            dict(law=SIGNED, theta=0.0),
            dict(law=SIGNED, theta=1.5),
            dict(law=SIGNED, theta=0.5, negative_tail="medium"),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            NoiseParams(0.5, **kwargs)

    def test_derived_constants(self):
        p = NoiseParams(0.5, kappa=2.0, theta=0.25, law=SIGNED)
        assert p.kappa0 == 8.0
        assert p.p_negative == 0.75
        assert NoiseParams(0.5).p_negative == 0.0


class TestQuantileMaps:
    @given(hursts, kappas, st.floats(1e-3, 1e3))
    def test_pure_pareto_tail_is_exact(self, H, kappa, x):
        # P(Y > x) = min(1, kappa x^(-1/H)); invert through the sampler
        p = NoiseParams(H, kappa)
        tail = min(1.0, kappa * x ** (-1.0 / H))
        u = 1.0 - tail
        if u < 1.0:
            # 1 - u loses about eps / tail of relative precision
            rel = 1e-9 + 1e-15 / tail
            assert sample_perturbation(p, u) == pytest.approx(max(x, kappa**H), rel=rel)

    @given(hursts, kappas, uniforms)
    def test_shifted_pareto_is_lomax(self, H, kappa, u):
        p = NoiseParams(H, kappa, law="shifted-pareto")
        ref = sps.lomax.ppf(u, c=1.0 / H, scale=1.0) * kappa**H
        # Lomax with shape 1/H: (1 - u)^(-H) - 1
        assert sample_perturbation(p, u) == pytest.approx(ref, rel=1e-7, abs=1e-12)

    @given(hursts, kappas, st.floats(0.05, 1.0), st.sampled_from(["light", "heavy"]), uniforms, uniforms)
    def test_monotone(self, H, kappa, theta, tail, u1, u2):
        p = NoiseParams(H, kappa, theta, SIGNED, tail)
        lo, hi = sorted((u1, u2))
        assert sample_perturbation(p, lo) <= sample_perturbation(p, hi)

    @given(hursts, kappas, st.floats(0.05, 1.0), st.sampled_from(["light", "heavy"]), st.floats(1.0, 1e3))
    def test_signed_upper_tail_keeps_kappa(self, H, kappa, theta, tail, x):
        # P(Y > x) = kappa x^(-1/H) for x above the positive support minimum
        p = NoiseParams(H, kappa, theta, SIGNED, tail)
        x = max(x, 1.01 * p.kappa0**H)
        tail = kappa * x ** (-1.0 / H)
        u = 1.0 - tail
        assume(u < 1.0)
        assert sample_perturbation(p, u) == pytest.approx(x, rel=1e-9 + 1e-15 / tail)

    @given(st.floats(0.05, 0.95), st.sampled_from(["light", "heavy"]), uniforms)
    def test_sign_split(self, theta, tail, u):
        p = NoiseParams(0.5, 1.0, theta, SIGNED, tail)
        assert (sample_perturbation(p, u) < 0) == (u < 1 - theta)

    def test_rejects_bad_uniform(self):
        with pytest.raises(ValueError):
            sample_perturbation(NoiseParams(0.5), 1.0)
        with pytest.raises(ValueError):
            sample_perturbation(NoiseParams(0.5), np.array([0.2, np.nan]))

    def test_vectorised_matches_scalar(self):
        p = NoiseParams(0.7, 2.0, 0.3, SIGNED, "heavy")
        u = np.linspace(0, 0.999, 50)
        np.testing.assert_array_equal(sample_perturbation(p, u), [sample_perturbation(p, v) for v in u])


class TestFrechetLimit:
    def test_cdf_values(self):
        p = NoiseParams(0.5, kappa=2.0)
        assert max_order_statistic_cdf(p, 10, -1.0) == 0.0
        assert max_order_statistic_cdf(p, 10, 0.0) == 0.0
        assert max_order_statistic_cdf(p, 10, 1.0) == pytest.approx(math.exp(-2.0))

    def test_sample_max_close_to_limit(self):
        H, n, reps = 0.4, 2000, 1500
        p = NoiseParams(H, 1.5)
        y = sample_perturbations(p, (reps, n), seed=3)
        r = ks_vs_cdf(y.max(axis=1) / n**H, lambda x: max_order_statistic_cdf(p, n, x))
        assert r.p_value > 1e-3


class TestPointProcess:
    def test_structure(self):
        p = NoiseParams(0.6, theta=0.5, law=SIGNED)
        ps = sample_point_process(p, 50, seed=9)
        assert len(ps) == 50
        assert np.all(np.diff(ps.eta) < 0)
        assert np.all((ps.u >= 0) & (ps.u < 1))
        assert set(np.unique(ps.epsilon)) <= {-1, 1}
        assert ps.truncation_bound() == pytest.approx(ps.gamma_k ** -0.6)
        assert ps.truncation_bound() <= ps.eta[-1]

    def test_prefix_consistency(self):
        p = NoiseParams(0.5)
        a, b = sample_point_process(p, 10, 4), sample_point_process(p, 30, 4)
        np.testing.assert_array_equal(a.eta, b.eta[:10])
        np.testing.assert_array_equal(a.u, b.u[:10])

    def test_gamma_law(self):
        # Gamma_3 ~ Gamma(3, 1)
        g = np.array([sample_point_process(NoiseParams(0.5), 3, 1000 + r).gamma_k for r in range(2000)])
        assert ks_vs_cdf(g, lambda x: 1.0 - gammaincc(3, np.maximum(x, 0))).p_value > 1e-3

    def test_extremal_process(self):
        p = NoiseParams(0.5)
        ps = sample_point_process(p, 20, 11)
        t = np.linspace(0, 1, 101)
        v = extremal_process(ps, t)
        assert np.all(np.diff(v) >= 0)
        assert v[-1] == ps.eta[0]
        with pytest.raises(ValueError):
            extremal_process(sample_point_process(p, 0, 1), 0.5)
