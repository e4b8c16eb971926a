
import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from periodbound.bounds import m_alpha
from periodbound.errors import AlignmentError, ParameterError, UndefinedOperatorError
from periodbound.spectral import (
    SpectrumModel,
    apply_fractional,
    apply_semigroup,
    h_norm,
    lemma_resolvent_bound,
    split_at,
    tail_resolvent_norm,
)

eigen_lists = st.lists(st.floats(0.0, 1e3, allow_nan=False), min_size=1, max_size=12).map(sorted)


def test_model_rejects_negative_and_unsorted():
    with pytest.raises(ParameterError):
        SpectrumModel([-1.0, 2.0])
    with pytest.raises(ParameterError):
        SpectrumModel([3.0, 1.0])
    with pytest.raises(ParameterError):
        SpectrumModel([])


def test_model_is_immutable():
    m = SpectrumModel([1.0, 2.0])
    with pytest.raises(ValueError):
        m.eigenvalues[0] = 5.0


class TestFractional:
    def test_alpha_zero_is_identity_even_with_kernel(self):
        m = SpectrumModel([0.0, 1.0, 5.0])
        u = np.array([3.0, -1.0, 2.0])
        np.testing.assert_array_equal(apply_fractional(m, 0.0, u), u)

    def test_square_roots(self):
        out = apply_fractional(SpectrumModel([1.0, 4.0]), 0.5, np.array([1.0, 1.0]))
        np.testing.assert_allclose(out, [1.0, 2.0], rtol=1e-15)

    def test_scalar_power_against_mpmath(self):
        expected = float(mpmath.power(2, mpmath.mpf("0.3")))
        out = apply_fractional(SpectrumModel([2.0]), 0.3, np.array([1.0]))
        assert out[0] == pytest.approx(expected, rel=1e-14)
        assert out[0] == pytest.approx(1.2311, abs=5e-5)

    def test_errors(self):
        m = SpectrumModel([1.0, 2.0])
        with pytest.raises(AlignmentError):
            apply_fractional(m, 0.5, np.ones(3))
        with pytest.raises(ParameterError):
            apply_fractional(m, 1.5, np.ones(2))
        with pytest.raises(ParameterError):
            apply_fractional(m, -0.1, np.ones(2))


class TestSemigroup:
    def test_zero_time_identity(self):
        u = np.array([1.0, -2.0])
        np.testing.assert_array_equal(apply_semigroup(SpectrumModel([1.0, 3.0]), 0.0, u), u)

    def test_scalar_exponential(self):
        out = apply_semigroup(SpectrumModel([2.0]), 0.5, np.array([1.0]))
        assert out[0] == pytest.approx(float(mpmath.exp(-1)), rel=1e-15)

    def test_kernel_mode_invariant(self):
        out = apply_semigroup(SpectrumModel([0.0]), 17.0, np.array([2.5]))
        assert out[0] == 2.5

    def test_negative_time(self):
        with pytest.raises(ParameterError):
            apply_semigroup(SpectrumModel([1.0]), -1.0, np.array([1.0]))

    @given(eigen_lists, st.floats(0, 5), st.floats(0, 5), st.integers(0, 2**32 - 1))
    @settings(max_examples=200, deadline=None)
    def test_semigroup_property_and_contraction(self, lam, t, s, seed):
        m = SpectrumModel(lam)
        u = np.random.default_rng(seed).standard_normal(m.dim)
        lhs = m.semigroup(t + s, u)
        rhs = m.semigroup(t, m.semigroup(s, u))
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-300)
        assert h_norm(lhs) <= h_norm(u) * (1 + 1e-15)


class TestSplit:
    lam = SpectrumModel([1.0, 3.0, 10.0])

    def test_mid_threshold(self):
        s = split_at(self.lam, 5.0)
        assert s.low_indices.tolist() == [0, 1]
        assert s.high_indices.tolist() == [2]
        assert s.low_norm(self.lam) == 3.0

    def test_empty_low_block(self):
        s = split_at(self.lam, 0.5)
        assert s.low_indices.size == 0
        assert s.low_norm(self.lam) == 0.0

    def test_empty_high_block(self):
        s = split_at(self.lam, 20.0)
        assert s.high_indices.size == 0
        np.testing.assert_array_equal(s.Q(np.ones(3)), 0.0)
        with pytest.raises(UndefinedOperatorError):
            tail_resolvent_norm(s, self.lam, 1.0)

    def test_bad_threshold(self):
        with pytest.raises(ParameterError):
            split_at(self.lam, 0.0)

    @given(eigen_lists, st.floats(1e-3, 2e3), st.integers(0, 2**32 - 1))
    @settings(max_examples=200, deadline=None)
    def test_projection_algebra(self, lam, mu, seed):
        m = SpectrumModel(lam)
        s = split_at(m, mu)
        u = np.random.default_rng(seed).standard_normal(m.dim)
        P, Q = s.P, s.Q
        np.testing.assert_array_equal(P(u) + Q(u), u)
        np.testing.assert_array_equal(P(P(u)), P(u))
        np.testing.assert_array_equal(Q(Q(u)), Q(u))
        np.testing.assert_array_equal(P(Q(u)), 0.0)
        np.testing.assert_array_equal(Q(P(u)), 0.0)
        np.testing.assert_array_equal(m.apply(P(u)), P(m.apply(u)))
        np.testing.assert_array_equal(m.apply(Q(u)), Q(m.apply(u)))
        assert set(s.low_indices) | set(s.high_indices) == set(range(m.dim))
        assert not set(s.low_indices) & set(s.high_indices)


class TestTailResolvent:
    def test_single_high_mode(self):
        m = SpectrumModel([10.0])
        val = tail_resolvent_norm(split_at(m, 5.0), m, 1.0)
        assert val == pytest.approx(float(1 / (1 - mpmath.exp(-10))), rel=1e-14)
        assert val == pytest.approx(1.0000454, abs=1e-7)
        bound = lemma_resolvent_bound(5.0, 1.0)
        assert bound == pytest.approx(1.006784, abs=1e-6)
        assert val <= bound

    def test_boundary_mode_is_extremal(self):
        mu = 2.5
        m = SpectrumModel([mu])
        assert tail_resolvent_norm(split_at(m, mu), m, 1.0) == lemma_resolvent_bound(mu, 1.0)

    def test_attained_at_smallest_high_eigenvalue(self):
        m = SpectrumModel([10.0, 100.0])
        val = tail_resolvent_norm(split_at(m, 5.0), m, 1.0)
        assert val == pytest.approx(float(1 / (1 - mpmath.exp(-10))), rel=1e-14)

    @given(eigen_lists, st.floats(1e-3, 1e2), st.floats(1e-3, 1e2))
    @settings(max_examples=300, deadline=None)
    def test_lemma_inequalities(self, lam, mu, T):
        m = SpectrumModel(lam)
        s = split_at(m, mu)
        assert s.low_norm(m) <= mu
        if s.high_indices.size:
            assert tail_resolvent_norm(s, m, T) <= lemma_resolvent_bound(mu, T) * (1 + 1e-15)


class TestSmoothing:
    @pytest.mark.parametrize("alpha", [0.1, 0.25, 0.5, 0.9, 1.0])
    @pytest.mark.parametrize("t", [0.01, 0.7, 3.0])
    def test_peak_at_alpha_over_t(self, alpha, t):
        m = SpectrumModel([alpha / t])
        assert m.smoothing_norm(alpha, t) == pytest.approx(m_alpha(alpha) * t**-alpha, rel=1e-12)

    @given(eigen_lists, st.floats(0.0, 1.0), st.floats(1e-3, 10.0))
    @settings(max_examples=300, deadline=None)
    def test_never_exceeds_bound(self, lam, alpha, t):
        m = SpectrumModel(lam)
        assert m.smoothing_norm(alpha, t) <= m_alpha(alpha) * t**-alpha * (1 + 1e-12)

    def test_sampled_scalar_is_maximized_at_alpha_over_t(self):
        alpha, t = 0.4, 0.8
        lam = np.linspace(0, 20, 200001)
        vals = lam**alpha * np.exp(-lam * t)
        assert lam[np.argmax(vals)] == pytest.approx(alpha / t, abs=2e-4)
        assert vals.max() <= m_alpha(alpha) * t**-alpha
