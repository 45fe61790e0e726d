import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmm_wiretap.exceptions import InvalidSpecError, SubspaceCollisionWarning
from gmm_wiretap.numerics import skew_matrix, sym_eig
from gmm_wiretap.signal_model import (
    CayleyFamilySpec,
    GaussianClass,
    GmmSource,
    build_cayley_family,
    check_distinct_subspaces,
    sample_class,
    sample_classes,
    sample_signal,
    sample_source,
    source_power,
)


def explicit_rotation(n, eps):
    A = skew_matrix(n, eps)
    I = np.eye(n)
    return (I - A) @ np.linalg.inv(I + A)


class TestCayleyFamily:
    def test_eps_zero_classes_identical(self):
        src = build_cayley_family(CayleyFamilySpec(10, 6, 2, 1.0, 0.0))
        expected = np.diag([0.2] * 5 + [0.0] * 5)
        for cls in src.classes:
            np.testing.assert_allclose(cls.cov, expected, atol=1e-15)
            np.testing.assert_array_equal(cls.mean, np.zeros(10))
        np.testing.assert_array_equal(src.weights, [0.5, 0.5])

    def test_eight_classes_trace_and_rank(self):
        src = build_cayley_family(CayleyFamilySpec(10, 6, 8, 1.0, 0.01))
        assert src.n_classes == 8
        for cls in src.classes:
            assert abs(np.trace(cls.cov) - 1.0) <= 1e-10
            assert cls.rank == 5
            assert np.linalg.matrix_rank(cls.cov, tol=1e-10) == 5

    def test_small_instance_against_explicit_construction(self):
        src = build_cayley_family(CayleyFamilySpec(3, 2, 2, 2.0, 0.1))
        W = explicit_rotation(3, 0.1)
        for k, cls in enumerate(src.classes, start=1):
            w = np.linalg.matrix_power(W, k)[:, 0]
            np.testing.assert_allclose(cls.cov, 2.0 * np.outer(w, w), atol=1e-13)
            eig = sym_eig(cls.cov).eigenvalues
            assert eig[0] >= -1e-12 and abs(eig[1]) <= 1e-12 and eig[2] == pytest.approx(2.0)

    @pytest.mark.parametrize("kwargs", [dict(mb=1), dict(K=1), dict(n=4, mb=5)])
    def test_invalid_spec(self, kwargs):
        base = dict(n=10, mb=6, K=2, P=1.0, eps=0.01)
        with pytest.raises(InvalidSpecError):
            CayleyFamilySpec(**{**base, **kwargs})

    @settings(max_examples=25, deadline=None)
    @given(K=st.integers(2, 16), eps=st.floats(-0.5, 0.5), P=st.floats(0.1, 10))
    def test_power_met_with_equality(self, K, eps, P):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SubspaceCollisionWarning)
            src = build_cayley_family(CayleyFamilySpec(10, 6, K, P, eps))
        assert abs(source_power(src) - P) <= 1e-10 * P
        for cls in src.classes:
            assert abs(np.trace(cls.cov) - P) <= 1e-10 * P

    @pytest.mark.parametrize("eps", [0.1, 0.01, 0.005])
    def test_range_spaces_distinct(self, eps):
        src = build_cayley_family(CayleyFamilySpec(10, 6, 8, 1.0, eps))
        assert check_distinct_subspaces(src) == []
        P1 = src.classes[0].cov_factor @ np.linalg.pinv(src.classes[0].cov_factor)
        P2 = src.classes[1].cov_factor @ np.linalg.pinv(src.classes[1].cov_factor)
        assert np.linalg.norm(P1 - P2, 2) > 1e-8

    def test_collision_warns(self):
        # W = -I makes W^2 = I span the same space as W
        spec = CayleyFamilySpec(4, 3, 2, 1.0, 0.3)
        with pytest.warns(SubspaceCollisionWarning):
            build_cayley_family(spec, W=-np.eye(4))


class TestSourcePower:
    def test_single_identity_class(self):
        src = GmmSource([GaussianClass(np.zeros(4), np.eye(4))], [1.0], 4.0)
        assert source_power(src) == 4.0

    def test_hand_computation(self):
        classes = [
            GaussianClass([1.0, 0.0], np.zeros((2, 0))),
            GaussianClass([0.0, 0.0], np.array([[np.sqrt(2.0)], [0.0]])),
        ]
        src = GmmSource(classes, [0.5, 0.5], 2.0)
        assert source_power(src) == pytest.approx(0.5 * 1 + 0.5 * 2, abs=1e-15)

    def test_budget_enforced(self):
        with pytest.raises(ValueError, match="exceeds budget"):
            GmmSource([GaussianClass(np.zeros(4), np.eye(4))], [1.0], 3.0)

    def test_weights_validated(self):
        c = GaussianClass(np.zeros(2), np.eye(2))
        with pytest.raises(ValueError):
            GmmSource([c, c], [0.6, 0.6], 10.0)


class TestSampling:
    def test_single_class(self, rng):
        src = GmmSource([GaussianClass(np.zeros(2), np.eye(2))], [1.0], 2.0)
        assert {sample_class(src, rng) for _ in range(50)} == {1}

    def test_zero_weight_never_drawn(self, rng):
        c = GaussianClass(np.zeros(2), np.eye(2))
        src = GmmSource([c, c], [1.0, 0.0], 2.0)
        assert np.all(sample_classes(src, rng, 10_000) == 0)

    def test_frequency(self):
        c = GaussianClass(np.zeros(2), np.eye(2))
        src = GmmSource([c, c], [0.5, 0.5], 2.0)
        freq = np.mean(sample_classes(src, np.random.default_rng(3), 10**5) == 0)
        # 4 sigma binomial interval: 4 * sqrt(0.25 / 1e5) ~ 0.0063
        assert 0.494 <= freq <= 0.506

    def test_deterministic_class(self, rng):
        src = GmmSource([GaussianClass([1.0, -2.0], np.zeros((2, 0)))], [1.0], 5.0)
        np.testing.assert_array_equal(sample_signal(src, 1, rng), [1.0, -2.0])

    def test_range_confinement(self, rng):
        src = GmmSource([GaussianClass(np.zeros(2), np.array([[1.0], [1.0]]))], [1.0], 2.0)
        X = sample_signal(src, 1, rng, size=100)
        np.testing.assert_array_equal(X[:, 0], X[:, 1])

    def test_cayley_sample_covariance(self):
        src = build_cayley_family(CayleyFamilySpec(10, 6, 2, 1.0, 0.01))
        X = sample_signal(src, 2, np.random.default_rng(1), size=10**5)
        S = X.T @ X / len(X)
        Sigma = src.classes[1].cov
        assert np.linalg.norm(S - Sigma) <= 0.05 * np.linalg.norm(Sigma)

    @pytest.mark.parametrize("eps", [0.0, 0.01, 0.3])
    def test_samples_in_shifted_range(self, eps):
        src = build_cayley_family(CayleyFamilySpec(10, 6, 4, 1.0, eps))
        c, X = sample_source(src, np.random.default_rng(2), 500)
        for k, cls in enumerate(src.classes):
            Q, _ = np.linalg.qr(cls.cov_factor)
            R = X[c == k] - cls.mean
            resid = R - (R @ Q) @ Q.T
            assert np.max(np.linalg.norm(resid, axis=1), initial=0.0) <= 1e-9

    def test_bad_class_index(self, rng):
        src = build_cayley_family(CayleyFamilySpec(10, 6, 2, 1.0, 0.01))
        with pytest.raises(ValueError):
            sample_signal(src, 3, rng)


def test_mixture_pdf_integrates_to_one():
    from scipy.stats import multivariate_normal

    rng = np.random.default_rng(4)
    means = [np.array([0.0, 0.0]), np.array([2.0, -1.0])]
    covs = [np.eye(2), np.array([[2.0, 0.5], [0.5, 1.0]])]
    weights = [0.3, 0.7]
    # importance sampling from a wide Gaussian proposal
    N = 200_000
    prop = multivariate_normal(np.zeros(2), 16 * np.eye(2))
    Z = prop.rvs(N, random_state=rng)
    pdf = sum(w * multivariate_normal(m, C).pdf(Z) for w, m, C in zip(weights, means, covs))
    ratio = pdf / prop.pdf(Z)
    assert abs(ratio.mean() - 1.0) <= 3 * ratio.std() / np.sqrt(N)


def test_json_round_trip():
    src = build_cayley_family(CayleyFamilySpec(6, 3, 3, 2.0, 0.05))
    back = GmmSource.from_json(src.to_json())
    assert back.power_budget == src.power_budget
    np.testing.assert_array_equal(back.weights, src.weights)
    for a, b in zip(src.classes, back.classes):
        np.testing.assert_array_equal(a.cov_factor, b.cov_factor)
        np.testing.assert_array_equal(a.mean, b.mean)


def test_factor_rank_checked():
    with pytest.raises(ValueError, match="linearly independent"):
        GaussianClass(np.zeros(3), np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]]))
