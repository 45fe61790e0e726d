import numpy as np
import pytest

from gmm_wiretap.channel_model import (
    ChannelPair,
    induce,
    make_bob_dct,
    make_eve_gaussian,
    noise_var_from_snr,
    sample_induced,
    sample_observation,
)
from gmm_wiretap.numerics import cayley_transform, skew_matrix
from gmm_wiretap.signal_model import (
    CayleyFamilySpec,
    GaussianClass,
    GmmSource,
    build_cayley_family,
    sample_signal,
)


class TestChannels:
    def test_bob_dct_six_of_ten(self):
        phi = make_bob_dct(10, 6)
        assert phi.shape == (6, 10)
        np.testing.assert_allclose(phi @ phi.T, np.eye(6), atol=1e-12)

    def test_bob_dct_square(self):
        phi = make_bob_dct(4, 4)
        np.testing.assert_allclose(phi.T @ phi, np.eye(4), atol=1e-12)

    def test_bob_dct_single_row(self):
        np.testing.assert_allclose(make_bob_dct(8, 1), np.full((1, 8), 1 / np.sqrt(8)), rtol=1e-15)

    def test_eve_deterministic(self):
        a = make_eve_gaussian(10, 4, np.random.default_rng(9))
        b = make_eve_gaussian(10, 4, np.random.default_rng(9))
        np.testing.assert_array_equal(a, b)

    def test_eve_statistics(self):
        rng = np.random.default_rng(10)
        entries = np.stack([make_eve_gaussian(10, 4, rng) for _ in range(1000)])
        assert abs(entries.mean()) <= 0.02
        assert abs(entries.var() - 1.0) <= 0.03

    def test_eve_square_full_rank(self, rng):
        assert np.linalg.svd(make_eve_gaussian(3, 3, rng), compute_uv=False)[-1] > 1e-12

    def test_channel_pair_invariants(self, rng):
        with pytest.raises(ValueError):
            ChannelPair(np.eye(4), rng.standard_normal((2, 4)), 0.1)
        with pytest.raises(ValueError):
            ChannelPair(make_bob_dct(5, 3), rng.standard_normal((2, 5)), -1.0)
        pair = ChannelPair(make_bob_dct(5, 3), rng.standard_normal((2, 5)), 0.1)
        back = ChannelPair.from_dict(pair.to_dict())
        np.testing.assert_array_equal(back.phi_e, pair.phi_e)

    @pytest.mark.parametrize(
        "convention,expected", [("total", 10**-2.5), ("per-antenna", 0.1 * 10**-2.5)]
    )
    def test_snr_conventions(self, convention, expected):
        assert noise_var_from_snr(25.0, 1.0, 10, convention) == pytest.approx(expected, rel=1e-14)


class TestInduce:
    def test_pure_noise(self):
        src = GmmSource([GaussianClass(np.zeros(3), np.zeros((3, 0)))] * 2, [0.5, 0.5], 1.0)
        igmm = induce(src, np.ones((2, 3)), 1.0)
        for k in range(2):
            np.testing.assert_array_equal(igmm.covs[k], np.eye(2))
            np.testing.assert_array_equal(igmm.means[k], np.zeros(2))

    def test_identity_channel(self):
        src = build_cayley_family(CayleyFamilySpec(5, 3, 3, 1.0, 0.2))
        igmm = induce(src, np.eye(5), 0.0)
        for k, cls in enumerate(src.classes):
            np.testing.assert_allclose(igmm.covs[k], cls.cov, atol=1e-15)
            np.testing.assert_array_equal(igmm.means[k], cls.mean)
        np.testing.assert_array_equal(igmm.weights, src.weights)

    def test_triple_product_oracle(self):
        s2 = 10**-3.5
        src = build_cayley_family(CayleyFamilySpec(10, 6, 2, 1.0, 0.01))
        phi = make_bob_dct(10, 6)
        igmm = induce(src, phi, s2)
        A = skew_matrix(10, 0.01)
        W = (np.eye(10) - A) @ np.linalg.inv(np.eye(10) + A)
        J = np.diag([1.0] * 5 + [0.0] * 5)
        for k in (1, 2):
            Wk = np.linalg.matrix_power(W, k)
            expected = 0.2 * np.linalg.multi_dot([phi, Wk, J, Wk.T, phi.T]) + s2 * np.eye(6)
            assert np.linalg.norm(igmm.covs[k - 1] - expected) <= 1e-12

    def test_dimension_mismatch(self):
        src = build_cayley_family(CayleyFamilySpec(10, 6, 2, 1.0, 0.01))
        with pytest.raises(ValueError):
            induce(src, np.ones((4, 9)), 0.1)

    def test_pd_with_noise(self, rng):
        src = build_cayley_family(CayleyFamilySpec(10, 6, 4, 1.0, 0.05))
        igmm = induce(src, make_eve_gaussian(10, 4, rng), 1e-6)
        assert igmm.chol.shape == (4, 4, 4)

    def test_noiseless_eve_full_rank(self, rng):
        src = build_cayley_family(CayleyFamilySpec(10, 6, 4, 1.0, 0.05))
        for _ in range(10):
            igmm = induce(src, make_eve_gaussian(10, 4, rng), 0.0)
            for C in igmm.covs:
                w = np.linalg.eigvalsh(C)
                assert w[0] > 1e-12 * w[-1]


class TestSampleObservation:
    def test_noiseless_deterministic_class(self, rng):
        src = GmmSource([GaussianClass([1.0, 2.0, 3.0], np.zeros((3, 0)))], [1.0], 20.0)
        phi = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
        igmm = induce(src, phi, 0.0)
        np.testing.assert_array_equal(sample_observation(igmm, 1, rng), [4.0, 2.0])

    def test_sample_covariance(self):
        src = build_cayley_family(CayleyFamilySpec(10, 6, 2, 1.0, 0.1))
        igmm = induce(src, make_bob_dct(10, 6), 0.1)
        Y = sample_observation(igmm, 2, np.random.default_rng(5), size=10**5)
        S = np.cov(Y, rowvar=False)
        assert np.linalg.norm(S - igmm.covs[1]) <= 0.05 * np.linalg.norm(igmm.covs[1])

    def test_end_to_end_matches_direct(self):
        """x -> phi x + w agrees in distribution with direct sampling of the induced class."""
        N = 10**5
        s2 = 0.1
        cls = GaussianClass([0.5, -1.0, 0.0, 2.0], np.random.default_rng(0).standard_normal((4, 2)))
        src = GmmSource([cls], [1.0], 100.0)
        phi = np.random.default_rng(1).standard_normal((3, 4))
        igmm = induce(src, phi, s2)
        rng = np.random.default_rng(6)
        X = sample_signal(src, 1, rng, size=N)
        Y1 = X @ phi.T + np.sqrt(s2) * rng.standard_normal((N, 3))
        Y2 = sample_observation(igmm, 1, rng, size=N)
        sd = np.sqrt(np.diag(igmm.covs[0]))
        diff = np.abs(Y1.mean(0) - Y2.mean(0))
        assert np.all(diff <= 4 * sd * np.sqrt(2.0 / N))
        for Y in (Y1, Y2):
            assert np.linalg.norm(np.cov(Y, rowvar=False) - igmm.covs[0]) <= 0.05 * np.linalg.norm(igmm.covs[0])

    def test_joint_sampler_class_frequencies(self):
        src = build_cayley_family(CayleyFamilySpec(10, 6, 4, 1.0, 0.1))
        igmm = induce(src, make_bob_dct(10, 6), 0.01)
        c, Y = sample_induced(igmm, np.random.default_rng(0), 40_000)
        assert Y.shape == (40_000, 6)
        assert np.all(np.abs(np.bincount(c) / 40_000 - 0.25) <= 4 * np.sqrt(0.25 * 0.75 / 40_000))
