"""Downsampling, PCA, SRVF, S² ve Pearson için oracle ve özellik testleri."""

import numpy as np
import pytest

from errors import DegenerateSignalError, ParameterError, RankError
from fiberset_io import EndpointSignals
from functional_kernels import (
    cluster_pearson,
    downsample_signals,
    endpoint_features,
    fiber_coherence,
    fit_pca,
    functional_cost,
    functional_pseudolabel,
    load_pca,
    pairwise_functional,
    pairwise_pearson,
    project_pca,
    save_pca,
    srvf_transform,
)


def random_signals(rng, n, T, start_id=0):
    return [EndpointSignals(start_id + i, rng.normal(size=T), rng.normal(size=T)) for i in range(n)]


@pytest.fixture
def pca_model(rng):
    signals = random_signals(rng, 15, 30)
    return fit_pca([row for s in signals for row in (s.series_a, s.series_b)], 6)


class TestDownsample:
    def test_full_length_is_identity(self, rng):
        s = random_signals(rng, 1, 50)[0]
        out = downsample_signals(s, 50, seed=1)
        np.testing.assert_array_equal(out.matrix, [s.series_a, s.series_b])

    def test_default_length(self, rng):
        s = random_signals(rng, 1, 1200)[0]
        out = downsample_signals(s, 600, seed=0)
        assert out.matrix.shape == (2, 600)
        assert np.all(np.diff(out.time_indices) > 0)

    def test_both_rows_share_indices(self, rng):
        s = random_signals(rng, 1, 200)[0]
        out = downsample_signals(s, 37, seed=5)
        np.testing.assert_array_equal(out.matrix[0], s.series_a[out.time_indices])
        np.testing.assert_array_equal(out.matrix[1], s.series_b[out.time_indices])

    def test_deterministic_in_seed(self, rng):
        s = random_signals(rng, 1, 100)[0]
        np.testing.assert_array_equal(downsample_signals(s, 40, 3).matrix, downsample_signals(s, 40, 3).matrix)

    def test_too_long_target(self, rng):
        with pytest.raises(ParameterError):
            downsample_signals(random_signals(rng, 1, 10)[0], 11)


class TestPCA:
    def test_exact_subspace_recovery(self, rng):
        basis = rng.normal(size=(2, 12))
        X = rng.normal(size=(25, 2)) @ basis + rng.normal(size=12)
        model = fit_pca(X, 2)
        coords = project_pca(model, X)
        recon = coords @ model.components + model.mean
        assert np.max(np.abs(recon - X)) <= 1e-8

    def test_duplicated_samples_raise_rank_error(self):
        with pytest.raises(RankError):
            fit_pca(np.tile(np.arange(8.0), (10, 1)), 2)

    def test_more_components_than_rank(self, rng):
        X = rng.normal(size=(20, 1)) @ rng.normal(size=(1, 10))
        with pytest.raises(RankError):
            fit_pca(X, 3)

    def test_too_few_signals(self, rng):
        with pytest.raises(ParameterError):
            fit_pca(rng.normal(size=(4, 10)), 4)

    def test_variance_matches_dense_eigensolver(self, rng):
        X = rng.normal(size=(50, 16))
        model = fit_pca(X, 4)
        eigvals = np.sort(np.linalg.eigvalsh(np.cov(X, rowvar=False)))[::-1][:4]
        np.testing.assert_allclose(model.explained_variance, eigvals, atol=1e-8)

    def test_components_orthonormal_sorted_and_signed(self, rng):
        model = fit_pca(rng.normal(size=(40, 9)), 5)
        np.testing.assert_allclose(model.components @ model.components.T, np.eye(5), atol=1e-8)
        assert np.all(np.diff(model.explained_variance) <= 0)
        pivots = model.components[np.arange(5), np.argmax(np.abs(model.components), axis=1)]
        assert np.all(pivots > 0)

    def test_project_mean_and_component(self, pca_model):
        np.testing.assert_allclose(project_pca(pca_model, pca_model.mean), 0.0, atol=1e-12)
        unit = project_pca(pca_model, pca_model.mean + pca_model.components[0])
        expected = np.zeros(pca_model.n_components)
        expected[0] = 1.0
        np.testing.assert_allclose(unit, expected, atol=1e-10)

    def test_project_matches_dot_products(self, pca_model, rng):
        x = rng.normal(size=pca_model.signal_length)
        naive = [sum(c[t] * (x[t] - pca_model.mean[t]) for t in range(len(x))) for c in pca_model.components]
        np.testing.assert_allclose(project_pca(pca_model, x), naive, atol=1e-10)

    def test_projection_preserves_norm_in_span(self, pca_model, rng):
        v = rng.normal(size=pca_model.n_components) @ pca_model.components
        assert np.linalg.norm(project_pca(pca_model, pca_model.mean + v)) == pytest.approx(np.linalg.norm(v), abs=1e-8)

    def test_project_length_mismatch(self, pca_model):
        with pytest.raises(ParameterError):
            project_pca(pca_model, np.zeros(pca_model.signal_length + 1))

    def test_save_load(self, pca_model, tmp_path):
        save_pca(pca_model, tmp_path)
        loaded = load_pca(tmp_path)
        np.testing.assert_array_equal(loaded.mean, pca_model.mean)
        np.testing.assert_array_equal(loaded.components, pca_model.components)
        np.testing.assert_array_equal(loaded.explained_variance, pca_model.explained_variance)


class TestSRVF:
    def test_constant_vector(self):
        np.testing.assert_array_equal(srvf_transform(np.full(6, 3.5)).values, np.zeros(5))

    def test_linear_ramp(self):
        np.testing.assert_allclose(srvf_transform(4.0 * np.arange(7)).values, 2.0)

    @pytest.mark.parametrize("seed", range(100))
    def test_matches_elementwise_oracle(self, seed):
        rng = np.random.default_rng(seed)
        f = rng.normal(scale=rng.uniform(0.1, 10.0), size=int(rng.integers(2, 20)))
        expected = []
        for k in range(f.size - 1):
            d = f[k + 1] - f[k]
            expected.append(d / np.sqrt(abs(d)) if abs(d) > 1e-12 else 0.0)
        np.testing.assert_allclose(srvf_transform(f).values, expected, rtol=1e-12)

    @pytest.mark.parametrize("seed", range(200))
    def test_constant_shift_invariance(self, seed):
        rng = np.random.default_rng(seed)
        f = rng.normal(size=int(rng.integers(2, 16)))
        shift = rng.uniform(-100.0, 100.0)
        np.testing.assert_allclose(srvf_transform(f + shift).values, srvf_transform(f).values, atol=1e-6)

    def test_needs_two_samples(self):
        with pytest.raises(ParameterError):
            srvf_transform(np.array([1.0]))


class TestFunctionalPseudolabel:
    def test_identity(self, rng, pca_model):
        s = random_signals(rng, 1, 30)[0]
        assert functional_pseudolabel(s, s, pca_model) == pytest.approx(0.0, abs=1e-12)

    def test_swapped_endpoints(self, rng, pca_model):
        s = random_signals(rng, 1, 30)[0]
        assert functional_pseudolabel(s, s.swapped(), pca_model) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("seed", range(100))
    def test_matches_four_way_brute_force(self, seed, pca_model):
        rng = np.random.default_rng(seed)
        a, b = random_signals(rng, 2, 30)

        def feat(x):
            return srvf_transform(project_pca(pca_model, x)).values

        def mse(x, y):
            return np.mean((feat(x) - feat(y)) ** 2)

        direct = (mse(a.series_a, b.series_a) + mse(a.series_b, b.series_b)) / 2
        swapped = (mse(a.series_a, b.series_b) + mse(a.series_b, b.series_a)) / 2
        assert functional_pseudolabel(a, b, pca_model) == pytest.approx(min(direct, swapped), rel=1e-9, abs=1e-12)

    def test_bitwise_symmetric(self, rng, pca_model):
        feats = endpoint_features(random_signals(rng, 10, 30), pca_model)
        for i in range(10):
            for j in range(10):
                assert functional_cost(feats[i], feats[j]) == functional_cost(feats[j], feats[i])

    def test_length_mismatch(self, rng, pca_model):
        a = random_signals(rng, 1, 30)[0]
        b = random_signals(rng, 1, 31)[0]
        with pytest.raises(ParameterError):
            functional_pseudolabel(a, b, pca_model)

    def test_pairwise_matrix(self, rng, pca_model):
        signals = random_signals(rng, 7, 30)
        m = pairwise_functional(signals, pca_model)
        np.testing.assert_array_equal(m, m.T)
        np.testing.assert_array_equal(np.diag(m), 0.0)
        for i in range(7):
            for j in range(i + 1, 7):
                assert m[i, j] == pytest.approx(functional_pseudolabel(signals[i], signals[j], pca_model), rel=1e-12, abs=1e-12)


class TestPearson:
    def test_identical_signals(self, rng):
        a, b = rng.normal(size=50), rng.normal(size=50)
        signals = [EndpointSignals(i, a, b) for i in range(4)]
        assert cluster_pearson(signals) == pytest.approx(1.0, abs=1e-12)

    def test_negated_signals(self, rng):
        a, b = rng.normal(size=50), rng.normal(size=50)
        signals = [EndpointSignals(0, a, b), EndpointSignals(1, -a, -b)]
        assert cluster_pearson(signals) == pytest.approx(-1.0, abs=1e-12)

    def test_matches_double_loop(self, rng):
        signals = random_signals(rng, 4, 40)
        values = []
        for i in range(4):
            for j in range(i + 1, 4):
                a, b = signals[i], signals[j]

                def r(x, y):
                    return np.corrcoef(x, y)[0, 1]

                direct = (r(a.series_a, b.series_a) + r(a.series_b, b.series_b)) / 2
                swapped = (r(a.series_a, b.series_b) + r(a.series_b, b.series_a)) / 2
                values.append(max(direct, swapped))
        assert cluster_pearson(signals) == pytest.approx(np.mean(values), abs=1e-10)

    def test_invariant_to_endpoint_swap(self, rng):
        signals = random_signals(rng, 5, 40)
        swapped = [s.swapped() if s.fiber_id % 2 else s for s in signals]
        assert cluster_pearson(swapped) == pytest.approx(cluster_pearson(signals), abs=1e-12)

    def test_constant_signal(self, rng):
        signals = random_signals(rng, 2, 20) + [EndpointSignals(9, np.ones(20), rng.normal(size=20))]
        with pytest.raises(DegenerateSignalError, match="fiber 9"):
            cluster_pearson(signals)

    def test_singleton(self, rng):
        with pytest.raises(ParameterError):
            cluster_pearson(random_signals(rng, 1, 20))

    def test_fiber_coherence_is_row_mean(self, rng):
        signals = random_signals(rng, 5, 30)
        corr = pairwise_pearson(signals)
        coherence = fiber_coherence(signals)
        assert coherence.shape == (5,)
        assert coherence[2] == pytest.approx((corr[2].sum() - corr[2, 2]) / 4, abs=1e-12)
