import numpy as np
import pytest

from edabench import errors
from edabench.select import (CORRELATION_THRESHOLD, FeatureMatrix,
                             apply_preprocess, correlation_prune,
                             drop_near_constant, fit_preprocess,
                             global_selection, rfe_rank)


def _matrix(values, names=None, labels=None):
    values = np.asarray(values, dtype=float)
    n, d = values.shape
    names = names or [f"f{j}" for j in range(d)]
    labels = labels if labels is not None else np.zeros(n, dtype=int)
    return FeatureMatrix(list(names), values,
                         [f"S{i:02d}" for i in range(n)], labels)


def _separable(n_per_class=30, n_noise=6, seed=0):
    """Two informative features plus pure-noise columns."""
    rng = np.random.default_rng(seed)
    n = 2 * n_per_class
    y = np.repeat([0, 1], n_per_class)
    X = rng.standard_normal((n, 2 + n_noise))
    X[:, 0] += 3.0 * y
    X[:, 1] -= 3.0 * y
    names = ["inf_a", "inf_b"] + [f"noise{j}" for j in range(n_noise)]
    return _matrix(X, names, y)


class TestPreprocess:
    def test_impute_with_train_median(self):
        m = _matrix([[1.0], [3.0], [np.nan], [5.0]])
        params = fit_preprocess(m)
        assert params.medians[0] == 3.0
        z = apply_preprocess(params, m)
        assert not np.any(np.isnan(z.values))

    def test_standardized_train_stats(self):
        m = _matrix(np.random.default_rng(0).normal(5.0, 2.0, (100, 3)))
        z = apply_preprocess(fit_preprocess(m), m)
        assert np.allclose(z.values.mean(axis=0), 0.0, atol=1e-12)
        assert np.allclose(z.values.std(axis=0), 1.0, atol=1e-12)

    def test_params_come_from_train_only(self):
        train = _matrix([[0.0], [2.0]])
        test = _matrix([[100.0]])
        params = fit_preprocess(train)
        z = apply_preprocess(params, test)
        assert z.values[0, 0] == pytest.approx((100.0 - 1.0) / 1.0)

    def test_degenerate_feature_zeroed(self):
        m = _matrix([[2.0, 1.0], [2.0, 3.0], [2.0, 5.0]])
        z = apply_preprocess(fit_preprocess(m), m)
        assert np.array_equal(z.values[:, 0], np.zeros(3))

    def test_all_missing_feature(self):
        m = _matrix([[np.nan], [np.nan]])
        with pytest.raises(errors.AllMissingFeature):
            fit_preprocess(m)


class TestDropNearConstant:
    def test_constant_column_dropped(self):
        m = _matrix([[1.0, 2.0], [1.0, 3.0], [1.0, 4.0]], ["const", "var"])
        kept, dropped = drop_near_constant(m)
        assert dropped == ["const"]
        assert kept.feature_names == ["var"]

    def test_mostly_missing_dropped(self):
        col = np.array([1.0, np.nan, np.nan, np.nan])
        m = _matrix(np.column_stack([col, np.arange(4.0)]), ["gappy", "ok"])
        kept, dropped = drop_near_constant(m)
        assert dropped == ["gappy"]

    def test_half_missing_kept(self):
        col = np.array([1.0, 2.0, np.nan, np.nan])
        m = _matrix(np.column_stack([col, np.arange(4.0)]), ["half", "ok"])
        kept, dropped = drop_near_constant(m)
        assert dropped == []


class TestCorrelationPrune:
    def test_duplicate_column_drops_later(self):
        x = np.random.default_rng(1).standard_normal(40)
        m = _matrix(np.column_stack([x, x, np.random.default_rng(2)
                                     .standard_normal(40)]),
                    ["first", "copy", "other"])
        kept, dropped = correlation_prune(m)
        assert kept.feature_names == ["first", "other"]
        assert dropped[0]["dropped"] == "copy"
        assert dropped[0]["kept"] == "first"
        assert dropped[0]["r"] == pytest.approx(1.0)

    def test_scaled_copy_detected(self):
        x = np.random.default_rng(3).standard_normal(40)
        m = _matrix(np.column_stack([x, 60.0 * x]), ["density", "per_min"])
        kept, dropped = correlation_prune(m)
        assert kept.feature_names == ["density"]

    def test_uncorrelated_survive(self):
        rng = np.random.default_rng(4)
        m = _matrix(rng.standard_normal((200, 4)))
        kept, dropped = correlation_prune(m)
        assert dropped == []
        assert kept.feature_names == m.feature_names

    def test_threshold_boundary(self):
        # |r| exactly at the threshold is pruned (>=, not >)
        n = 100
        rng = np.random.default_rng(5)
        a = rng.standard_normal(n)
        b = rng.standard_normal(n)
        b -= b @ a / (a @ a) * a  # orthogonalize
        a = (a - a.mean()) / a.std()
        b = (b - b.mean()) / b.std()
        r = CORRELATION_THRESHOLD
        c = r * a + np.sqrt(1 - r * r) * b
        kept, dropped = correlation_prune(_matrix(np.column_stack([a, c])))
        assert len(dropped) == 1


class TestRfe:
    def test_recovers_informative_features(self):
        m = _separable()
        z = apply_preprocess(fit_preprocess(m), m)
        report = rfe_rank(z, 2)
        assert sorted(report.selected) == ["inf_a", "inf_b"]

    def test_ranking_partition(self):
        m = _separable()
        z = apply_preprocess(fit_preprocess(m), m)
        report = rfe_rank(z, 3)
        assert len(report.selected) == 3
        assert len(report.rfe_ranking) == len(m.feature_names) - 3
        assert not set(report.selected) & set(report.rfe_ranking)

    def test_k_equals_feature_count_identity(self):
        m = _separable()
        z = apply_preprocess(fit_preprocess(m), m)
        report = rfe_rank(z, len(m.feature_names))
        assert report.selected == list(m.feature_names)
        assert report.rfe_ranking == []

    def test_k_too_large(self):
        m = _separable()
        with pytest.raises(ValueError):
            rfe_rank(m, 100)

    def test_deterministic(self):
        m = _separable()
        z = apply_preprocess(fit_preprocess(m), m)
        assert rfe_rank(z, 4).selected == rfe_rank(z, 4).selected


class TestGlobalSelection:
    def test_full_pipeline(self):
        m = _separable()
        # graft on a constant column and a duplicate of inf_a
        v = np.column_stack([m.values, np.full(len(m.labels), 3.0),
                             m.values[:, 0]])
        m2 = _matrix(v, m.feature_names + ["const", "dup_a"], m.labels)
        report = global_selection(m2, 0.90, 2)
        assert report.dropped_constant == ["const"]
        assert any(d["dropped"] == "dup_a" for d in report.dropped_correlated)
        assert sorted(report.selected) == ["inf_a", "inf_b"]

    def test_k_capped_at_survivors(self):
        m = _separable(n_noise=1)
        report = global_selection(m, 0.90, 8)
        assert len(report.selected) == 3
