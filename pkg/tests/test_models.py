import numpy as np
import pytest

from edabench import errors
from edabench.models import ModelSpec, fit

ALL_KINDS = ModelSpec.KINDS


def _clusters(n_per_class=20, d=3, sep=6.0, n_classes=2, seed=0):
    rng = np.random.default_rng(seed)
    X = []
    y = []
    for c in range(n_classes):
        center = np.zeros(d)
        center[c % d] = sep * (c + 1)
        X.append(center + rng.standard_normal((n_per_class, d)))
        y.append(np.full(n_per_class, c))
    return np.vstack(X), np.concatenate(y)


class TestRoster:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_separated_clusters_training_accuracy(self, kind):
        X, y = _clusters()
        spec = ModelSpec(kind=kind, n_trees=25)
        model = fit(spec, X, y)
        assert np.array_equal(model.predict(X), y)

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_three_class(self, kind):
        X, y = _clusters(n_classes=3, sep=8.0)
        model = fit(ModelSpec(kind=kind, n_trees=25), X, y)
        assert np.mean(model.predict(X) == y) == 1.0

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_single_class_rejected(self, kind):
        X = np.zeros((5, 2))
        with pytest.raises(errors.SingleClassTraining):
            fit(ModelSpec(kind=kind), X, np.zeros(5, dtype=int))

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_dimension_mismatch(self, kind):
        X, y = _clusters()
        model = fit(ModelSpec(kind=kind, n_trees=5), X, y)
        with pytest.raises(errors.DimensionMismatch):
            model.predict(np.zeros((3, X.shape[1] + 1)))

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_deterministic_given_spec(self, kind):
        X, y = _clusters(seed=4)
        Xq = np.random.default_rng(5).standard_normal((40, X.shape[1])) * 4
        spec = ModelSpec(kind=kind, n_trees=10, seed=7)
        p1 = fit(spec, X, y).predict(Xq)
        p2 = fit(spec, X, y).predict(Xq)
        assert np.array_equal(p1, p2)


class TestLda:
    def test_equal_prior_boundary_is_midpoint(self):
        # 1-D, equal class sizes: score difference crosses zero at (mu0+mu1)/2
        rng = np.random.default_rng(0)
        x0 = rng.normal(0.0, 1.0, 500)
        x1 = rng.normal(4.0, 1.0, 500)
        X = np.concatenate([x0, x1])[:, None]
        y = np.repeat([0, 1], 500)
        model = fit(ModelSpec(kind="lda"), X, y)
        mid = (x0.mean() + x1.mean()) / 2.0
        s = model.scores(np.array([[mid]]))
        assert abs(s[0, 0] - s[0, 1]) < 1e-9
        assert model.predict(np.array([[mid - 1e-6]]))[0] == 0
        assert model.predict(np.array([[mid + 1e-6]]))[0] == 1

    def test_prior_shift(self):
        # a 9:1 prior moves the boundary toward the rare class
        rng = np.random.default_rng(1)
        X = np.concatenate([rng.normal(0, 1, 900), rng.normal(4, 1, 100)])[:, None]
        y = np.repeat([0, 1], [900, 100])
        model = fit(ModelSpec(kind="lda"), X, y)
        mid = (X[y == 0].mean() + X[y == 1].mean()) / 2.0
        assert model.predict(np.array([[mid]]))[0] == 0


class TestGaussianNb:
    def test_class_mean_maximizes_own_score(self):
        X, y = _clusters(n_classes=3, sep=5.0, seed=2)
        model = fit(ModelSpec(kind="gaussian_nb"), X, y)
        for c in range(3):
            mu = X[y == c].mean(axis=0)[None, :]
            assert model.predict(mu)[0] == c

    def test_variance_floor_handles_constant_feature(self):
        X = np.array([[0.0, 1.0], [0.0, 2.0], [0.0, 5.0], [0.0, 6.0]])
        y = np.array([0, 0, 1, 1])
        model = fit(ModelSpec(kind="gaussian_nb"), X, y)
        assert np.all(np.isfinite(model.scores(X)))


class TestKnn:
    def test_k1_memorizes(self):
        X, y = _clusters(seed=3)
        model = fit(ModelSpec(kind="knn", k=1), X, y)
        assert np.array_equal(model.predict(X), y)

    def test_vote_tie_goes_to_nearest(self):
        X = np.array([[0.0], [0.2], [1.0], [1.3]])
        y = np.array([0, 0, 1, 1])
        model = fit(ModelSpec(kind="knn", k=4), X, y)
        # 2-2 vote; nearest neighbor to 0.1 is class 0
        assert model.predict(np.array([[0.1]]))[0] == 0
        assert model.predict(np.array([[1.1]]))[0] == 1

    def test_k_capped_at_train_size(self):
        X = np.array([[0.0], [1.0]])
        y = np.array([0, 1])
        model = fit(ModelSpec(kind="knn", k=50), X, y)
        assert model.k == 2


class TestTrees:
    def test_single_split_problem(self):
        X = np.array([[0.0], [1.0], [2.0], [10.0], [11.0], [12.0]])
        y = np.array([0, 0, 0, 1, 1, 1])
        model = fit(ModelSpec(kind="decision_tree"), X, y)
        assert model.root.feature == 0
        assert 2.0 < model.root.threshold < 10.0

    def test_max_depth_limits(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((100, 3))
        y = (X[:, 0] * X[:, 1] > 0).astype(int)  # xor-like, needs depth 2
        stump = fit(ModelSpec(kind="decision_tree", max_depth=1), X, y)
        deep = fit(ModelSpec(kind="decision_tree", max_depth=None), X, y)
        assert np.mean(deep.predict(X) == y) > np.mean(stump.predict(X) == y)

    def test_forest_seed_changes_model(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((60, 4))
        y = (X[:, 0] + 0.3 * rng.standard_normal(60) > 0).astype(int)
        Xq = rng.standard_normal((200, 4)) * 0.2  # near the boundary
        p1 = fit(ModelSpec(kind="random_forest", n_trees=15, seed=1), X, y).predict(Xq)
        p2 = fit(ModelSpec(kind="random_forest", n_trees=15, seed=2), X, y).predict(Xq)
        assert not np.array_equal(p1, p2)

    def test_extra_trees_no_bootstrap_still_fits(self):
        X, y = _clusters(seed=8)
        model = fit(ModelSpec(kind="extra_trees", n_trees=20, seed=3), X, y)
        assert np.mean(model.predict(X) == y) == 1.0


class TestSpec:
    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            ModelSpec(kind="svm")

    def test_display_names(self):
        assert ModelSpec(kind="knn", k=5).display_name() == "knn_k5"
        assert ModelSpec(kind="lda").display_name() == "lda"
