"""From-scratch classifier roster.

Every model is deterministic given its spec (ensembles take an explicit
seed) and exposes fit/predict over dense float matrices with integer class
labels 0..C-1.  Tie-breaking always resolves to the lowest class index.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import logistic
from .errors import DimensionMismatch, SingleClassTraining

LDA_RIDGE = 1e-6
GNB_VAR_FLOOR = 1e-9
DEFAULT_N_TREES = 100


@dataclass(frozen=True)
class ModelSpec:
    kind: str                      # lda | logistic_regression | gaussian_nb |
                                   # knn | decision_tree | random_forest | extra_trees
    k: int = 5                     # knn
    max_depth: int | None = None   # trees
    n_trees: int = DEFAULT_N_TREES
    seed: int = 0

    KINDS = ("lda", "logistic_regression", "gaussian_nb", "knn",
             "decision_tree", "random_forest", "extra_trees")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.k < 1 or self.n_trees < 1:
            raise ValueError("k and n_trees must be >= 1")

    def display_name(self) -> str:
        if self.kind == "knn":
            return f"knn_k{self.k}"
        return self.kind


def _validate_training(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2 or len(X) != len(y):
        raise DimensionMismatch("X must be 2-D with one label per row")
    if len(np.unique(y)) < 2:
        raise SingleClassTraining("training labels contain a single class")
    return X, y


class TrainedModel:
    def __init__(self, spec: ModelSpec, n_features: int, n_classes: int):
        self.spec = spec
        self.n_features = n_features
        self.n_classes = n_classes

    def _check(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DimensionMismatch(
                f"expected {self.n_features} features, got {X.shape}")
        return X

    def predict(self, X):
        raise NotImplementedError


class _ScoreModel(TrainedModel):
    """Models that predict by argmax of per-class scores (lowest index wins ties)."""

    def scores(self, X):
        raise NotImplementedError

    def predict(self, X):
        X = self._check(X)
        return np.argmax(self.scores(X), axis=1)


class LdaModel(_ScoreModel):
    """Shared pooled covariance with a small ridge; linear discriminant scores."""

    def __init__(self, spec, X, y):
        X, y = _validate_training(X, y)
        n_classes = int(y.max()) + 1
        super().__init__(spec, X.shape[1], n_classes)
        d = X.shape[1]
        self.present = np.unique(y)
        self.means = np.stack([X[y == c].mean(axis=0) if np.any(y == c)
                               else np.zeros(d) for c in range(n_classes)])
        self.priors = np.array([np.count_nonzero(y == c) / len(y)
                                for c in range(n_classes)])
        pooled = np.zeros((d, d))
        for c in self.present:
            diff = X[y == c] - self.means[c]
            pooled += diff.T @ diff
        pooled /= max(len(y) - len(self.present), 1)
        ridge = LDA_RIDGE * np.trace(pooled) / d if np.trace(pooled) > 0 else LDA_RIDGE
        pooled += ridge * np.eye(d)
        self.cov_inv = np.linalg.inv(pooled)

    def scores(self, X):
        s = np.full((len(X), self.n_classes), -np.inf)
        for c in self.present:
            mu = self.means[c]
            s[:, c] = (X @ self.cov_inv @ mu
                       - 0.5 * mu @ self.cov_inv @ mu
                       + np.log(self.priors[c]))
        return s


class LogisticModel(_ScoreModel):
    def __init__(self, spec, X, y):
        X, y = _validate_training(X, y)
        n_classes = int(y.max()) + 1
        super().__init__(spec, X.shape[1], n_classes)
        if n_classes == 2:
            self.weights = logistic.fit_binary(X, (y == 1).astype(float))
        else:
            self.weights = logistic.fit_multiclass(X, y, n_classes)

    def scores(self, X):
        return logistic.predict_proba(self.weights, X)


class GaussianNbModel(_ScoreModel):
    def __init__(self, spec, X, y):
        X, y = _validate_training(X, y)
        n_classes = int(y.max()) + 1
        super().__init__(spec, X.shape[1], n_classes)
        floor = GNB_VAR_FLOOR * max(X.var(axis=0).max(), 1e-300)
        self.present = np.unique(y)
        d = X.shape[1]
        self.means = np.stack([X[y == c].mean(axis=0) if np.any(y == c)
                               else np.zeros(d) for c in range(n_classes)])
        self.vars = np.stack([np.maximum(X[y == c].var(axis=0), floor)
                              if np.any(y == c) else np.full(d, floor)
                              for c in range(n_classes)])
        with np.errstate(divide="ignore"):
            self.log_priors = np.log(np.array(
                [np.count_nonzero(y == c) / len(y) for c in range(n_classes)]))

    def scores(self, X):
        s = np.full((len(X), self.n_classes), -np.inf)
        for c in self.present:
            log_lik = -0.5 * np.sum(
                np.log(2 * np.pi * self.vars[c])
                + (X - self.means[c]) ** 2 / self.vars[c], axis=1)
            s[:, c] = log_lik + self.log_priors[c]
        return s


class KnnModel(TrainedModel):
    """Euclidean k-NN; class ties go to the nearest neighbor, then lowest index."""

    def __init__(self, spec, X, y):
        X, y = _validate_training(X, y)
        super().__init__(spec, X.shape[1], int(y.max()) + 1)
        self.X = X
        self.y = y
        self.k = min(spec.k, len(X))

    def predict(self, X):
        X = self._check(X)
        out = np.empty(len(X), dtype=int)
        for i, row in enumerate(X):
            dist = np.sqrt(np.sum((self.X - row) ** 2, axis=1))
            order = np.argsort(dist, kind="stable")
            nearest = order[:self.k]
            votes = np.bincount(self.y[nearest], minlength=self.n_classes)
            best = votes.max()
            tied = set(np.flatnonzero(votes == best))
            if len(tied) > 1:
                for idx in nearest:  # distance order: first tied class wins
                    if self.y[idx] in tied:
                        out[i] = self.y[idx]
                        break
            else:
                out[i] = int(np.argmax(votes))
        return out


class _TreeNode:
    __slots__ = ("feature", "threshold", "left", "right", "label")

    def __init__(self, label=None):
        self.feature = None
        self.threshold = None
        self.left = None
        self.right = None
        self.label = label


def _gini(counts):
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return 1.0 - np.sum(p ** 2)


def _best_split(X, y, n_classes, feature_indices, rng=None):
    """Exhaustive (or random-threshold when rng given) Gini split search.

    Returns (feature, threshold, gain) with deterministic tie-breaking by
    feature order then threshold.
    """
    n = len(y)
    parent = _gini(np.bincount(y, minlength=n_classes))
    best = (None, None, 0.0)
    for j in feature_indices:
        col = X[:, j]
        if rng is None:
            values = np.unique(col)
            if len(values) < 2:
                continue
            thresholds = (values[:-1] + values[1:]) / 2.0
        else:
            lo, hi = col.min(), col.max()
            if lo == hi:
                continue
            thresholds = [rng.uniform(lo, hi)]
        for t in thresholds:
            left = col <= t
            nl = np.count_nonzero(left)
            if nl == 0 or nl == n:
                continue
            gl = _gini(np.bincount(y[left], minlength=n_classes))
            gr = _gini(np.bincount(y[~left], minlength=n_classes))
            gain = parent - (nl / n) * gl - ((n - nl) / n) * gr
            if gain > best[2] + 1e-15:
                best = (j, float(t), gain)
    return best


def _grow_tree(X, y, n_classes, max_depth, depth, feature_sampler, rng):
    node = _TreeNode()
    counts = np.bincount(y, minlength=n_classes)
    node.label = int(np.argmax(counts))  # argmax ties -> lowest class
    if (len(np.unique(y)) == 1 or len(y) < 2
            or (max_depth is not None and depth >= max_depth)):
        return node
    feature_indices = feature_sampler()
    feat, thr, gain = _best_split(
        X, y, n_classes, feature_indices,
        rng=rng if rng is not None and feature_sampler.random_threshold else None)
    if feat is None or gain <= 0:
        return node
    mask = X[:, feat] <= thr
    node.feature = feat
    node.threshold = thr
    node.left = _grow_tree(X[mask], y[mask], n_classes, max_depth, depth + 1,
                           feature_sampler, rng)
    node.right = _grow_tree(X[~mask], y[~mask], n_classes, max_depth, depth + 1,
                            feature_sampler, rng)
    return node


class _FeatureSampler:
    def __init__(self, n_features, subset_size=None, rng=None,
                 random_threshold=False):
        self.n_features = n_features
        self.subset_size = subset_size
        self.rng = rng
        self.random_threshold = random_threshold

    def __call__(self):
        if self.subset_size is None or self.rng is None:
            return list(range(self.n_features))
        idx = self.rng.choice(self.n_features, size=self.subset_size,
                              replace=False)
        return sorted(int(i) for i in idx)


def _predict_tree(node, row):
    while node.feature is not None:
        node = node.left if row[node.feature] <= node.threshold else node.right
    return node.label


class DecisionTreeModel(TrainedModel):
    def __init__(self, spec, X, y):
        X, y = _validate_training(X, y)
        super().__init__(spec, X.shape[1], int(y.max()) + 1)
        sampler = _FeatureSampler(X.shape[1])
        self.root = _grow_tree(X, y, self.n_classes, spec.max_depth, 0,
                               sampler, None)

    def predict(self, X):
        X = self._check(X)
        return np.array([_predict_tree(self.root, row) for row in X], dtype=int)


class _ForestModel(TrainedModel):
    """Common vote logic for bagged and extremely randomized ensembles."""

    extra = False

    def __init__(self, spec, X, y):
        X, y = _validate_training(X, y)
        super().__init__(spec, X.shape[1], int(y.max()) + 1)
        rng = np.random.default_rng(spec.seed)
        subset = max(1, int(round(np.sqrt(X.shape[1]))))
        self.trees = []
        for _ in range(spec.n_trees):
            tree_rng = np.random.default_rng(rng.integers(0, 2 ** 63))
            if self.extra:
                Xi, yi = X, y
            else:
                boot = tree_rng.integers(0, len(X), size=len(X))
                Xi, yi = X[boot], y[boot]
                if len(np.unique(yi)) < 2:
                    # degenerate bootstrap: fall back to the full sample
                    Xi, yi = X, y
            sampler = _FeatureSampler(X.shape[1], subset, tree_rng,
                                      random_threshold=self.extra)
            self.trees.append(_grow_tree(Xi, yi, self.n_classes,
                                         spec.max_depth, 0, sampler, tree_rng))

    def predict(self, X):
        X = self._check(X)
        out = np.empty(len(X), dtype=int)
        for i, row in enumerate(X):
            votes = np.bincount([_predict_tree(t, row) for t in self.trees],
                                minlength=self.n_classes)
            out[i] = int(np.argmax(votes))
        return out


class RandomForestModel(_ForestModel):
    extra = False


class ExtraTreesModel(_ForestModel):
    extra = True


_BUILDERS = {
    "lda": LdaModel,
    "logistic_regression": LogisticModel,
    "gaussian_nb": GaussianNbModel,
    "knn": KnnModel,
    "decision_tree": DecisionTreeModel,
    "random_forest": RandomForestModel,
    "extra_trees": ExtraTreesModel,
}


def fit(spec: ModelSpec, X, y) -> TrainedModel:
    return _BUILDERS[spec.kind](spec, X, y)
