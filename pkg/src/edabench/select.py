"""Feature-matrix hygiene and selection.

Order of operations in the standard pipeline: drop near-constant /
mostly-missing columns, prune one of every highly correlated pair (keeping
the feature earlier in catalog order), median-impute and standardize, then
rank the survivors with recursive feature elimination using logistic
regression coefficients.  Imputation and scaling statistics always come
from training rows only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import logistic
from .errors import AllMissingFeature

CORRELATION_THRESHOLD = 0.90
NEAR_CONSTANT_TOL = 1e-10
MAX_MISSING_RATE = 0.5
RFE_TOP_K = 8


@dataclass
class FeatureMatrix:
    feature_names: list[str]
    values: np.ndarray        # observations x features, NaN marks missing
    subject_ids: list[str]
    labels: np.ndarray        # class ints per row

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.values.ndim != 2:
            raise ValueError("values must be 2-D")
        if self.values.shape[0] < 1:
            raise ValueError("need at least one observation")
        if self.values.shape[1] != len(self.feature_names):
            raise ValueError("feature count mismatch")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError("feature names must be unique")

    def restrict(self, names: list[str]) -> "FeatureMatrix":
        idx = [self.feature_names.index(n) for n in names]
        return FeatureMatrix(list(names), self.values[:, idx],
                             list(self.subject_ids), self.labels.copy())

    def rows(self, mask: np.ndarray) -> "FeatureMatrix":
        subj = [s for s, m in zip(self.subject_ids, mask) if m]
        return FeatureMatrix(list(self.feature_names), self.values[mask],
                             subj, self.labels[mask])


@dataclass(frozen=True)
class PreprocessParams:
    medians: np.ndarray
    means: np.ndarray
    stds: np.ndarray          # 0 marks a degenerate feature
    fitted_on: int


@dataclass
class SelectionReport:
    dropped_constant: list[str] = field(default_factory=list)
    dropped_correlated: list[dict] = field(default_factory=list)
    rfe_ranking: list[str] = field(default_factory=list)  # worst to best
    selected: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "dropped_constant": self.dropped_constant,
            "dropped_correlated": self.dropped_correlated,
            "rfe_ranking": self.rfe_ranking,
            "selected": self.selected,
        }


def fit_preprocess(train: FeatureMatrix) -> PreprocessParams:
    v = train.values
    medians = np.empty(v.shape[1])
    means = np.empty(v.shape[1])
    stds = np.empty(v.shape[1])
    for j, name in enumerate(train.feature_names):
        col = v[:, j]
        finite = col[~np.isnan(col)]
        if finite.size == 0:
            raise AllMissingFeature(name)
        medians[j] = np.median(finite)
        filled = np.where(np.isnan(col), medians[j], col)
        means[j] = filled.mean()
        stds[j] = filled.std()
    return PreprocessParams(medians=medians, means=means, stds=stds,
                            fitted_on=v.shape[0])


def apply_preprocess(params: PreprocessParams, m: FeatureMatrix) -> FeatureMatrix:
    """Impute with training medians, then z-score with training statistics."""
    v = np.where(np.isnan(m.values), params.medians, m.values)
    safe = np.where(params.stds > 0, params.stds, 1.0)
    z = (v - params.means) / safe
    z[:, params.stds == 0] = 0.0
    return FeatureMatrix(list(m.feature_names), z, list(m.subject_ids),
                         m.labels.copy())


def drop_near_constant(m: FeatureMatrix, tol: float = NEAR_CONSTANT_TOL
                       ) -> tuple[FeatureMatrix, list[str]]:
    dropped = []
    keep = []
    for j, name in enumerate(m.feature_names):
        col = m.values[:, j]
        missing_rate = np.count_nonzero(np.isnan(col)) / len(col)
        finite = col[~np.isnan(col)]
        if missing_rate > MAX_MISSING_RATE or finite.size == 0 or finite.std() < tol:
            dropped.append(name)
        else:
            keep.append(name)
    return m.restrict(keep), dropped


def correlation_prune(m: FeatureMatrix, threshold: float = CORRELATION_THRESHOLD
                      ) -> tuple[FeatureMatrix, list[dict]]:
    """Greedy single pass in catalog order over Pearson |r| on imputed data."""
    if len(m.feature_names) < 2:
        raise ValueError("need at least 2 features")
    medians = np.array([np.median(m.values[~np.isnan(m.values[:, j]), j])
                        for j in range(m.values.shape[1])])
    v = np.where(np.isnan(m.values), medians, m.values)
    with np.errstate(invalid="ignore"):
        corr = np.corrcoef(v, rowvar=False)
    dropped = []
    dropped_idx = set()
    n = len(m.feature_names)
    for j in range(n):
        if j in dropped_idx:
            continue
        for l in range(j + 1, n):
            if l in dropped_idx:
                continue
            r = corr[j, l]
            if math.isfinite(r) and abs(r) >= threshold:
                dropped_idx.add(l)
                dropped.append({"dropped": m.feature_names[l],
                                "kept": m.feature_names[j],
                                "r": float(r)})
    keep = [nm for j, nm in enumerate(m.feature_names) if j not in dropped_idx]
    return m.restrict(keep), dropped


def rfe_rank(m: FeatureMatrix, k: int) -> SelectionReport:
    """Eliminate the weakest-coefficient feature one at a time until k remain.

    Expects an imputed and standardized matrix.  Ranking is the elimination
    order worst-to-best; on ties np.argmin eliminates the feature earliest
    in catalog order, so tie-breaking is deterministic.
    """
    if k > len(m.feature_names):
        raise ValueError(f"k={k} exceeds feature count {len(m.feature_names)}")
    n_classes = int(m.labels.max()) + 1
    active = list(range(len(m.feature_names)))
    eliminated = []
    while len(active) > k:
        X = m.values[:, active]
        if n_classes == 2:
            w = logistic.fit_binary(X, (m.labels == 1).astype(float))
        else:
            w = logistic.fit_multiclass(X, m.labels, n_classes)
        imp = logistic.coefficient_importance(w)
        worst = int(np.argmin(imp))
        eliminated.append(active.pop(worst))
    return SelectionReport(
        rfe_ranking=[m.feature_names[i] for i in eliminated],
        selected=[m.feature_names[i] for i in active],
    )


def global_selection(m: FeatureMatrix, correlation_threshold: float,
                     rfe_k: int) -> SelectionReport:
    """Constant-drop, correlation pruning and RFE on the full matrix."""
    pruned, dropped_const = drop_near_constant(m)
    if len(pruned.feature_names) >= 2:
        pruned, dropped_corr = correlation_prune(pruned, correlation_threshold)
    else:
        dropped_corr = []
    params = fit_preprocess(pruned)
    standardized = apply_preprocess(params, pruned)
    k = min(rfe_k, len(pruned.feature_names))
    report = rfe_rank(standardized, k)
    report.dropped_constant = dropped_const
    report.dropped_correlated = dropped_corr
    return report
