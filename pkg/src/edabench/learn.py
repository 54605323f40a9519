"""Cross-validation harnesses, classification metrics and fold aggregation.

Metrics are computed per fold and aggregated as mean +/- SD across folds;
the pooled confusion matrix over all folds is reported alongside.  All
imputation/scaling (and, in nested mode, selection) happens inside each
training fold so test rows never influence fitted parameters.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import models, select
from .errors import ClassTooSmall, LabelOutOfRange, TooFewSubjects
from .models import ModelSpec
from .select import FeatureMatrix


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # rows = true class, cols = predicted
    class_names: tuple

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class CvScheme:
    kind: str            # "loso" | "stratified_kfold"
    k: int = 5
    seed: int = 0

    def display_name(self) -> str:
        return "loso" if self.kind == "loso" else f"stratified_{self.k}fold"


@dataclass
class FoldResult:
    test_subjects: list[str]
    test_indices: list[int]
    y_true: list[int]
    y_pred: list[int]
    metrics: dict


@dataclass
class CvReport:
    scheme: CvScheme
    model: ModelSpec
    folds: list[FoldResult]
    aggregate: dict                 # metric -> {"mean": .., "sd": ..}
    pooled_confusion: ConfusionMatrix
    selection: select.SelectionReport | None = None


METRIC_NAMES = ("accuracy", "balanced_accuracy", "precision", "recall", "f1")


def confusion(y_true, y_pred, n_classes: int,
              class_names: tuple | None = None) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if len(y_true) != len(y_pred):
        raise ValueError("length mismatch")
    if len(y_true) and (y_true.min() < 0 or y_true.max() >= n_classes
                        or y_pred.min() < 0 or y_pred.max() >= n_classes):
        raise LabelOutOfRange("labels must lie in 0..n_classes-1")
    counts = np.zeros((n_classes, n_classes), dtype=int)
    for t, p in zip(y_true, y_pred):
        counts[t, p] += 1
    if class_names is None:
        class_names = tuple(str(c) for c in range(n_classes))
    return ConfusionMatrix(counts=counts, class_names=tuple(class_names))


def _safe_div(num, den):
    return num / den if den > 0 else 0.0


def metrics(cm: ConfusionMatrix, positive_class: int | None = None) -> dict:
    counts = cm.counts
    total = counts.sum()
    if total == 0:
        raise ValueError("empty confusion matrix")
    accuracy = np.trace(counts) / total
    n = counts.shape[0]
    per_class_recall = [_safe_div(counts[c, c], counts[c].sum()) for c in range(n)]
    balanced = float(np.mean(per_class_recall))
    if positive_class is not None:
        c = positive_class
        tp = counts[c, c]
        precision = _safe_div(tp, counts[:, c].sum())
        recall = _safe_div(tp, counts[c].sum())
    else:
        per_class_precision = [_safe_div(counts[c, c], counts[:, c].sum())
                               for c in range(n)]
        precision = float(np.mean(per_class_precision))
        recall = float(np.mean(per_class_recall))
    f1 = _safe_div(2 * precision * recall, precision + recall)
    return {
        "accuracy": float(accuracy),
        "balanced_accuracy": balanced,
        "precision": float(precision),
        "recall": float(recall),
        "f1": float(f1),
    }


def loso_folds(subject_ids) -> list[tuple[np.ndarray, np.ndarray]]:
    """One fold per subject, ordered by subject id; (train_mask, test_mask)."""
    subject_ids = list(subject_ids)
    subjects = sorted(set(subject_ids))
    if len(subjects) < 2:
        raise TooFewSubjects("LOSO needs at least 2 subjects")
    ids = np.asarray(subject_ids)
    folds = []
    for s in subjects:
        test = ids == s
        folds.append((~test, test))
    return folds


def stratified_kfold(labels, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Seeded within-class shuffle, round-robin fold assignment."""
    labels = np.asarray(labels, dtype=int)
    rng = np.random.default_rng(seed)
    assignment = np.empty(len(labels), dtype=int)
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if len(idx) < k:
            raise ClassTooSmall(
                f"class {c} has {len(idx)} observations, need >= {k}")
        shuffled = idx[rng.permutation(len(idx))]
        for pos, i in enumerate(shuffled):
            assignment[i] = pos % k
    folds = []
    for f in range(k):
        test = assignment == f
        folds.append((~test, test))
    return folds


def make_folds(matrix: FeatureMatrix, scheme: CvScheme):
    if scheme.kind == "loso":
        return loso_folds(matrix.subject_ids)
    return stratified_kfold(matrix.labels, scheme.k, scheme.seed)


def run_cv(matrix: FeatureMatrix, spec: ModelSpec, scheme: CvScheme,
           selection_mode: str = "global",
           positive_class: int | None = None,
           correlation_threshold: float = select.CORRELATION_THRESHOLD,
           rfe_k: int = select.RFE_TOP_K,
           class_names: tuple | None = None) -> CvReport:
    """Evaluate one model under one CV scheme.

    In ``global`` mode the matrix is assumed to be already reduced to the
    selected features; in ``nested`` mode constant-drop, correlation
    pruning and RFE run inside every training fold.
    """
    n_classes = int(matrix.labels.max()) + 1
    folds = make_folds(matrix, scheme)
    fold_results = []
    pooled_true = []
    pooled_pred = []
    tested = np.zeros(len(matrix.labels), dtype=bool)

    for train_mask, test_mask in folds:
        train = matrix.rows(train_mask)
        test = matrix.rows(test_mask)
        if selection_mode == "nested":
            report = select.global_selection(train, correlation_threshold,
                                             rfe_k)
            train = train.restrict(report.selected)
            test = test.restrict(report.selected)
        params = select.fit_preprocess(train)
        train_z = select.apply_preprocess(params, train)
        test_z = select.apply_preprocess(params, test)
        model = models.fit(spec, train_z.values, train_z.labels)
        y_pred = model.predict(test_z.values)
        cm = confusion(test.labels, y_pred, n_classes, class_names)
        fold_results.append(FoldResult(
            test_subjects=sorted(set(test.subject_ids)),
            test_indices=np.flatnonzero(test_mask).tolist(),
            y_true=[int(v) for v in test.labels],
            y_pred=[int(v) for v in y_pred],
            metrics=metrics(cm, positive_class),
        ))
        pooled_true.extend(int(v) for v in test.labels)
        pooled_pred.extend(int(v) for v in y_pred)
        tested |= test_mask

    if not np.all(tested):
        raise RuntimeError("CV folds did not cover every observation")

    aggregate = {}
    for name in METRIC_NAMES:
        vals = np.array([f.metrics[name] for f in fold_results])
        aggregate[name] = {"mean": float(vals.mean()), "sd": float(vals.std())}
    pooled = confusion(pooled_true, pooled_pred, n_classes, class_names)
    return CvReport(scheme=scheme, model=spec, folds=fold_results,
                    aggregate=aggregate, pooled_confusion=pooled)
