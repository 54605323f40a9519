"""L2-regularized logistic regression solved by full-batch Newton iteration.

Shared by the classifier roster and by RFE, which uses the coefficient
magnitudes for elimination.  Deterministic: no sampling, fixed starting
point, convergence on gradient norm.
"""
from __future__ import annotations

import numpy as np

from .errors import ConvergenceFailure

L2_STRENGTH = 1.0
GRAD_TOL = 1e-8
MAX_ITER = 1000


def fit_binary(X: np.ndarray, y: np.ndarray, l2: float = L2_STRENGTH,
               tol: float = GRAD_TOL, max_iter: int = MAX_ITER) -> np.ndarray:
    """Return weights [intercept, coef...] minimizing NLL + l2/2 * ||coef||^2."""
    n, d = X.shape
    Xb = np.hstack([np.ones((n, 1)), X])
    w = np.zeros(d + 1)
    for _ in range(max_iter):
        z = np.clip(Xb @ w, -500, 500)
        p = 1.0 / (1.0 + np.exp(-z))
        grad = Xb.T @ (p - y)
        grad[1:] += l2 * w[1:]
        if np.linalg.norm(grad) < tol:
            return w
        curv = p * (1.0 - p)
        hess = (Xb.T * curv) @ Xb
        hess[1:, 1:] += l2 * np.eye(d)
        hess += 1e-10 * np.eye(d + 1)  # guard against exact separation
        w = w - np.linalg.solve(hess, grad)
    raise ConvergenceFailure("logistic regression did not converge", max_iter)


def fit_multiclass(X: np.ndarray, y: np.ndarray, n_classes: int,
                   l2: float = L2_STRENGTH) -> np.ndarray:
    """One-vs-rest weights, shape (n_classes, d+1)."""
    return np.stack([fit_binary(X, (y == c).astype(float), l2=l2)
                     for c in range(n_classes)])


def predict_proba(weights: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Per-class scores; binary weights may be 1-D, multiclass 2-D."""
    Xb = np.hstack([np.ones((len(X), 1)), X])
    if weights.ndim == 1:
        p1 = 1.0 / (1.0 + np.exp(-np.clip(Xb @ weights, -500, 500)))
        return np.stack([1.0 - p1, p1], axis=1)
    z = np.clip(Xb @ weights.T, -500, 500)
    return 1.0 / (1.0 + np.exp(-z))


def coefficient_importance(weights: np.ndarray) -> np.ndarray:
    """Per-feature importance: |coef| (binary) or L2 norm across classes."""
    if weights.ndim == 1:
        return np.abs(weights[1:])
    return np.sqrt(np.sum(weights[:, 1:] ** 2, axis=0))
