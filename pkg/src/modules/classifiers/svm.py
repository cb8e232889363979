"""
RBF Support Vector Machine

Binary soft-margin SVM with K(x, z) = exp(-gamma * ||x - z||^2), trained by
sequential minimal optimization: each step picks the maximal violating pair
(i from the "up" set with the largest -y*G, j from the "low" set with the
smallest) and solves the two-variable subproblem in closed form.

Author: Corpus Audit Team
Date: October 18, 2026
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.metrics.pairwise import rbf_kernel
from sklearn.utils.validation import check_is_fitted

from src.config import GridConfig
from src.core.exceptions import DimensionMismatchError, NonFiniteFeatureError, SingleClassError
from src.utils.logger import ApplicationLogger

logger = ApplicationLogger("SvmTrainer")

MIN_CURVATURE = 1e-12
BOUND_SNAP = 1e-12


@dataclass(frozen=True, eq=False)
class SvmModel:
    """Support vectors with dual coefficients alpha_i * y_i, bias and hyperparameters."""
    support_vectors: np.ndarray
    dual_coef: np.ndarray
    alphas: np.ndarray
    support_indices: np.ndarray
    bias: float
    gamma: float
    C: float
    n_iter: int = 0
    converged: bool = True

    @property
    def n_features(self) -> int:
        return self.support_vectors.shape[1]

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        matrix = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if matrix.shape[1] != self.n_features:
            raise DimensionMismatchError(f"model expects {self.n_features} features, got {matrix.shape[1]}")
        if self.support_vectors.shape[0] == 0:
            return np.full(matrix.shape[0], self.bias)
        return rbf_kernel(matrix, self.support_vectors, gamma=self.gamma) @ self.dual_coef + self.bias


@dataclass
class GridSearchResult:
    """Validation accuracy of every (C, gamma) cell and the selected cell."""
    best_c: float
    best_gamma: float
    accuracies: Dict[Tuple[float, float], float] = field(default_factory=dict)
    converged: Dict[Tuple[float, float], bool] = field(default_factory=dict)
    model: Optional[SvmModel] = None

    @property
    def best_accuracy(self) -> float:
        return self.accuracies[(self.best_c, self.best_gamma)]

    @property
    def n_unconverged(self) -> int:
        return sum(1 for ok in self.converged.values() if not ok)

    def to_dict(self) -> Dict[str, object]:
        return {
            "best_c": self.best_c,
            "best_gamma": self.best_gamma,
            "cells": [
                {"c": c, "gamma": g, "val_accuracy": acc, "converged": self.converged.get((c, g), True)}
                for (c, g), acc in sorted(self.accuracies.items())
            ],
        }


def _validate(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatchError(f"{X.shape[0]} samples but {y.shape[0]} labels")
    if not np.all(np.isfinite(X)):
        raise NonFiniteFeatureError("SVM training features contain NaN or inf")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("SVM labels must be -1 or +1")
    if X.shape[0] < 2 or np.unique(y).shape[0] < 2:
        raise SingleClassError("SVM training needs samples of both classes")
    return X, y


def svm_train(
    X: np.ndarray,
    y: np.ndarray,
    C: float,
    gamma: float,
    tol: float = 1e-3,
    max_passes: int = 20,
) -> SvmModel:
    """
    Train an RBF SVM by SMO with maximal-violating-pair selection.

    Args:
        X: Feature matrix [n, d]
        y: Labels in {-1, +1}
        C: Soft-margin constant
        gamma: RBF kernel width
        tol: Stop once the maximal KKT violation gap falls below tol
        max_passes: Iteration budget in multiples of n

    Returns:
        Fitted SvmModel holding only the support vectors

    Raises:
        SingleClassError: Only one class present
        NonFiniteFeatureError: Non-finite features
    """
    X, y = _validate(X, y)
    n = X.shape[0]
    K = rbf_kernel(X, X, gamma=gamma)
    Q = np.outer(y, y) * K
    alpha = np.zeros(n)
    grad = -np.ones(n)
    positive = y > 0

    converged = False
    iteration = 0
    max_iter = max(max_passes, 1) * n
    for iteration in range(1, max_iter + 1):
        score = -y * grad
        up = (positive & (alpha < C)) | (~positive & (alpha > 0))
        low = (positive & (alpha > 0)) | (~positive & (alpha < C))
        i = int(np.argmax(np.where(up, score, -np.inf)))
        j = int(np.argmin(np.where(low, score, np.inf)))
        gap = score[i] - score[j]
        if not np.isfinite(gap) or gap < tol:
            converged = True
            break

        curvature = max(K[i, i] + K[j, j] - 2.0 * K[i, j], MIN_CURVATURE)
        bound_i = C - alpha[i] if y[i] > 0 else alpha[i]
        bound_j = alpha[j] if y[j] > 0 else C - alpha[j]
        step = min(gap / curvature, bound_i, bound_j)

        delta_i, delta_j = y[i] * step, -y[j] * step
        alpha[i] += delta_i
        alpha[j] += delta_j
        for k in (i, j):
            if alpha[k] < BOUND_SNAP * C:
                alpha[k] = 0.0
            elif alpha[k] > C * (1.0 - BOUND_SNAP):
                alpha[k] = C
        grad += Q[:, i] * delta_i + Q[:, j] * delta_j

    if not converged:
        logger.warning("SMO stopped before convergence", C=C, gamma=gamma, iterations=max_iter)

    score = -y * grad
    free = (alpha > 0) & (alpha < C)
    if np.any(free):
        bias = float(np.mean(score[free]))
    else:
        up = (positive & (alpha < C)) | (~positive & (alpha > 0))
        low = (positive & (alpha > 0)) | (~positive & (alpha < C))
        upper = np.max(score[up]) if np.any(up) else np.min(score[low])
        lower = np.min(score[low]) if np.any(low) else upper
        bias = float((upper + lower) / 2.0)

    support = np.flatnonzero(alpha > 0)
    return SvmModel(
        support_vectors=X[support].copy(),
        dual_coef=alpha[support] * y[support],
        alphas=alpha[support].copy(),
        support_indices=support,
        bias=bias,
        gamma=float(gamma),
        C=float(C),
        n_iter=iteration,
        converged=converged,
    )


def svm_predict(model: SvmModel, x: np.ndarray) -> Tuple[int, float]:
    """Label (+1 when f(x) >= 0, else -1) and decision value of one vector."""
    value = float(model.decision_function(np.asarray(x, dtype=np.float64).reshape(1, -1))[0])
    return (1 if value >= 0 else -1), value


def kkt_violations(model: SvmModel, X: np.ndarray, y: np.ndarray, tol: float = 1e-3) -> int:
    """Count training samples whose KKT condition is violated by more than tol."""
    X, y = _validate(X, y)
    alpha = np.zeros(X.shape[0])
    alpha[model.support_indices] = model.alphas
    margin = y * model.decision_function(X)
    at_zero = alpha == 0
    at_c = alpha == model.C
    free = ~at_zero & ~at_c
    violated = (
        (at_zero & (margin < 1.0 - tol))
        | (at_c & (margin > 1.0 + tol))
        | (free & (np.abs(margin - 1.0) > tol))
    )
    return int(np.sum(violated))


def grid_search_svm(
    X_train: np.ndarray,
    y_train: np.ndarray,
    X_val: np.ndarray,
    y_val: np.ndarray,
    grid: Optional[GridConfig] = None,
) -> GridSearchResult:
    """
    Train one model per (C, gamma) cell and select by validation accuracy.

    Cells are visited C ascending then gamma ascending and only a strictly
    better accuracy replaces the incumbent, so ties go to the smaller C,
    then the smaller gamma.
    """
    grid = grid or GridConfig()
    y_val = np.asarray(y_val, dtype=np.float64).ravel()
    result = None
    for c_value, gamma in itertools.product(sorted(grid.c_values), sorted(grid.gamma_values)):
        model = svm_train(X_train, y_train, c_value, gamma, tol=grid.tol, max_passes=grid.max_passes)
        predicted = np.where(model.decision_function(X_val) >= 0, 1.0, -1.0)
        accuracy = float(np.mean(predicted == y_val))
        if result is None:
            result = GridSearchResult(best_c=c_value, best_gamma=gamma, model=model)
        elif accuracy > result.best_accuracy:
            result.best_c, result.best_gamma, result.model = c_value, gamma, model
        result.accuracies[(c_value, gamma)] = accuracy
        result.converged[(c_value, gamma)] = model.converged
    return result


class SvmClassifier(BaseEstimator, ClassifierMixin):
    """scikit-learn estimator over svm_train for any two class labels."""

    def __init__(self, C: float = 10.0, gamma: float = 1e-4, tol: float = 1e-3, max_passes: int = 20):
        self.C = C
        self.gamma = gamma
        self.tol = tol
        self.max_passes = max_passes

    def _signed(self, y) -> np.ndarray:
        return np.where(np.asarray(y) == self.classes_[1], 1.0, -1.0)

    def fit(self, X, y):
        self.classes_ = np.unique(np.asarray(y))
        if self.classes_.shape[0] != 2:
            raise SingleClassError("SvmClassifier needs exactly two classes")
        self.model_ = svm_train(X, self._signed(y), self.C, self.gamma, self.tol, self.max_passes)
        return self

    def decision_function(self, X) -> np.ndarray:
        check_is_fitted(self, "model_")
        return self.model_.decision_function(X)

    def predict(self, X) -> np.ndarray:
        return np.where(self.decision_function(X) >= 0, self.classes_[1], self.classes_[0])
