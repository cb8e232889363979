"""
Feature Transforms

z-score standardization and PCA retaining 95% of the variance, as
scikit-learn transformers plus functional wrappers over their fitted
states. Both are fitted on fold-training data only.

Author: Corpus Audit Team
Date: October 18, 2026
"""

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from src.core.exceptions import DimensionMismatchError, InsufficientDataError
from src.modules.features.extractors import FeatureVector, feature_matrix

STD_FLOOR = 1e-8
VARIANCE_TARGET = 0.95

ArrayOrVectors = Union[np.ndarray, Sequence[FeatureVector]]


def as_matrix(data: ArrayOrVectors) -> np.ndarray:
    if isinstance(data, np.ndarray):
        matrix = np.asarray(data, dtype=np.float64)
        return matrix[np.newaxis, :] if matrix.ndim == 1 else matrix
    return feature_matrix(list(data))


@dataclass(frozen=True, eq=False)
class StandardizerState:
    mean: np.ndarray
    std: np.ndarray

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True, eq=False)
class PcaState:
    """Centering mean, orthonormal basis [d, m] and retained variance ratio."""
    mean: np.ndarray
    basis: np.ndarray
    eigenvalues: np.ndarray
    cumulative_ratio: float

    @property
    def n_components(self) -> int:
        return self.basis.shape[1]


def _check_dim(matrix: np.ndarray, expected: int) -> None:
    if matrix.shape[1] != expected:
        raise DimensionMismatchError(f"expected {expected} features, got {matrix.shape[1]}")


class Standardizer(BaseEstimator, TransformerMixin):
    """Per-dimension z-score with the standard deviation floored at 1e-8."""

    def __init__(self, std_floor: float = STD_FLOOR):
        self.std_floor = std_floor

    def fit(self, X, y=None):
        matrix = as_matrix(X)
        if matrix.shape[0] == 0:
            raise InsufficientDataError("cannot fit a standardizer on no data")
        self.state_ = StandardizerState(
            mean=matrix.mean(axis=0),
            std=np.maximum(matrix.std(axis=0), self.std_floor),
        )
        return self

    def transform(self, X):
        check_is_fitted(self, "state_")
        matrix = as_matrix(X)
        _check_dim(matrix, self.state_.dim)
        return (matrix - self.state_.mean) / self.state_.std


class Pca95(BaseEstimator, TransformerMixin):
    """
    Principal components explaining at least 95% of the training variance.

    Eigenvalues are sorted descending and the largest-magnitude entry of
    every eigenvector is made positive. Zero total variance keeps one
    component.
    """

    def __init__(self, variance_target: float = VARIANCE_TARGET):
        self.variance_target = variance_target

    def fit(self, X, y=None):
        matrix = as_matrix(X)
        if matrix.shape[0] < 2:
            raise InsufficientDataError("PCA needs at least 2 training vectors")

        mean = matrix.mean(axis=0)
        covariance = np.atleast_2d(np.cov(matrix - mean, rowvar=False))
        eigenvalues, eigenvectors = np.linalg.eigh(covariance)
        order = np.argsort(eigenvalues)[::-1]
        eigenvalues = np.clip(eigenvalues[order], 0.0, None)
        eigenvectors = eigenvectors[:, order]

        total = eigenvalues.sum()
        if total <= 0:
            n_components, ratio = 1, 1.0
        else:
            cumulative = np.cumsum(eigenvalues) / total
            n_components = int(np.argmax(cumulative >= self.variance_target - 1e-12)) + 1
            ratio = float(cumulative[n_components - 1])

        basis = eigenvectors[:, :n_components].copy()
        pivots = np.argmax(np.abs(basis), axis=0)
        signs = np.sign(basis[pivots, np.arange(n_components)])
        signs[signs == 0] = 1.0
        basis *= signs

        self.state_ = PcaState(mean=mean, basis=basis, eigenvalues=eigenvalues, cumulative_ratio=ratio)
        return self

    def transform(self, X):
        check_is_fitted(self, "state_")
        matrix = as_matrix(X)
        _check_dim(matrix, self.state_.mean.shape[0])
        return (matrix - self.state_.mean) @ self.state_.basis

    def inverse_transform(self, Z):
        check_is_fitted(self, "state_")
        return np.atleast_2d(Z) @ self.state_.basis.T + self.state_.mean


def fit_standardizer(train: ArrayOrVectors) -> StandardizerState:
    return Standardizer().fit(train).state_


def apply_standardizer(state: StandardizerState, v: ArrayOrVectors) -> np.ndarray:
    """Standardize a vector (or rows of a matrix) with a fitted state."""
    single = isinstance(v, FeatureVector) or (isinstance(v, np.ndarray) and v.ndim == 1)
    matrix = as_matrix([v] if isinstance(v, FeatureVector) else v)
    _check_dim(matrix, state.dim)
    out = (matrix - state.mean) / state.std
    return out[0] if single else out


def fit_pca_95(train: ArrayOrVectors) -> PcaState:
    return Pca95().fit(train).state_


def apply_pca(state: PcaState, v: ArrayOrVectors) -> np.ndarray:
    """Project onto the retained components."""
    single = isinstance(v, FeatureVector) or (isinstance(v, np.ndarray) and v.ndim == 1)
    matrix = as_matrix([v] if isinstance(v, FeatureVector) else v)
    _check_dim(matrix, state.mean.shape[0])
    out = (matrix - state.mean) @ state.basis
    return out[0] if single else out
