"""
Two-Layer Perceptron

input -> 256 ReLU units -> 2 logits -> softmax, trained on cross-entropy
with Adam, mini-batches reshuffled every epoch, a learning rate halved after
5 epochs without a validation-loss decrease, and the parameters of the best
validation-accuracy epoch returned.

Author: Corpus Audit Team
Date: October 18, 2026
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.special import log_softmax, softmax
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from src.config import MlpConfig
from src.core.exceptions import DimensionMismatchError, NonFiniteFeatureError, SingleClassError
from src.utils.logger import ApplicationLogger

logger = ApplicationLogger("MlpTrainer")

PARAM_NAMES = ("w1", "b1", "w2", "b2")
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
N_CLASSES = 2


@dataclass(frozen=True, eq=False)
class MlpModel:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    @property
    def input_dim(self) -> int:
        return self.w1.shape[0]

    @property
    def hidden_units(self) -> int:
        return self.w1.shape[1]

    def params(self) -> Dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def logits(self, X: np.ndarray) -> np.ndarray:
        matrix = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if matrix.shape[1] != self.input_dim:
            raise DimensionMismatchError(f"model expects {self.input_dim} features, got {matrix.shape[1]}")
        hidden = np.maximum(matrix @ self.w1 + self.b1, 0.0)
        return hidden @ self.w2 + self.b2

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return softmax(self.logits(X), axis=1)


def init_mlp(input_dim: int, seed: int, hidden_units: int = 256) -> MlpModel:
    """Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases."""
    rng = np.random.default_rng(seed)
    limit1 = np.sqrt(6.0 / (input_dim + hidden_units))
    limit2 = np.sqrt(6.0 / (hidden_units + N_CLASSES))
    return MlpModel(
        w1=rng.uniform(-limit1, limit1, size=(input_dim, hidden_units)),
        b1=np.zeros(hidden_units),
        w2=rng.uniform(-limit2, limit2, size=(hidden_units, N_CLASSES)),
        b2=np.zeros(N_CLASSES),
    )


def mlp_loss(model: MlpModel, X: np.ndarray, y: np.ndarray) -> float:
    """Mean cross-entropy of integer labels in {0, 1}."""
    labels = np.asarray(y, dtype=np.int64)
    log_probs = log_softmax(model.logits(X), axis=1)
    return float(-np.mean(log_probs[np.arange(labels.shape[0]), labels]))


def mlp_gradients(model: MlpModel, X: np.ndarray, y: np.ndarray) -> Dict[str, np.ndarray]:
    """Analytic gradients of mlp_loss with respect to every parameter."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    labels = np.asarray(y, dtype=np.int64)
    n = X.shape[0]

    pre_hidden = X @ model.w1 + model.b1
    hidden = np.maximum(pre_hidden, 0.0)
    probs = softmax(hidden @ model.w2 + model.b2, axis=1)

    d_logits = probs
    d_logits[np.arange(n), labels] -= 1.0
    d_logits /= n
    d_hidden = (d_logits @ model.w2.T) * (pre_hidden > 0)
    return {
        "w1": X.T @ d_hidden,
        "b1": d_hidden.sum(axis=0),
        "w2": hidden.T @ d_logits,
        "b2": d_logits.sum(axis=0),
    }


def _accuracy(model: MlpModel, X: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(predict_labels(model, X) == y))


def predict_labels(model: MlpModel, X: np.ndarray) -> np.ndarray:
    """Argmax labels; exactly equal logits go to class 1."""
    logits = model.logits(X)
    return (logits[:, 1] >= logits[:, 0]).astype(np.int64)


def _check_training_data(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y).ravel().astype(np.int64)
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatchError(f"{X.shape[0]} samples but {y.shape[0]} labels")
    if not np.all(np.isfinite(X)):
        raise NonFiniteFeatureError("MLP training features contain NaN or inf")
    if not np.all(np.isin(y, (0, 1))):
        raise ValueError("MLP labels must be 0 or 1")
    if np.unique(y).shape[0] < 2:
        raise SingleClassError("MLP training needs samples of both classes")
    return X, y


def mlp_train(
    X: np.ndarray,
    y: np.ndarray,
    seed: int,
    epochs: int = 50,
    batch: int = 128,
    lr: float = 1e-3,
    X_val: Optional[np.ndarray] = None,
    y_val: Optional[np.ndarray] = None,
    hidden_units: int = 256,
    patience: int = 5,
) -> MlpModel:
    """
    Train the perceptron; training is a pure function of data, settings and seed.

    Args:
        X: Training features [n, d]
        y: Labels in {0, 1}
        seed: Initialisation and shuffling seed
        epochs: Passes over the training data
        batch: Mini-batch size
        lr: Initial Adam learning rate
        X_val, y_val: Validation split for model selection and the scheduler;
            the training data is used when omitted
        hidden_units: Width of the hidden layer
        patience: Epochs without validation-loss decrease before halving lr

    Returns:
        Parameters of the epoch with the best validation accuracy

    Raises:
        SingleClassError: Only one class in y
    """
    X, y = _check_training_data(X, y)
    if X_val is None or y_val is None or len(y_val) == 0:
        X_val, y_val = X, y
    else:
        X_val = np.atleast_2d(np.asarray(X_val, dtype=np.float64))
        y_val = np.asarray(y_val).ravel().astype(np.int64)

    model = init_mlp(X.shape[1], seed, hidden_units)
    shuffler = np.random.default_rng([seed, 1])
    params = {name: value.copy() for name, value in model.params().items()}
    first_moment = {name: np.zeros_like(value) for name, value in params.items()}
    second_moment = {name: np.zeros_like(value) for name, value in params.items()}

    step = 0
    rate = lr
    best_model, best_accuracy = None, -1.0
    best_val_loss, stale_epochs = np.inf, 0

    for epoch in range(1, epochs + 1):
        order = shuffler.permutation(X.shape[0])
        for start in range(0, X.shape[0], batch):
            index = order[start:start + batch]
            grads = mlp_gradients(MlpModel(**params), X[index], y[index])
            step += 1
            for name in PARAM_NAMES:
                first_moment[name] = ADAM_BETA1 * first_moment[name] + (1 - ADAM_BETA1) * grads[name]
                second_moment[name] = ADAM_BETA2 * second_moment[name] + (1 - ADAM_BETA2) * grads[name] ** 2
                m_hat = first_moment[name] / (1 - ADAM_BETA1 ** step)
                v_hat = second_moment[name] / (1 - ADAM_BETA2 ** step)
                params[name] = params[name] - rate * m_hat / (np.sqrt(v_hat) + ADAM_EPS)

        current = MlpModel(**{name: value.copy() for name, value in params.items()})
        val_accuracy = _accuracy(current, X_val, y_val)
        val_loss = mlp_loss(current, X_val, y_val)
        if val_accuracy > best_accuracy:
            best_model, best_accuracy = current, val_accuracy

        if val_loss < best_val_loss:
            best_val_loss, stale_epochs = val_loss, 0
        else:
            stale_epochs += 1
            if stale_epochs >= patience:
                rate /= 2.0
                stale_epochs = 0
                logger.debug("Halving MLP learning rate", epoch=epoch, learning_rate=rate)

    return best_model if best_model is not None else model


def mlp_predict(model: MlpModel, x: np.ndarray) -> Tuple[int, np.ndarray]:
    """Label and class probabilities of one vector; ties go to class 1."""
    vector = np.asarray(x, dtype=np.float64).reshape(1, -1)
    probs = model.predict_proba(vector)[0]
    return int(predict_labels(model, vector)[0]), probs


class MlpClassifier(BaseEstimator, ClassifierMixin):
    """scikit-learn estimator over mlp_train for any two class labels."""

    def __init__(self, hidden_units: int = 256, epochs: int = 50, batch_size: int = 128,
                 learning_rate: float = 1e-3, patience: int = 5, random_state: int = 0):
        self.hidden_units = hidden_units
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.patience = patience
        self.random_state = random_state

    @classmethod
    def from_config(cls, cfg: MlpConfig, random_state: int) -> "MlpClassifier":
        return cls(cfg.hidden_units, cfg.epochs, cfg.batch_size, cfg.learning_rate,
                   cfg.scheduler_patience, random_state)

    def _encode(self, y) -> np.ndarray:
        return (np.asarray(y) == self.classes_[1]).astype(np.int64)

    def fit(self, X, y, X_val=None, y_val=None):
        self.classes_ = np.unique(np.asarray(y))
        if self.classes_.shape[0] != 2:
            raise SingleClassError("MlpClassifier needs exactly two classes")
        self.model_ = mlp_train(
            X, self._encode(y), seed=self.random_state, epochs=self.epochs,
            batch=self.batch_size, lr=self.learning_rate,
            X_val=X_val, y_val=None if y_val is None else self._encode(y_val),
            hidden_units=self.hidden_units, patience=self.patience,
        )
        return self

    def predict_proba(self, X) -> np.ndarray:
        check_is_fitted(self, "model_")
        return self.model_.predict_proba(X)

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "model_")
        return self.classes_[predict_labels(self.model_, X)]
