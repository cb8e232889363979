"""
Model Persistence

A fitted classifier together with the standardization / PCA state it was
trained behind, and a versioned JSON container for it. Floats are written
with their shortest round-tripping repr, so a loaded model reproduces the
saved model's predictions bit-exactly.

Author: Corpus Audit Team
Date: October 18, 2026
"""

import json
from dataclasses import dataclass
from typing import Any, Dict, Optional, Union

import numpy as np

from src.core.exceptions import ModelFormatError
from src.modules.classifiers.mlp import MlpModel, predict_labels
from src.modules.classifiers.svm import SvmModel
from src.modules.features.transforms import PcaState, StandardizerState, apply_pca, apply_standardizer

MODEL_FORMAT = "bias-audit-model"
MODEL_VERSION = 1


@dataclass(frozen=True, eq=False)
class TrainedClassifier:
    """Classifier plus the preprocessing fitted on the same fold-train data."""
    model: Union[SvmModel, MlpModel]
    standardizer: Optional[StandardizerState] = None
    pca: Optional[PcaState] = None

    @property
    def kind(self) -> str:
        return "svm" if isinstance(self.model, SvmModel) else "mlp"

    def prepare(self, X: np.ndarray) -> np.ndarray:
        matrix = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if self.standardizer is not None:
            matrix = apply_standardizer(self.standardizer, matrix)
        if self.pca is not None:
            matrix = apply_pca(self.pca, matrix)
        return matrix

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Class labels in {0, 1}; class 1 is the target group."""
        prepared = self.prepare(X)
        if isinstance(self.model, SvmModel):
            return (self.model.decision_function(prepared) >= 0).astype(np.int64)
        return predict_labels(self.model, prepared)

    def scores(self, X: np.ndarray) -> np.ndarray:
        """SVM decision values or MLP class-1 probabilities."""
        prepared = self.prepare(X)
        if isinstance(self.model, SvmModel):
            return self.model.decision_function(prepared)
        return self.model.predict_proba(prepared)[:, 1]


def _array(values: np.ndarray) -> list:
    return np.asarray(values, dtype=np.float64).tolist()


def _svm_payload(model: SvmModel) -> Dict[str, Any]:
    return {
        "support_vectors": _array(model.support_vectors),
        "dual_coef": _array(model.dual_coef),
        "alphas": _array(model.alphas),
        "support_indices": np.asarray(model.support_indices, dtype=np.int64).tolist(),
        "n_features": model.n_features,
        "bias": float(model.bias),
        "gamma": float(model.gamma),
        "C": float(model.C),
        "n_iter": int(model.n_iter),
        "converged": bool(model.converged),
    }


def _mlp_payload(model: MlpModel) -> Dict[str, Any]:
    return {name: _array(value) for name, value in model.params().items()}


def to_payload(trained: Union[TrainedClassifier, SvmModel, MlpModel]) -> Dict[str, Any]:
    """Serializable dictionary of a classifier and its preprocessing."""
    if not isinstance(trained, TrainedClassifier):
        trained = TrainedClassifier(model=trained)
    payload: Dict[str, Any] = {"format": MODEL_FORMAT, "version": MODEL_VERSION, "kind": trained.kind}
    payload["model"] = _svm_payload(trained.model) if trained.kind == "svm" else _mlp_payload(trained.model)
    if trained.standardizer is not None:
        payload["standardizer"] = {
            "mean": _array(trained.standardizer.mean),
            "std": _array(trained.standardizer.std),
        }
    if trained.pca is not None:
        payload["pca"] = {
            "mean": _array(trained.pca.mean),
            "basis": _array(trained.pca.basis),
            "eigenvalues": _array(trained.pca.eigenvalues),
            "cumulative_ratio": float(trained.pca.cumulative_ratio),
        }
    return payload


def from_payload(payload: Dict[str, Any]) -> TrainedClassifier:
    """
    Rebuild a classifier from a container dictionary.

    Raises:
        ModelFormatError: Wrong format tag, unsupported version, unknown kind or missing fields
    """
    if not isinstance(payload, dict) or payload.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"not a {MODEL_FORMAT} container")
    if payload.get("version") != MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version {payload.get('version')}")

    try:
        body = payload["model"]
        kind = payload["kind"]
        if kind == "svm":
            vectors = np.asarray(body["support_vectors"], dtype=np.float64).reshape(-1, int(body["n_features"]))
            model = SvmModel(
                support_vectors=vectors,
                dual_coef=np.asarray(body["dual_coef"], dtype=np.float64),
                alphas=np.asarray(body["alphas"], dtype=np.float64),
                support_indices=np.asarray(body["support_indices"], dtype=np.int64),
                bias=float(body["bias"]),
                gamma=float(body["gamma"]),
                C=float(body["C"]),
                n_iter=int(body["n_iter"]),
                converged=bool(body["converged"]),
            )
        elif kind == "mlp":
            model = MlpModel(**{name: np.asarray(body[name], dtype=np.float64) for name in ("w1", "b1", "w2", "b2")})
        else:
            raise ModelFormatError(f"unknown model kind '{kind}'")

        standardizer = None
        if "standardizer" in payload:
            standardizer = StandardizerState(
                mean=np.asarray(payload["standardizer"]["mean"], dtype=np.float64),
                std=np.asarray(payload["standardizer"]["std"], dtype=np.float64),
            )
        pca = None
        if "pca" in payload:
            section = payload["pca"]
            pca = PcaState(
                mean=np.asarray(section["mean"], dtype=np.float64),
                basis=np.asarray(section["basis"], dtype=np.float64).reshape(len(section["mean"]), -1),
                eigenvalues=np.asarray(section["eigenvalues"], dtype=np.float64),
                cumulative_ratio=float(section["cumulative_ratio"]),
            )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"malformed model container: {exc}") from exc
    return TrainedClassifier(model=model, standardizer=standardizer, pca=pca)


def save_model(trained: Union[TrainedClassifier, SvmModel, MlpModel], path: str) -> None:
    """Write the JSON model container."""
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(to_payload(trained), handle, sort_keys=True)
        handle.write("\n")


def load_model(path: str) -> TrainedClassifier:
    """Read a JSON model container written by save_model."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: invalid JSON ({exc})") from exc
    return from_payload(payload)
