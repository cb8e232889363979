"""
Classifiers Module

RBF SVM trained by SMO with grid search, a two-layer perceptron, and the
JSON model container.
"""

from .mlp import MlpClassifier, MlpModel, init_mlp, mlp_gradients, mlp_loss, mlp_predict, mlp_train, predict_labels
from .persistence import TrainedClassifier, from_payload, load_model, save_model, to_payload
from .svm import GridSearchResult, SvmClassifier, SvmModel, grid_search_svm, kkt_violations, svm_predict, svm_train

__all__ = [
    "GridSearchResult",
    "MlpClassifier",
    "MlpModel",
    "SvmClassifier",
    "SvmModel",
    "TrainedClassifier",
    "from_payload",
    "grid_search_svm",
    "init_mlp",
    "kkt_violations",
    "load_model",
    "mlp_gradients",
    "mlp_loss",
    "mlp_predict",
    "mlp_train",
    "predict_labels",
    "save_model",
    "svm_predict",
    "svm_train",
    "to_payload",
]
