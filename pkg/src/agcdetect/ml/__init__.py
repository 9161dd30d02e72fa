"""Classifier suite: six variants behind one train/predict interface.

Tags: dt (decision tree), rf (random forest), gnb (Gaussian naive Bayes),
knn (k nearest neighbors), svm (linear SVM), gbt (gradient-boosted trees).
"""

from ._common import (N_CLASSES, DimensionMismatch, EmptyNode, Scaler,
                      stratified_kfold)
from ._tree import gini
from .boosting import (GbtConfig, GbtModel, log_loss, softmax,
                       softmax_gradients, train_gbt)
from .cart import DecisionTreeConfig, DecisionTreeModel, train_decision_tree
from .forest import RandomForestConfig, RandomForestModel, train_random_forest
from .naive_bayes import GaussianNBConfig, GaussianNBModel, train_gaussian_nb
from .neighbors import KnnConfig, KnnModel, train_knn
from .serialize import (FORMAT_VERSION, UnknownModelFormat, load_model,
                        model_from_dict, model_to_dict, save_model)
from .svm import C_GRID, LinearSvmConfig, LinearSvmModel, train_linear_svm

CLASSIFIER_TAGS = ("dt", "rf", "gnb", "knn", "svm", "gbt")

_TRAINERS = {
    "dt": (train_decision_tree, DecisionTreeConfig),
    "rf": (train_random_forest, RandomForestConfig),
    "gnb": (train_gaussian_nb, GaussianNBConfig),
    "knn": (train_knn, KnnConfig),
    "svm": (train_linear_svm, LinearSvmConfig),
    "gbt": (train_gbt, GbtConfig),
}


def default_config(tag: str):
    if tag not in _TRAINERS:
        raise ValueError(f"unknown classifier tag: {tag!r}")
    return _TRAINERS[tag][1]()


def train_classifier(tag: str, X, y, config=None, seed: int = 0):
    """Train the classifier named by ``tag`` with its default or the given
    config; identical inputs and seed give an identical model."""
    if tag not in _TRAINERS:
        raise ValueError(f"unknown classifier tag: {tag!r}")
    trainer, config_cls = _TRAINERS[tag]
    if config is None:
        config = config_cls()
    return trainer(X, y, config=config, seed=seed)


def predict(model, X):
    """Predicted class ids; score ties resolve to the lowest id."""
    return model.predict(X)


def predict_scores(model, X):
    """Per-class scores whose row-wise argmax equals ``predict``."""
    return model.predict_scores(X)

__all__ = [
    "N_CLASSES", "DimensionMismatch", "EmptyNode", "Scaler",
    "stratified_kfold", "gini",
    "GbtConfig", "GbtModel", "log_loss", "softmax", "softmax_gradients",
    "train_gbt",
    "DecisionTreeConfig", "DecisionTreeModel", "train_decision_tree",
    "RandomForestConfig", "RandomForestModel", "train_random_forest",
    "GaussianNBConfig", "GaussianNBModel", "train_gaussian_nb",
    "KnnConfig", "KnnModel", "train_knn",
    "FORMAT_VERSION", "UnknownModelFormat", "load_model", "model_from_dict",
    "model_to_dict", "save_model",
    "C_GRID", "LinearSvmConfig", "LinearSvmModel", "train_linear_svm",
    "CLASSIFIER_TAGS", "default_config", "train_classifier", "predict",
    "predict_scores",
]
