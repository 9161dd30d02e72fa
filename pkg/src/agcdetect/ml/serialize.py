"""Versioned JSON persistence for trained models."""

from __future__ import annotations

import json

from .boosting import GbtModel
from .cart import DecisionTreeModel
from .forest import RandomForestModel
from .naive_bayes import GaussianNBModel
from .neighbors import KnnModel
from .svm import LinearSvmModel

FORMAT_VERSION = 1

_MODEL_CLASSES = {
    "dt": DecisionTreeModel,
    "rf": RandomForestModel,
    "gnb": GaussianNBModel,
    "knn": KnnModel,
    "svm": LinearSvmModel,
    "gbt": GbtModel,
}
_TAG_OF = {cls: tag for tag, cls in _MODEL_CLASSES.items()}


class UnknownModelFormat(ValueError):
    """Payload is not a model file this version can read."""


def model_tag(model) -> str:
    try:
        return _TAG_OF[type(model)]
    except KeyError:
        raise UnknownModelFormat(f"not a known model type: {type(model)!r}")


def model_to_dict(model) -> dict:
    return {"format_version": FORMAT_VERSION,
            "variant": model_tag(model),
            "model": model.to_dict()}


def model_from_dict(payload: dict):
    if not isinstance(payload, dict) or "format_version" not in payload:
        raise UnknownModelFormat("missing format_version")
    version = payload["format_version"]
    if version != FORMAT_VERSION:
        raise UnknownModelFormat(f"unsupported format_version: {version}")
    variant = payload.get("variant")
    if variant not in _MODEL_CLASSES:
        raise UnknownModelFormat(f"unknown variant: {variant!r}")
    return _MODEL_CLASSES[variant].from_dict(payload["model"])


def save_model(model, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path):
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UnknownModelFormat(f"not valid JSON: {exc}") from exc
    return model_from_dict(payload)
