"""Logistic easy/hard classifier over standardized text features.

Each article pair contributes one easy (label 0) and one hard (label 1)
example; the predicted probability of "hard" doubles as a ranking score.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .errors import DegenerateData
from .features import (
    FEATURE_NAMES,
    FEATURE_SET_VERSION,
    FeatureVector,
    apply_standardizer,
    feature_matrix,
    fit_standardizer,
)
from .net import AdamState, cosine_lr
from .ranker import MODEL_FORMAT
from .types import ArticlePair, ArticleText


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class FeatureClassifier(BaseEstimator):
    """Binary logistic model trained by gradient descent on cross-entropy."""

    def __init__(
        self,
        epochs: int = 200,
        learning_rate: float = 0.05,
        weight_decay: float = 1e-6,
        batch_size: int = 32,
        seed: int = 0,
    ):
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.weight_decay = weight_decay
        self.batch_size = batch_size
        self.seed = seed

    def fit(self, X: np.ndarray, y: np.ndarray) -> "FeatureClassifier":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if np.all(y == y[0]):
            raise DegenerateData("all labels identical")
        mean, std = fit_standardizer(X)
        Xn = apply_standardizer(X, mean, std)
        n, dim = Xn.shape
        rng = np.random.default_rng(self.seed)
        w = np.zeros(dim)
        b = np.zeros(1)
        adam = AdamState()
        params = [[w.reshape(1, -1), b]]
        min_lr = self.learning_rate / 100.0
        for epoch in range(self.epochs):
            lr = cosine_lr(self.learning_rate, min_lr, epoch, self.epochs)
            perm = rng.permutation(n)
            for lo in range(0, n, self.batch_size):
                batch = perm[lo:lo + self.batch_size]
                Xb, yb = Xn[batch], y[batch]
                p = _sigmoid(Xb @ params[0][0].ravel() + params[0][1][0])
                err = (p - yb) / len(batch)
                gw = (err @ Xb).reshape(1, -1) + self.weight_decay * params[0][0]
                gb = np.array([err.sum()]) + self.weight_decay * params[0][1]
                adam.step(params, [[gw, gb]], lr)
        self.norm_mean_ = mean
        self.norm_std_ = std
        self.weights_ = params[0][0].ravel()
        self.bias_ = float(params[0][1][0])
        self.feature_names_ = list(FEATURE_NAMES)
        self.classes_ = np.array([0, 1])
        return self

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        Xn = apply_standardizer(np.asarray(X, dtype=np.float64), self.norm_mean_, self.norm_std_)
        return Xn @ self.weights_ + self.bias_

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        p_hard = _sigmoid(self.decision_function(X))
        return np.column_stack([1.0 - p_hard, p_hard])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.decision_function(X) > 0).astype(int)

    def score_text(self, text: ArticleText) -> float:
        """Probability the text is hard; doubles as a ranking score."""
        return float(self.predict_proba(feature_matrix([text]))[0, 1])

    def to_dict(self) -> dict:
        from . import __version__

        return {
            "format": MODEL_FORMAT,
            "kind": "classifier",
            "feature_names": self.feature_names_,
            "feature_set_version": FEATURE_SET_VERSION,
            "norm_mean": self.norm_mean_.tolist(),
            "norm_std": self.norm_std_.tolist(),
            "weights": self.weights_.tolist(),
            "bias": self.bias_,
            "version": __version__,
            "training_meta": {
                "seed": self.seed,
                "epochs": self.epochs,
                "learning_rate": self.learning_rate,
                "weight_decay": self.weight_decay,
                "batch_size": self.batch_size,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureClassifier":
        if d.get("format") != MODEL_FORMAT or d.get("kind") != "classifier":
            raise ValueError("not a classifier model document")
        if d.get("feature_set_version") != FEATURE_SET_VERSION:
            raise ValueError("feature set version mismatch")
        meta = d.get("training_meta", {})
        model = cls(
            epochs=meta.get("epochs", 0),
            learning_rate=meta.get("learning_rate", 0.0),
            weight_decay=meta.get("weight_decay", 0.0),
            batch_size=meta.get("batch_size", 0),
            seed=meta.get("seed", 0),
        )
        names = list(d["feature_names"])
        mean = np.asarray(d["norm_mean"], dtype=np.float64)
        std = np.asarray(d["norm_std"], dtype=np.float64)
        weights = np.asarray(d["weights"], dtype=np.float64)
        if mean.shape != (len(names),) or std.shape != mean.shape or weights.shape != mean.shape:
            raise ValueError("inconsistent classifier shapes")
        if np.any(std <= 0):
            raise ValueError("norm_std must be positive")
        model.feature_names_ = names
        model.norm_mean_ = mean
        model.norm_std_ = std
        model.weights_ = weights
        model.bias_ = float(d["bias"])
        model.classes_ = np.array([0, 1])
        model.version_ = d.get("version")
        return model

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, ensure_ascii=False, sort_keys=True, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "FeatureClassifier":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def train_feature_classifier(pairs: Sequence[ArticlePair], **params) -> FeatureClassifier:
    """Fit a FeatureClassifier on article pairs (easy=0, hard=1)."""
    if len(pairs) < 2:
        raise DegenerateData("need at least 2 training pairs")
    X = np.vstack([
        feature_matrix([p.easy for p in pairs]),
        feature_matrix([p.hard for p in pairs]),
    ])
    y = np.concatenate([np.zeros(len(pairs)), np.ones(len(pairs))])
    return FeatureClassifier(**params).fit(X, y)


def classify(model: FeatureClassifier, features: FeatureVector) -> float:
    """Probability of "hard" for one feature vector."""
    return float(model.predict_proba(features.as_array()[None, :])[0, 1])
