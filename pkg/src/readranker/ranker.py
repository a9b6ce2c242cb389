"""Pairwise-ranking readability scorer.

A Siamese feature-encoder network trained with the margin ranking loss
max(0, -y*(s1 - s2) + m). Training always feeds (hard, easy, y=+1), so
higher scores mean harder text. Document mode scores the whole text;
sentence mode scores each sentence and mean-pools, and is trained on
sentence pairs aligned by normalized Levenshtein similarity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from . import net
from .errors import DegenerateData
from .features import (
    FEATURE_NAMES,
    FEATURE_SET_VERSION,
    apply_standardizer,
    feature_matrix,
    fit_standardizer,
)
from .types import ArticlePair, ArticleText

MODEL_FORMAT = "readranker.scorer/1"


def margin_ranking_loss(s1: float, s2: float, y: int, margin: float) -> float:
    """max(0, -y*(s1 - s2) + margin) for a single score pair."""
    if margin < 0:
        raise ValueError("margin must be >= 0")
    if y not in (-1, 1):
        raise ValueError("y must be -1 or +1")
    return max(0.0, -y * (s1 - s2) + margin)


def levenshtein(a: str, b: str) -> int:
    """Classic edit distance (insert/delete/substitute, unit costs)."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            ))
        previous = current
    return previous[-1]


def levenshtein_similarity(a: str, b: str) -> float:
    """1 - distance / max(len); 1.0 for two empty strings."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


@dataclass(frozen=True)
class AlignedSentencePair:
    easy: str
    hard: str
    similarity: float


def align_sentences(
    easy_sentences: Sequence[str],
    hard_sentences: Sequence[str],
    threshold: float = 0.5,
) -> list[AlignedSentencePair]:
    """Greedy one-to-one alignment: each easy sentence takes its most
    similar unused hard sentence, kept only at or above the threshold.
    Ties resolve to the earliest hard sentence."""
    used: set[int] = set()
    aligned = []
    for easy in easy_sentences:
        best_j = -1
        best_sim = -1.0
        for j, hard in enumerate(hard_sentences):
            if j in used:
                continue
            sim = levenshtein_similarity(easy, hard)
            if sim > best_sim:
                best_sim = sim
                best_j = j
        if best_j >= 0 and best_sim >= threshold:
            used.add(best_j)
            aligned.append(AlignedSentencePair(easy, hard_sentences[best_j], best_sim))
    return aligned


@dataclass(frozen=True)
class RankedPairExample:
    """One training example: the hard side must outscore the easy side."""

    x_easy: np.ndarray
    x_hard: np.ndarray
    y: int = 1


def _sentence_text(sentence: str, base: ArticleText) -> ArticleText:
    return ArticleText(
        title=base.title,
        lang=base.lang,
        source=base.source,
        text=sentence,
        sentences=(sentence,),
        num_chars=len(sentence),
        num_sentences=1,
    )


def build_sentence_training_set(
    pairs: Iterable[ArticlePair], threshold: float = 0.5
) -> list[RankedPairExample]:
    """Aligned-sentence training examples, labeled hard-scores-higher."""
    examples = []
    for pair in pairs:
        for aligned in align_sentences(pair.easy.sentences, pair.hard.sentences, threshold):
            x_easy = feature_matrix([_sentence_text(aligned.easy, pair.easy)])[0]
            x_hard = feature_matrix([_sentence_text(aligned.hard, pair.hard)])[0]
            examples.append(RankedPairExample(x_easy=x_easy, x_hard=x_hard))
    return examples


class ReadabilityRanker(BaseEstimator):
    """Siamese margin-ranking readability scorer over text features.

    fit() takes article pairs; predict() returns one score per text, higher
    meaning harder to read. ``hidden_units=None`` resolves per mode: 16
    tanh units for document mode, linear for sentence mode.
    """

    def __init__(
        self,
        mode: str = "document",
        hidden_units: int | None = None,
        epochs: int = 50,
        learning_rate: float = 1e-2,
        weight_decay: float = 1e-6,
        margin: float = 0.5,
        seed: int = 0,
        val_fraction: float = 0.01,
        batch_size: int = 32,
        sentence_threshold: float = 0.5,
    ):
        self.mode = mode
        self.hidden_units = hidden_units
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.weight_decay = weight_decay
        self.margin = margin
        self.seed = seed
        self.val_fraction = val_fraction
        self.batch_size = batch_size
        self.sentence_threshold = sentence_threshold

    def _resolved_hidden(self) -> int:
        if self.hidden_units is not None:
            return self.hidden_units
        return 16 if self.mode == "document" else 0

    def fit(self, pairs: Sequence[ArticlePair], y=None) -> "ReadabilityRanker":
        if self.mode not in ("document", "sentence"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if len(pairs) < 2:
            raise DegenerateData("need at least 2 training pairs")
        if self.mode == "document":
            X_hard = feature_matrix([p.hard for p in pairs])
            X_easy = feature_matrix([p.easy for p in pairs])
        else:
            examples = build_sentence_training_set(pairs, self.sentence_threshold)
            if len(examples) < 2:
                raise DegenerateData(
                    "sentence alignment produced fewer than 2 training examples"
                )
            X_hard = np.stack([ex.x_hard for ex in examples])
            X_easy = np.stack([ex.x_easy for ex in examples])
        if np.array_equal(X_hard, X_easy):
            raise DegenerateData("every pair has identical features on both sides")

        mean, std = fit_standardizer(np.vstack([X_hard, X_easy]))
        Xh = apply_standardizer(X_hard, mean, std)
        Xe = apply_standardizer(X_easy, mean, std)
        labels = np.ones(len(Xh))
        result = net.train_mrl_network(
            Xh,
            Xe,
            labels,
            self._resolved_hidden(),
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            weight_decay=self.weight_decay,
            margin=self.margin,
            val_fraction=self.val_fraction,
            batch_size=self.batch_size,
            seed=self.seed,
        )
        self.feature_names_ = list(FEATURE_NAMES)
        self.norm_mean_ = mean
        self.norm_std_ = std
        self.params_ = result.params
        self.loss_curve_ = result.loss_curve
        self.best_epoch_ = result.best_epoch
        self.n_examples_ = len(Xh)
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "params_"):
            raise RuntimeError("model is not fitted")

    def _forward_features(self, X: np.ndarray) -> np.ndarray:
        self._check_fitted()
        return net.forward(self.params_, apply_standardizer(X, self.norm_mean_, self.norm_std_))

    def score_text(self, text: ArticleText) -> float:
        if self.mode == "sentence" and text.sentences:
            X = feature_matrix([_sentence_text(s, text) for s in text.sentences])
            return float(self._forward_features(X).mean())
        return float(self._forward_features(feature_matrix([text]))[0])

    def predict(self, texts: Sequence[ArticleText]) -> np.ndarray:
        if self.mode == "sentence":
            return np.array([self.score_text(t) for t in texts])
        return self._forward_features(feature_matrix(list(texts)))

    def to_dict(self) -> dict:
        self._check_fitted()
        from . import __version__

        return {
            "format": MODEL_FORMAT,
            "kind": "ranker",
            "mode": self.mode,
            "feature_names": self.feature_names_,
            "feature_set_version": FEATURE_SET_VERSION,
            "norm_mean": self.norm_mean_.tolist(),
            "norm_std": self.norm_std_.tolist(),
            "layers": [
                {"weights": w.tolist(), "bias": b.tolist()} for w, b in self.params_
            ],
            "margin": self.margin,
            "version": __version__,
            "training_meta": {
                "seed": self.seed,
                "epochs": self.epochs,
                "learning_rate": self.learning_rate,
                "weight_decay": self.weight_decay,
                "val_fraction": self.val_fraction,
                "batch_size": self.batch_size,
                "sentence_threshold": self.sentence_threshold,
                "hidden_units": self._resolved_hidden(),
                "best_epoch": self.best_epoch_,
                "n_examples": self.n_examples_,
                "loss_curve": self.loss_curve_,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReadabilityRanker":
        if d.get("format") != MODEL_FORMAT or d.get("kind") != "ranker":
            raise ValueError("not a ranker model document")
        if d.get("feature_set_version") != FEATURE_SET_VERSION:
            raise ValueError("feature set version mismatch")
        meta = d.get("training_meta", {})
        model = cls(
            mode=d["mode"],
            hidden_units=meta.get("hidden_units"),
            epochs=meta.get("epochs", 0),
            learning_rate=meta.get("learning_rate", 0.0),
            weight_decay=meta.get("weight_decay", 0.0),
            margin=d["margin"],
            seed=meta.get("seed", 0),
            val_fraction=meta.get("val_fraction", 0.0),
            batch_size=meta.get("batch_size", 0),
            sentence_threshold=meta.get("sentence_threshold", 0.5),
        )
        names = list(d["feature_names"])
        mean = np.asarray(d["norm_mean"], dtype=np.float64)
        std = np.asarray(d["norm_std"], dtype=np.float64)
        layers = [
            [np.asarray(layer["weights"], dtype=np.float64),
             np.asarray(layer["bias"], dtype=np.float64)]
            for layer in d["layers"]
        ]
        _validate_shapes(names, mean, std, layers)
        model.feature_names_ = names
        model.norm_mean_ = mean
        model.norm_std_ = std
        model.params_ = layers
        model.loss_curve_ = meta.get("loss_curve", [])
        model.best_epoch_ = meta.get("best_epoch", 0)
        model.n_examples_ = meta.get("n_examples", 0)
        model.version_ = d.get("version")
        return model

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, ensure_ascii=False, sort_keys=True, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "ReadabilityRanker":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _validate_shapes(names, mean, std, layers) -> None:
    dim = len(names)
    if mean.shape != (dim,) or std.shape != (dim,):
        raise ValueError("normalization stats do not match feature names")
    if np.any(std <= 0):
        raise ValueError("norm_std must be positive")
    if not layers:
        raise ValueError("model has no layers")
    expected_in = dim
    for w, b in layers:
        if w.ndim != 2 or w.shape[1] != expected_in or b.shape != (w.shape[0],):
            raise ValueError("inconsistent layer shapes")
        expected_in = w.shape[0]
    if layers[-1][0].shape[0] != 1:
        raise ValueError("output layer must be scalar")


def train(pairs: Sequence[ArticlePair], **config) -> ReadabilityRanker:
    """Convenience wrapper: build and fit a ReadabilityRanker."""
    return ReadabilityRanker(**config).fit(pairs)


def load_any_model(path: str | Path):
    """Load a scorer model file (ranker or classifier) by its kind field."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    kind = doc.get("kind")
    if kind == "ranker":
        return ReadabilityRanker.from_dict(doc)
    if kind == "classifier":
        from .classifier import FeatureClassifier

        return FeatureClassifier.from_dict(doc)
    raise ValueError(f"unknown model kind {kind!r}")
