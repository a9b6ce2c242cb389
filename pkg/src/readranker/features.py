"""Language-agnostic text features and classic readability formulas.

The 14-feature list is fixed and versioned: model files record the feature
set version, and loading rejects a mismatch. Reading-ease coefficients live
in a data file with per-language source notes; unknown languages fall back
to the English coefficients.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, fields
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import EmptyText
from .syllables import count_syllables
from .types import ArticlePair, ArticleText, write_jsonl

FEATURE_SET_VERSION = "1"

FEATURE_NAMES = (
    "num_sentences",
    "num_words",
    "num_chars",
    "avg_sentence_len_words",
    "avg_word_len_chars",
    "avg_sentence_len_chars",
    "syllables_per_word",
    "words_per_sentence",
    "type_token_ratio",
    "long_word_ratio",
    "punct_per_sentence",
    "digit_ratio",
    "uppercase_ratio",
    "monosyllable_ratio",
)

LONG_WORD_CHARS = 6


@dataclass(frozen=True)
class FeatureVector:
    num_sentences: float
    num_words: float
    num_chars: float
    avg_sentence_len_words: float
    avg_word_len_chars: float
    avg_sentence_len_chars: float
    syllables_per_word: float
    words_per_sentence: float
    type_token_ratio: float
    long_word_ratio: float
    punct_per_sentence: float
    digit_ratio: float
    uppercase_ratio: float
    monosyllable_ratio: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES], dtype=np.float64)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in FEATURE_NAMES}


assert tuple(f.name for f in fields(FeatureVector)) == FEATURE_NAMES


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _strip_edges(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start])[0] in "PS":
        start += 1
    while end > start and unicodedata.category(token[end - 1])[0] in "PS":
        end -= 1
    return token[start:end]


def tokenize(text: str) -> list[str]:
    """Whitespace tokenization with surrounding punctuation stripped."""
    words = []
    for token in text.split():
        word = _strip_edges(token)
        if word:
            words.append(word)
    return words


def featurize(text: ArticleText) -> FeatureVector:
    """Deterministic feature vector for one text. Raises EmptyText when the
    text has no tokens."""
    words = tokenize(text.text)
    if not words:
        raise EmptyText(f"no tokens in text {text.title!r}")
    n_sentences = max(1, text.num_sentences)
    n_words = len(words)
    n_chars = len(text.text)
    syllable_counts = [count_syllables(w, text.lang) for w in words]
    total_syllables = sum(syllable_counts)
    letters = [ch for ch in text.text if ch.isalpha()]
    non_space = [ch for ch in text.text if not ch.isspace()]
    punct = sum(1 for ch in text.text if _is_punct(ch))
    digits = sum(1 for ch in text.text if ch.isdigit())
    uppercase = sum(1 for ch in letters if ch.isupper())
    sentence_chars = [len(s) for s in text.sentences] or [n_chars]
    return FeatureVector(
        num_sentences=float(n_sentences),
        num_words=float(n_words),
        num_chars=float(n_chars),
        avg_sentence_len_words=n_words / n_sentences,
        avg_word_len_chars=sum(len(w) for w in words) / n_words,
        avg_sentence_len_chars=sum(sentence_chars) / len(sentence_chars),
        syllables_per_word=total_syllables / n_words,
        words_per_sentence=n_words / n_sentences,
        type_token_ratio=len({w.casefold() for w in words}) / n_words,
        long_word_ratio=sum(1 for w in words if len(w) > LONG_WORD_CHARS) / n_words,
        punct_per_sentence=punct / n_sentences,
        digit_ratio=digits / max(1, len(non_space)),
        uppercase_ratio=uppercase / max(1, len(letters)),
        monosyllable_ratio=sum(1 for c in syllable_counts if c == 1) / n_words,
    )


def feature_matrix(texts: Iterable[ArticleText]) -> np.ndarray:
    rows = [featurize(t).as_array() for t in texts]
    if not rows:
        return np.empty((0, len(FEATURE_NAMES)))
    return np.stack(rows)


class FeatureExtractor(BaseEstimator, TransformerMixin):
    """Stateless transformer: list of ArticleText -> (n, 14) feature matrix."""

    def fit(self, X, y=None):
        return self

    def transform(self, X: Sequence[ArticleText]) -> np.ndarray:
        return feature_matrix(X)

    def get_feature_names_out(self, input_features=None):
        return np.array(FEATURE_NAMES, dtype=object)


STD_FLOOR = 1e-12


def fit_standardizer(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-feature mean and std (floored for constant features)."""
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    return mean, np.maximum(std, STD_FLOOR)


def apply_standardizer(X: np.ndarray, mean: np.ndarray, std: np.ndarray) -> np.ndarray:
    return (X - mean) / std


@dataclass(frozen=True)
class FormulaScore:
    formula: str  # FRE | FKGL
    value: float
    lang_variant: str


@lru_cache(maxsize=None)
def load_fre_coefficients(path: str | None = None) -> dict[str, tuple[float, float, float]]:
    if path is None:
        raw = resources.files("readranker").joinpath("data", "fre_coefficients.tsv").read_text(
            encoding="utf-8"
        )
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    table = {}
    for line in raw.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        lang, a, b, c, *_ = line.split("\t")
        table[lang] = (float(a), float(b), float(c))
    return table


def _formula_counts(text: ArticleText) -> tuple[int, int, int]:
    words = tokenize(text.text)
    if not words:
        raise EmptyText(f"no tokens in text {text.title!r}")
    sentences = max(1, text.num_sentences)
    syllables = sum(count_syllables(w, text.lang) for w in words)
    return sentences, len(words), syllables


def flesch_reading_ease(text: ArticleText, lang: str | None = None) -> FormulaScore:
    """Reading ease with per-language coefficients; higher = easier. Unknown
    languages use the English coefficients and record lang_variant="en"."""
    lang = lang or text.lang
    table = load_fre_coefficients()
    variant = lang if lang in table else "en"
    a, b, c = table[variant]
    sentences, words, syllables = _formula_counts(text)
    value = a - b * (words / sentences) - c * (syllables / words)
    return FormulaScore(formula="FRE", value=value, lang_variant=variant)


def fkgl(text: ArticleText) -> FormulaScore:
    """Flesch-Kincaid grade level; higher = harder."""
    sentences, words, syllables = _formula_counts(text)
    value = 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59
    return FormulaScore(formula="FKGL", value=value, lang_variant=text.lang)


def ns_baseline(text: ArticleText) -> float:
    """Number-of-sentences baseline score (more sentences = harder)."""
    return float(text.num_sentences)


def write_feature_dump(pairs: Iterable[ArticlePair], path) -> None:
    """JSONL of {pair_id, side, features{...}} for offline analysis."""

    def rows():
        for pair in pairs:
            for side in ("easy", "hard"):
                yield {
                    "pair_id": pair.pair_id,
                    "side": side,
                    "features": featurize(getattr(pair, side)).to_dict(),
                }

    write_jsonl(path, rows())
