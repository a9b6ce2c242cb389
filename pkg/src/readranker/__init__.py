"""readranker: multilingual readability scoring for encyclopedic text."""

__version__ = "0.1.0"

from .classifier import FeatureClassifier, classify, train_feature_classifier
from .errors import (
    DegenerateData,
    DuplicateId,
    EmptyLead,
    EmptyText,
    MalformedInput,
    NotFound,
    RateLimited,
    ReadrankerError,
    UpstreamError,
)
from .evalkit import (
    EvalReport,
    bootstrap_ci,
    distribution_report,
    ranking_accuracy,
    score_threshold_analysis,
    spearman,
    triple_ranking_accuracy,
)
from .features import (
    FEATURE_NAMES,
    FeatureExtractor,
    FeatureVector,
    featurize,
    fkgl,
    flesch_reading_ease,
    ns_baseline,
)
from .html_extract import extract_lead_text, redirect_target
from .ranker import (
    ReadabilityRanker,
    align_sentences,
    build_sentence_training_set,
    levenshtein,
    levenshtein_similarity,
    load_any_model,
    margin_ranking_loss,
    train,
)
from .sentences import split_sentences
from .syllables import count_syllables
from .types import ArticlePair, ArticleText, ArticleTriple, RawDocument

__all__ = [
    "__version__",
    "ArticlePair",
    "ArticleText",
    "ArticleTriple",
    "DegenerateData",
    "DuplicateId",
    "EmptyLead",
    "EmptyText",
    "EvalReport",
    "FEATURE_NAMES",
    "FeatureClassifier",
    "FeatureExtractor",
    "FeatureVector",
    "MalformedInput",
    "NotFound",
    "RateLimited",
    "RawDocument",
    "ReadabilityRanker",
    "ReadrankerError",
    "UpstreamError",
    "align_sentences",
    "bootstrap_ci",
    "build_sentence_training_set",
    "classify",
    "count_syllables",
    "distribution_report",
    "extract_lead_text",
    "featurize",
    "fkgl",
    "flesch_reading_ease",
    "levenshtein",
    "levenshtein_similarity",
    "load_any_model",
    "margin_ranking_loss",
    "ns_baseline",
    "ranking_accuracy",
    "redirect_target",
    "score_threshold_analysis",
    "spearman",
    "split_sentences",
    "train",
    "train_feature_classifier",
    "triple_ranking_accuracy",
]
