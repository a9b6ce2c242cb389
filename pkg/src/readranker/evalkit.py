"""Ranking-accuracy evaluation, bootstrap confidence intervals,
correlations, and score-distribution reports.

A pair counts as correct only when the easy text scores strictly lower
than the hard text; exact ties count as incorrect and are reported, so the
opposite convention can be recomputed from the tie counter. All scorers
are oriented "higher = harder" (reading-ease values are negated).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import stats as scipy_stats

from .errors import DegenerateData
from .types import ArticlePair, ArticleText, ArticleTriple

Scorer = Callable[[ArticleText], float]


@dataclass(frozen=True)
class PairScore:
    pair_id: str
    s_easy: float
    s_hard: float
    correct: bool

    def to_dict(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "s_easy": self.s_easy,
            "s_hard": self.s_hard,
            "correct": self.correct,
        }


@dataclass(frozen=True)
class TripleScore:
    triple_id: str
    s_easy: float
    s_medium: float
    s_hard: float
    correct: bool

    def to_dict(self) -> dict:
        return {
            "triple_id": self.triple_id,
            "s_easy": self.s_easy,
            "s_medium": self.s_medium,
            "s_hard": self.s_hard,
            "correct": self.correct,
        }


@dataclass
class EvalReport:
    dataset: str
    scorer: str
    n_pairs: int
    ranking_accuracy: float
    ties: int
    bootstrap_std: float | None = None
    ci_2sd: float | None = None
    records: tuple = ()

    def to_dict(self, include_records: bool = True) -> dict:
        d = {
            "dataset": self.dataset,
            "scorer": self.scorer,
            "n_pairs": self.n_pairs,
            "ranking_accuracy": self.ranking_accuracy,
            "ties": self.ties,
            "bootstrap_std": self.bootstrap_std,
            "ci_2sd": self.ci_2sd,
        }
        if include_records:
            d["per_pair"] = [r.to_dict() for r in self.records]
        return d

    def summary_row(self) -> str:
        ci = "" if self.ci_2sd is None else f"{self.ci_2sd:.4f}"
        return "\t".join([
            self.dataset,
            self.scorer,
            f"{self.ranking_accuracy:.4f}",
            ci,
            str(self.n_pairs),
            str(self.ties),
        ])


def ranking_accuracy(
    scorer: Scorer,
    pairs: Sequence[ArticlePair],
    *,
    dataset: str = "",
    scorer_name: str = "",
    resamples: int | None = None,
    seed: int = 0,
) -> EvalReport:
    """Fraction of pairs with score(easy) < score(hard). Optionally attach
    a bootstrap CI over the per-pair correctness outcomes."""
    if not pairs:
        raise DegenerateData("no pairs to evaluate")
    records = []
    ties = 0
    for pair in pairs:
        s_easy = float(scorer(pair.easy))
        s_hard = float(scorer(pair.hard))
        if s_easy == s_hard:
            ties += 1
        correct = s_easy < s_hard
        records.append(PairScore(pair.pair_id, s_easy, s_hard, correct))
    correct_flags = [r.correct for r in records]
    report = EvalReport(
        dataset=dataset,
        scorer=scorer_name,
        n_pairs=len(records),
        ranking_accuracy=sum(correct_flags) / len(records),
        ties=ties,
        records=tuple(records),
    )
    if resamples:
        ci = bootstrap_ci(correct_flags, resamples=resamples, seed=seed)
        report.bootstrap_std = ci.std
        report.ci_2sd = ci.ci_2sd
    return report


def triple_ranking_accuracy(
    scorer: Scorer,
    triples: Sequence[ArticleTriple],
    *,
    dataset: str = "",
    scorer_name: str = "",
    resamples: int | None = None,
    seed: int = 0,
) -> EvalReport:
    """Fraction of triples scored strictly easy < medium < hard."""
    if not triples:
        raise DegenerateData("no triples to evaluate")
    records = []
    ties = 0
    for triple in triples:
        s_easy = float(scorer(triple.easy))
        s_medium = float(scorer(triple.medium))
        s_hard = float(scorer(triple.hard))
        if s_easy == s_medium or s_medium == s_hard or s_easy == s_hard:
            ties += 1
        correct = s_easy < s_medium < s_hard
        records.append(TripleScore(triple.triple_id, s_easy, s_medium, s_hard, correct))
    correct_flags = [r.correct for r in records]
    report = EvalReport(
        dataset=dataset,
        scorer=scorer_name,
        n_pairs=len(records),
        ranking_accuracy=sum(correct_flags) / len(records),
        ties=ties,
        records=tuple(records),
    )
    if resamples:
        ci = bootstrap_ci(correct_flags, resamples=resamples, seed=seed)
        report.bootstrap_std = ci.std
        report.ci_2sd = ci.ci_2sd
    return report


@dataclass(frozen=True)
class BootstrapCI:
    std: float
    ci_2sd: float


def bootstrap_ci(
    per_pair_correct: Sequence[bool], resamples: int = 10_000, seed: int = 0
) -> BootstrapCI:
    """Resample the outcome list with replacement ``resamples`` times and
    report the standard deviation of the accuracy plus 2*std."""
    if resamples < 1:
        raise ValueError("resamples must be >= 1")
    outcomes = np.asarray(per_pair_correct, dtype=np.float64)
    n = outcomes.size
    if n < 1:
        raise DegenerateData("empty outcome list")
    rng = np.random.default_rng(seed)
    accs = np.empty(resamples)
    chunk = max(1, min(resamples, 8_000_000 // max(1, n)))
    done = 0
    while done < resamples:
        take = min(chunk, resamples - done)
        idx = rng.integers(0, n, size=(take, n))
        accs[done:done + take] = outcomes[idx].mean(axis=1)
        done += take
    std = float(accs.std())
    return BootstrapCI(std=std, ci_2sd=2.0 * std)


@dataclass(frozen=True)
class SpearmanResult:
    rho: float
    p_value: float


def spearman(x: Sequence[float], y: Sequence[float]) -> SpearmanResult:
    """Spearman rank correlation with average-rank ties and the large-n
    t-approximation for the p-value (approximate below n=30)."""
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 3:
        raise ValueError("need two equal-length 1-d sequences with n >= 3")
    if np.all(xs == xs[0]) or np.all(ys == ys[0]):
        raise DegenerateData("constant input to spearman")
    rx = scipy_stats.rankdata(xs)
    ry = scipy_stats.rankdata(ys)
    rho = float(np.corrcoef(rx, ry)[0, 1])
    n = xs.size
    if abs(rho) >= 1.0:
        return SpearmanResult(rho=rho, p_value=0.0)
    t = rho * np.sqrt((n - 2) / (1.0 - rho * rho))
    p = float(2.0 * scipy_stats.t.sf(abs(t), df=n - 2))
    return SpearmanResult(rho=rho, p_value=p)


@dataclass(frozen=True)
class DistributionReport:
    language: str
    n: int
    median: float
    p25: float
    p75: float
    p2_5: float
    p97_5: float

    def to_dict(self) -> dict:
        return {
            "language": self.language,
            "n": self.n,
            "median": self.median,
            "p25": self.p25,
            "p75": self.p75,
            "p2_5": self.p2_5,
            "p97_5": self.p97_5,
        }


def distribution_report(scores: Sequence[float], language: str) -> DistributionReport:
    """Linear-interpolation percentiles at 2.5/25/50/75/97.5."""
    arr = np.asarray(scores, dtype=np.float64)
    if arr.size < 1:
        raise DegenerateData("no scores")
    p2_5, p25, median, p75, p97_5 = np.percentile(arr, [2.5, 25, 50, 75, 97.5])
    return DistributionReport(
        language=language,
        n=int(arr.size),
        median=float(median),
        p25=float(p25),
        p75=float(p75),
        p2_5=float(p2_5),
        p97_5=float(p97_5),
    )


@dataclass(frozen=True)
class ThresholdAnalysis:
    best_separating_score: float
    fkgl_at_threshold: float
    balanced_accuracy: float


def score_threshold_analysis(
    scores: Sequence[float],
    fkgl_values: Sequence[float],
    is_hard: Sequence[bool],
) -> ThresholdAnalysis:
    """Sweep score thresholds for the best balanced easy/hard separation
    and report the median FKGL of texts near the chosen threshold (within
    5% of the score interquartile range)."""
    s = np.asarray(scores, dtype=np.float64)
    f = np.asarray(fkgl_values, dtype=np.float64)
    h = np.asarray(is_hard, dtype=bool)
    if s.size != f.size or s.size != h.size:
        raise ValueError("inputs must have equal length")
    if not h.any() or h.all():
        raise DegenerateData("need both easy and hard texts")
    uniq = np.unique(s)
    candidates = (uniq[:-1] + uniq[1:]) / 2.0 if uniq.size > 1 else uniq
    best_thr = float(candidates[0])
    best_acc = -1.0
    for thr in candidates:
        predicted_hard = s > thr
        acc = 0.5 * (predicted_hard[h].mean() + (~predicted_hard[~h]).mean())
        if acc > best_acc:
            best_acc = float(acc)
            best_thr = float(thr)
    q25, q75 = np.percentile(s, [25, 75])
    eps = 0.05 * (q75 - q25)
    near = np.abs(s - best_thr) <= eps
    if not near.any():
        near = np.abs(s - best_thr) == np.abs(s - best_thr).min()
    return ThresholdAnalysis(
        best_separating_score=best_thr,
        fkgl_at_threshold=float(np.median(f[near])),
        balanced_accuracy=best_acc,
    )


def oriented_scorer(kind: str, model=None) -> tuple[Scorer, str]:
    """Named scorer oriented so that higher always means harder. FRE is
    negated (higher reading ease means easier text)."""
    from .features import fkgl as _fkgl
    from .features import flesch_reading_ease, ns_baseline

    if kind == "model":
        if model is None:
            raise ValueError("model scorer needs a loaded model")
        return model.score_text, "model"
    if kind == "lfc":
        if model is None:
            raise ValueError("lfc scorer needs a trained classifier")
        return model.score_text, "lfc"
    if kind == "ns":
        return ns_baseline, "ns"
    if kind == "fre":
        return (lambda text: -flesch_reading_ease(text).value), "fre"
    if kind == "fkgl":
        return (lambda text: _fkgl(text).value), "fkgl"
    raise ValueError(f"unknown scorer {kind!r}")
