"""Build and manage the aligned easy/hard article-pair dataset.

Matching runs over side records (articles plus matching metadata) and
always applies the same gate: disambiguation/list pages are excluded and
both versions need three or more sentences. Skipped articles are reported,
never silently dropped.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegenerateData, DuplicateId
from .types import SOURCES, ArticlePair, ArticleText, SideRecord, SkipRecord

MIN_SENTENCES = 3

# Title substrings that mark disambiguation/list pages when no page-prop
# flag is present. Lowercase, matched against the casefolded title.
DISAMBIGUATION_TITLE_MARKERS = (
    "(disambiguation)",
    "(begriffsklärung)",
    "(homonymie)",
    "(desambiguación)",
    "(desambiguação)",
    "(disambigua)",
    "(doorverwijspagina)",
    "(значения)",
    "(argipena)",
    "list of ",
    "liste von ",
    "liste des ",
)

TXIKIPEDIA_NAMESPACE = 104
TXIKIPEDIA_PREFIX = "Txikipedia:"


def normalize_title(title: str) -> str:
    return " ".join(title.replace("_", " ").split())


def _title_key(title: str) -> str:
    return normalize_title(title).casefold()


def is_disambiguation(record: SideRecord,
                      markers: Sequence[str] = DISAMBIGUATION_TITLE_MARKERS) -> bool:
    if record.disambiguation:
        return True
    title = _title_key(record.text.title)
    return any(marker in title for marker in markers)


def _long_enough(text: ArticleText) -> bool:
    return text.num_sentences >= MIN_SENTENCES


def make_pair(dataset: str, wikidata_id: str | None, easy: ArticleText,
              hard: ArticleText) -> ArticlePair:
    key = wikidata_id if wikidata_id else normalize_title(hard.title)
    return ArticlePair(
        pair_id=f"{dataset}:{key}",
        wikidata_id=wikidata_id,
        lang=hard.lang,
        dataset=dataset,
        easy=easy,
        hard=hard,
    )


def _dedupe_by_id(records: Iterable[SideRecord], side: str) -> dict[str, SideRecord]:
    by_id: dict[str, SideRecord] = {}
    for rec in records:
        if not rec.wikidata_id:
            continue
        seen = by_id.get(rec.wikidata_id)
        if seen is not None and seen.text.text != rec.text.text:
            raise DuplicateId(
                f"{side} side has wikidata id {rec.wikidata_id} twice with different texts"
            )
        by_id[rec.wikidata_id] = rec
    return by_id


def match_by_wikidata(
    hard_records: Iterable[SideRecord],
    easy_records: Iterable[SideRecord],
    dataset: str,
    *,
    markers: Sequence[str] = DISAMBIGUATION_TITLE_MARKERS,
) -> tuple[list[ArticlePair], list[SkipRecord]]:
    """Inner-join both sides on wikidata id, then gate."""
    skips: list[SkipRecord] = []

    def usable(by_id: dict[str, SideRecord]) -> dict[str, SideRecord]:
        kept = {}
        for qid, rec in by_id.items():
            if is_disambiguation(rec, markers):
                skips.append(SkipRecord(rec.text.title, "disambiguation"))
            else:
                kept[qid] = rec
        return kept

    hard_by_id = usable(_dedupe_by_id(hard_records, "hard"))
    easy_by_id = usable(_dedupe_by_id(easy_records, "easy"))
    pairs = []
    for qid in hard_by_id:
        if qid not in easy_by_id:
            skips.append(SkipRecord(hard_by_id[qid].text.title, "unmatched"))
            continue
        easy, hard = easy_by_id[qid].text, hard_by_id[qid].text
        if not (_long_enough(easy) and _long_enough(hard)):
            skips.append(SkipRecord(hard.title, "too_short"))
            continue
        pairs.append(make_pair(dataset, qid, easy, hard))
    for qid in easy_by_id:
        if qid not in hard_by_id:
            skips.append(SkipRecord(easy_by_id[qid].text.title, "unmatched"))
    return pairs, skips


@dataclass
class TitleIndex:
    """Canonical titles plus one-hop-flattened redirect aliases. Aliases
    claimed by more than one article are kept separately so matching can
    report them as ambiguous instead of silently picking one."""

    canonical: dict[str, SideRecord] = field(default_factory=dict)
    redirect_to_canonical: dict[str, str] = field(default_factory=dict)
    ambiguous_aliases: dict[str, frozenset[str]] = field(default_factory=dict)

    def alias_targets(self) -> dict[str, set[str]]:
        targets: dict[str, set[str]] = {key: {key} for key in self.canonical}
        for alias, target in self.redirect_to_canonical.items():
            targets.setdefault(alias, set()).add(target)
        for alias, keys in self.ambiguous_aliases.items():
            targets.setdefault(alias, set()).update(keys)
        return targets

    def title_set(self, key: str) -> frozenset[str]:
        aliases = {key}
        for alias, target in self.redirect_to_canonical.items():
            if target == key:
                aliases.add(alias)
        for alias, keys in self.ambiguous_aliases.items():
            if key in keys:
                aliases.add(alias)
        return frozenset(aliases)


def build_title_index(records: Iterable[SideRecord]) -> TitleIndex:
    index = TitleIndex()
    claims: dict[str, set[str]] = defaultdict(set)  # alias -> claimed targets
    for rec in records:
        key = _title_key(rec.text.title)
        if rec.redirect_to is not None:
            claims[key].add(_title_key(rec.redirect_to))
            continue
        index.canonical[key] = rec
        for alias in rec.redirects:
            claims[_title_key(alias)].add(key)

    def resolve(target: str, depth: int = 0) -> set[str]:
        if target in index.canonical:
            return {target}
        if depth >= 16 or target not in claims:
            return set()
        out: set[str] = set()
        for nxt in claims[target]:
            out |= resolve(nxt, depth + 1)
        return out

    for alias, targets in claims.items():
        if alias in index.canonical:
            continue
        resolved: set[str] = set()
        for target in targets:
            resolved |= resolve(target)
        if len(resolved) == 1:
            index.redirect_to_canonical[alias] = next(iter(resolved))
        elif len(resolved) > 1:
            index.ambiguous_aliases[alias] = frozenset(resolved)
    return index


def match_by_title(
    hard_index: TitleIndex,
    easy_index: TitleIndex,
    dataset: str,
    *,
    markers: Sequence[str] = DISAMBIGUATION_TITLE_MARKERS,
) -> tuple[list[ArticlePair], list[SkipRecord]]:
    """Pair articles whose title sets (canonical + redirects) intersect
    uniquely in both directions; ambiguity is reported, not raised."""
    skips: list[SkipRecord] = []
    hard_aliases = hard_index.alias_targets()

    easy_candidates: dict[str, set[str]] = {}
    for easy_key in easy_index.canonical:
        cands: set[str] = set()
        for title in easy_index.title_set(easy_key):
            cands.update(hard_aliases.get(title, ()))
        easy_candidates[easy_key] = cands

    hard_candidates: dict[str, set[str]] = defaultdict(set)
    for easy_key, cands in easy_candidates.items():
        for hard_key in cands:
            hard_candidates[hard_key].add(easy_key)

    pairs = []
    for easy_key in sorted(easy_candidates):
        easy_rec = easy_index.canonical[easy_key]
        cands = easy_candidates[easy_key]
        if not cands:
            skips.append(SkipRecord(easy_rec.text.title, "unmatched"))
            continue
        if len(cands) > 1:
            skips.append(SkipRecord(easy_rec.text.title, "ambiguous"))
            continue
        hard_key = next(iter(cands))
        if len(hard_candidates[hard_key]) > 1:
            skips.append(SkipRecord(easy_rec.text.title, "ambiguous"))
            continue
        hard_rec = hard_index.canonical[hard_key]
        if is_disambiguation(easy_rec, markers) or is_disambiguation(hard_rec, markers):
            skips.append(SkipRecord(hard_rec.text.title, "disambiguation"))
            continue
        if not (_long_enough(easy_rec.text) and _long_enough(hard_rec.text)):
            skips.append(SkipRecord(hard_rec.text.title, "too_short"))
            continue
        qid = hard_rec.wikidata_id or easy_rec.wikidata_id
        pairs.append(make_pair(dataset, qid, easy_rec.text, hard_rec.text))
    return pairs, skips


def match_txikipedia(
    records: Iterable[SideRecord],
    dataset: str,
    *,
    markers: Sequence[str] = DISAMBIGUATION_TITLE_MARKERS,
) -> tuple[list[ArticlePair], list[SkipRecord]]:
    """Pair main-namespace articles with their children's version stored
    under the Txikipedia namespace ("Txikipedia:<title>")."""
    mains: dict[str, SideRecord] = {}
    children: dict[str, SideRecord] = {}
    skips: list[SkipRecord] = []
    for rec in records:
        ns = rec.namespace if rec.namespace is not None else 0
        title = normalize_title(rec.text.title)
        if ns == TXIKIPEDIA_NAMESPACE or title.startswith(TXIKIPEDIA_PREFIX):
            stripped = title[len(TXIKIPEDIA_PREFIX):] if title.startswith(TXIKIPEDIA_PREFIX) else title
            children[stripped.casefold()] = rec
        elif ns == 0:
            mains[title.casefold()] = rec
    pairs = []
    for key in sorted(children):
        child = children[key]
        main = mains.get(key)
        if main is None:
            skips.append(SkipRecord(child.text.title, "unmatched"))
            continue
        if is_disambiguation(main, markers):
            skips.append(SkipRecord(main.text.title, "disambiguation"))
            continue
        if not (_long_enough(child.text) and _long_enough(main.text)):
            skips.append(SkipRecord(main.text.title, "too_short"))
            continue
        qid = main.wikidata_id or child.wikidata_id
        pairs.append(make_pair(dataset, qid, child.text, main.text))
    return pairs, skips


def cooccurrence_report(datasets: Mapping[str, Iterable[ArticlePair]]) -> dict[int, int]:
    """Histogram {k: number of wikidata ids occurring in k datasets}, k >= 2."""
    seen: dict[str, set[str]] = defaultdict(set)
    for tag, pairs in datasets.items():
        for pair in pairs:
            if pair.wikidata_id:
                seen[pair.wikidata_id].add(tag)
    counts = Counter(len(tags) for tags in seen.values() if len(tags) >= 2)
    return dict(sorted(counts.items()))


def split_train_test(
    pairs: Sequence[ArticlePair], train_fraction: float, seed: int
) -> tuple[list[ArticlePair], list[ArticlePair]]:
    """Deterministic split at floor(n * fraction). Pairs sharing a wikidata
    id always land in the same split; a shared group straddling the cut may
    overshoot the train side by at most its size minus one."""
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must be in (0, 1)")
    groups: dict[str, list[int]] = defaultdict(list)
    for i, pair in enumerate(pairs):
        key = pair.wikidata_id if pair.wikidata_id else f"\x00pair:{i}"
        groups[key].append(i)
    unit_list = list(groups.values())
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(unit_list))
    target = int(len(pairs) * train_fraction)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for unit_pos in order:
        unit = unit_list[unit_pos]
        if len(train_idx) < target:
            train_idx.extend(unit)
        else:
            test_idx.extend(unit)
    train_idx.sort()
    test_idx.sort()
    return [pairs[i] for i in train_idx], [pairs[i] for i in test_idx]


DEFAULT_INGEST_MAPPING = {
    "pair_id": "pair_id",
    "wikidata_id": "wikidata_id",
    "lang": "lang",
    "easy_title": "easy.title",
    "easy_text": "easy.text",
    "hard_title": "hard.title",
    "hard_text": "hard.text",
}


def _dig(record: dict, dotted: str):
    value = record
    for part in dotted.split("."):
        if not isinstance(value, dict) or part not in value:
            return None
        value = value[part]
    return value


def ingest_records(
    records: Iterable[dict],
    *,
    dataset: str,
    lang: str | None = None,
    mapping: Mapping[str, str] | None = None,
    enforce_min_sentences: bool = True,
) -> tuple[list[ArticlePair], list[SkipRecord]]:
    """Convert externally published pair records into ArticlePairs via a
    field mapping (our field -> dotted path in the source record).
    Sentences are re-derived with the packaged segmenter."""
    field_map = dict(DEFAULT_INGEST_MAPPING)
    if mapping:
        field_map.update(mapping)
    pairs: list[ArticlePair] = []
    skips: list[SkipRecord] = []
    for i, record in enumerate(records):
        rec_lang = lang or _dig(record, field_map["lang"]) or "en"
        easy_text = _dig(record, field_map["easy_text"])
        hard_text = _dig(record, field_map["hard_text"])
        if not easy_text or not hard_text:
            raise DegenerateData(f"record {i} missing text under mapping {field_map}")
        easy_source = dataset.split("-", 1)[0]
        easy = ArticleText.build(
            easy_text,
            title=_dig(record, field_map["easy_title"]) or "",
            lang=rec_lang,
            source=easy_source if easy_source in SOURCES else "other",
        )
        hard = ArticleText.build(
            hard_text,
            title=_dig(record, field_map["hard_title"]) or "",
            lang=rec_lang,
            source="wikipedia",
        )
        if enforce_min_sentences and not (_long_enough(easy) and _long_enough(hard)):
            skips.append(SkipRecord(hard.title, "too_short"))
            continue
        qid = _dig(record, field_map["wikidata_id"])
        key = _dig(record, field_map["pair_id"]) or qid or normalize_title(hard.title)
        pairs.append(ArticlePair(
            pair_id=f"{dataset}:{key}",
            wikidata_id=qid,
            lang=rec_lang,
            dataset=dataset,
            easy=easy,
            hard=hard,
        ))
    return pairs, skips
