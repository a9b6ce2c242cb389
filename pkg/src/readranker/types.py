"""Domain types and their JSONL wire formats."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .sentences import split_sentences

SOURCES = ("wikipedia", "simplewiki", "vikidia", "klexikon", "wikikids", "txikipedia", "other")


@dataclass(frozen=True)
class RawDocument:
    """One HTML page as fetched or read from a dump."""

    html: str
    title: str
    lang: str
    source: str = "wikipedia"


@dataclass(frozen=True)
class ArticleText:
    """Plain text of one article version plus its sentence segmentation."""

    title: str
    lang: str
    source: str
    text: str
    sentences: tuple[str, ...]
    num_chars: int
    num_sentences: int

    @classmethod
    def build(cls, text: str, *, title: str = "", lang: str = "en",
              source: str = "other") -> "ArticleText":
        sentences = tuple(split_sentences(text, lang))
        return cls(
            title=title,
            lang=lang,
            source=source,
            text=text,
            sentences=sentences,
            num_chars=len(text),
            num_sentences=len(sentences),
        )

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "lang": self.lang,
            "source": self.source,
            "text": self.text,
            "sentences": list(self.sentences),
            "num_chars": self.num_chars,
            "num_sentences": self.num_sentences,
        }

    @classmethod
    def from_dict(cls, d: dict, *, lang: str | None = None,
                  source: str | None = None) -> "ArticleText":
        text = d["text"]
        sentences = tuple(d.get("sentences") or split_sentences(text, lang or d.get("lang", "en")))
        return cls(
            title=d.get("title", ""),
            lang=d.get("lang") or lang or "en",
            source=d.get("source") or source or "other",
            text=text,
            sentences=sentences,
            num_chars=len(text),
            num_sentences=len(sentences),
        )


@dataclass(frozen=True)
class ArticlePair:
    """Aligned easy/hard versions of one concept; the dataset unit."""

    pair_id: str
    wikidata_id: str | None
    lang: str
    dataset: str
    easy: ArticleText
    hard: ArticleText

    def to_dict(self) -> dict:
        def side(a: ArticleText) -> dict:
            return {"title": a.title, "text": a.text, "sentences": list(a.sentences)}

        return {
            "pair_id": self.pair_id,
            "wikidata_id": self.wikidata_id,
            "lang": self.lang,
            "dataset": self.dataset,
            "easy": side(self.easy),
            "hard": side(self.hard),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ArticlePair":
        lang = d["lang"]
        dataset = d.get("dataset", "")
        easy_source = dataset.split("-", 1)[0] if dataset else "other"
        if easy_source not in SOURCES:
            easy_source = "other"
        return cls(
            pair_id=d["pair_id"],
            wikidata_id=d.get("wikidata_id"),
            lang=lang,
            dataset=dataset,
            easy=ArticleText.from_dict(d["easy"], lang=lang, source=easy_source),
            hard=ArticleText.from_dict(d["hard"], lang=lang, source="wikipedia"),
        )


@dataclass(frozen=True)
class ArticleTriple:
    """Three readability levels of one text, for triple ranking accuracy."""

    triple_id: str
    easy: ArticleText
    medium: ArticleText
    hard: ArticleText


@dataclass
class SideRecord:
    """One article on one side of a dataset build, plus matching metadata."""

    text: ArticleText
    wikidata_id: str | None = None
    redirects: tuple[str, ...] = ()
    namespace: int | None = None
    disambiguation: bool = False
    redirect_to: str | None = None

    def to_dict(self) -> dict:
        d = self.text.to_dict()
        if self.wikidata_id is not None:
            d["wikidata_id"] = self.wikidata_id
        if self.redirects:
            d["redirects"] = list(self.redirects)
        if self.namespace is not None:
            d["namespace"] = self.namespace
        if self.disambiguation:
            d["disambiguation"] = True
        if self.redirect_to is not None:
            d["redirect_to"] = self.redirect_to
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SideRecord":
        return cls(
            text=ArticleText.from_dict(d),
            wikidata_id=d.get("wikidata_id"),
            redirects=tuple(d.get("redirects", ())),
            namespace=d.get("namespace"),
            disambiguation=bool(d.get("disambiguation", False)),
            redirect_to=d.get("redirect_to"),
        )


@dataclass(frozen=True)
class SkipRecord:
    """Why an article was left out of a dataset build."""

    title: str
    reason: str  # ambiguous | unmatched | too_short | disambiguation

    def to_dict(self) -> dict:
        return {"title": self.title, "reason": self.reason}


def dump_json_line(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def write_jsonl(path: str | Path, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(dump_json_line(rec))
            fh.write("\n")


def read_jsonl(path: str | Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def write_pairs(path: str | Path, pairs: Iterable[ArticlePair]) -> None:
    write_jsonl(path, (p.to_dict() for p in pairs))


def read_pairs(path: str | Path) -> list[ArticlePair]:
    return [ArticlePair.from_dict(d) for d in read_jsonl(path)]


def write_articles(path: str | Path, records: Iterable[SideRecord]) -> None:
    write_jsonl(path, (r.to_dict() for r in records))


def read_articles(path: str | Path) -> list[SideRecord]:
    return [SideRecord.from_dict(d) for d in read_jsonl(path)]
