"""Rule-based multilingual sentence segmentation.

Deterministic scanner: a sentence ends at terminal punctuation followed by
whitespace and an uppercase (or caseless-script) letter or digit, with
guards for abbreviations and single-letter initials. Fullwidth CJK
terminals split without requiring whitespace. Newlines always force a
boundary (they mark paragraph breaks upstream).
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

TERMINALS = frozenset(".!?…")
CJK_TERMINALS = frozenset("。！？")
LANG_TERMINALS = {
    "el": frozenset(";;"),  # Greek question mark and its ASCII stand-in
    "hy": frozenset("։"),  # Armenian full stop
}
# Closing quotes/brackets that may trail the terminal inside the sentence.
_CLOSERS = frozenset("\"')»’”›]}")
# Opening quotes/brackets that may precede the first letter of a sentence.
_OPENERS = frozenset("\"'(«‘“‹[{¿¡")

_LAST_TOKEN_RE = re.compile(r"(\S+)$")


def _parse_abbreviations(raw: str) -> frozenset[str]:
    tokens = set()
    for line in raw.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            tokens.add(line.casefold().rstrip("."))
    return frozenset(tokens)


@lru_cache(maxsize=None)
def _packaged_abbreviations(lang: str) -> frozenset[str]:
    resource = resources.files("readranker").joinpath(
        "data", "abbreviations", f"{lang}.txt"
    )
    if not resource.is_file():
        return frozenset()
    return _parse_abbreviations(resource.read_text(encoding="utf-8"))


def load_abbreviations(lang: str, path: str | None = None) -> frozenset[str]:
    """Abbreviation guard list for ``lang``: one token per line, UTF-8,
    ``#`` comments. Tokens are stored casefolded without the trailing dot.
    Unknown languages get an empty list."""
    if path is None:
        return _packaged_abbreviations(lang)
    with open(path, encoding="utf-8") as fh:
        return _parse_abbreviations(fh.read())


def _terminals_for(lang: str) -> frozenset[str]:
    return TERMINALS | CJK_TERMINALS | LANG_TERMINALS.get(lang, frozenset())


def _starts_sentence(ch: str) -> bool:
    # Uppercase, caseless-script letter, or digit.
    return ch.isdigit() or (ch.isalpha() and not ch.islower())


def _guarded(segment: str, abbreviations: frozenset[str]) -> bool:
    """True when the period ending ``segment`` belongs to an abbreviation
    or a single-letter initial rather than a sentence."""
    m = _LAST_TOKEN_RE.search(segment)
    if not m:
        return False
    token = m.group(1).strip("".join(_OPENERS | _CLOSERS))
    if len(token) == 1 and token.isalpha() and token.isupper():
        return True
    return token.casefold().rstrip(".") in abbreviations


def _split_line(line: str, terminals: frozenset[str], abbreviations: frozenset[str]) -> list[str]:
    out = []
    start = 0
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch not in terminals:
            i += 1
            continue
        # Consume the whole terminal run plus trailing closers.
        j = i + 1
        while j < n and (line[j] in terminals or line[j] in _CLOSERS):
            j += 1
        if ch in CJK_TERMINALS:
            out.append(line[start:j])
            start = j
            i = j
            continue
        if j >= n or not line[j].isspace():
            i = j
            continue
        k = j
        while k < n and line[k].isspace():
            k += 1
        while k < n and line[k] in _OPENERS:
            k += 1
        if k >= n or not _starts_sentence(line[k]):
            i = j
            continue
        if ch == "." and _guarded(line[start:i], abbreviations):
            i = j
            continue
        out.append(line[start:j])
        start = j
        i = j
    if start < n:
        out.append(line[start:])
    return out


def split_sentences(
    text: str, lang: str = "en", abbreviations_path: str | None = None
) -> list[str]:
    """Segment plain text into sentences. Total and deterministic; empty or
    whitespace-only input yields an empty list."""
    if not text or not text.strip():
        return []
    abbreviations = load_abbreviations(lang, abbreviations_path)
    terminals = _terminals_for(lang)
    sentences = []
    for line in text.split("\n"):
        for raw in _split_line(line, terminals, abbreviations):
            s = raw.strip()
            if s:
                sentences.append(s)
    return sentences
