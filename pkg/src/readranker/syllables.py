"""Heuristic syllable counting for alphabetic scripts.

Counts maximal vowel-group runs with language-specific vowel sets. English
gets the conditional-y and silent-e rules. Words in scripts without usable
vowel grouping fall back to ``max(1, round(chars / 3))``; the fallback is a
documented approximation, not a linguistic claim.
"""

from __future__ import annotations

_LATIN_VOWELS = frozenset("aeiouyàáâãäåæ"
                          "èéêëìíîï"
                          "òóôõöøùú"
                          "ûüýœı")
_CYRILLIC_VOWELS = frozenset("аеёиоуыэюяіїєў")
_GREEK_VOWELS = frozenset("αεηιουωάέήίόύώϊϋΐΰ")
_ARMENIAN_VOWELS = frozenset("աեէըիոօև")

VOWELS_BY_LANG = {
    "ru": _CYRILLIC_VOWELS,
    "uk": _CYRILLIC_VOWELS,
    "bg": _CYRILLIC_VOWELS,
    "el": _GREEK_VOWELS,
    "hy": _ARMENIAN_VOWELS,
}

_EN_VOWELS = frozenset("aeiou")


def _alphabetic_script(ch: str) -> bool:
    """Latin, Cyrillic, Greek, or Armenian: scripts where vowel runs work."""
    cp = ord(ch)
    return (
        cp < 0x0250  # Latin incl. extensions A/B
        or 0x0370 <= cp <= 0x03FF  # Greek
        or 0x0400 <= cp <= 0x052F  # Cyrillic incl. supplement
        or 0x0530 <= cp <= 0x058F  # Armenian
        or 0x1E00 <= cp <= 0x1FFF  # Latin/Greek extended additional
    )


def _vowel_runs(word: str, vowels: frozenset[str]) -> int:
    runs = 0
    prev = False
    for ch in word:
        cur = ch in vowels
        if cur and not prev:
            runs += 1
        prev = cur
    return runs


def _count_english(word: str) -> int:
    runs = 0
    prev = False
    for ch in word:
        cur = ch in _EN_VOWELS or (ch == "y" and not prev)
        if cur and not prev:
            runs += 1
        prev = cur
    # Silent final e, except the syllabic consonant+le ending.
    if runs > 1 and word.endswith("e"):
        if not (len(word) >= 3 and word.endswith("le") and word[-3] not in _EN_VOWELS | {"y"}):
            runs -= 1
    return max(1, runs)


def count_syllables(word: str, lang: str = "en") -> int:
    """Syllable count for a single token; always >= 1 for non-empty input."""
    letters = [ch for ch in word.casefold() if ch.isalpha()]
    if not letters:
        return 1
    if lang == "en":
        runs = _count_english("".join(letters))
        return runs
    vowels = VOWELS_BY_LANG.get(lang, _LATIN_VOWELS)
    runs = _vowel_runs("".join(letters), vowels)
    if runs > 0:
        return runs
    if any(_alphabetic_script(ch) for ch in letters):
        return 1
    return max(1, round(len(word) / 3))
