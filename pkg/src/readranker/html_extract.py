"""Lead-section plain-text extraction from encyclopedic HTML.

Only paragraph text before the first section boundary is kept. Inline
formatting is flattened; reference markers, citation footnotes, and all
sub/super-script content are dropped; paragraphs inside tables and figures
(infoboxes, captions) are skipped. Works on tag soup: unclosed tags imply
closes, stray end tags are ignored.
"""

from __future__ import annotations

from html.parser import HTMLParser
from urllib.parse import unquote

from .errors import EmptyLead, MalformedInput
from .types import ArticleText, RawDocument

# Class tokens MediaWiki attaches to reference/citation markup and other
# non-body chrome. Any element carrying one of these is dropped whole.
DEFAULT_DROP_CLASSES = frozenset({
    "reference",
    "references",
    "mw-ref",
    "mw-reflink-text",
    "mw-cite-backlink",
    "mw-editsection",
    "noprint",
    "sortkey",
})

_DROP_TAGS = frozenset({"sub", "sup", "style", "script", "math"})
_SKIP_CONTAINERS = frozenset({"table", "figure", "figcaption"})
_VOID_TAGS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link",
    "meta", "param", "source", "track", "wbr",
})

# Hook for wikis whose lead ends at a different heading level than <h2>.
SOURCE_STOP_LEVELS: dict[str, frozenset[int]] = {}
_DEFAULT_STOP_LEVELS = frozenset({2})


class _LeadParser(HTMLParser):
    def __init__(self, stop_levels: frozenset[int], drop_classes: frozenset[str]):
        super().__init__(convert_charrefs=True)
        self._stop_tags = {f"h{level}" for level in stop_levels}
        self._drop_classes = drop_classes
        self._stack: list[tuple[str, bool, bool, bool]] = []  # tag, p, drop, skip
        self._p = 0
        self._drop = 0
        self._skip = 0
        self._stopped = False
        self._buf: list[str] = []
        self.paragraphs: list[str] = []

    def _flush(self) -> None:
        text = " ".join("".join(self._buf).split())
        if text:
            self.paragraphs.append(text)
        self._buf = []

    def _dropped(self, tag: str, attrs) -> bool:
        if tag in _DROP_TAGS:
            return True
        for name, value in attrs:
            if name == "class" and value:
                if self._drop_classes.intersection(value.split()):
                    return True
        return False

    def handle_starttag(self, tag, attrs):
        if self._stopped:
            return
        if tag == "section":
            section_id = dict(attrs).get("data-mw-section-id")
            if section_id is not None and section_id.strip() != "0":
                self._stopped = True
                self._flush()
                return
        if tag in self._stop_tags and self._drop == 0 and self._skip == 0:
            self._stopped = True
            self._flush()
            return
        if tag in _VOID_TAGS:
            if tag == "br" and self._collecting():
                self._buf.append(" ")
            return
        is_p = tag == "p"
        if is_p and self._p > 0:
            self._close_unmatched("p")  # an open <p> implies the previous one ended
        drop = self._dropped(tag, attrs)
        skip = tag in _SKIP_CONTAINERS
        self._stack.append((tag, is_p, drop, skip))
        self._p += is_p
        self._drop += drop
        self._skip += skip

    def handle_startendtag(self, tag, attrs):
        if tag == "br" and self._collecting():
            self._buf.append(" ")

    def _pop(self) -> None:
        tag, is_p, drop, skip = self._stack.pop()
        if is_p and self._collecting():
            self._flush()
        self._p -= is_p
        self._drop -= drop
        self._skip -= skip

    def _close_unmatched(self, tag: str) -> None:
        names = [entry[0] for entry in self._stack]
        if tag not in names:
            return
        target = len(names) - 1 - names[::-1].index(tag)
        while len(self._stack) > target:
            self._pop()

    def handle_endtag(self, tag):
        if self._stopped or tag in _VOID_TAGS:
            return
        self._close_unmatched(tag)

    def handle_data(self, data):
        if self._collecting():
            self._buf.append(data)

    def _collecting(self) -> bool:
        return not self._stopped and self._p > 0 and self._drop == 0 and self._skip == 0

    def close(self):
        super().close()
        if self._buf:
            self._flush()


def extract_lead_text(
    doc: RawDocument,
    *,
    stop_heading_levels: frozenset[int] | None = None,
    drop_classes: frozenset[str] = DEFAULT_DROP_CLASSES,
) -> ArticleText:
    """Extract the lead-section plain text of ``doc`` as an ArticleText.

    Raises MalformedInput when the input is not markup, EmptyLead when the
    lead section contains no paragraph text.
    """
    if not isinstance(doc.html, str) or not doc.html.strip():
        raise MalformedInput(f"no markup in document {doc.title!r}")
    if stop_heading_levels is None:
        stop_heading_levels = SOURCE_STOP_LEVELS.get(doc.source, _DEFAULT_STOP_LEVELS)
    parser = _LeadParser(stop_heading_levels, drop_classes)
    try:
        parser.feed(doc.html)
        parser.close()
    except Exception as exc:  # html.parser rarely raises, but stay total
        raise MalformedInput(f"unparseable markup in {doc.title!r}: {exc}") from exc
    if not parser.paragraphs:
        raise EmptyLead(f"no lead paragraph text in {doc.title!r}")
    text = "\n".join(parser.paragraphs)
    return ArticleText.build(text, title=doc.title, lang=doc.lang, source=doc.source)


class _RedirectScanner(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.target: str | None = None

    def handle_starttag(self, tag, attrs):
        if tag != "link" or self.target is not None:
            return
        d = dict(attrs)
        if d.get("rel") == "mw:PageProp/redirect" and d.get("href"):
            href = unquote(d["href"])
            if href.startswith("./"):
                href = href[2:]
            self.target = href.replace("_", " ")

    def handle_startendtag(self, tag, attrs):
        self.handle_starttag(tag, attrs)


def redirect_target(html: str) -> str | None:
    """Redirect target title if the page carries redirect metadata."""
    scanner = _RedirectScanner()
    try:
        scanner.feed(html)
        scanner.close()
    except Exception:
        return None
    return scanner.target
