import pytest

from readranker import ArticlePair, ArticleText, DuplicateId
from readranker.corpus import (
    build_title_index,
    cooccurrence_report,
    ingest_records,
    match_by_title,
    match_by_wikidata,
    match_txikipedia,
    split_train_test,
)
from readranker.types import SideRecord


def _art(title: str, n_sentences: int = 3, lang: str = "en") -> ArticleText:
    text = " ".join(f"Sentence number {i} lives here." for i in range(n_sentences))
    return ArticleText.build(text, title=title, lang=lang)


def _rec(title: str, qid: str | None = None, n_sentences: int = 3, **kw) -> SideRecord:
    return SideRecord(text=_art(title, n_sentences), wikidata_id=qid, **kw)


# ------------------------------------------------------------ wikidata join

def test_wikidata_inner_join():
    hard = [_rec("One", "Q1"), _rec("Two", "Q2")]
    easy = [_rec("Deux", "Q2"), _rec("Trois", "Q3")]
    pairs, skips = match_by_wikidata(hard, easy, "toy")
    assert [p.wikidata_id for p in pairs] == ["Q2"]
    assert pairs[0].pair_id == "toy:Q2"
    assert sorted(s.reason for s in skips) == ["unmatched", "unmatched"]


def test_wikidata_short_side_dropped():
    hard = [_rec("One", "Q1")]
    easy = [_rec("Uno", "Q1", n_sentences=2)]
    pairs, skips = match_by_wikidata(hard, easy, "toy")
    assert pairs == []
    assert [s.reason for s in skips] == ["too_short"]


def test_wikidata_duplicate_id_conflict():
    hard = [_rec("One", "Q1"), _rec("Other", "Q1", n_sentences=4)]
    with pytest.raises(DuplicateId):
        match_by_wikidata(hard, [_rec("Uno", "Q1")], "toy")


def test_wikidata_identical_duplicate_tolerated():
    hard = [_rec("One", "Q1"), _rec("One", "Q1")]
    pairs, _ = match_by_wikidata(hard, [_rec("Uno", "Q1")], "toy")
    assert len(pairs) == 1


def test_wikidata_fixture_hand_count():
    # 10 articles, one a disambiguation page. Hand enumeration: ids on both
    # sides are {Q2, Q3, Q4}; Q5 is flagged, Q1/Q6/Q7 have no partner.
    hard = [
        _rec("H1", "Q1"),
        _rec("H2", "Q2"),
        _rec("H3", "Q3"),
        _rec("H4", "Q4"),
        _rec("H5", "Q5", disambiguation=True),
    ]
    easy = [
        _rec("E2", "Q2"),
        _rec("E3", "Q3"),
        _rec("E4", "Q4"),
        _rec("E6", "Q6"),
        _rec("E7", "Q7"),
    ]
    pairs, skips = match_by_wikidata(hard, easy, "toy")
    assert sorted(p.wikidata_id for p in pairs) == ["Q2", "Q3", "Q4"]
    reasons = sorted(s.reason for s in skips)
    assert reasons.count("disambiguation") == 1
    assert reasons.count("unmatched") == 3  # Q1 hard, Q6 + Q7 easy


# --------------------------------------------------------------- title join

def test_title_match_via_redirect():
    hard = build_title_index([_rec("Baby")])
    easy = build_title_index([_rec("Infant", redirects=("Baby",))])
    pairs, skips = match_by_title(hard, easy, "toy")
    assert len(pairs) == 1
    assert pairs[0].easy.title == "Infant"
    assert pairs[0].hard.title == "Baby"
    assert skips == []


def test_title_ambiguity_skipped():
    hard = build_title_index([_rec("Rock (geology)", redirects=("Rock",)),
                              _rec("Rock music", redirects=("Rock",))])
    easy = build_title_index([_rec("Rock")])
    pairs, skips = match_by_title(hard, easy, "toy")
    assert pairs == []
    assert [s.reason for s in skips] == ["ambiguous"]


def test_title_fixture_hand_enumeration():
    # 6 hard titles, 2 easy redirects, 1 ambiguity -> 3 pairs, 1 ambiguous,
    # 1 unmatched (hand-enumerated).
    hard = build_title_index([
        _rec("Dog"),
        _rec("Cat"),
        _rec("Horse"),
        _rec("Bird (animal)", redirects=("Bird",)),
        _rec("Bird call", redirects=("Bird",)),
        _rec("Fish"),
    ])
    easy = build_title_index([
        _rec("Dog"),
        _rec("Kitty", redirects=("Cat",)),
        _rec("Pony", redirects=("Horse",)),
        _rec("Bird"),
        _rec("Lizard"),
    ])
    pairs, skips = match_by_title(hard, easy, "toy")
    assert sorted(p.hard.title for p in pairs) == ["Cat", "Dog", "Horse"]
    reasons = sorted(s.reason for s in skips)
    assert reasons == ["ambiguous", "unmatched"]


def test_title_match_symmetric():
    hard_recs = [_rec("Alpha"), _rec("Beta", redirects=("B",)), _rec("Gamma")]
    easy_recs = [_rec("Alpha"), _rec("B"), _rec("Delta")]
    forward, _ = match_by_title(build_title_index(hard_recs),
                                build_title_index(easy_recs), "toy")
    backward, _ = match_by_title(build_title_index(easy_recs),
                                 build_title_index(hard_recs), "toy")
    fwd = {(p.easy.title, p.hard.title) for p in forward}
    bwd = {(p.hard.title, p.easy.title) for p in backward}
    assert fwd == bwd


def test_redirect_chain_flattened():
    # A -> B -> Canonical resolves in one hop after index construction.
    index = build_title_index([
        _rec("Canonical"),
        SideRecord(text=_art("B"), redirect_to="Canonical"),
        SideRecord(text=_art("A"), redirect_to="B"),
    ])
    assert index.redirect_to_canonical["a"] == "canonical"
    assert index.redirect_to_canonical["b"] == "canonical"


# --------------------------------------------------------------- txikipedia

def test_txikipedia_basic_pairing():
    records = [
        _rec("Klima", namespace=0),
        _rec("Txikipedia:Klima", namespace=104),
    ]
    pairs, skips = match_txikipedia(records, "txikipedia-eu")
    assert len(pairs) == 1
    assert pairs[0].hard.title == "Klima"
    assert pairs[0].easy.title == "Txikipedia:Klima"
    assert skips == []


def test_txikipedia_orphan_children_page():
    records = [_rec("Txikipedia:Ura", namespace=104)]
    pairs, skips = match_txikipedia(records, "txikipedia-eu")
    assert pairs == []
    assert [s.reason for s in skips] == ["unmatched"]


def test_txikipedia_mixed_fixture_hand_count():
    # 5 titles -> 2 pairs by hand: Klima and Lurra match; Ura orphan, Sua
    # main-only, short child dropped.
    records = [
        _rec("Klima", namespace=0),
        _rec("Txikipedia:Klima", namespace=104),
        _rec("Lurra", namespace=0),
        _rec("Txikipedia:Lurra", namespace=104),
        _rec("Txikipedia:Ura", namespace=104),
        _rec("Sua", namespace=0),
        _rec("Eguzkia", namespace=0),
        _rec("Txikipedia:Eguzkia", namespace=104, n_sentences=2),
    ]
    pairs, skips = match_txikipedia(records, "txikipedia-eu")
    assert sorted(p.hard.title for p in pairs) == ["Klima", "Lurra"]
    assert sorted(s.reason for s in skips) == ["too_short", "unmatched"]


# -------------------------------------------------------------------- split

def _pairs(n: int, shared: dict[int, str] | None = None) -> list[ArticlePair]:
    shared = shared or {}
    out = []
    for i in range(n):
        qid = shared.get(i, f"Q{i}")
        out.append(ArticlePair(
            pair_id=f"toy:{i}", wikidata_id=qid, lang="en", dataset="toy",
            easy=_art(f"e{i}"), hard=_art(f"h{i}"),
        ))
    return out


def test_split_sizes():
    train, test = split_train_test(_pairs(10), 0.8, seed=1)
    assert len(train) == 8 and len(test) == 2


def test_split_deterministic():
    pairs = _pairs(25)
    a = split_train_test(pairs, 0.8, seed=7)
    b = split_train_test(pairs, 0.8, seed=7)
    assert [p.pair_id for p in a[0]] == [p.pair_id for p in b[0]]
    assert [p.pair_id for p in a[1]] == [p.pair_id for p in b[1]]


def test_split_partition():
    pairs = _pairs(17)
    train, test = split_train_test(pairs, 0.6, seed=3)
    ids = sorted(p.pair_id for p in train) + sorted(p.pair_id for p in test)
    assert sorted(ids) == sorted(p.pair_id for p in pairs)
    assert not set(p.pair_id for p in train) & set(p.pair_id for p in test)


def test_split_keeps_shared_wikidata_ids_together():
    # 5 pairs where #1 and #3 share a wikidata id, fraction 0.6.
    pairs = _pairs(5, shared={1: "QSHARED", 3: "QSHARED"})
    for seed in range(20):
        train, test = split_train_test(pairs, 0.6, seed=seed)
        train_ids = {p.pair_id for p in train}
        together = {"toy:1", "toy:3"} <= train_ids or not ({"toy:1", "toy:3"} & train_ids)
        assert together


# ------------------------------------------------------------- cooccurrence

def test_cooccurrence_shared_id_counts():
    a = _pairs(3)
    b = _pairs(2)  # Q0, Q1 shared with a
    hist = cooccurrence_report({"vikidia-en": a, "klexikon-de": b})
    assert hist == {2: 2}


def test_cooccurrence_disjoint_empty():
    a = _pairs(3)
    b = _pairs(2, shared={0: "QX0", 1: "QX1"})
    assert cooccurrence_report({"a": a, "b": b}) == {}


def test_cooccurrence_three_datasets():
    a = _pairs(1, shared={0: "Q433"})
    b = _pairs(1, shared={0: "Q433"})
    c = _pairs(1, shared={0: "Q433"})
    assert cooccurrence_report({"a": a, "b": b, "c": c}) == {3: 1}


# ------------------------------------------------------------------- ingest

def test_ingest_with_default_mapping():
    records = [{
        "pair_id": "p1",
        "wikidata_id": "Q9",
        "lang": "en",
        "easy": {"title": "E", "text": "One. Two. Three."},
        "hard": {"title": "H", "text": "First. Second. Third. Fourth."},
    }]
    pairs, skips = ingest_records(records, dataset="simplewiki-en")
    assert len(pairs) == 1 and skips == []
    assert pairs[0].pair_id == "simplewiki-en:p1"
    assert pairs[0].easy.num_sentences == 3


def test_ingest_with_custom_mapping_and_filter():
    records = [
        {"id": "a", "simple_text": "One. Two. Three.", "wiki_text": "First. Second. Third."},
        {"id": "b", "simple_text": "One. Two.", "wiki_text": "First. Second. Third."},
    ]
    mapping = {
        "pair_id": "id",
        "wikidata_id": "missing",
        "easy_title": "missing",
        "easy_text": "simple_text",
        "hard_title": "missing",
        "hard_text": "wiki_text",
    }
    pairs, skips = ingest_records(records, dataset="simplewiki-en", lang="en",
                                  mapping=mapping)
    assert [p.pair_id for p in pairs] == ["simplewiki-en:a"]
    assert [s.reason for s in skips] == ["too_short"]
