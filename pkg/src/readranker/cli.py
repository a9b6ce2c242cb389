"""Command-line entry point wiring the toolkit into reproducible pipelines.

Every artifact-producing run writes a manifest next to its primary output.
All randomness flows from one --seed flag through named substreams, so
identical inputs, flags, and seed give byte-identical primary outputs.
Exit codes: 0 ok, 2 usage, 3 data error, 4 upstream error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__, corpus, evalkit
from .classifier import FeatureClassifier, train_feature_classifier
from .errors import NotFound, RateLimited, ReadrankerError, UpstreamError
from .html_extract import extract_lead_text, redirect_target
from .ranker import ReadabilityRanker, load_any_model
from .types import (
    ArticleText,
    RawDocument,
    SideRecord,
    read_articles,
    read_jsonl,
    read_pairs,
    write_articles,
    write_jsonl,
    write_pairs,
)


def derive_seed(master: int, stream: str) -> int:
    """Named substream seed derived from the master --seed value."""
    digest = hashlib.blake2s(f"{master}:{stream}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


class Run:
    """Tracks inputs/outputs of one command for the manifest and for
    cleaning up partial outputs on failure."""

    def __init__(self, command: str, args: argparse.Namespace):
        self.command = command
        self.args = args
        self.inputs: list[str] = []
        self.outputs: list[Path] = []
        self.started = time.perf_counter()

    def input(self, path) -> Path:
        self.inputs.append(str(path))
        return Path(path)

    def output(self, path) -> Path:
        p = Path(path)
        self.outputs.append(p)
        return p

    def write_manifest(self) -> None:
        if not self.outputs:
            return
        config = {
            k: (str(v) if isinstance(v, Path) else v)
            for k, v in vars(self.args).items()
            if k != "func" and not callable(v)
        }
        manifest = {
            "command": self.command,
            "config": config,
            "seed": getattr(self.args, "seed", None),
            "inputs": self.inputs,
            "outputs": [str(p) for p in self.outputs],
            "tool_version": __version__,
            "wall_clock_s": time.perf_counter() - self.started,
        }
        path = Path(str(self.outputs[0]) + ".manifest.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, ensure_ascii=False, sort_keys=True, indent=2)
            fh.write("\n")

    def cleanup(self) -> None:
        for p in self.outputs:
            try:
                p.unlink(missing_ok=True)
            except OSError:
                pass


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------- extract

def cmd_extract(args, run: Run) -> int:
    src = run.input(args.infile)
    files = sorted(src.glob("*.html")) if src.is_dir() else [src]
    records = []
    skipped = 0
    for path in files:
        html = path.read_text(encoding="utf-8")
        title = args.title if (args.title and len(files) == 1) else path.stem.replace("_", " ")
        target = redirect_target(html)
        if target is not None:
            records.append(SideRecord(
                text=ArticleText.build("", title=title, lang=args.lang, source=args.source),
                redirect_to=target,
            ))
            continue
        doc = RawDocument(html=html, title=title, lang=args.lang, source=args.source)
        try:
            records.append(SideRecord(text=extract_lead_text(doc)))
        except ReadrankerError as exc:
            skipped += 1
            print(f"skipping {path.name}: {exc}", file=sys.stderr)
    write_articles(run.output(args.out), records)
    print(f"extracted {len(records)} article(s), skipped {skipped}")
    return 0


# ----------------------------------------------------------- build-dataset

def cmd_build_dataset(args, run: Run) -> int:
    if args.match == "txikipedia":
        source = args.infile or args.hard
        if source is None:
            raise ReadrankerError("txikipedia matching needs --in")
        records = read_articles(run.input(source))
        if args.infile and args.easy:
            records += read_articles(run.input(args.easy))
        pairs, skips = corpus.match_txikipedia(records, args.dataset)
    else:
        if not args.hard or not args.easy:
            raise ReadrankerError(f"--match {args.match} needs --hard and --easy")
        hard = read_articles(run.input(args.hard))
        easy = read_articles(run.input(args.easy))
        if args.match == "wikidata":
            pairs, skips = corpus.match_by_wikidata(hard, easy, args.dataset)
        else:
            pairs, skips = corpus.match_by_title(
                corpus.build_title_index(hard),
                corpus.build_title_index(easy),
                args.dataset,
            )
    write_pairs(run.output(args.out), pairs)
    if args.skip_report:
        write_jsonl(run.output(args.skip_report), (s.to_dict() for s in skips))
    print(f"built {len(pairs)} pair(s), skipped {len(skips)}")
    return 0


# ------------------------------------------------------------------ split

def cmd_split(args, run: Run) -> int:
    pairs = read_pairs(run.input(args.pairs))
    train, test = corpus.split_train_test(
        pairs, args.train_frac, derive_seed(args.seed, "split")
    )
    stem = Path(args.pairs)
    out_train = args.out_train or stem.with_name(stem.stem + ".train.jsonl")
    out_test = args.out_test or stem.with_name(stem.stem + ".test.jsonl")
    write_pairs(run.output(out_train), train)
    write_pairs(run.output(out_test), test)
    print(f"split {len(pairs)} pairs into {len(train)} train / {len(test)} test")
    return 0


# ------------------------------------------------------------------ train

def cmd_train(args, run: Run) -> int:
    pairs = read_pairs(run.input(args.pairs))
    seed = derive_seed(args.seed, "train")
    if args.kind == "classifier":
        model = train_feature_classifier(
            pairs,
            epochs=args.epochs,
            learning_rate=args.learning_rate,
            weight_decay=args.weight_decay,
            batch_size=args.batch_size,
            seed=seed,
        )
    else:
        model = ReadabilityRanker(
            mode=args.mode,
            hidden_units=args.hidden_units,
            epochs=args.epochs,
            learning_rate=args.learning_rate,
            weight_decay=args.weight_decay,
            margin=args.margin,
            seed=seed,
            val_fraction=args.val_fraction,
            batch_size=args.batch_size,
            sentence_threshold=args.sentence_threshold,
        ).fit(pairs)
    model.save(run.output(args.out))
    print(f"trained {args.kind} on {len(pairs)} pairs -> {args.out}")
    return 0


# ------------------------------------------------------------------- eval

def cmd_eval(args, run: Run) -> int:
    pairs = read_pairs(run.input(args.pairs))
    model = None
    if args.scorer in ("model", "lfc"):
        if not args.model:
            raise ReadrankerError(f"--scorer {args.scorer} needs --model")
        model = load_any_model(run.input(args.model))
        if args.scorer == "lfc" and not isinstance(model, FeatureClassifier):
            raise ReadrankerError("--scorer lfc needs a classifier model file")
    scorer, name = evalkit.oriented_scorer(args.scorer, model)
    report = evalkit.ranking_accuracy(
        scorer,
        pairs,
        dataset=args.dataset or Path(args.pairs).stem,
        scorer_name=name,
        resamples=args.bootstrap,
        seed=derive_seed(args.seed, "bootstrap"),
    )
    if args.out:
        _write_json(run.output(args.out), report.to_dict(include_records=not args.no_records))
    if args.summary:
        header = "dataset\tscorer\tranking_accuracy\tci_2sd\tn_pairs\tties\n"
        path = Path(args.summary)
        new = not path.exists()
        with open(path, "a", encoding="utf-8") as fh:
            if new:
                fh.write(header)
            fh.write(report.summary_row() + "\n")
    print(report.summary_row())
    return 0


# ------------------------------------------------------------------ score

def _load_articles_for_scoring(path) -> list[ArticleText]:
    return [rec.text for rec in read_articles(path)]


def cmd_score(args, run: Run) -> int:
    model = load_any_model(run.input(args.model))
    chosen = [bool(args.text), bool(args.file), bool(args.title), bool(args.articles)]
    if sum(chosen) != 1:
        raise ReadrankerError("provide exactly one of --text, --file, --title, --articles")
    if args.articles:
        texts = _load_articles_for_scoring(run.input(args.articles))
        rows = (
            {"title": t.title, "lang": t.lang, "score": float(model.score_text(t))}
            for t in texts
        )
        write_jsonl(run.output(args.out or "scores.jsonl"), rows)
        print(f"scored {len(texts)} article(s)")
        return 0
    if args.text:
        text_obj = ArticleText.build(args.text, lang=args.lang, source="other")
    elif args.file:
        raw = Path(run.input(args.file)).read_text(encoding="utf-8")
        text_obj = ArticleText.build(raw, lang=args.lang, source="other")
    else:
        from .service import ServiceConfig, WikiClient

        config = ServiceConfig.load(args.config) if args.config else ServiceConfig()
        doc = WikiClient(config).fetch_article(args.lang, args.title)
        text_obj = extract_lead_text(doc)
    payload = {
        "score": float(model.score_text(text_obj)),
        "n_sentences": text_obj.num_sentences,
        "n_chars": text_obj.num_chars,
        "lang": text_obj.lang,
        "title": text_obj.title or None,
    }
    print(json.dumps(payload, ensure_ascii=False, sort_keys=True))
    return 0


# ------------------------------------------------------------------ stats

def cmd_stats(args, run: Run) -> int:
    by_lang: dict[str, list[float]] = {}
    for rec in read_jsonl(run.input(args.scores)):
        by_lang.setdefault(rec.get("lang", ""), []).append(float(rec["score"]))
    reports = [
        evalkit.distribution_report(scores, lang).to_dict()
        for lang, scores in sorted(by_lang.items())
    ]
    _write_json(run.output(args.out), {"languages": reports})
    if args.csv:
        with open(run.output(args.csv), "w", encoding="utf-8") as fh:
            fh.write("language,n,median,p25,p75,p2_5,p97_5\n")
            for r in reports:
                fh.write(
                    f"{r['language']},{r['n']},{r['median']},{r['p25']},"
                    f"{r['p75']},{r['p2_5']},{r['p97_5']}\n"
                )
    print(f"wrote distribution report for {len(reports)} language(s)")
    return 0


# ---------------------------------------------------------------- cooccur

def cmd_cooccur(args, run: Run) -> int:
    datasets = {}
    for path in args.datasets:
        pairs = read_pairs(run.input(path))
        tag = pairs[0].dataset if pairs else Path(path).stem
        datasets[tag] = pairs
    histogram = corpus.cooccurrence_report(datasets)
    payload = {str(k): v for k, v in histogram.items()}
    if args.out:
        _write_json(run.output(args.out), payload)
    print(json.dumps(payload, sort_keys=True))
    return 0


# ------------------------------------------------------------------ serve

def cmd_serve(args, run: Run) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    config = ServiceConfig.load(args.config) if args.config else ServiceConfig()
    if args.port:
        config.port = args.port
    if args.host:
        config.host = args.host
    model = load_any_model(args.model)
    app = create_app(model, config)
    uvicorn.run(app, host=config.host, port=config.port)
    return 0


# ------------------------------------------------------------------ bench

_BENCH_WORDS = (
    "river mountain history culture music language science nature energy "
    "island climate animal forest valley bridge window garden traveler "
    "village century machine journey physics winter market mineral"
).split()


def synthetic_bench_texts(n: int, seed: int, lang: str = "en") -> list[ArticleText]:
    """Deterministic lead-section-sized texts for latency measurement."""
    import random as _random

    rng = _random.Random(seed)
    texts = []
    for i in range(n):
        sentences = []
        for _ in range(rng.randint(4, 8)):
            words = [rng.choice(_BENCH_WORDS) for _ in range(rng.randint(8, 20))]
            words[0] = words[0].capitalize()
            sentences.append(" ".join(words) + ".")
        texts.append(ArticleText.build(" ".join(sentences), title=f"bench-{i}", lang=lang))
    return texts


def cmd_bench(args, run: Run) -> int:
    from .service import bench as run_bench

    model = load_any_model(run.input(args.model))
    if args.articles:
        texts = _load_articles_for_scoring(run.input(args.articles))[: args.n]
    else:
        texts = synthetic_bench_texts(args.n, derive_seed(args.seed, "bench-texts"))
    result = run_bench(model.score_text, texts, threads=args.threads)
    print(json.dumps(result, sort_keys=True))
    return 0


# ----------------------------------------------------------------- ingest

def cmd_ingest(args, run: Run) -> int:
    mapping = None
    if args.mapping:
        with open(run.input(args.mapping), encoding="utf-8") as fh:
            mapping = json.load(fh)
    records = read_jsonl(run.input(args.infile))
    pairs, skips = corpus.ingest_records(
        records, dataset=args.dataset, lang=args.lang, mapping=mapping
    )
    write_pairs(run.output(args.out), pairs)
    if args.skip_report:
        write_jsonl(run.output(args.skip_report), (s.to_dict() for s in skips))
    print(f"ingested {len(pairs)} pair(s), skipped {len(skips)}")
    return 0


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="readranker",
        description="Multilingual readability scoring toolkit",
    )
    parser.add_argument("--version", action="version", version=f"readranker {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract lead-section plain text from HTML")
    p.add_argument("--in", dest="infile", required=True, help="HTML file or directory")
    p.add_argument("--lang", required=True)
    p.add_argument("--source", default="wikipedia",
                   choices=["wikipedia", "simplewiki", "vikidia", "klexikon",
                            "wikikids", "txikipedia", "other"])
    p.add_argument("--title", help="override title for a single input file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("build-dataset", help="match easy/hard sides into article pairs")
    p.add_argument("--hard")
    p.add_argument("--easy")
    p.add_argument("--in", dest="infile", help="single input for txikipedia matching")
    p.add_argument("--match", required=True, choices=["wikidata", "title", "txikipedia"])
    p.add_argument("--dataset", required=True, help="dataset tag, e.g. vikidia-fr")
    p.add_argument("--out", required=True)
    p.add_argument("--skip-report")
    p.set_defaults(func=cmd_build_dataset)

    p = sub.add_parser("split", help="deterministic train/test split")
    p.add_argument("--pairs", required=True)
    p.add_argument("--train-frac", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-train")
    p.add_argument("--out-test")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train a scorer on article pairs")
    p.add_argument("--pairs", required=True)
    p.add_argument("--kind", default="ranker", choices=["ranker", "classifier"])
    p.add_argument("--mode", default="document", choices=["document", "sentence"])
    p.add_argument("--hidden-units", type=int, default=None)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--learning-rate", type=float, default=1e-2)
    p.add_argument("--weight-decay", type=float, default=1e-6)
    p.add_argument("--margin", type=float, default=0.5)
    p.add_argument("--val-fraction", type=float, default=0.01)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--sentence-threshold", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="ranking-accuracy evaluation with bootstrap CI")
    p.add_argument("--pairs", required=True)
    p.add_argument("--scorer", required=True, choices=["model", "fre", "fkgl", "ns", "lfc"])
    p.add_argument("--model")
    p.add_argument("--bootstrap", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dataset")
    p.add_argument("--out")
    p.add_argument("--summary", help="append a flat TSV summary row here")
    p.add_argument("--no-records", action="store_true", help="omit per-pair records")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("score", help="score text, a file, a live article, or a batch")
    p.add_argument("--model", required=True)
    p.add_argument("--text")
    p.add_argument("--file")
    p.add_argument("--title")
    p.add_argument("--articles", help="ArticleText JSONL for batch scoring")
    p.add_argument("--lang", default="en")
    p.add_argument("--config", help="service config file for live fetches")
    p.add_argument("--out", help="output JSONL for batch scoring")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("stats", help="per-language score distribution report")
    p.add_argument("--scores", required=True, help="JSONL of {lang, score}")
    p.add_argument("--out", required=True)
    p.add_argument("--csv", help="also write a CSV percentile table")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("cooccur", help="cross-dataset article co-occurrence histogram")
    p.add_argument("--datasets", nargs="+", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cooccur)

    p = sub.add_parser("serve", help="run the HTTP scoring service")
    p.add_argument("--model", required=True)
    p.add_argument("--port", type=int)
    p.add_argument("--host")
    p.add_argument("--config")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("bench", help="latency percentiles for sequential scoring")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--articles", help="score these articles instead of synthetic text")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("ingest", help="ingest published pair records via a field mapping")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--lang")
    p.add_argument("--mapping", help="JSON field mapping (our field -> dotted source path)")
    p.add_argument("--out", required=True)
    p.add_argument("--skip-report")
    p.set_defaults(func=cmd_ingest)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    run = Run(args.command, args)
    try:
        rc = args.func(args, run)
    except (NotFound, UpstreamError, RateLimited) as exc:
        run.cleanup()
        print(json.dumps({"code": exc.code, "message": str(exc)}), file=sys.stderr)
        return 4
    except ReadrankerError as exc:
        run.cleanup()
        print(json.dumps({"code": exc.code, "message": str(exc)}), file=sys.stderr)
        return 3
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        run.cleanup()
        print(json.dumps({"code": "data_error", "message": str(exc)}), file=sys.stderr)
        return 3
    if rc == 0:
        run.write_manifest()
    return rc


if __name__ == "__main__":
    sys.exit(main())
