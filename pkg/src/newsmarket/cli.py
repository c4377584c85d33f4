"""Command-line interface: ``ingest``, ``indicators``, ``features``, ``evaluate``, ``synth``.

Exit codes: 0 success, 2 usage, 3 data validation, 4 runtime. Every failure
writes one line to stderr of the form ``newsmarket: error[<kind>]: <message>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import statistics
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import synth
from .config import RunConfig, apply_overrides, load_config
from .evaluation import render_table, reports_to_json
from .exceptions import DataValidationError
from .features import TextFeatures, order_documents, write_feature_matrix, write_labels
from .indicators import METHODS, IndicatorParams, compute
from .market import parse_date, read_prices_csv, write_prices_csv
from .pipeline import compare_methods
from .text import build_vocabulary, preprocess, read_corpus_jsonl, read_stopwords, write_corpus_jsonl

PROG = "newsmarket"
EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fail(kind: str, message: str) -> None:
    print(f"{PROG}: error[{kind}]: {' '.join(str(message).split())}", file=sys.stderr)


# --- argument parsing ------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", type=Path, default=default, help="key = value run configuration file")
    parser.add_argument("--seed", type=int, default=default, help="64-bit seed for synthetic data")
    parser.add_argument("--out-dir", type=Path, default=default, help="directory for output files")


def _data_flags(p: argparse.ArgumentParser, corpus: bool = True) -> None:
    p.add_argument("--prices", type=Path, help="date,close CSV")
    if corpus:
        p.add_argument("--corpus", type=Path, help="news JSON-lines file")
        p.add_argument("--stopwords", type=Path, help="stopword list, one term per line")
        p.add_argument("--min-count", type=int, help="vocabulary occurrence threshold (default 30)")
        p.add_argument("--locale", help="case-folding locale, e.g. tr")


def _indicator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, help="window length in trading days")
    p.add_argument("--short", type=int, default=12)
    p.add_argument("--long", type=int, default=26)
    p.add_argument("--signal-n", type=int, default=9)
    p.add_argument("--alpha", type=float, help="EMA decay in (0,1); default 2/(n+1)")
    p.add_argument("--K", type=float, default=2.0, help="Bollinger width multiplier")
    p.add_argument("--band", choices=("middle", "upper", "lower"), default="middle")
    p.add_argument("--period", type=int, default=5, help="periodic-average block length")
    p.add_argument("--walk-length", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)

    p = sub.add_parser("ingest", parents=[common], help="validate inputs and print corpus statistics")
    _data_flags(p)

    p = sub.add_parser("indicators", parents=[common], help="emit one indicator as date,value CSV")
    _data_flags(p, corpus=False)
    p.add_argument("--method", required=True, help=f"one of: {', '.join(METHODS)}")
    _indicator_flags(p)

    p = sub.add_parser("features", parents=[common], help="export the selected TF-IDF features and labels")
    _data_flags(p)
    p.add_argument("--method", required=True)
    p.add_argument("--top-k", type=int)
    p.add_argument("--label-lag", type=int)
    _indicator_flags(p)

    p = sub.add_parser("evaluate", parents=[common], help="cross-validated KNN report for each method")
    _data_flags(p)
    p.add_argument("--methods", help="comma-separated method list (default: the ten report rows)")
    p.add_argument("--top-k", type=int)
    p.add_argument("--knn-k", type=int)
    p.add_argument("--folds", type=int)
    p.add_argument("--label-lag", type=int)
    p.add_argument("--standard-rmse", action="store_true", help="sqrt(mean square) instead of sqrt(sum)/n")
    p.add_argument("--jobs", type=int, help="methods evaluated concurrently")

    p = sub.add_parser("synth", parents=[common], help="generate seeded prices and a planted news corpus")
    p.add_argument("--days", type=int, default=520, help="number of weekday trading dates")
    p.add_argument("--start", default="2011-01-03")
    p.add_argument("--price-model", choices=("random_walk", "smooth"), default="random_walk")
    p.add_argument("--n-docs", type=int, default=600)
    p.add_argument("--p", type=float, default=0.9, help="probability a trading-day document carries its marker")
    p.add_argument("--noise-tokens", type=int, default=6)
    p.add_argument("--noise-vocab", type=int, default=400)
    p.add_argument("--weekend-rate", type=float, default=0.1)
    return parser


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    overrides = {}
    for key in ("prices", "corpus", "stopwords", "min_count", "top_k", "knn_k", "folds",
                "label_lag", "seed", "locale", "jobs"):
        overrides[key] = getattr(args, key, None)
    if getattr(args, "methods", None):
        overrides["methods"] = [m.strip() for m in args.methods.split(",") if m.strip()]
    if getattr(args, "standard_rmse", False):
        overrides["rmse_variant"] = "standard"
    return apply_overrides(cfg, **overrides).validate()


def _indicator_params(args) -> IndicatorParams:
    return IndicatorParams(n=args.n, short=args.short, long=args.long, signal_n=args.signal_n,
                           alpha=args.alpha, K=args.K, period=args.period, L=args.walk_length,
                           band=args.band)


def _require(cfg: RunConfig, *names: str) -> None:
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise UsageError("missing required input(s): " + ", ".join("--" + n for n in missing))


def _out_dir(args) -> Optional[Path]:
    out = getattr(args, "out_dir", None)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    return out


def _load_corpus(cfg: RunConfig, strict: bool = True):
    result = read_corpus_jsonl(cfg.corpus, strict=strict)
    if not result.documents:
        raise DataValidationError(f"{cfg.corpus}: no valid documents")
    return result


# --- subcommands -----------------------------------------------------------


def cmd_ingest(args) -> int:
    cfg = _config(args)
    _require(cfg, "corpus")
    corpus = _load_corpus(cfg, strict=False)
    stop = read_stopwords(cfg.stopwords, cfg.locale)
    docs = corpus.documents
    tokenized = [preprocess(d, stop, cfg.locale) for d in docs]
    per_author: dict = {}
    for d in docs:
        per_author[d.author] = per_author.get(d.author, 0) + 1
    counts = list(per_author.values())
    tokens = [t for d in tokenized for t in d.tokens]
    summary = {
        "documents": len(docs),
        "rejected": len(corpus.rejected),
        "rejected_lines": [{"line": n, "reason": r} for n, r in corpus.rejected],
        "authors": len(per_author),
        "texts_per_author_mean": statistics.fmean(counts),
        "texts_per_author_stddev": statistics.pstdev(counts),
        "average_word_length": statistics.fmean(len(t) for t in tokens) if tokens else 0.0,
        "distinct_terms": len(set(tokens)),
        "min_count": cfg.min_count,
        "vocabulary_size": len(build_vocabulary(tokenized, cfg.min_count)),
        "first_date": min(d.date for d in docs).isoformat(),
        "last_date": max(d.date for d in docs).isoformat(),
    }
    if cfg.prices is not None:
        prices = read_prices_csv(cfg.prices)
        summary.update(trading_days=len(prices), price_first_date=prices.dates[0].isoformat(),
                       price_last_date=prices.dates[-1].isoformat())
    text = json.dumps(summary, indent=2, ensure_ascii=False) + "\n"
    out = _out_dir(args)
    if out is not None:
        (out / "ingest_summary.json").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    for n, reason in corpus.rejected:
        _warn(f"{cfg.corpus}:{n}: rejected: {reason}")
    return EXIT_OK


def _warn(message: str) -> None:
    print(f"{PROG}: warning: {message}", file=sys.stderr)


def cmd_indicators(args) -> int:
    cfg = _config(args)
    _require(cfg, "prices")
    if args.method not in METHODS:
        raise UsageError(f"unknown method {args.method!r}; valid methods: {', '.join(METHODS)}")
    series = compute(args.method, read_prices_csv(cfg.prices), _indicator_params(args))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["date", "value"])
    for d, v in series.rows():
        w.writerow([d, repr(v)])
    out = _out_dir(args)
    if out is not None:
        (out / f"{args.method}.csv").write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_features(args) -> int:
    cfg = _config(args)
    _require(cfg, "prices", "corpus")
    if args.method not in METHODS:
        raise UsageError(f"unknown method {args.method!r}; valid methods: {', '.join(METHODS)}")
    prices = read_prices_csv(cfg.prices)
    docs = _load_corpus(cfg).documents
    text = TextFeatures(docs, read_stopwords(cfg.stopwords, cfg.locale), cfg.min_count, cfg.locale)
    fm, lv = text.extract(prices, args.method, _indicator_params(args), k=cfg.top_k, label_lag=cfg.label_lag)
    out = _out_dir(args) or Path(".")
    write_feature_matrix(fm, out / f"features_{args.method}.csv")
    write_labels(lv, out / f"labels_{args.method}.csv")
    print(f"{args.method}: {len(lv)} documents, {len(fm.terms)} terms, labels {lv.distribution()}")
    if fm.shortfall:
        _warn(f"only {len(fm.terms)} terms available for top {cfg.top_k}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = _config(args)
    _require(cfg, "prices", "corpus")
    prices = read_prices_csv(cfg.prices)
    docs = _load_corpus(cfg).documents
    comparison = compare_methods(docs, prices, cfg, read_stopwords(cfg.stopwords, cfg.locale))
    out = _out_dir(args)
    reports = comparison.reports
    table = render_table(reports)
    if out is not None:
        (out / "report.json").write_text(reports_to_json(reports), encoding="utf-8")
        (out / "report.txt").write_text(table, encoding="utf-8")
        ordered = order_documents(docs)
        for res in comparison.results:
            if res.predictions is None:
                continue
            with open(out / f"predictions_{res.method}.csv", "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["doc_id", "true_label", "predicted_label"])
                for doc, t, p in zip(ordered, res.labels.labels, res.predictions):
                    w.writerow([doc.id, int(t), int(p)])
    sys.stdout.write(table)
    for res in comparison.failures:
        _fail("runtime", f"method {res.method}: {res.error}")
    return EXIT_RUNTIME if comparison.failures else EXIT_OK


def cmd_synth(args) -> int:
    cfg = _config(args)
    out = _out_dir(args) or Path(".")
    rng = np.random.default_rng(cfg.seed)
    start = parse_date(args.start)
    if args.price_model == "smooth":
        prices = synth.smooth_prices(args.days, start)
    else:
        prices = synth.random_walk_prices(rng, args.days, start)
    scfg = synth.SynthConfig(n_docs=args.n_docs, p=args.p, noise_tokens=args.noise_tokens,
                             noise_vocab=args.noise_vocab, weekend_rate=args.weekend_rate)
    docs = synth.synth_corpus(rng, prices, scfg)
    write_prices_csv(prices, out / "prices.csv")
    write_corpus_jsonl(docs, out / "corpus.jsonl")
    print(f"wrote {len(prices)} closes and {len(docs)} documents to {out}")
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "indicators": cmd_indicators,
    "features": cmd_features,
    "evaluate": cmd_evaluate,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        _fail("usage", exc)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format=f"{PROG}: %(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        _fail("usage", exc)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        _fail("usage", exc)
        return EXIT_USAGE
    except DataValidationError as exc:
        _fail("data", exc)
        return EXIT_DATA
    except ValueError as exc:
        _fail("usage", exc)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        _fail("runtime", f"{type(exc).__name__}: {exc}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
