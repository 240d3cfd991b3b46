"""Command line entry point: generate / filter / export / stats / sample /
eval / analyze, one subcommand per pipeline stage.

Exit codes: 0 success, 1 usage or config error, 2 data integrity error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from . import analysis, metrics
from .clozegen import ClozeConfig
from .corpus import SegmentationConfig
from .dataset import (
    IntegrityError,
    export,
    format_audit_sample,
    import_dataset,
    select_subset,
    stats,
)
from .pipeline import RunConfig, run_generate

logger = logging.getLogger("clozeforge")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INTEGRITY = 2


def _setup_logging():
    level = os.environ.get("CLOZEFORGE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr)


def _build_run_config(args) -> RunConfig:
    cfg = RunConfig.from_toml(args.config) if args.config else RunConfig()
    seg = dataclasses.asdict(cfg.segmentation)
    cz = dataclasses.asdict(cfg.cloze)
    if args.intro_fraction is not None:
        seg["intro_fraction"] = args.intro_fraction
    if args.min_overlap is not None:
        cz["min_overlap"] = args.min_overlap
    if args.placeholder is not None:
        cz["placeholder"] = args.placeholder
    if args.suffix_only:
        cz["suffix_only"] = True
    cz["allowed_kinds"] = tuple(cz["allowed_kinds"])
    return RunConfig(
        segmentation=SegmentationConfig(**seg),
        cloze=ClozeConfig(**cz),
        criterion=args.criterion if args.criterion is not None else cfg.criterion,
        top_k=args.top_k if args.top_k is not None else cfg.top_k,
        annotator=args.annotator if args.annotator is not None else cfg.annotator,
        seed=args.seed if args.seed is not None else cfg.seed,
        workers=args.workers if args.workers is not None else cfg.workers,
    )


def cmd_generate(args) -> int:
    cfg = _build_run_config(args)
    manifest, report = run_generate(args.corpus, args.out, cfg, fmt=args.format)
    print(
        f"documents={report.documents} skipped_records={report.skipped_records} "
        f"skipped_documents={report.skipped_documents} triples={report.triples}",
        file=sys.stderr,
    )
    print(f"wrote {manifest['triple_count']} triples to {args.out}")
    return EXIT_OK


def cmd_filter(args) -> int:
    triples = import_dataset(args.data)
    if any(t.scores is None for t in triples):
        print("error: dataset has unscored triples; rerun generate", file=sys.stderr)
        return EXIT_INTEGRITY
    top_k = args.top_k if args.top_k is not None else len(triples)
    subset = select_subset(triples, args.criterion, top_k)
    export(subset, args.out, {"criterion": args.criterion, "top_k": top_k, "source": str(args.data)})
    print(f"wrote {len(subset)} triples to {args.out}")
    return EXIT_OK


def cmd_export(args) -> int:
    triples = import_dataset(args.data)
    export(triples, args.out, {"source": str(args.data)})
    print(f"wrote {len(triples)} triples to {args.out}")
    return EXIT_OK


def cmd_stats(args) -> int:
    triples = import_dataset(args.data)
    report = stats(triples, sample_n=args.sample, seed=args.seed or 0)
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_sample(args) -> int:
    triples = import_dataset(args.data)
    report = stats(triples, sample_n=args.n, seed=args.seed or 0)
    text = format_audit_sample(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {len(report['samples'])} audit samples to {args.out}")
    else:
        print(text)
    return EXIT_OK


def _read_jsonl(path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(json.loads(line))
    return out


def _load_gold(path) -> dict[str, dict]:
    return {str(r["qid"]): r for r in _read_jsonl(path)}


def _load_preds(path) -> dict[str, object]:
    return {str(r["qid"]): r["pred"] for r in _read_jsonl(path)}


def cmd_eval(args) -> int:
    gold = _load_gold(args.gold)
    preds = _load_preds(args.pred)
    if not gold:
        print("error: empty gold file", file=sys.stderr)
        return EXIT_INTEGRITY
    missing = sorted(set(gold) - set(preds))
    if missing:
        print(f"error: missing predictions for qids: {missing}", file=sys.stderr)
        return EXIT_INTEGRITY
    n = len(gold)
    if args.task == "span":
        score = metrics.evaluate_spans(
            {q: str(preds[q]) for q in gold}, {q: list(gold[q]["gold"]) for q in gold}
        )
        print(f"F1 {score.f1:.4f}  EM {score.em:.4f}  n {score.n}")
    elif args.task == "factoid":
        ranked = [(list(preds[q]), list(gold[q]["gold"])) for q in sorted(gold)]
        print(f"MRR {metrics.mrr(ranked):.4f}  n {n}")
    else:
        scores = [
            metrics.list_f1(list(preds[q]["set"]), list(gold[q]["gold"]["set"]))
            for q in sorted(gold)
        ]
        print(f"List F1 {sum(scores) / n:.4f}  n {n}")
    return EXIT_OK


def _regression_table(fit: analysis.RegressionFit) -> str:
    width = max(len(n) for n in fit.feature_names)
    lines = [f"target: {fit.target}   n={fit.n}   R2={fit.r2:.4f}"]
    lines.append(f"{'feature'.ljust(width)}  {'coef':>12}  {'std_err':>12}")
    for name, b, s in zip(fit.feature_names, fit.coefficients, fit.std_errors):
        lines.append(f"{name.ljust(width)}  {b:12.6f}  {s:12.6f}")
    return "\n".join(lines)


def cmd_analyze(args) -> int:
    gold = _load_gold(args.gold)
    pred_a = {q: str(p) for q, p in _load_preds(args.pred_cloze).items()}
    pred_b = {q: str(p) for q, p in _load_preds(args.pred_sl).items()}
    qids = sorted(gold)
    missing = sorted(set(qids) - set(pred_a)) + sorted(set(qids) - set(pred_b))
    if missing:
        print(f"error: missing predictions for qids: {sorted(set(missing))}", file=sys.stderr)
        return EXIT_INTEGRITY

    passages = {}
    if args.passages:
        passages = {str(r["qid"]): r["passage"] for r in _read_jsonl(args.passages)}

    counts = None
    if args.counts:
        counts = {k: int(v) for k, v in json.loads(Path(args.counts).read_text()).items()}
    else:
        print("warning: no counts file; computing rarity from gold passages", file=sys.stderr)
        counts = analysis.build_token_counts(
            [passages.get(q, gold[q].get("passage", "")) for q in qids]
        )

    f1_a, f1_b, rows, y_a, y_b = {}, {}, [], [], []
    for q in qids:
        golds = list(gold[q]["gold"])
        passage = passages.get(q, gold[q].get("passage", ""))
        f1_a[q] = metrics.span_f1(pred_a[q], golds)
        f1_b[q] = metrics.span_f1(pred_b[q], golds)
        rows.append(analysis.extract_features(gold[q]["question"], passage, golds[0], counts))
        y_a.append(f1_a[q])
        y_b.append(f1_b[q])

    import numpy as np

    X = np.array(rows)
    fits = [
        analysis.fit_standardized(X, np.array(y_a), analysis.FEATURE_NAMES, "y_cloze"),
        analysis.fit_standardized(X, np.array(y_b), analysis.FEATURE_NAMES, "y_sl"),
        analysis.fit_standardized(
            X, np.array(y_a) - np.array(y_b), analysis.FEATURE_NAMES, "y_diff"
        ),
    ]

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    report = {
        fit.target: {
            "n": fit.n,
            "r2": fit.r2,
            "coefficients": dict(zip(fit.feature_names, fit.coefficients.tolist())),
            "std_errors": dict(zip(fit.feature_names, fit.std_errors.tolist())),
        }
        for fit in fits
    }
    (outdir / "regression.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    (outdir / "regression.txt").write_text("\n\n".join(_regression_table(f) for f in fits) + "\n")

    wh_labels = {q: analysis.wh_bucket(gold[q]["question"]) for q in qids}
    coarse_labels = {q: analysis.classify_coarse(gold[q]["question"], args.qtype_model) for q in qids}
    with open(outdir / "bucket_gains.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["axis", "bucket", "n", "mean_gain", "ci_low", "ci_high"])
        for axis, labels, buckets in (
            ("wh", wh_labels, analysis.WH_BUCKETS),
            ("coarse", coarse_labels, analysis.COARSE_LABELS),
        ):
            for g in analysis.type_gains(f1_a, f1_b, labels, buckets, seed=args.seed or 0):
                writer.writerow(
                    [
                        axis,
                        g.bucket,
                        g.n,
                        "" if g.mean_gain is None else f"{g.mean_gain:.6f}",
                        "" if g.ci_low is None else f"{g.ci_low:.6f}",
                        "" if g.ci_high is None else f"{g.ci_high:.6f}",
                    ]
                )
    print(f"wrote regression and bucket-gain reports to {outdir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clozeforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="corpus -> cloze dataset")
    gen.add_argument("corpus")
    gen.add_argument("-o", "--out", required=True)
    gen.add_argument("--format", choices=["jsonl", "plain-text-dir"], default="jsonl")
    gen.add_argument("--config", help="TOML config file; flags override it")
    gen.add_argument("--intro-fraction", type=float)
    gen.add_argument("--min-overlap", type=int)
    gen.add_argument("--placeholder")
    gen.add_argument("--suffix-only", action="store_true")
    gen.add_argument("--criterion", choices=["jaccard", "tfidf", "ans_len", "none"])
    gen.add_argument("--top-k", type=float)
    gen.add_argument("--annotator", help='"builtin" or "exec:CMD"')
    gen.add_argument("--seed", type=int)
    gen.add_argument("--workers", type=int)
    gen.set_defaults(func=cmd_generate)

    flt = sub.add_parser("filter", help="select a scored subset of a dataset")
    flt.add_argument("data")
    flt.add_argument("-o", "--out", required=True)
    flt.add_argument("--criterion", choices=["jaccard", "tfidf", "ans_len", "none"], required=True)
    flt.add_argument("--top-k", type=float)
    flt.set_defaults(func=cmd_filter)

    exp = sub.add_parser("export", help="re-export a dataset in canonical order")
    exp.add_argument("data")
    exp.add_argument("-o", "--out", required=True)
    exp.set_defaults(func=cmd_export)

    st = sub.add_parser("stats", help="dataset statistics report (JSON)")
    st.add_argument("data")
    st.add_argument("--sample", type=int, default=0)
    st.add_argument("--seed", type=int)
    st.set_defaults(func=cmd_stats)

    smp = sub.add_parser("sample", help="export a random audit sample")
    smp.add_argument("data")
    smp.add_argument("-o", "--out")
    smp.add_argument("--n", type=int, default=20)
    smp.add_argument("--seed", type=int)
    smp.set_defaults(func=cmd_sample)

    ev = sub.add_parser("eval", help="score predictions against gold")
    ev.add_argument("--pred", required=True)
    ev.add_argument("--gold", required=True)
    ev.add_argument("--task", choices=["span", "factoid", "list"], default="span")
    ev.set_defaults(func=cmd_eval)

    an = sub.add_parser("analyze", help="regression + question-type gain reports")
    an.add_argument("--pred-cloze", required=True)
    an.add_argument("--pred-sl", required=True)
    an.add_argument("--gold", required=True)
    an.add_argument("--passages", help="optional jsonl {qid, passage}")
    an.add_argument("--counts", help="optional JSON token-count file")
    an.add_argument("--qtype-model", default="rules")
    an.add_argument("--seed", type=int)
    an.add_argument("-o", "--out", required=True)
    an.set_defaults(func=cmd_analyze)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IntegrityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (FileNotFoundError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
