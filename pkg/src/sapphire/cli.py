"""Command-line interface.

Subcommands: split, extract, augment, build-p2t, generate, infill,
evaluate, correlate, significance, sweep, emit-training-config,
verify-manifest, pipeline.  Exit codes: 0 success, 1 validation error,
2 provider error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .augment import augment_split
from .corpus import (
    SplitSpec,
    build_splits,
    load_corpus,
    paper_split_specs,
    split_stats,
    write_corpus,
)
from .errors import ProviderError, SapphireError
from .evaluation.metrics import MetricReport
from .evaluation.stats import correlate, pitman_test, SignificanceReport
from .infill import infill_example
from .jsonl import load_texts, read_jsonl, write_jsonl
from .keyphrase import build_recombined_split, RecombinedInput
from .manifest import RunManifest, manifest_path_for, verify_manifest, write_manifest
from .pipelines import (
    corpus_report,
    decode_config,
    extraction_config,
    infill_config,
    load_config,
    provider_from_config,
    run_pipeline,
)
from .recombine import build_p2t_infer, build_p2t_train, p2t_generate
from .sweep import SweepSpec, run_sweep, write_sweep_table
from .training import emit_training_config


def _write_json(data: dict, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _manifest_for(args, outputs, inputs=(), providers=(), seeds=None) -> Path:
    manifest = RunManifest(command=sys.argv[1:] or [args.cmd], seeds=seeds or {})
    for p in inputs:
        if p:
            manifest.add_input(p)
    for p in outputs:
        manifest.add_output(p)
    manifest.providers.extend(providers)
    return write_manifest(manifest, manifest_path_for(outputs[0]))


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def cmd_split(args) -> int:
    examples = load_corpus(args.infile)
    if args.spec:
        spec_doc = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        seed = args.seed if args.seed is not None else int(spec_doc.get("seed", 13))
        dev_spec = SplitSpec("dev_CG", {int(k): v for k, v in spec_doc["dev"].items()}, seed=seed)
        test_spec = SplitSpec("test_CG", {int(k): v for k, v in spec_doc["test"].items()}, seed=seed)
    else:
        dev_spec, test_spec = paper_split_specs(seed=args.seed if args.seed is not None else 13)
    dev, test = build_splits(examples, dev_spec, test_spec)
    write_corpus(dev, args.dev_out)
    write_corpus(test, args.test_out)
    _manifest_for(args, [args.dev_out, args.test_out], inputs=[args.infile, args.spec],
                  seeds={"seed": dev_spec.seed})
    print(json.dumps({"dev_CG": split_stats(dev), "test_CG": split_stats(test)}, indent=2))
    return 0


def cmd_extract(args) -> int:
    config = load_config(args.config)
    ext_cfg = extraction_config(config, max_n=args.max_n, max_phrases=args.max_phrases)
    examples = load_corpus(args.corpus)
    texts = load_texts(args.infile)
    recombined = build_recombined_split(examples, texts, ext_cfg, origin=args.origin)
    write_jsonl((r.to_record() for r in recombined), args.out)
    _manifest_for(args, [args.out], inputs=[args.infile, args.corpus, args.config])
    return 0


def cmd_augment(args) -> int:
    config = load_config(args.config)
    examples = load_corpus(args.infile)
    embedder = provider_from_config(config, "embedder")
    extractor = provider_from_config(config, "extractor")
    attention = provider_from_config(config, "attention")
    augmented = augment_split(
        examples,
        method=args.method,
        k=args.k,
        embedder=embedder,
        extractor=extractor,
        attention=attention,
        rank=args.rank,
        exclude_stopwords=not args.include_stopwords,
        skip_errors=args.skip_errors,
    )
    write_jsonl((a.to_record() for a in augmented), args.out)
    providers = [p.identity() for p in (embedder, extractor, attention) if p is not None]
    _manifest_for(args, [args.out], inputs=[args.infile, args.config], providers=providers)
    return 0


def cmd_build_p2t(args) -> int:
    recombined = [RecombinedInput.from_record(r) for r in read_jsonl(args.recombined)]
    if args.mode == "train":
        if not args.corpus:
            raise SapphireError("--mode train needs --corpus for the reference targets")
        examples = load_corpus(args.corpus)
        records = build_p2t_train(recombined, examples, args.seed)
    else:
        records = build_p2t_infer(recombined, args.seed)
    write_jsonl((r.to_record() for r in records), args.out)
    _manifest_for(args, [args.out], inputs=[args.recombined, args.corpus],
                  seeds={"seed": args.seed})
    return 0


def cmd_generate(args) -> int:
    config = load_config(args.model_config)
    generator = provider_from_config(config, "generator")
    if generator is None:
        raise SapphireError("model config needs a providers.generator section")
    decode = decode_config(config)
    rows = list(read_jsonl(args.infile))
    from .recombine import P2TRecord

    records = []
    for row in rows:
        n_elements = row["input"].count(" <s> ") + 1
        records.append(P2TRecord(str(row["id"]), row["input"], tuple(range(n_elements)),
                                 seed=0, target=row.get("target")))
    outputs = p2t_generate(records, generator, decode)
    write_jsonl(({"id": i, "output": o} for i, o in outputs), args.out)
    _manifest_for(args, [args.out], inputs=[args.infile, args.model_config],
                  providers=[generator.identity()])
    return 0


def cmd_infill(args) -> int:
    from .providers import load_provider

    scorer = load_provider(load_config(args.scorer_config))
    infiller = load_provider(load_config(args.infiller_config))
    config = load_config(args.config)
    inf_cfg = infill_config(config, max_perms=args.max_perms, keep_top=args.keep_top,
                            enumeration_seed=args.seed,
                            postprocess=None if args.postprocess is None else args.postprocess)
    results = []
    for record in read_jsonl(args.infile):
        rec = RecombinedInput.from_record(record)
        results.append(infill_example(rec.source_example_id, rec.elements, scorer, infiller, inf_cfg))
    write_jsonl((r.to_record() for r in results), args.out)
    _manifest_for(args, [args.out],
                  inputs=[args.infile, args.scorer_config, args.infiller_config, args.config],
                  providers=[scorer.identity(), infiller.identity()],
                  seeds={"enumeration_seed": inf_cfg.enumeration_seed})
    return 0


def cmd_evaluate(args) -> int:
    config = load_config(args.config)
    if args.metrics:
        config["metrics"] = [m.strip() for m in args.metrics.split(",") if m.strip()]
    examples = load_corpus(args.corpus)
    report = corpus_report(examples, load_texts(args.gen), config)
    _write_json(report.to_dict(), args.out)
    if args.per_example_csv:
        _per_example_csv(report, args.per_example_csv)
    _manifest_for(args, [args.out], inputs=[args.gen, args.corpus, args.config])
    return 0


def _per_example_csv(report: MetricReport, path: str | Path) -> None:
    import csv

    metrics = sorted({m for row in report.per_example.values() for m in row})
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id"] + metrics)
        for ex_id in report.per_example:
            row = report.per_example[ex_id]
            writer.writerow([ex_id] + [row.get(m, "") for m in metrics])


def cmd_correlate(args) -> int:
    report = MetricReport.from_dict(json.loads(Path(args.report).read_text(encoding="utf-8")))
    examples = load_corpus(args.corpus)
    sizes = {ex.id: ex.size for ex in examples}
    corr = correlate(report.per_example, sizes, alpha=args.alpha)
    out = args.out or str(Path(args.report).with_suffix("")) + ".correlations.json"
    _write_json(corr.to_dict(), out)
    if args.figure:
        from .figures import render_correlation_figure

        render_correlation_figure(corr, args.figure)
    _manifest_for(args, [out], inputs=[args.report, args.corpus])
    return 0


def cmd_significance(args) -> int:
    config = load_config(args.config)
    metrics = [m.strip() for m in args.metric.split(",") if m.strip()]
    config["metrics"] = metrics
    examples = load_corpus(args.corpus)
    report_a = corpus_report(examples, load_texts(args.a), config)
    report_b = corpus_report(examples, load_texts(args.b), config)
    out_report = SignificanceReport()
    for metric in sorted({m for row in report_a.per_example.values() for m in row}):
        diffs = [
            report_a.per_example[ex.id][metric] - report_b.per_example[ex.id][metric]
            for ex in examples
        ]
        out_report.per_metric[metric] = pitman_test(
            diffs, cutoff=args.cutoff, mc_samples=args.mc_samples, seed=args.seed
        )
    out = args.out or "significance.json"
    _write_json(out_report.to_dict(), out)
    print(json.dumps(out_report.to_dict()["per_metric"], indent=2))
    _manifest_for(args, [out], inputs=[args.a, args.b, args.corpus], seeds={"seed": args.seed})
    return 0


def cmd_sweep(args) -> int:
    spec_doc = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    spec = SweepSpec.from_dict(spec_doc)
    config = load_config(args.config)
    cells = {}
    examples = load_corpus(args.corpus) if args.corpus else None
    for row in read_jsonl(args.cells):
        key = (row["value"], int(row["seed"]))
        if "metrics" in row:
            cells[key] = row["metrics"]
        elif "gen" in row:
            if examples is None:
                raise SapphireError("sweep cells reference generation files; pass --corpus")
            report = corpus_report(examples, load_texts(row["gen"]), config)
            cells[key] = report.aggregate
        else:
            raise SapphireError("sweep cell rows need either 'metrics' or 'gen'")
    report = run_sweep(spec, cells)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = _write_json(report.to_dict(), out_dir / "sweep_report.json")
    table_path = write_sweep_table(report, out_dir / "sweep_table.csv")
    outputs = [report_path, table_path]
    if not args.no_figures:
        from .figures import render_sweep_figures

        outputs.extend(render_sweep_figures(report, out_dir))
    _manifest_for(args, outputs, inputs=[args.spec, args.cells, args.corpus])
    print(f"winner: {report.winner} (seed-averaged {spec.selection_metric})")
    return 0


def cmd_emit_training_config(args) -> int:
    config = emit_training_config(args.profile, args.method)
    if args.out:
        _write_json(config, args.out)
        _manifest_for(args, [args.out])
    else:
        print(json.dumps(config, indent=2, sort_keys=True))
    return 0


def cmd_verify_manifest(args) -> int:
    problems = verify_manifest(args.manifest)
    if problems:
        for problem in problems:
            print(f"MISMATCH {problem}", file=sys.stderr)
        return 1
    print("manifest ok")
    return 0


def cmd_pipeline(args) -> int:
    config = load_config(args.config)
    result = run_pipeline(
        args.name,
        config,
        corpus_path=args.corpus,
        out_dir=args.out_dir,
        texts_path=args.texts,
        gen_path=args.gen,
        command=sys.argv[1:],
    )
    print(json.dumps(result, indent=2))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sapphire", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("split", help="carve dev/test splits out of a corpus")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--dev-out", required=True)
    p.add_argument("--test-out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--spec", default=None, help="JSON with per-size counts; default 120/60/60 dev, 0/180/180 test")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("extract", help="keyphrase extraction into recombined inputs")
    p.add_argument("--in", dest="infile", required=True, help="texts JSONL ({id, text|output})")
    p.add_argument("--corpus", required=True)
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--max-phrases", type=int, default=None)
    p.add_argument("--origin", choices=["reference", "baseline_generation"], default="reference")
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("augment", help="train-time concept set augmentation")
    p.add_argument("--method", choices=["kw", "att"], required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None, help="config with providers sections")
    p.add_argument("--rank", choices=["best", "worst"], default="best")
    p.add_argument("--include-stopwords", action="store_true",
                   help="allow stopword additions for att (paper-style raw ranking)")
    p.add_argument("--skip-errors", action="store_true")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("build-p2t", help="phrase-to-text dataset construction")
    p.add_argument("--mode", choices=["train", "infer"], required=True)
    p.add_argument("--recombined", required=True)
    p.add_argument("--corpus", default=None)
    p.add_argument("--seed", type=int, default=13)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_p2t)

    p = sub.add_parser("generate", help="run a sequence generator over p2t records")
    p.add_argument("--model-config", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("infill", help="perplexity-ranked mask infilling")
    p.add_argument("--in", dest="infile", required=True, help="recombined JSONL")
    p.add_argument("--scorer-config", required=True)
    p.add_argument("--infiller-config", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--max-perms", type=int, default=None)
    p.add_argument("--keep-top", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-postprocess", dest="postprocess", action="store_false", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_infill)

    p = sub.add_parser("evaluate", help="score generations against a corpus")
    p.add_argument("--gen", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--metrics", default=None, help="comma list (coverage,bleu,rouge,cider,...)")
    p.add_argument("--config", default=None)
    p.add_argument("--per-example-csv", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("correlate", help="concept-set-size correlation study")
    p.add_argument("--report", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", default=None)
    p.add_argument("--figure", default=None, help="optional PNG path")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("significance", help="paired Pitman permutation tests")
    p.add_argument("--a", required=True, help="method generations JSONL")
    p.add_argument("--b", required=True, help="baseline generations JSONL")
    p.add_argument("--metric", default="coverage", help="comma list of metrics")
    p.add_argument("--corpus", required=True)
    p.add_argument("--cutoff", type=int, default=20)
    p.add_argument("--mc-samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=13)
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_significance)

    p = sub.add_parser("sweep", help="hyperparameter sweep report, table, and figures")
    p.add_argument("--spec", required=True, help="sweep spec JSON (method, grid, seeds)")
    p.add_argument("--cells", required=True, help="JSONL of {value, seed, metrics|gen}")
    p.add_argument("--corpus", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("emit-training-config", help="hyperparameters for an external trainer")
    p.add_argument("--profile", required=True)
    p.add_argument("--method", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_emit_training_config)

    p = sub.add_parser("verify-manifest", help="recompute artifact digests")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_verify_manifest)

    p = sub.add_parser("pipeline", help="composed end-to-end pipelines")
    p.add_argument("--name", choices=["kw", "att", "p2t", "mi", "baseline-eval"], required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--corpus", required=True)
    p.add_argument("--texts", default=None)
    p.add_argument("--gen", default=None)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProviderError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return 2
    except (SapphireError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
