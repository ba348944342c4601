"""End-to-end pipeline orchestration behind the CLI.

A pipeline reads its config (one JSON document with per-module
sections), runs the composed stages, writes JSONL artifacts plus a run
manifest, and is byte-identical on rerun with the same inputs and seeds.
On a stage failure, whatever was produced goes to a ".quarantine" file
and the error propagates with the stage name and failing example id.

Environment variables may override provider endpoints only
(SAPPHIRE_ENDPOINT_<ROLE>); algorithmic parameters always come from the
config document.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Sequence

from .augment import augment_split
from .corpus import Example, load_corpus
from .errors import SapphireError
from .evaluation.metrics import MetricReport, evaluate_generations
from .infill import InfillConfig, infill_example
from .jsonl import load_texts, write_jsonl
from .keyphrase import ExtractionConfig, build_recombined_split
from .manifest import RunManifest, manifest_path_for, write_manifest
from .providers import DecodeConfig, load_provider

PIPELINES = ("kw", "att", "p2t", "mi", "baseline-eval")


def load_config(path: str | Path | None) -> dict:
    if path is None:
        return {}
    return json.loads(Path(path).read_text(encoding="utf-8"))


def provider_from_config(config: dict, role: str):
    """Instantiate the provider for a role, honoring endpoint env overrides."""
    section = dict(config.get("providers", {}).get(role) or {})
    if not section:
        return None
    env_key = f"SAPPHIRE_ENDPOINT_{role.upper()}"
    if env_key in os.environ and "endpoint" in section:
        section["endpoint"] = os.environ[env_key]
    return load_provider(section)


def extraction_config(config: dict, **overrides) -> ExtractionConfig:
    section = dict(config.get("extraction", {}))
    section.update({k: v for k, v in overrides.items() if v is not None})
    return ExtractionConfig(**section)


def infill_config(config: dict, **overrides) -> InfillConfig:
    section = dict(config.get("infill", {}))
    section.update({k: v for k, v in overrides.items() if v is not None})
    return InfillConfig(**section)


def decode_config(config: dict) -> DecodeConfig:
    return DecodeConfig(**config.get("decode", {}))


def default_texts(examples: Sequence[Example]) -> dict[str, str]:
    """Fallback keyphrase source at train time: the first reference."""
    return {ex.id: ex.references[0] for ex in examples}


def corpus_report(
    examples: Sequence[Example],
    outputs: dict[str, str],
    config: dict,
) -> MetricReport:
    missing = [ex.id for ex in examples if ex.id not in outputs]
    if missing:
        raise SapphireError(f"generations missing for ids: {missing[:5]}{'...' if len(missing) > 5 else ''}")
    ids = [ex.id for ex in examples]
    candidates = [outputs[ex.id] for ex in examples]
    references = [list(ex.references) for ex in examples]
    concepts = {ex.id: list(ex.concepts) for ex in examples}
    adapters = {}
    for role, section in (config.get("providers", {}).get("adapters") or {}).items():
        adapters[role] = load_provider(section)
    return evaluate_generations(
        ids,
        candidates,
        references,
        concepts=concepts,
        metrics=config.get("metrics", ("coverage", "bleu", "rouge", "cider")),
        adapters=adapters,
        stem_coverage=config.get("stem_coverage", True),
    )


class _Quarantine:
    """Collects pipeline records so a failure can leave a partial trail."""

    def __init__(self, out_path: Path):
        self.out_path = out_path
        self.records: list[dict] = []

    def add(self, record: dict) -> None:
        self.records.append(record)

    def flush_partial(self) -> Path:
        quarantine = Path(str(self.out_path) + ".quarantine")
        write_jsonl(self.records, quarantine)
        return quarantine

    def flush(self) -> Path:
        return write_jsonl(self.records, self.out_path)


def run_pipeline(
    name: str,
    config: dict,
    corpus_path: str | Path,
    out_dir: str | Path,
    texts_path: str | Path | None = None,
    gen_path: str | Path | None = None,
    command: list[str] | None = None,
) -> dict:
    """Run one named pipeline; returns {"outputs": [...], "manifest": path}.

    kw / att      corpus -> augmented concept sets
    p2t           corpus (+texts) -> recombined inputs + p2t records
    mi            corpus (+texts) -> recombined -> ranked infills -> report
    baseline-eval corpus + generations -> metric report
    """
    if name not in PIPELINES:
        raise SapphireError(f"unknown pipeline {name!r}; known: {', '.join(PIPELINES)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    examples = load_corpus(corpus_path)
    seed = int(config.get("seed", 13))

    manifest = RunManifest(command=command or ["pipeline", name], config=config, seeds={"seed": seed})
    manifest.add_input(corpus_path)
    if texts_path:
        manifest.add_input(texts_path)
    if gen_path:
        manifest.add_input(gen_path)
    outputs: list[Path] = []

    if name in ("kw", "att"):
        section = config.get("augment", {})
        k = int(section.get("k", 1))
        embedder = provider_from_config(config, "embedder")
        extractor = provider_from_config(config, "extractor")
        attention = provider_from_config(config, "attention")
        for provider in (embedder, extractor, attention):
            if provider is not None:
                manifest.providers.append(provider.identity())
        augmented = augment_split(
            examples,
            method=name,
            k=k,
            embedder=embedder,
            extractor=extractor,
            attention=attention,
            rank=section.get("rank", "best"),
            exclude_stopwords=section.get("exclude_stopwords", True),
            skip_errors=section.get("skip_errors", False),
        )
        out = out_dir / f"aug_{name}_k{k}.jsonl"
        write_jsonl((a.to_record() for a in augmented), out)
        outputs.append(out)

    elif name == "p2t":
        from .recombine import build_p2t_infer, build_p2t_train

        texts = load_texts(texts_path) if texts_path else default_texts(examples)
        ext_cfg = extraction_config(config)
        recombined = build_recombined_split(examples, texts, ext_cfg,
                                            origin="baseline_generation" if texts_path else "reference")
        rec_out = out_dir / "recombined.jsonl"
        write_jsonl((r.to_record() for r in recombined), rec_out)
        outputs.append(rec_out)
        mode = config.get("p2t", {}).get("mode", "train")
        records = (
            build_p2t_train(recombined, examples, seed)
            if mode == "train"
            else build_p2t_infer(recombined, seed)
        )
        p2t_out = out_dir / f"p2t_{mode}.jsonl"
        write_jsonl((r.to_record() for r in records), p2t_out)
        outputs.append(p2t_out)

    elif name == "mi":
        texts = load_texts(texts_path) if texts_path else default_texts(examples)
        ext_cfg = extraction_config(config)
        inf_cfg = infill_config(config)
        scorer = provider_from_config(config, "scorer")
        infiller = provider_from_config(config, "infiller")
        if scorer is None or infiller is None:
            raise SapphireError("mi pipeline needs 'scorer' and 'infiller' provider sections")
        manifest.providers.extend([scorer.identity(), infiller.identity()])
        recombined = build_recombined_split(examples, texts, ext_cfg,
                                            origin="baseline_generation" if texts_path else "reference")
        mi_out = out_dir / "mi.jsonl"
        sink = _Quarantine(mi_out)
        best_outputs: dict[str, str] = {}
        for rec in recombined:
            try:
                result = infill_example(rec.source_example_id, rec.elements, scorer, infiller, inf_cfg)
            except Exception as exc:
                quarantine = sink.flush_partial()
                raise SapphireError(
                    f"stage infill failed at example {rec.source_example_id!r} "
                    f"(partial output: {quarantine}): {exc}"
                ) from exc
            sink.add(result.to_record())
            best_outputs[result.example_id] = result.best.output or ""
        sink.flush()
        outputs.append(mi_out)
        report = corpus_report(examples, best_outputs, config)
        report_out = out_dir / "report.json"
        report_out.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        outputs.append(report_out)

    else:  # baseline-eval
        if gen_path is None:
            raise SapphireError("baseline-eval needs --gen generations")
        report = corpus_report(examples, load_texts(gen_path), config)
        report_out = out_dir / "report.json"
        report_out.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        outputs.append(report_out)

    for out in outputs:
        manifest.add_output(out)
    manifest_path = manifest_path_for(outputs[0])
    write_manifest(manifest, manifest_path)
    return {"outputs": [str(o) for o in outputs], "manifest": str(manifest_path)}
