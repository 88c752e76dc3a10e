"""Batch command-line front-end.

Subcommands: correct, evaluate, build-memory, homophone-set, sweep, scaling.
Every command is a pure function of its inputs, the merged configuration,
and the seed; exit codes are 0 (success), 2 (validation or configuration
error), 1 (runtime error).
"""

from __future__ import annotations

import argparse
import json
import sys

from entfix.corrector import CorrectionConfig, Utterance, correct_corpus
from entfix.evaluation import (
    PipelineSpec,
    ScoredUtterance,
    build_homophone_set,
    corrected_corpus_metrics,
    scaling_curve,
    score_corpus,
    score_utterance,
    sweep,
)
from entfix.formats import (
    ValidationError,
    corrected_record,
    read_context_vectors,
    read_nbest_jsonl,
    write_jsonl,
    write_metrics_csv,
)
from entfix.phonetics import load_lexicon
from entfix.semantic import FileContextProvider, ReferenceEncoder, load_memory, save_memory
from entfix.store import attach_description, ingest_entities

DEFAULTS = {
    "alpha": 0.6,
    "topk": 10,
    "nbest_size": 10,
    "detector": "external",
    "dim": 256,
    "seed": 0,
    "min_sim": 0.7,
    "window_slack": 1,
    "jobs": 1,
}


def read_config_file(path: str) -> dict[str, str]:
    """key=value per line; # starts a comment."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"{path} line {line_no}: expected key=value")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def merged_option(args, config_file: dict[str, str], key: str, cast):
    """Precedence: CLI flag > config file > defaults table."""
    cli_value = getattr(args, key, None)
    if cli_value is not None:
        return cli_value
    if key in config_file:
        try:
            return cast(config_file[key])
        except ValueError as exc:
            raise ValidationError(f"config {key}: {exc}") from exc
    return DEFAULTS[key]


def _bool_from_str(value: str) -> bool:
    if value.lower() in ("1", "true", "yes", "on"):
        return True
    if value.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def load_catalog(args):
    with open(args.lexicon, encoding="utf-8") as fh:
        lex = load_lexicon(fh, toneless=bool(args.toneless))
    with open(args.nelist, encoding="utf-8") as fh:
        catalog = ingest_entities(fh, lex)
    if getattr(args, "descriptions", None):
        with open(args.descriptions, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValidationError(
                        f"{args.descriptions} line {line_no}: invalid JSON") from exc
                surface = obj.get("entity")
                text = obj.get("description")
                if not isinstance(surface, str) or not isinstance(text, str):
                    raise ValidationError(
                        f"{args.descriptions} line {line_no}: need entity + description")
                if catalog.by_surface(surface) is None:
                    continue  # descriptions for unlisted entities are ignored
                attach_description(catalog, surface, text)
    return catalog


def build_run_config(args, config_file) -> CorrectionConfig:
    config = CorrectionConfig(
        alpha=float(merged_option(args, config_file, "alpha", float)),
        top_k=int(merged_option(args, config_file, "topk", int)),
        nbest_size=int(merged_option(args, config_file, "nbest_size", int)),
        detector=str(merged_option(args, config_file, "detector", str)),
        rejection=not args.no_rejection,
        raw_beam_weights=bool(args.raw_beam_weights),
        require_descriptions=bool(args.require_descriptions),
        min_sim=float(merged_option(args, config_file, "min_sim", float)),
        window_slack=int(merged_option(args, config_file, "window_slack", int)),
    )
    config.validate()
    return config


def make_scorers(args, catalog, seed: int, dim: int):
    """Entity memory plus context provider, per the embeddings source."""
    normalize = bool(args.normalize_embeddings)
    if args.memory:
        memory = load_memory(args.memory, catalog=catalog, normalize=normalize)
        if not args.context_vectors:
            raise ValidationError("--memory requires --context-vectors "
                                  "(trained context encoder output)")
        vectors = read_context_vectors(args.context_vectors, memory.dim, normalize)
        provider = FileContextProvider(vectors, memory.dim)
        return memory, provider
    encoder = ReferenceEncoder(dim=dim, seed=seed)
    return encoder.memory_for(catalog), encoder


def cmd_correct(args) -> int:
    config_file = read_config_file(args.config) if args.config else {}
    config = build_run_config(args, config_file)
    seed = int(merged_option(args, config_file, "seed", int))
    dim = int(merged_option(args, config_file, "dim", int))
    jobs = int(merged_option(args, config_file, "jobs", int))
    catalog = load_catalog(args)
    utterances = read_nbest_jsonl(args.nbest, require_ref=(config.detector == "gold"))
    memory, provider = make_scorers(args, catalog, seed, dim)
    outputs = correct_corpus(utterances, catalog, memory, provider, config, jobs=jobs)
    records = [corrected_record(utt, text, results, detail=args.detail)
               for utt, (text, results) in zip(utterances, outputs)]
    with open(args.output, "w", encoding="utf-8") as fh:
        write_jsonl(records, fh)
    return 0


def cmd_evaluate(args) -> int:
    utterances = read_nbest_jsonl(args.nbest, require_ref=True)
    hyps = {u.utt_id: u.nbest.top1 for u in utterances}
    if args.hyp:
        with open(args.hyp, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                obj = json.loads(line)
                utt_id = obj.get("utt_id")
                corrected = obj.get("corrected")
                if utt_id not in hyps or not isinstance(corrected, str):
                    raise ValidationError(f"{args.hyp} line {line_no}: "
                                          f"unknown or malformed record")
                hyps[utt_id] = corrected
    scored = [ScoredUtterance(u.utt_id, u.ref, u.ne_spans, hyps[u.utt_id])
              for u in utterances]
    report = score_corpus(scored)
    with open(args.output, "w", encoding="utf-8") as fh:
        write_metrics_csv(report, fh)
    if args.per_utt:
        records = []
        for item in scored:
            rep = score_utterance(item)
            records.append({"utt_id": item.utt_id, "cer": rep.cer,
                            "nne_cer": rep.nne_cer, "ne_cer": rep.ne_cer,
                            "ne_recall": rep.ne_recall})
        with open(args.per_utt, "w", encoding="utf-8") as fh:
            write_jsonl(records, fh)
    return 0


def cmd_build_memory(args) -> int:
    catalog = load_catalog(args)
    if args.from_vectors:
        memory = load_memory(args.from_vectors, catalog=catalog,
                             normalize=bool(args.normalize_embeddings))
    else:
        config_file = read_config_file(args.config) if args.config else {}
        seed = int(merged_option(args, config_file, "seed", int))
        dim = int(merged_option(args, config_file, "dim", int))
        memory = ReferenceEncoder(dim=dim, seed=seed).memory_for(catalog)
    save_memory(memory, args.output)
    return 0


def cmd_homophone_set(args) -> int:
    catalog = load_catalog(args)
    utterances = read_nbest_jsonl(args.nbest, require_ref=True)
    corpus = [ScoredUtterance(u.utt_id, u.ref, u.ne_spans, u.nbest.top1)
              for u in utterances]
    picked = build_homophone_set(corpus, catalog)
    with open(args.output, "w", encoding="utf-8") as fh:
        for utt in picked:
            fh.write(utt.utt_id + "\n")
    return 0


def cmd_sweep(args) -> int:
    config_file = read_config_file(args.config) if args.config else {}
    base = build_run_config(args, config_file)
    seed = int(merged_option(args, config_file, "seed", int))
    dim = int(merged_option(args, config_file, "dim", int))
    catalog = load_catalog(args)
    utterances = read_nbest_jsonl(args.nbest, require_ref=True)
    alphas = [float(v) for v in args.alphas.split(",")]
    ks = [int(v) for v in args.ks.split(",")]
    rows = sweep(utterances, catalog, alphas, ks, base, embed_dim=dim, seed=seed)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write("alpha,k,cer\n")
        for alpha, k, value in rows:
            fh.write(f"{alpha!r},{k},{value!r}\n")
    return 0


def cmd_scaling(args) -> int:
    config_file = read_config_file(args.config) if args.config else {}
    config = build_run_config(args, config_file)
    seed = int(merged_option(args, config_file, "seed", int))
    dim = int(merged_option(args, config_file, "dim", int))
    catalog = load_catalog(args)
    utterances = read_nbest_jsonl(args.nbest, require_ref=True)
    pool = []
    with open(args.pad_pool, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            obj = json.loads(line)
            if not isinstance(obj.get("entity"), str):
                raise ValidationError(f"{args.pad_pool} line {line_no}: need entity")
            pool.append((obj["entity"], obj.get("description") or ""))
    sizes = [int(v) for v in args.sizes.split(",")]
    specs = [
        PipelineSpec("phonetic_only",
                     _clone_config(config, alpha=1.0), phonetic_only=True),
        PipelineSpec("fused", config, embed_dim=dim, seed=seed),
    ]
    rows = scaling_curve(utterances, catalog, pool, sizes, specs, seed=seed)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write("size,method,ne_recall\n")
        for size, method, recall in rows:
            fh.write(f"{size},{method},{recall!r}\n")
    return 0


def _clone_config(config: CorrectionConfig, **overrides) -> CorrectionConfig:
    values = dict(
        alpha=config.alpha, top_k=config.top_k, nbest_size=config.nbest_size,
        detector=config.detector, rejection=config.rejection,
        raw_beam_weights=config.raw_beam_weights,
        require_descriptions=config.require_descriptions,
        min_sim=config.min_sim, window_slack=config.window_slack)
    values.update(overrides)
    return CorrectionConfig(**values)


def _add_common(parser, descriptions=True):
    parser.add_argument("--nelist", required=True, help="entity list, one surface per line")
    parser.add_argument("--lexicon", required=True, help="tab-separated pronunciation lexicon")
    if descriptions:
        parser.add_argument("--descriptions", help="JSONL of {entity, description}")
    parser.add_argument("--toneless", action="store_true",
                        help="strip tone digits from syllables")
    parser.add_argument("--config", help="key=value config file (CLI flags win)")


def _add_run_options(parser):
    parser.add_argument("--alpha", type=float, help="phonetic/semantic mix (default 0.6)")
    parser.add_argument("--topk", type=int, help="phonetic candidates per span (default 10)")
    parser.add_argument("--nbest-size", type=int, dest="nbest_size",
                        help="hypotheses used for rejection (default 10)")
    parser.add_argument("--detector", choices=["external", "baseline", "gold"])
    parser.add_argument("--no-rejection", action="store_true")
    parser.add_argument("--raw-beam-weights", action="store_true",
                        help="use beam scores as weights without softmax")
    parser.add_argument("--require-descriptions", action="store_true",
                        help="drop entities without descriptions from the catalog")
    parser.add_argument("--min-sim", type=float, dest="min_sim")
    parser.add_argument("--window-slack", type=int, dest="window_slack")
    parser.add_argument("--memory", help="entity embedding memory (EDAM binary)")
    parser.add_argument("--context-vectors", dest="context_vectors",
                        help="context-vector JSONL from the trainer")
    parser.add_argument("--normalize-embeddings", action="store_true",
                        dest="normalize_embeddings")
    parser.add_argument("--dim", type=int, help="reference embedder dimension")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--jobs", type=int, help="utterance-level parallelism")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entfix",
        description="Named-entity correction for ASR transcripts")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("correct", help="correct the top-1 hypothesis of each utterance")
    _add_common(p)
    _add_run_options(p)
    p.add_argument("--nbest", required=True, help="n-best JSONL input")
    p.add_argument("--output", required=True, help="corrected JSONL output")
    p.add_argument("--detail", action="store_true",
                   help="include candidate scores in the output")
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("evaluate", help="CER / entity metrics against references")
    p.add_argument("--nbest", required=True, help="n-best JSONL with ref + ne_spans")
    p.add_argument("--hyp", help="corrected JSONL; default scores the raw top-1")
    p.add_argument("--output", required=True, help="metrics CSV output")
    p.add_argument("--per-utt", dest="per_utt", help="optional per-utterance JSONL")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("build-memory", help="build or import the entity memory")
    _add_common(p)
    p.add_argument("--from-vectors", dest="from_vectors",
                   help="import a trainer-produced EDAM file instead of embedding")
    p.add_argument("--normalize-embeddings", action="store_true",
                   dest="normalize_embeddings")
    p.add_argument("--dim", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--output", required=True, help="EDAM binary output")
    p.set_defaults(func=cmd_build_memory)

    p = sub.add_parser("homophone-set", help="select phonetically confusable utterances")
    _add_common(p, descriptions=False)
    p.add_argument("--nbest", required=True)
    p.add_argument("--output", required=True, help="utterance-id list output")
    p.set_defaults(func=cmd_homophone_set)

    p = sub.add_parser("sweep", help="alpha x top-k grid, CER per cell")
    _add_common(p)
    _add_run_options(p)
    p.add_argument("--nbest", required=True)
    p.add_argument("--alphas", required=True, help="comma-separated alpha grid")
    p.add_argument("--ks", required=True, help="comma-separated top-k grid")
    p.add_argument("--output", required=True, help="alpha,k,cer CSV output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("scaling", help="NE-recall vs entity-list size")
    _add_common(p)
    _add_run_options(p)
    p.add_argument("--nbest", required=True)
    p.add_argument("--pad-pool", dest="pad_pool", required=True,
                   help="JSONL pool of padding entities {entity, description}")
    p.add_argument("--sizes", required=True, help="comma-separated catalog sizes")
    p.add_argument("--output", required=True, help="size,method,ne_recall CSV output")
    p.set_defaults(func=cmd_scaling)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ValueError) as exc:
        print(f"entfix: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"entfix: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
