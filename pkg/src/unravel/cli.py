"""Command-line pipeline front end.

Subcommands: synth, train, saliency, explain, baseline, eval, heatmap.
Flags override config-file values, which override defaults; a single
--seed drives every stochastic stage, so rerunning a command with equal
flags rewrites artifacts byte-identically.

Exit codes: 0 success, 1 generic error, 2 unwritable output path,
3 corrupt corpus line, 4 missing upstream artifact. Errors print one
`error: ...` line to stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import __version__
from .config import ConfigError, RunConfig, parse_config_file, resolve_config
from .corpus import CorpusFormatError, GeneratorConfig, generate_corpus, load_corpus, save_corpus
from .evaluation import ExplanationRun, fidelity, render_report, run_protocol
from .features import FeatureTableFormatError, load_feature_table, save_feature_table
from .rnn import (
    CheckpointError,
    LstmModel,
    TrainingError,
    build_vocab,
    encode_split,
    evaluate_accuracy,
    load_checkpoint,
    save_checkpoint,
    train_model,
)
from .rules import (
    InductionError,
    RuleFormatError,
    load_decision_list,
    save_decision_list,
)
from .saliency import (
    POOLING_METHODS,
    document_saliency,
    export_heatmap,
    mean_gold_accuracy,
    save_saliency,
)
from .skipgrams import save_skipgram_vocab

EXIT_ERROR = 1
EXIT_UNWRITABLE = 2
EXIT_CORRUPT_CORPUS = 3
EXIT_MISSING_ARTIFACT = 4

SPLIT_NAMES = ("train", "valid", "test")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# ------------------------------------------------------------------ plumbing
class Workspace:
    """Fixed artifact names under the output directory."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.corpus = os.path.join(out_dir, "corpus.jsonl")
        self.checkpoint = os.path.join(out_dir, "model.bin")
        self.metrics = os.path.join(out_dir, "metrics.tsv")
        self.sg_vocab = os.path.join(out_dir, "skipgrams.json")
        self.rules = os.path.join(out_dir, "rules.txt")
        self.report = os.path.join(out_dir, "report.txt")
        self.baseline_vocab = os.path.join(out_dir, "baseline.skipgrams.json")
        self.baseline_rules = os.path.join(out_dir, "baseline.rules.txt")
        self.baseline_report = os.path.join(out_dir, "baseline.report.txt")

    def features(self, split: str, kind: str = "saliency") -> str:
        prefix = "features" if kind == "saliency" else "baseline.features"
        return os.path.join(self.out_dir, f"{prefix}.{split}.tsv")

    def saliency(self, split: str, pool: str) -> str:
        return os.path.join(self.out_dir, f"saliency.{split}.{pool}.jsonl")

    def heatmap(self, doc_id: str, pool: str) -> str:
        return os.path.join(self.out_dir, f"heatmap.{doc_id}.{pool}.xhtml")


def _ensure_out_dir(path: str) -> None:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_UNWRITABLE, f"unwritable output path: {path} ({exc})")


def _writing(path: str, writer) -> None:
    """Run `writer(path)`, mapping OS failures to the unwritable exit."""
    try:
        writer(path)
    except OSError as exc:
        raise CliError(EXIT_UNWRITABLE, f"unwritable output path: {path} ({exc})")


def _require(path: str, what: str) -> str:
    if not os.path.exists(path):
        raise CliError(EXIT_MISSING_ARTIFACT, f"missing {what}: {path}")
    return path


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _load_corpus(ws: Workspace):
    return load_corpus(_require(ws.corpus, "corpus"))


def _load_model(ws: Workspace):
    return load_checkpoint(_require(ws.checkpoint, "model checkpoint"))


def _provenance(cfg: RunConfig, ws: Workspace, with_checkpoint: bool = True) -> dict:
    lines = {"seed": cfg.seed, "package_version": __version__}
    if os.path.exists(ws.corpus):
        lines["corpus_sha256"] = _sha256(ws.corpus)
    if with_checkpoint and os.path.exists(ws.checkpoint):
        lines["checkpoint_sha256"] = _sha256(ws.checkpoint)
    return lines


# ------------------------------------------------------------------ commands
def cmd_synth(args, cfg: RunConfig) -> int:
    ws = Workspace(cfg.out_dir)
    _ensure_out_dir(cfg.out_dir)
    corpus = generate_corpus(
        GeneratorConfig(
            keyword_docs=cfg.keyword_docs,
            distractor_docs=cfg.distractor_docs,
            seed=cfg.seed,
        )
    )
    _writing(ws.corpus, lambda p: save_corpus(corpus, p))
    meta = corpus.metadata
    print(f"corpus = {ws.corpus}")
    print(f"documents = {len(corpus.documents)}")
    print(f"septic_fraction = {meta['septic_fraction']:.6f}")
    print(f"label_noise = {meta['label_noise']:.6f}")
    print(
        "splits = "
        f"{meta['train_docs']}/{meta['valid_docs']}/{meta['test_docs']}"
    )
    return 0


def cmd_train(args, cfg: RunConfig) -> int:
    ws = Workspace(cfg.out_dir)
    _ensure_out_dir(cfg.out_dir)
    corpus = _load_corpus(ws)
    vocab = build_vocab(corpus)
    model = LstmModel(len(vocab), d_e=cfg.d_e, d_h=cfg.d_h, seed=cfg.seed)
    model, metrics = train_model(
        model, corpus, vocab, epochs=cfg.epochs, seed=cfg.seed, log=print
    )
    _writing(ws.checkpoint, lambda p: save_checkpoint(model, vocab, p))

    def write_metrics(path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# seed = {cfg.seed}\n")
            fh.write(f"# package_version = {__version__}\n")
            fh.write(f"# corpus_sha256 = {_sha256(ws.corpus)}\n")
            fh.write("epoch\ttrain_loss\ttrain_accuracy\tvalid_accuracy\n")
            for m in metrics:
                fh.write(
                    f"{m.epoch}\t{m.train_loss:.6f}\t"
                    f"{m.train_accuracy:.6f}\t{m.valid_accuracy:.6f}\n"
                )

    _writing(ws.metrics, write_metrics)
    test_accuracy = evaluate_accuracy(model, encode_split(corpus, vocab, "test"))
    print(f"checkpoint = {ws.checkpoint}")
    print(f"test_accuracy = {test_accuracy:.4f}")
    return 0


def cmd_saliency(args, cfg: RunConfig) -> int:
    ws = Workspace(cfg.out_dir)
    _ensure_out_dir(cfg.out_dir)
    corpus = _load_corpus(ws)
    model, vocab = _load_model(ws)
    docs = corpus.split_docs(args.split)
    if not docs:
        raise CliError(EXIT_ERROR, f"corpus has no {args.split!r} split")
    maps = [document_saliency(model, vocab, doc, cfg.pooling) for doc in docs]
    out_path = ws.saliency(args.split, cfg.pooling)
    _writing(out_path, lambda p: save_saliency(maps, p))
    print(f"saliency = {out_path}")
    if args.eval_gold:
        accuracy = mean_gold_accuracy(model, vocab, docs, cfg.pooling)
        print(f"gold_accuracy {cfg.pooling} {args.split} = {accuracy:.6f}")
    return 0


def _model_info(model: LstmModel, ws: Workspace) -> dict:
    # Reports name sibling artifacts by file name, not absolute path, so
    # identical runs in different directories stay byte-identical.
    return {
        "checkpoint": os.path.basename(ws.checkpoint),
        "d_e": model.d_e,
        "d_h": model.d_h,
        "lexicon_size": model.vocab_size,
    }


def _persist_run(run: ExplanationRun, cfg: RunConfig, ws: Workspace, model) -> None:
    if run.kind == "saliency":
        vocab_path, rules_path, report_path = ws.sg_vocab, ws.rules, ws.report
        _writing(
            vocab_path,
            lambda p: save_skipgram_vocab(run.sg_vocab, run.thresholds, p),
        )
    else:
        vocab_path = ws.baseline_vocab
        rules_path, report_path = ws.baseline_rules, ws.baseline_report

        def write_vocab(path):
            payload = {
                "keys": list(run.sg_vocab.keys),
                "doc_freq": [int(run.sg_vocab.weights[k]) for k in run.sg_vocab.keys],
            }
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2)
                fh.write("\n")

        _writing(vocab_path, write_vocab)

    for split in SPLIT_NAMES:
        _writing(
            ws.features(split, run.kind),
            lambda p, s=split: save_feature_table(run.tables[s], p),
        )
    _writing(rules_path, lambda p: save_decision_list(run.decision_list, p))

    explanation_info: dict = {"vocabulary": os.path.basename(vocab_path)}
    if run.kind == "saliency":
        explanation_info["pooling"] = cfg.pooling
        explanation_info["top_per_doc"] = cfg.top_per_doc
    explanation_info["vocab_limit"] = cfg.vocab_limit
    if run.thresholds is not None:
        explanation_info["t_neg"] = repr(float(run.thresholds.t_neg))
        explanation_info["t_pos"] = repr(float(run.thresholds.t_pos))
    explanation_info["cf"] = run.decision_list.params.cf
    explanation_info["min_instances"] = run.decision_list.params.min_instances
    explanation_info["rule_file"] = os.path.basename(rules_path)

    text = render_report(
        run.report, _model_info(model, ws), explanation_info, _provenance(cfg, ws)
    )

    def write_report(path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)

    _writing(report_path, write_report)

    print(f"rules = {rules_path}")
    print(f"report = {report_path}")
    print(f"complexity = {run.report.complexity}")
    for split in SPLIT_NAMES:
        print(f"fidelity {split} = {run.report.fidelity[split]:.6f}")


def _run_pipeline(kind: str, args, cfg: RunConfig) -> int:
    ws = Workspace(cfg.out_dir)
    _ensure_out_dir(cfg.out_dir)
    corpus = _load_corpus(ws)
    model, vocab = _load_model(ws)
    run = run_protocol(
        model,
        vocab,
        corpus,
        kind=kind,
        method=cfg.pooling,
        top_per_doc=cfg.top_per_doc,
        vocab_limit=cfg.vocab_limit,
        cf_grid=cfg.cf_grid,
        min_instances_grid=cfg.min_instances_grid,
        threads=cfg.threads,
    )
    _persist_run(run, cfg, ws, model)
    return 0


def cmd_explain(args, cfg: RunConfig) -> int:
    return _run_pipeline("saliency", args, cfg)


def cmd_baseline(args, cfg: RunConfig) -> int:
    return _run_pipeline("frequency", args, cfg)


def cmd_eval(args, cfg: RunConfig) -> int:
    ws = Workspace(cfg.out_dir)
    kind = "frequency" if args.baseline else "saliency"
    rules_path = args.rules or (
        ws.baseline_rules if args.baseline else ws.rules
    )
    features_path = args.features or ws.features(args.split, kind)
    decision_list = load_decision_list(_require(rules_path, "rule file"))
    table = load_feature_table(_require(features_path, "feature table"))
    value = fidelity(decision_list, table)
    print(f"fidelity {args.split} = {value:.6f}")
    return 0


def cmd_heatmap(args, cfg: RunConfig) -> int:
    ws = Workspace(cfg.out_dir)
    _ensure_out_dir(cfg.out_dir)
    corpus = _load_corpus(ws)
    model, vocab = _load_model(ws)
    doc = next((d for d in corpus.documents if d.id == args.doc), None)
    if doc is None:
        raise CliError(EXIT_ERROR, f"document id not found in corpus: {args.doc}")
    saliency_map = document_saliency(model, vocab, doc, cfg.pooling)
    markup = export_heatmap(saliency_map, doc)
    out_path = ws.heatmap(doc.id, cfg.pooling)

    def write_markup(path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(markup)

    _writing(out_path, write_markup)
    print(f"heatmap = {out_path}")
    return 0


# ------------------------------------------------------------------- parsing
def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", dest="out_dir", help="artifact directory")
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--seed", type=int, help="seed for all stochastic stages")
    parser.add_argument(
        "--threads", type=int, help="per-document worker threads (default 1)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unravel",
        description="Decision-list explanations for an LSTM sepsis classifier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the synthetic corpus")
    p.add_argument("--keyword-docs", dest="keyword_docs", type=int)
    p.add_argument("--distractor-docs", dest="distractor_docs", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train the classifier")
    p.add_argument("--hidden", dest="d_h", type=int, help="hidden size (50 or 100)")
    p.add_argument("--embed", dest="d_e", type=int, help="embedding size (50 or 100)")
    p.add_argument("--epochs", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("saliency", help="dump per-token importance scores")
    p.add_argument("--pool", dest="pooling", choices=POOLING_METHODS)
    p.add_argument("--split", choices=SPLIT_NAMES, default="test")
    p.add_argument(
        "--eval-gold",
        action="store_true",
        help="report mean top-k gold-term accuracy",
    )
    _add_common(p)
    p.set_defaults(func=cmd_saliency)

    p = sub.add_parser("explain", help="induce rules from saliency skipgrams")
    p.add_argument("--pool", dest="pooling", choices=POOLING_METHODS)
    p.add_argument("--top-per-doc", dest="top_per_doc", type=int)
    p.add_argument("--vocab-limit", dest="vocab_limit", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("baseline", help="induce rules from frequent skipgrams")
    p.add_argument("--vocab-limit", dest="vocab_limit", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("eval", help="score a rule file against a feature table")
    p.add_argument("--split", choices=SPLIT_NAMES, default="test")
    p.add_argument("--rules", help="rule file (default: the explain artifact)")
    p.add_argument("--features", help="feature table (default: per --split)")
    p.add_argument(
        "--baseline", action="store_true", help="default to baseline artifacts"
    )
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("heatmap", help="render one document's saliency as markup")
    p.add_argument("--doc", required=True, help="document id")
    p.add_argument("--pool", dest="pooling", choices=POOLING_METHODS)
    _add_common(p)
    p.set_defaults(func=cmd_heatmap)

    return parser


_CONFIG_FIELDS = (
    "seed",
    "keyword_docs",
    "distractor_docs",
    "d_h",
    "d_e",
    "epochs",
    "pooling",
    "top_per_doc",
    "vocab_limit",
    "out_dir",
    "threads",
)


def _resolve(args: argparse.Namespace) -> RunConfig:
    flag_values = {
        name: getattr(args, name)
        for name in _CONFIG_FIELDS
        if getattr(args, name, None) is not None
    }
    if "threads" not in flag_values and os.environ.get("UNRAVEL_THREADS"):
        try:
            flag_values["threads"] = int(os.environ["UNRAVEL_THREADS"])
        except ValueError as exc:
            raise ConfigError(
                f"bad UNRAVEL_THREADS value: {os.environ['UNRAVEL_THREADS']!r}"
            ) from exc
    file_values = {}
    if getattr(args, "config", None):
        file_values = parse_config_file(
            _require(args.config, "config file")
        )
    return resolve_config(flag_values, file_values)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve(args)
        return args.func(args, config)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except CorpusFormatError as exc:
        sys.stderr.write(f"error: corrupt corpus: {exc}\n")
        return EXIT_CORRUPT_CORPUS
    except (
        ConfigError,
        CheckpointError,
        RuleFormatError,
        FeatureTableFormatError,
        InductionError,
        TrainingError,
        ValueError,
    ) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
