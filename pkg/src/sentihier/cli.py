"""Command-line experiment driver.

Subcommands: crossval (stratified k-fold), learning-curve (bootstrap curve on
a fixed 70/30 split), train (fit once, write a checkpoint) and predict.

Every report file starts with '#'-prefixed manifest comment lines recording
the flags and seed that produced it, so any result is reproducible from the
report alone. Wall-clock timings and timestamps go to a separate
manifest.json, keeping the report files byte-identical across reruns.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime failure.
"""

import argparse
import json
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .classifiers import CLASSIFIER_NAMES, make_classifier, prepare
from .datasets import load_dataset_config, load_from_config
from .embeddings import load_word2vec_binary, load_word2vec_text
from .errors import ConfigurationError, ParseError, SentihierError
from .evaluation import cross_validate, learning_curve, report_to_csv_rows, report_to_markdown
from .model import Document, HiCnnLstmModel, ModelConfig, load_checkpoint, save_checkpoint
from .textprep import Vocabulary, build_vocab, index_document, tokenize_document
from .train import TrainConfig, fit

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_RUNTIME = 4

_MODEL_FIELDS = set(ModelConfig.__dataclass_fields__)
_TRAIN_FIELDS = set(TrainConfig.__dataclass_fields__)


def _parse_overrides(pairs):
    model_over, train_over = {}, {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ConfigurationError(f"override {pair!r} is not key=value")
        if key in _MODEL_FIELDS:
            target, anno = model_over, ModelConfig.__dataclass_fields__[key].type
        elif key in _TRAIN_FIELDS:
            target, anno = train_over, TrainConfig.__dataclass_fields__[key].type
        else:
            raise ConfigurationError(f"unknown override key {key!r}")
        target[key] = float(value) if "float" in str(anno) else int(value)
    return model_over, train_over


def _load_embeddings(spec: str):
    if spec == "random":
        return None
    path = Path(spec)
    if not path.exists():
        raise ParseError(f"embeddings file {path} does not exist")
    if path.suffix == ".bin":
        return load_word2vec_binary(path)
    return load_word2vec_text(path)


def _manifest_lines(manifest: dict):
    for key in sorted(manifest):
        yield f"# {key}: {manifest[key]}"


def _write_report(path: Path, manifest: dict, body_lines):
    with open(path, "w", encoding="utf-8") as fh:
        for line in _manifest_lines(manifest):
            fh.write(line + "\n")
        for line in body_lines:
            fh.write(line + "\n")


def _out_dir(args) -> Path:
    out = args.out or os.environ.get("SENTIHIER_OUT_DIR")
    if not out:
        raise ConfigurationError("no output directory: pass --out or set SENTIHIER_OUT_DIR")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _dataset_and_classifiers(args, classifier_specs):
    config = load_dataset_config(args.dataset)
    ds, warnings = load_from_config(config)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    table = _load_embeddings(args.embeddings)
    model_over, train_over = _parse_overrides(getattr(args, "override", None))
    num_classes = len(ds.label_set)
    mcfg = ModelConfig(**{"num_classes": num_classes, **model_over})
    tcfg = TrainConfig(**{"seed": args.seed, **train_over})
    classifiers = [make_classifier(spec, mcfg, tcfg, table, embedding_seed=args.seed)
                   for spec in classifier_specs]
    return ds, classifiers


def cmd_crossval(args) -> int:
    if args.folds < 2:
        raise ConfigurationError("folds must be >= 2")
    out = _out_dir(args)
    started = datetime.now(timezone.utc).isoformat()
    ds, (classifier,) = _dataset_and_classifiers(args, [args.classifier])
    tokenized, labels = prepare(ds)
    fit_predict = classifier.fit_predict_factory(tokenized, labels)
    t0 = time.perf_counter()
    fold_results, pooled = cross_validate(fit_predict, labels, k=args.folds,
                                          seed=args.seed, num_classes=len(ds.label_set),
                                          threads=args.threads)
    total = time.perf_counter() - t0
    manifest = {
        "command": "crossval", "dataset": ds.name, "dataset_config": str(args.dataset),
        "classifier": args.classifier, "folds": args.folds, "seed": args.seed,
        "embeddings": args.embeddings, "overrides": ",".join(args.override or []),
        "version": __version__,
    }
    names = list(ds.label_set)
    for res in fold_results:
        fold_manifest = {**manifest, "fold": res.fold}
        _write_report(out / f"fold_{res.fold}_report.csv", fold_manifest,
                      report_to_csv_rows(res.report, names))
        _write_report(out / f"fold_{res.fold}_report.md", fold_manifest,
                      [report_to_markdown(res.report, names)])
        if res.history is not None:
            _write_report(out / f"fold_{res.fold}_history.csv", fold_manifest,
                          res.history.to_csv_rows())
    _write_report(out / "pooled_report.csv", manifest, report_to_csv_rows(pooled, names))
    _write_report(out / "pooled_report.md", manifest, [report_to_markdown(pooled, names)])
    (out / "manifest.json").write_text(json.dumps({
        **manifest, "started": started, "total_seconds": total,
        "fold_train_seconds": [r.train_seconds for r in fold_results],
        "fold_test_seconds": [r.test_seconds for r in fold_results],
    }, indent=2) + "\n", encoding="utf-8")
    print(f"pooled accuracy: {pooled.accuracy:.4f} ({out})")
    return 0


def cmd_learning_curve(args) -> int:
    fractions = [float(f) for f in args.fractions.split(",")]
    if any(not 0.0 < f <= 1.0 for f in fractions):
        raise ConfigurationError(f"fractions must be in (0, 1]: {fractions}")
    out = _out_dir(args)
    started = datetime.now(timezone.utc).isoformat()
    specs = args.classifier or ["hicnnlstm"]
    ds, classifiers = _dataset_and_classifiers(args, specs)
    tokenized, labels = prepare(ds)
    manifest = {
        "command": "learning-curve", "dataset": ds.name, "dataset_config": str(args.dataset),
        "classifiers": ",".join(specs), "fractions": args.fractions, "seed": args.seed,
        "embeddings": args.embeddings, "overrides": ",".join(args.override or []),
        "version": __version__,
    }
    t0 = time.perf_counter()
    combined = ["classifier,fraction,size,accuracy"]
    all_warnings = []
    for spec, classifier in zip(specs, classifiers):
        fit_predict = classifier.fit_predict_factory(tokenized, labels)
        points, warnings = learning_curve(fit_predict, labels, fractions,
                                          seed=args.seed, num_classes=len(ds.label_set))
        all_warnings.extend(warnings)
        rows = ["fraction,size,accuracy"]
        for p in points:
            rows.append(f"{p.fraction},{p.resample_size},{p.test_accuracy!r}")
            combined.append(f"{spec},{p.fraction},{p.resample_size},{p.test_accuracy!r}")
        _write_report(out / f"curve_{spec}.csv", {**manifest, "classifier": spec}, rows)
    _write_report(out / "curve_combined.csv", manifest, combined)
    for w in all_warnings:
        print(f"warning: {w}", file=sys.stderr)
    (out / "manifest.json").write_text(json.dumps({
        **manifest, "started": started,
        "total_seconds": time.perf_counter() - t0,
        "warnings": all_warnings,
    }, indent=2) + "\n", encoding="utf-8")
    print(f"wrote learning curves for {','.join(specs)} ({out})")
    return 0


def cmd_train(args) -> int:
    ds, (classifier,) = _dataset_and_classifiers(args, ["hicnnlstm"])
    tokenized, labels = prepare(ds)
    vocab = build_vocab(tokenized)
    from .classifiers import embedding_matrix_for
    matrix = embedding_matrix_for(vocab, classifier.table,
                                  classifier.model_config.embedding_dim, args.seed)
    docs = [Document(tuple(tuple(s) for s in index_document(t, vocab)), lab)
            for t, lab in zip(tokenized, labels)]
    cfg = ModelConfig(**{**classifier.model_config.__dict__, "seed": args.seed})
    model = HiCnnLstmModel(cfg, matrix, vocab.fingerprint())
    model, history = fit(model, docs, classifier.train_config)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(model, out)
    meta = {"vocab": list(vocab.index_to_token), "labels": list(ds.label_set)}
    Path(str(out) + ".meta.json").write_text(json.dumps(meta), encoding="utf-8")
    best = history.epochs[history.best_epoch - 1]
    print(f"trained {len(docs)} docs, best epoch {history.best_epoch} "
          f"(val_loss {best.val_loss:.4f}, val_acc {best.val_accuracy:.4f}) -> {out}")
    return 0


def cmd_predict(args) -> int:
    ckpt = Path(args.model)
    if not ckpt.exists():
        raise ParseError(f"checkpoint {ckpt} does not exist")
    meta_path = Path(str(ckpt) + ".meta.json")
    if not meta_path.exists():
        raise ParseError(f"checkpoint metadata {meta_path} does not exist")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    tokens = tuple(meta["vocab"])
    vocab = Vocabulary({t: i for i, t in enumerate(tokens)}, tokens)
    model = load_checkpoint(ckpt, expected_fingerprint=vocab.fingerprint())
    label_names = meta["labels"]
    lines = (sys.stdin.read().splitlines() if args.input == "-"
             else Path(args.input).read_text(encoding="utf-8").splitlines())
    for line in lines:
        doc = Document(tuple(tuple(s) for s in
                             index_document(tokenize_document(line), vocab)))
        probs, _ = model.forward(doc, train=False)
        label = label_names[int(probs.argmax())]
        print(label + "\t" + " ".join(f"{p:.6f}" for p in probs))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sentihier",
                                     description="Hierarchical CNN-BiLSTM sentiment experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, classifier_list=False):
        p.add_argument("--dataset", required=True, help="dataset config file")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--embeddings", default="random",
                       help="word-vector file (.bin or text) or 'random'")
        p.add_argument("--override", action="append", metavar="KEY=VALUE",
                       help="model/training config override, repeatable")
        p.add_argument("--out", help="output directory (or SENTIHIER_OUT_DIR)")
        if classifier_list:
            p.add_argument("--classifier", action="append", choices=CLASSIFIER_NAMES,
                           help="repeatable; default hicnnlstm")
        else:
            p.add_argument("--classifier", default="hicnnlstm", choices=CLASSIFIER_NAMES)

    p = sub.add_parser("crossval", help="stratified k-fold cross-validation")
    common(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("learning-curve", help="bootstrap learning curve")
    common(p, classifier_list=True)
    p.add_argument("--fractions", default="0.2,0.4,0.6,0.8,1.0")
    p.set_defaults(func=cmd_learning_curve)

    p = sub.add_parser("train", help="fit on a full dataset and save a checkpoint")
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict labels for one document per line")
    p.add_argument("--model", required=True, help="checkpoint path")
    p.add_argument("--input", required=True, help="input file or - for stdin")
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SentihierError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
