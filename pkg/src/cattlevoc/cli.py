"""Command-line front end.

Subcommands: extract features from a labeled manifest of WAV files, run the
cross-validated classifiers, compute leave-one-feature-out importance,
generate synthetic fixtures, and cut a stratified 80/20 split. Every run
writes a run.json beside its outputs echoing the effective parameters, and
every output is a pure function of inputs plus the seed: rerunning a
command reproduces its files byte for byte.

stdout carries a single summary line; diagnostics go to stderr. Exit codes:
0 success, 64 usage or unreadable input, 2 extraction produced no rows,
3 the evaluation protocol cannot run on the given labels.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import __version__
from .corpus import read_features_csv, write_features_csv
from .audio import write_wav
from .errors import (
    BadKError,
    CattlevocError,
    ClassTooSmallError,
    DegenerateBagError,
    EmptyMetricsError,
    ExtractionError,
    FeatureMismatchError,
    InfeasibleCoverageError,
)
from .features import extract_corpus
from .importance import lofo_importance, render_importance_chart, write_importance_csv
from .manifest import load_manifest
from .pipeline import CVConfig, TaskSpec, cross_validate, holdout_split, task_view
from .synth import am_tone, blobs_corpus, formant_signal, sawtooth, sine, white_noise

DEFAULT_SEED = 20220711

EXIT_OK = 0
EXIT_EMPTY = 2
EXIT_PROTOCOL = 3
EXIT_USAGE = 64

_PROTOCOL_ERRORS = (
    BadKError,
    ClassTooSmallError,
    DegenerateBagError,
    EmptyMetricsError,
    FeatureMismatchError,
    InfeasibleCoverageError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _write_run_json(directory, command: str, params: dict) -> None:
    payload = {
        "command": command,
        "package": "cattlevoc",
        "version": __version__,
        "parameters": params,
    }
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "run.json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _positive(kind, name):
    def parse(text):
        try:
            value = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number") from None
        if value <= 0:
            raise argparse.ArgumentTypeError(f"{name} must be positive")
        return value

    return parse


def _add_protocol_flags(p):
    p.add_argument("--k", type=int, default=5, help="outer folds (default 5)")
    p.add_argument("--r", type=int, default=50, help="bagged instances (default 50)")
    p.add_argument("--fraction", type=float, default=0.9,
                   help="bag subsample fraction (default 0.9)")
    p.add_argument("--min-inclusion", type=int, default=None,
                   help="per-index coverage floor (default r//2)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes; results do not depend on it")
    p.add_argument("--out-dir", default=".", help="output directory")


def _protocol_config(args) -> CVConfig:
    if args.k < 2:
        raise UsageError("--k must be at least 2")
    if args.r < 1:
        raise UsageError("--r must be at least 1")
    if not 0.0 < args.fraction <= 1.0:
        raise UsageError("--fraction must be in (0, 1]")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    if args.min_inclusion is not None and args.min_inclusion < 0:
        raise UsageError("--min-inclusion must be non-negative")
    return CVConfig(
        k=args.k,
        r=args.r,
        subsample_fraction=args.fraction,
        seed=args.seed,
        min_inclusion=args.min_inclusion,
        jobs=args.jobs,
    )


def _protocol_params(args, cfg: CVConfig) -> dict:
    return {
        "features": args.features,
        "task": args.task,
        "subset": args.subset,
        "k": cfg.k,
        "r": cfg.r,
        "fraction": cfg.subsample_fraction,
        "min_inclusion": cfg.effective_min_inclusion,
        "seed": cfg.seed,
        "jobs": cfg.jobs,
        "out_dir": args.out_dir,
    }


def _write_extract_log(stem: str, failures) -> str:
    path = stem + ".log.csv"
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("source_id", "error"))
        for source_id, message in failures:
            writer.writerow((source_id, message))
    return path


def _cmd_extract(args) -> tuple:
    entries = load_manifest(args.manifest, args.audio_root, require_files=False)
    out = args.out
    stem = out[:-4] if out.endswith(".csv") else out
    try:
        result = extract_corpus(entries)
    except ExtractionError as exc:
        # Nothing survived; the per-call reasons are all the user has left.
        if exc.failures:
            log_path = _write_extract_log(stem, exc.failures)
            raise ExtractionError(f"{exc}; reasons in {log_path}") from exc
        raise

    write_features_csv(result.corpus, out)
    _write_extract_log(stem, result.failures)
    with open(stem + ".validity.csv", "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("source_id",) + result.corpus.feature_names)
        for i, sid in enumerate(result.corpus.source_ids):
            writer.writerow((sid,) + tuple(int(v) for v in result.measured[i]))

    _write_run_json(
        os.path.dirname(os.path.abspath(out)),
        "extract",
        {
            "manifest": args.manifest,
            "audio_root": args.audio_root,
            "out": args.out,
            "seed": args.seed,
        },
    )
    total = result.corpus.n + len(result.failures)
    return EXIT_OK, f"extracted {result.corpus.n} of {total} calls -> {out}"


def _cmd_evaluate(args) -> tuple:
    cfg = _protocol_config(args)
    corpus = read_features_csv(args.features)
    task = TaskSpec(target=args.task, subset=args.subset)
    report = cross_validate(corpus, task, cfg)

    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")

    view, _, _ = task_view(corpus, task)
    with open(os.path.join(out_dir, "folds.csv"), "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("source_id", "cow_id", "call_type", "fold"))
        for i, sid in enumerate(view.source_ids):
            writer.writerow(
                (sid, view.cow_ids[i], view.call_types[i], int(report.fold_assignment[i]))
            )

    for fold in report.to_dict()["folds"]:
        path = os.path.join(out_dir, f"confusion_fold{fold['index']}.csv")
        with open(path, "w", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("true_label",) + tuple(report.classes))
            for cls, row in zip(report.classes, fold["confusion"]):
                writer.writerow((cls,) + tuple(int(v) for v in row))

    _write_run_json(out_dir, "evaluate", _protocol_params(args, cfg))
    mean, std = report.test_accuracy
    return EXIT_OK, (
        f"{task.target}/{task.subset} k={cfg.k} r={cfg.r}: "
        f"test accuracy {100 * mean:.1f}% +/- {100 * std:.1f}%"
    )


def _cmd_importance(args) -> tuple:
    cfg = _protocol_config(args)
    corpus = read_features_csv(args.features)
    task = TaskSpec(target=args.task, subset=args.subset)
    report = lofo_importance(corpus, task, cfg)

    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)
    write_importance_csv(report, os.path.join(out_dir, "importance.csv"))
    with open(os.path.join(out_dir, "importance.svg"), "w") as fh:
        fh.write(render_importance_chart(report))
        fh.write("\n")

    _write_run_json(out_dir, "importance", _protocol_params(args, cfg))
    top_name, top_mean, _ = report.ranked()[0]
    return EXIT_OK, (
        f"top feature {top_name} ({top_mean:.2f}%) for {task.target}/{task.subset}"
    )


def _parse_float_list(text, name):
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"--{name} must be comma-separated numbers") from None
    if not values:
        raise UsageError(f"--{name} must list at least one number")
    return values


def _cmd_synth(args) -> tuple:
    kind = args.kind
    out = args.out
    sidecar = None
    if kind == "blobs-corpus":
        if out is None:
            out = "blobs.csv"
        if args.classes < 2 or args.per_class < 1:
            raise UsageError("--classes must be >= 2 and --per-class >= 1")
        try:
            corpus = blobs_corpus(args.classes, args.per_class, seed=args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        write_features_csv(corpus, out)
        summary = f"wrote {out} ({corpus.n} rows)"
    else:
        if out is None:
            out = f"{kind}.wav"
        if kind == "sine":
            clip = sine(args.freq, args.dur, args.sr)
        elif kind == "sawtooth":
            clip = sawtooth(args.freq, args.dur, args.sr)
        elif kind == "am-tone":
            clip = am_tone(args.freq, args.rate, args.depth_db, args.dur, args.sr)
        elif kind == "noise":
            clip = white_noise(args.dur, args.sr, seed=args.seed)
        else:
            centers = _parse_float_list(args.f, "f")
            bandwidths = _parse_float_list(args.bw, "bw") if args.bw else None
            f0 = None if args.source == "noise" else args.f0
            try:
                clip, truth = formant_signal(
                    centers, args.dur, args.sr,
                    bandwidths_hz=bandwidths, f0_hz=f0, seed=args.seed,
                )
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            sidecar = os.path.splitext(out)[0] + ".json"
            with open(sidecar, "w") as fh:
                json.dump(truth, fh, indent=2, sort_keys=True)
                fh.write("\n")
        write_wav(out, clip.samples, clip.sample_rate_hz)
        summary = f"wrote {out}" + (f" (+ {sidecar})" if sidecar else "")

    params = {
        "kind": kind,
        "out": out,
        "seed": args.seed,
        "sr": args.sr,
        "dur": args.dur,
        "freq": args.freq,
        "rate": args.rate,
        "depth_db": args.depth_db,
        "f": args.f,
        "bw": args.bw,
        "f0": args.f0,
        "source": args.source,
        "classes": args.classes,
        "per_class": args.per_class,
    }
    _write_run_json(os.path.dirname(os.path.abspath(out)), "synth", params)
    return EXIT_OK, summary


def _cmd_split(args) -> tuple:
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    corpus = read_features_csv(args.features)
    task = TaskSpec(target=args.task, subset="all")
    view, labels, _ = task_view(corpus, task)
    train_idx, test_idx = holdout_split(labels, args.seed)

    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)
    write_features_csv(view.subset(train_idx), os.path.join(out_dir, "train.csv"))
    write_features_csv(view.subset(test_idx), os.path.join(out_dir, "test.csv"))
    _write_run_json(
        out_dir,
        "split",
        {
            "features": args.features,
            "task": args.task,
            "seed": args.seed,
            "out_dir": out_dir,
        },
    )
    return EXIT_OK, (
        f"split {view.n} rows -> {len(train_idx)} train / {len(test_idx)} test"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cattlevoc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", help="extract features from a WAV manifest")
    p.add_argument("manifest", help="CSV manifest: file,cow_id,call_type")
    p.add_argument("--audio-root", default=None,
                   help="directory WAV paths resolve against")
    p.add_argument("--out", default="features.csv", help="features CSV path")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("evaluate", help="cross-validated classification")
    p.add_argument("features", help="features CSV from extract")
    p.add_argument("--task", required=True, choices=("calltype", "cowid"))
    p.add_argument("--subset", default="all", choices=("all", "hf", "lf"))
    _add_protocol_flags(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("importance", help="leave-one-feature-out importance")
    p.add_argument("features", help="features CSV from extract")
    p.add_argument("--task", required=True, choices=("calltype", "cowid"))
    p.add_argument("--subset", default="all", choices=("all", "hf", "lf"))
    _add_protocol_flags(p)
    p.set_defaults(func=_cmd_importance)

    p = sub.add_parser("synth", help="generate synthetic fixtures")
    p.add_argument("kind", choices=(
        "sine", "sawtooth", "am-tone", "formant", "noise", "blobs-corpus"))
    p.add_argument("--out", default=None,
                   help="output path (default <kind>.wav or blobs.csv)")
    p.add_argument("--freq", type=_positive(float, "--freq"), default=440.0,
                   help="tone or carrier frequency in Hz")
    p.add_argument("--dur", type=_positive(float, "--dur"), default=1.0,
                   help="duration in seconds")
    p.add_argument("--sr", type=_positive(int, "--sr"), default=44100,
                   help="sample rate in Hz")
    p.add_argument("--rate", type=_positive(float, "--rate"), default=5.0,
                   help="am-tone: modulation rate in Hz")
    p.add_argument("--depth-db", type=_positive(float, "--depth-db"), default=6.0,
                   help="am-tone: peak-to-trough depth in dB")
    p.add_argument("--f", default="800,1600",
                   help="formant: comma-separated resonance centers in Hz")
    p.add_argument("--bw", default=None,
                   help="formant: comma-separated bandwidths in Hz")
    p.add_argument("--f0", type=_positive(float, "--f0"), default=150.0,
                   help="formant: pulse-train fundamental in Hz")
    p.add_argument("--source", default="pulse", choices=("pulse", "noise"),
                   help="formant: excitation type")
    p.add_argument("--classes", type=int, default=2, help="blobs-corpus classes")
    p.add_argument("--per-class", type=int, default=50,
                   help="blobs-corpus rows per class")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("split", help="stratified 80/20 holdout split")
    p.add_argument("features", help="features CSV from extract")
    p.add_argument("--task", default="calltype", choices=("calltype", "cowid"),
                   help="labels to stratify on")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", default=".", help="output directory")
    p.set_defaults(func=_cmd_split)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        code, summary = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExtractionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except _PROTOCOL_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except (CattlevocError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(summary)
    return code


if __name__ == "__main__":
    sys.exit(main())
