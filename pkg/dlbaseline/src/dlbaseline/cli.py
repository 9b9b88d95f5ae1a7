"""Command line entry point: evaluate the baseline on published folds."""

import argparse
import sys

from . import __version__
from .errors import DlBaselineError
from .training import TrainConfig, evaluate_dl, write_report

EXIT_OK = 0
EXIT_USAGE = 64


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dlbaseline",
        description="conv-GRU spectrogram baseline scored on pipeline fold assignments",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("manifest", help="CSV manifest: file,cow_id,call_type")
    parser.add_argument("folds", help="fold-assignment CSV from the pipeline evaluation")
    parser.add_argument("--task", required=True, choices=("calltype", "cowid"))
    parser.add_argument("--subset", default="all", choices=("all", "hf", "lf"),
                        help="label for the report; the fold file already is the cohort")
    parser.add_argument("--audio-root", default=None,
                        help="directory WAV paths are relative to (default: manifest directory)")
    parser.add_argument("--out", default="dl_report.json", help="report JSON path")
    parser.add_argument("--epochs", type=int, default=50)
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--seed", type=int, default=0)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    try:
        cfg = TrainConfig(batch_size=args.batch_size, max_epochs=args.epochs, seed=args.seed)
        report = evaluate_dl(
            args.manifest,
            args.folds,
            args.task,
            cfg,
            audio_root=args.audio_root,
            subset=args.subset,
            log=lambda msg: print(msg, file=sys.stderr),
        )
    except DlBaselineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    write_report(report, args.out)
    s = report["summary"]
    print(
        f"{args.task}/{args.subset} k={report['protocol']['k']}: "
        f"test accuracy {100 * s['test_accuracy_mean']:.1f}% "
        f"+/- {100 * s['test_accuracy_std']:.1f}% -> {args.out}"
    )
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
