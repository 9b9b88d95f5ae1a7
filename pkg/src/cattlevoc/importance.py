"""Leave-one-feature-out importance and its bar-chart rendering.

For every cross-validation fold the full ensemble is retrained once per
feature with that column removed; the accuracy drop it causes on the fold's
test split is the feature's raw influence. Negative drops (ablation helping)
are clipped to zero before the per-fold normalization to percentages; the
unclipped deltas are kept on the report for inspection.

Ablation retrains reuse the exact per-fold ensemble seed of cross_validate,
so each ablated model differs from the full model only by the missing
column, never by different bag draws.
"""
from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from functools import partial

import numpy as np

from .corpus import LabeledCorpus
from .pipeline._parallel import pmap
from .pipeline.ensemble import predict_batch, train_ensemble
from .pipeline.evaluate import CVConfig, TaskSpec, task_view
from .pipeline.folds import DOMAIN_FOLD_ENSEMBLE, derive_seed, stratified_folds
from .pipeline.metrics import accuracy


@dataclass(frozen=True)
class ImportanceReport:
    """Per-feature mean/std importance in percent, plus fold-level detail."""

    task: TaskSpec
    k: int
    r: int
    seed: int
    classes: tuple
    feature_names: tuple
    mean_pct: np.ndarray
    std_pct: np.ndarray
    per_fold_pct: np.ndarray
    raw_deltas: np.ndarray
    full_accuracy: np.ndarray

    def ranked(self):
        """(name, mean, std) triples, highest mean first, names break ties."""
        order = sorted(
            range(len(self.feature_names)),
            key=lambda j: (-self.mean_pct[j], self.feature_names[j]),
        )
        return [
            (self.feature_names[j], float(self.mean_pct[j]), float(self.std_pct[j]))
            for j in order
        ]


def _unit_accuracy(args, x, labels, classes, feature_names, folds, cfg):
    fold_index, feature_index = args
    test = folds == fold_index
    train = ~test
    if feature_index >= 0:
        keep = [j for j in range(x.shape[1]) if j != feature_index]
        x = x[:, keep]
        feature_names = tuple(feature_names[j] for j in keep)
    labels_arr = np.array(labels)
    model = train_ensemble(
        x[train],
        labels_arr[train],
        classes,
        feature_names,
        r=cfg.r,
        subsample_fraction=cfg.subsample_fraction,
        min_inclusion=cfg.effective_min_inclusion,
        seed=derive_seed(cfg.seed, DOMAIN_FOLD_ENSEMBLE, fold_index),
    )
    pred = predict_batch(model, x[test], feature_names)
    index_of = {c: i for i, c in enumerate(classes)}
    true_idx = [index_of[t] for t in labels_arr[test]]
    pred_idx = [index_of[p] for p in pred]
    return accuracy(true_idx, pred_idx)


def lofo_importance(corpus: LabeledCorpus, task: TaskSpec, cfg: CVConfig) -> ImportanceReport:
    view, labels, classes = task_view(corpus, task)
    folds = stratified_folds(labels, cfg.k, cfg.seed)
    m = view.m

    # feature index -1 is the full model; one flat unit list so --jobs can
    # spread ablations as well as folds
    units = [(fi, j) for fi in range(cfg.k) for j in range(-1, m)]
    worker = partial(
        _unit_accuracy,
        x=view.x,
        labels=labels,
        classes=classes,
        feature_names=view.feature_names,
        folds=folds,
        cfg=cfg,
    )
    accs = pmap(worker, units, cfg.jobs)

    per_unit = np.array(accs).reshape(cfg.k, m + 1)
    full = per_unit[:, 0]
    raw = full[:, None] - per_unit[:, 1:]

    clipped = np.maximum(raw, 0.0)
    sums = clipped.sum(axis=1)
    pct = np.full((cfg.k, m), 100.0 / m)
    nonzero = sums > 0
    pct[nonzero] = 100.0 * clipped[nonzero] / sums[nonzero, None]

    return ImportanceReport(
        task=task,
        k=cfg.k,
        r=cfg.r,
        seed=cfg.seed,
        classes=classes,
        feature_names=view.feature_names,
        mean_pct=pct.mean(axis=0),
        std_pct=pct.std(axis=0, ddof=1),
        per_fold_pct=pct,
        raw_deltas=raw,
        full_accuracy=full,
    )


def write_importance_csv(report: ImportanceReport, path) -> None:
    with open(os.fspath(path), "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("feature", "mean_pct", "std_pct"))
        for name, mean, std in zip(report.feature_names, report.mean_pct, report.std_pct):
            writer.writerow((name, format(mean, ".12g"), format(std, ".12g")))


def render_importance_chart(report: ImportanceReport) -> str:
    """Horizontal bar chart as standalone SVG markup, one bar per feature,
    sorted by mean importance descending, error bars at one standard
    deviation. Same report, same bytes."""
    rows = report.ranked()
    bar_h, gap, left, right, top = 18, 6, 150, 60, 40
    plot_w = 560
    height = top + len(rows) * (bar_h + gap) + 30
    width = left + plot_w + right
    span = max(max((m + s) for _, m, s in rows), 1e-9)

    def sx(v):
        return left + plot_w * max(v, 0.0) / span

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left}" y="20" font-size="14">'
        f"Feature importance, {report.task.target} / {report.task.subset} "
        f"(k={report.k}, r={report.r})</text>",
        f'<line x1="{left}" y1="{top}" x2="{left}" '
        f'y2="{height - 30}" stroke="black"/>',
    ]
    for i, (name, mean, std) in enumerate(rows):
        y = top + i * (bar_h + gap)
        cy = y + bar_h / 2
        parts.append(
            f'<rect class="bar" x="{left}" y="{y}" width="{sx(mean) - left:.2f}" '
            f'height="{bar_h}" fill="#4878a8"/>'
        )
        parts.append(
            f'<line class="err" x1="{sx(mean - std):.2f}" y1="{cy:.2f}" '
            f'x2="{sx(mean + std):.2f}" y2="{cy:.2f}" stroke="black" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{left - 6}" y="{cy + 4:.2f}" text-anchor="end">{name}</text>'
        )
        parts.append(
            f'<text x="{sx(mean + std) + 5:.2f}" y="{cy + 4:.2f}">{mean:.2f}%</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
