"""Imbalanced binary-classification metrics: PR curve, AUPRC, thresholded P/R/F1.

AUPRC is average precision with step interpolation, AP = sum over descending
score thresholds of (R_n - R_{n-1}) * P_n. Tied scores form a single
threshold group so the result cannot depend on sample order. This differs
from trapezoidal interpolation, typically by < 0.01 at realistic sizes.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, UndefinedMetricError


@dataclass
class MetricsReport:
    auprc: float
    precision: float
    recall: float
    f1: float
    threshold: float
    pr_points: list  # (recall, precision) pairs, recall non-decreasing
    positives: int
    negatives: int


def _validate(scores, labels):
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    y = np.asarray(labels).reshape(-1)
    if s.shape != y.shape:
        raise ShapeError(f"{s.shape[0]} scores vs {y.shape[0]} labels")
    y = y.astype(np.int64)
    return s, y


def pr_curve(scores, labels):
    """One (recall, precision) point per distinct score threshold, descending."""
    s, y = _validate(scores, labels)
    n_pos = int(y.sum())
    if n_pos == 0:
        raise UndefinedMetricError("PR curve undefined without positive labels")
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    y_sorted = y[order]
    tp = np.cumsum(y_sorted)
    pred_pos = np.arange(1, len(s) + 1)
    # last index of each tie group = positions where the next score differs
    group_ends = np.nonzero(np.append(s_sorted[1:] != s_sorted[:-1], True))[0]
    recalls = tp[group_ends] / n_pos
    precisions = tp[group_ends] / pred_pos[group_ends]
    return list(zip(recalls.tolist(), precisions.tolist()))


def auprc(scores, labels):
    """Average precision over the step-interpolated PR curve, in (0, 1]."""
    points = pr_curve(scores, labels)
    ap = 0.0
    prev_recall = 0.0
    for recall, precision in points:
        ap += (recall - prev_recall) * precision
        prev_recall = recall
    return ap


def prf_at_threshold(scores, labels, threshold=0.5):
    """Precision, recall, F1 with prediction = score >= threshold.

    Precision is 0 when nothing is predicted positive (0/0 rule).
    """
    s, y = _validate(scores, labels)
    if y.sum() == 0:
        raise UndefinedMetricError("recall undefined without positive labels")
    pred = s >= threshold
    tp = int(np.sum(pred & (y == 1)))
    fp = int(np.sum(pred & (y == 0)))
    fn = int(np.sum(~pred & (y == 1)))
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def compute_report(scores, labels, threshold=0.5):
    s, y = _validate(scores, labels)
    precision, recall, f1 = prf_at_threshold(s, y, threshold)
    points = pr_curve(s, y)
    ap = 0.0
    prev = 0.0
    for r, p in points:
        ap += (r - prev) * p
        prev = r
    return MetricsReport(auprc=ap, precision=precision, recall=recall, f1=f1,
                         threshold=threshold, pr_points=points,
                         positives=int(y.sum()), negatives=int((y == 0).sum()))


def format_float(x):
    """Canonical 9-significant-digit float rendering used in all CSV output."""
    return f"{x:.9g}"


def write_pr_curve_csv(path, points, metadata=None):
    with open(path, "w", encoding="utf-8") as fh:
        if metadata:
            fh.write(f"# {metadata}\n")
        fh.write("recall,precision\n")
        for recall, precision in points:
            fh.write(f"{format_float(recall)},{format_float(precision)}\n")


def write_metrics_csv(path, rows, metadata=None):
    """rows: iterables of (model, split, MetricsReport)."""
    with open(path, "w", encoding="utf-8") as fh:
        if metadata:
            fh.write(f"# {metadata}\n")
        fh.write("model,split,auprc,precision,recall,f1,threshold\n")
        for model, split, rep in rows:
            fh.write(",".join([
                model, split,
                format_float(rep.auprc), format_float(rep.precision),
                format_float(rep.recall), format_float(rep.f1),
                format_float(rep.threshold),
            ]) + "\n")
