"""Evaluation statistics: confusion-matrix metrics, ROC/AUC, agreement, rank correlation.

Metrics whose denominator is zero are reported as None ("undefined"),
never coerced to 0 or 1.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        for name in ("tp", "fp", "fn", "tn"):
            if getattr(self, name) < 0:
                raise ValueError(f"confusion count {name} must be >= 0")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass
class EvalReport:
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]
    accuracy: Optional[float]
    mcc: Optional[float]
    auc: Optional[float]
    n: int
    threshold: float

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "accuracy": self.accuracy,
            "mcc": self.mcc,
            "auc": self.auc,
            "n": self.n,
            "threshold": self.threshold,
        }


@dataclass
class AgreementReport:
    kappa: Optional[float]
    percent: float
    # ((both 1, a=1 b=0), (a=0 b=1, both 0))
    contingency: tuple[tuple[int, int], tuple[int, int]]


@dataclass
class CorrelationResult:
    rho: float
    # exact p-values are out of scope; kept for interface stability
    p_value_placeholder: Optional[float] = field(default=None)


def confusion_from_labels(predicted: Sequence[int], gold: Sequence[int]) -> ConfusionMatrix:
    if len(predicted) != len(gold):
        raise ValueError("length mismatch between predicted and gold labels")
    tp = fp = fn = tn = 0
    for p, g in zip(predicted, gold):
        if p == 1 and g == 1:
            tp += 1
        elif p == 1 and g == 0:
            fp += 1
        elif p == 0 and g == 1:
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)


def metrics_from_confusion(cm: ConfusionMatrix, threshold: float = 0.5) -> EvalReport:
    """Precision, recall, F1, accuracy and MCC from a confusion matrix.

    AUC needs ranking scores, so it is left None here; see :func:`auc`.
    """
    if cm.total == 0:
        raise ValueError("empty confusion matrix: total count is 0")
    tp, fp, fn, tn = cm.tp, cm.fp, cm.fn, cm.tn

    precision = tp / (tp + fp) if (tp + fp) > 0 else None
    recall = tp / (tp + fn) if (tp + fn) > 0 else None
    if precision is None or recall is None or (precision + recall) == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    accuracy = (tp + tn) / cm.total

    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom == 0:
        mcc = None
    else:
        mcc = (tp * tn - fp * fn) / math.sqrt(denom)

    return EvalReport(
        precision=precision,
        recall=recall,
        f1=f1,
        accuracy=accuracy,
        mcc=mcc,
        auc=None,
        n=cm.total,
        threshold=threshold,
    )


def _average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the average of their rank range."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j + 2) / 2.0  # ranks are 1-based
        for pos in range(i, j + 1):
            ranks[order[pos]] = avg
        i = j + 1
    return ranks


def auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Area under the ROC curve as the Mann-Whitney rank statistic.

    Equals (#(pos, neg) pairs with score_pos > score_neg, ties counting 1/2)
    divided by n_pos * n_neg.
    """
    if len(scores) != len(labels):
        raise ValueError("length mismatch between scores and labels")
    n_pos = sum(1 for y in labels if y == 1)
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC undefined: both classes must be present")
    ranks = _average_ranks(scores)
    rank_sum_pos = sum(r for r, y in zip(ranks, labels) if y == 1)
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def roc_points(scores: Sequence[float], labels: Sequence[int]) -> list[tuple[float, float, float]]:
    """ROC curve as (threshold, fpr, tpr) triples, one per distinct score.

    A sample is predicted positive when its score >= threshold. A leading
    (inf, 0, 0) anchor is included so the curve spans (0,0)..(1,1).
    """
    if len(scores) != len(labels):
        raise ValueError("length mismatch between scores and labels")
    n_pos = sum(1 for y in labels if y == 1)
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC undefined: both classes must be present")

    by_score = sorted(zip(scores, labels), key=lambda t: -t[0])
    points = [(math.inf, 0.0, 0.0)]
    tp = fp = 0
    i = 0
    while i < len(by_score):
        thr = by_score[i][0]
        while i < len(by_score) and by_score[i][0] == thr:
            if by_score[i][1] == 1:
                tp += 1
            else:
                fp += 1
            i += 1
        points.append((thr, fp / n_neg, tp / n_pos))
    return points


def cohen_kappa(a: Sequence[int], b: Sequence[int]) -> AgreementReport:
    """Cohen's kappa and raw percent agreement for two binary label lists."""
    if len(a) != len(b):
        raise ValueError("length mismatch between rater label lists")
    if len(a) == 0:
        raise ValueError("empty label lists")
    for lab in (a, b):
        if any(v not in (0, 1) for v in lab):
            raise ValueError("labels must be binary 0/1")

    n = len(a)
    n11 = sum(1 for x, y in zip(a, b) if x == 1 and y == 1)
    n10 = sum(1 for x, y in zip(a, b) if x == 1 and y == 0)
    n01 = sum(1 for x, y in zip(a, b) if x == 0 and y == 1)
    n00 = n - n11 - n10 - n01

    percent = (n11 + n00) / n
    # integer formulation of (p_o - p_e)/(1 - p_e) avoids rounding on the way:
    # expected agreement count E = a1*b1 + a0*b0 over n draws.
    a1, b1 = n11 + n10, n11 + n01
    expected = a1 * b1 + (n - a1) * (n - b1)
    observed = (n11 + n00) * n
    if n * n == expected:
        kappa = None  # p_e = 1, chance correction degenerates
    else:
        kappa = (observed - expected) / (n * n - expected)
    return AgreementReport(kappa=kappa, percent=percent, contingency=((n11, n10), (n01, n00)))


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Spearman rank correlation: Pearson correlation of average-ranked data."""
    if len(x) != len(y):
        raise ValueError("length mismatch between input vectors")
    if len(x) < 2:
        raise ValueError("need at least 2 observations")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    n = len(rx)
    # perfect monotone (anti-)agreement is an identity of the rank vectors;
    # return the exact value instead of round-tripping through float sums
    if rx == ry:
        if all(r == rx[0] for r in rx):
            raise ValueError("Spearman rho undefined for constant input")
        return CorrelationResult(rho=1.0)
    if all(a == (n + 1) - b for a, b in zip(rx, ry)):
        return CorrelationResult(rho=-1.0)

    mx = sum(rx) / n
    my = sum(ry) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    sxx = sum((a - mx) ** 2 for a in rx)
    syy = sum((b - my) ** 2 for b in ry)
    if sxx == 0 or syy == 0:
        raise ValueError("Spearman rho undefined for constant input")
    return CorrelationResult(rho=sxy / math.sqrt(sxx * syy))


MISCLASSIFICATION_HEADER = [
    "sentence_id",
    "kind",
    "post_id",
    "prob",
    "gold",
    "predicted",
    "text",
    "annotation",
]


def export_misclassifications(
    predictions: Mapping[str, tuple[float, int]],
    gold: Mapping[str, int],
    sentences: Mapping[str, object],
    path,
) -> dict:
    """Write every FP and FN to a CSV for manual error-category annotation.

    `predictions` maps sentence_id -> (prob, label); `sentences` maps
    sentence_id -> an object with .text and .post_id. Ids present on only
    one side (or lacking a sentence record) go to a SKIPPED section instead
    of aborting. Returns counts {"fp": ..., "fn": ..., "skipped": ...}.
    """
    shared = sorted(set(predictions) & set(gold))
    skipped = sorted((set(predictions) ^ set(gold)))

    rows = []
    counts = {"fp": 0, "fn": 0, "skipped": 0}
    deferred = []
    for sid in shared:
        prob, label = predictions[sid]
        g = gold[sid]
        if label == g:
            continue
        kind = "FP" if label == 1 else "FN"
        sent = sentences.get(sid)
        if sent is None:
            deferred.append((sid, "missing sentence record"))
            continue
        counts["fp" if kind == "FP" else "fn"] += 1
        rows.append(
            [sid, kind, sent.post_id, f"{prob:.6f}", g, label, sent.text, ""]
        )
    rows.sort(key=lambda r: (r[1], r[0]))

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MISCLASSIFICATION_HEADER)
        writer.writerows(rows)
        for sid, reason in sorted(deferred) + [(s, "id missing on one side") for s in skipped]:
            writer.writerow([sid, "SKIPPED", "", "", "", "", reason, ""])
            counts["skipped"] += 1
    return counts


def import_annotations(path) -> Counter:
    """Tabulate the manual error categories from an annotated export."""
    cats: Counter = Counter()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            if row["kind"] in ("FP", "FN") and row["annotation"].strip():
                cats[row["annotation"].strip()] += 1
    return cats


def write_report_csv(report: EvalReport, path) -> None:
    """One-row CSV form of an EvalReport; undefined metrics stay empty."""
    fields = ["precision", "recall", "f1", "accuracy", "mcc", "auc", "n", "threshold"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        writer.writerow(
            ["" if getattr(report, f) is None else repr(getattr(report, f)) for f in fields[:6]]
            + [report.n, repr(report.threshold)]
        )
