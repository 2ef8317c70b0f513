"""TF-IDF featurization and the two baseline linear classifiers.

Both trainers are deterministic: logistic regression uses full-batch
gradient descent with a fixed epoch count, the linear SVM uses
epoch-ordered subgradient descent where the seed controls the per-epoch
shuffle. Identical inputs and seed give bit-identical weights.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from . import metrics as metrics_mod
from .corpus import TokenizedDoc
from .metrics import EvalReport, confusion_from_labels, metrics_from_confusion


class ModelKind(str, Enum):
    LOGIT = "logit"
    LINEAR_SVM = "linear_svm"


@dataclass
class TfidfModel:
    vocabulary: dict[str, int]
    idf: np.ndarray
    norm: str = "l2"


@dataclass
class LinearModel:
    kind: ModelKind
    weights: np.ndarray
    bias: float
    hyperparams: dict


@dataclass
class FoldPlan:
    k: int
    seed: int
    folds: list[list[int]]


@dataclass(frozen=True)
class Prediction:
    sentence_id: str
    prob: float
    label: int


DEFAULT_GRID = tuple(
    {"lam": lam, "lr": lr, "epochs": epochs}
    for lam in (1e-4, 1e-3, 1e-2, 1e-1)
    for lr in (0.1, 0.5)
    for epochs in (100, 300)
)


# -------------------------------------------------------------------- tf-idf

def fit_tfidf(docs: Sequence[TokenizedDoc]) -> TfidfModel:
    """idf[t] = ln((1+N)/(1+df_t)) + 1 over the given documents."""
    if not docs:
        raise ValueError("cannot fit TF-IDF on an empty corpus")
    df: dict[str, int] = {}
    for doc in docs:
        for term in set(doc.tokens):
            df[term] = df.get(term, 0) + 1
    if not df:
        raise ValueError("empty vocabulary: no terms in corpus")
    vocabulary = {t: i for i, t in enumerate(sorted(df))}
    n = len(docs)
    idf = np.empty(len(vocabulary))
    for term, idx in vocabulary.items():
        idf[idx] = math.log((1 + n) / (1 + df[term])) + 1.0
    return TfidfModel(vocabulary=vocabulary, idf=idf)


def transform(model: TfidfModel, doc: TokenizedDoc) -> sp.csr_matrix:
    """L2-normalized tf*idf row vector; unseen terms are ignored."""
    return transform_matrix(model, [doc])


def transform_matrix(model: TfidfModel, docs: Sequence[TokenizedDoc]) -> sp.csr_matrix:
    vocab = model.vocabulary
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for doc in docs:
        counts: dict[int, int] = {}
        for term in doc.tokens:
            idx = vocab.get(term)
            if idx is not None:
                counts[idx] = counts.get(idx, 0) + 1
        row = sorted(counts)
        values = np.array([counts[i] * model.idf[i] for i in row])
        norm = np.sqrt(np.sum(values * values))
        if norm > 0:
            values = values / norm
        indices.extend(row)
        data.extend(values.tolist())
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.array(data), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(docs), len(vocab)),
    )


# ------------------------------------------------------------------ training

def _validate_training_labels(y: np.ndarray) -> None:
    classes = np.unique(y)
    if len(y) < 2:
        raise ValueError("need at least 2 training samples")
    if classes.size < 2:
        raise ValueError("degenerate training set: only one class present")
    if not set(classes.tolist()) <= {0, 1}:
        raise ValueError("labels must be binary 0/1")


def logistic_loss_and_grad(
    w: np.ndarray, b: float, X, y: np.ndarray, lam: float
) -> tuple[float, np.ndarray, float]:
    """Mean binary cross-entropy + (lam/2)||w||^2 and its gradient."""
    n = X.shape[0]
    z = np.asarray(X @ w).ravel() + b
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * lam * np.dot(w, w))
    p = 1.0 / (1.0 + np.exp(-z))
    resid = (p - y) / n
    grad_w = np.asarray(X.T @ resid).ravel() + lam * w
    grad_b = float(np.sum(resid))
    return loss, grad_w, grad_b


def train(
    kind: ModelKind,
    X,
    y: Sequence[int],
    hyperparams: Optional[dict] = None,
    seed: int = 42,
) -> LinearModel:
    y = np.asarray(y, dtype=np.float64)
    _validate_training_labels(y)
    hp = {"lam": 1e-3, "lr": 0.5, "epochs": 300}
    if hyperparams:
        hp.update(hyperparams)
    lam, lr, epochs = float(hp["lam"]), float(hp["lr"]), int(hp["epochs"])

    w = np.zeros(X.shape[1])
    b = 0.0
    if kind is ModelKind.LOGIT:
        for _ in range(epochs):
            _, grad_w, grad_b = logistic_loss_and_grad(w, b, X, y, lam)
            w -= lr * grad_w
            b -= lr * grad_b
    elif kind is ModelKind.LINEAR_SVM:
        rng = np.random.default_rng(seed)
        sign = np.where(y == 1, 1.0, -1.0)
        if sp.issparse(X):
            Xr = X.tocsr()
            data, indices, indptr = Xr.data, Xr.indices, Xr.indptr
        else:
            Xr = np.asarray(X, dtype=np.float64)
        shrink = 1.0 - lr * lam
        for _ in range(epochs):
            order = rng.permutation(len(y))
            for i in order:
                if sp.issparse(X):
                    lo, hi = indptr[i], indptr[i + 1]
                    idx, vals = indices[lo:hi], data[lo:hi]
                    margin = sign[i] * (float(vals @ w[idx]) + b)
                    w *= shrink
                    if margin < 1.0:
                        w[idx] += lr * sign[i] * vals
                        b += lr * sign[i]
                else:
                    xi = Xr[i]
                    margin = sign[i] * (float(xi @ w) + b)
                    w *= shrink
                    if margin < 1.0:
                        w += lr * sign[i] * xi
                        b += lr * sign[i]
    else:
        raise ValueError(f"unknown model kind: {kind}")

    if not (np.all(np.isfinite(w)) and math.isfinite(b)):
        raise ArithmeticError("training diverged: non-finite weights (lower the learning rate)")
    return LinearModel(
        kind=kind, weights=w, bias=float(b), hyperparams={**hp, "seed": seed}
    )


def decision_scores(model: LinearModel, X) -> np.ndarray:
    return np.asarray(X @ model.weights).ravel() + model.bias


def predict_probs(model: LinearModel, X) -> np.ndarray:
    """Probabilities in (0,1): sigmoid of the decision score.

    For the SVM this squashes the raw margin through a sigmoid so the
    interchange format's [0,1] contract holds; the mapping is monotone,
    so rankings (hence AUC) are unchanged.
    """
    return 1.0 / (1.0 + np.exp(-decision_scores(model, X)))


def predict_labels(model: LinearModel, X, threshold: float = 0.5) -> np.ndarray:
    return (predict_probs(model, X) >= threshold).astype(int)


# ------------------------------------------------------------ stratified folds

def stratified_folds(y: Sequence[int], k: int, seed: int = 42) -> FoldPlan:
    """Per-class round-robin assignment after a seeded shuffle.

    The round-robin cursor continues across classes so fold sizes stay
    balanced; per-fold class counts differ by at most one.
    """
    n = len(y)
    if k < 2 or k > n:
        raise ValueError(f"k must be in [2, {n}], got {k}")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    cursor = 0
    for cls in sorted(set(y)):
        idxs = np.flatnonzero(np.asarray(y) == cls)
        for j in rng.permutation(len(idxs)):
            folds[cursor % k].append(int(idxs[j]))
            cursor += 1
    return FoldPlan(k=k, seed=seed, folds=[sorted(f) for f in folds])


def iter_splits(plan: FoldPlan, n: int) -> Iterable[tuple[list[int], list[int]]]:
    for fold in plan.folds:
        held = set(fold)
        train_idx = [i for i in range(n) if i not in held]
        yield train_idx, list(fold)


# ------------------------------------------------------------ cross-validation

@dataclass
class CVResult:
    kind: ModelKind
    chosen_hyperparams: dict
    fold_reports: list[EvalReport]
    mean_report: EvalReport
    grid_results: list[tuple[dict, Optional[float]]]


def _mean_report(reports: list[EvalReport], threshold: float) -> EvalReport:
    def mean_of(attr):
        vals = [getattr(r, attr) for r in reports if getattr(r, attr) is not None]
        return sum(vals) / len(vals) if vals else None

    return EvalReport(
        precision=mean_of("precision"),
        recall=mean_of("recall"),
        f1=mean_of("f1"),
        accuracy=mean_of("accuracy"),
        mcc=mean_of("mcc"),
        auc=mean_of("auc"),
        n=sum(r.n for r in reports),
        threshold=threshold,
    )


def _hp_key(hp: dict) -> tuple:
    return (float(hp["lam"]), float(hp["lr"]), int(hp["epochs"]))


def evaluate_fold(
    kind: ModelKind,
    docs: Sequence[TokenizedDoc],
    labels: Sequence[int],
    train_idx: Sequence[int],
    test_idx: Sequence[int],
    hp: dict,
    seed: int,
    threshold: float = 0.5,
) -> EvalReport:
    """Fit TF-IDF and the model on the training split only, score the held-out fold."""
    train_docs = [docs[i] for i in train_idx]
    tfidf = fit_tfidf(train_docs)
    X_train = transform_matrix(tfidf, train_docs)
    y_train = [labels[i] for i in train_idx]
    model = train(kind, X_train, y_train, hp, seed)

    test_docs = [docs[i] for i in test_idx]
    X_test = transform_matrix(tfidf, test_docs)
    y_test = [labels[i] for i in test_idx]
    probs = predict_probs(model, X_test)
    pred = (probs >= threshold).astype(int)
    report = metrics_from_confusion(confusion_from_labels(pred.tolist(), y_test), threshold)
    if len(set(y_test)) == 2:
        report.auc = metrics_mod.auc(decision_scores(model, X_test).tolist(), y_test)
    return report


def cross_validate(
    kind: ModelKind,
    docs: Sequence[TokenizedDoc],
    labels: Sequence[int],
    grid: Optional[Sequence[dict]] = None,
    k: int = 10,
    seed: int = 42,
    threshold: float = 0.5,
) -> CVResult:
    """Stratified k-fold grid search selecting the grid point with best mean F1.

    TF-IDF is refit on each training split, so no test-fold vocabulary
    leaks into features. Ties break toward the lexicographically smaller
    (lam, lr, epochs) tuple.
    """
    if len(docs) != len(labels):
        raise ValueError("length mismatch between docs and labels")
    grid = list(grid) if grid is not None else [dict(g) for g in DEFAULT_GRID]
    if not grid:
        raise ValueError("empty hyperparameter grid")
    plan = stratified_folds(labels, k, seed)
    splits = list(iter_splits(plan, len(labels)))

    # TF-IDF depends only on the training split, so featurize each fold once
    fold_features = []
    for tr, te in splits:
        train_docs = [docs[i] for i in tr]
        tfidf = fit_tfidf(train_docs)
        fold_features.append(
            (
                transform_matrix(tfidf, train_docs),
                [labels[i] for i in tr],
                transform_matrix(tfidf, [docs[i] for i in te]),
                [labels[i] for i in te],
            )
        )

    all_fold_reports: dict[int, list[EvalReport]] = {}
    grid_results: list[tuple[dict, Optional[float]]] = []
    for gi, hp in enumerate(grid):
        reports = []
        for X_train, y_train, X_test, y_test in fold_features:
            model = train(kind, X_train, y_train, hp, seed)
            probs = predict_probs(model, X_test)
            pred = (probs >= threshold).astype(int)
            report = metrics_from_confusion(
                confusion_from_labels(pred.tolist(), y_test), threshold
            )
            if len(set(y_test)) == 2:
                report.auc = metrics_mod.auc(decision_scores(model, X_test).tolist(), y_test)
            reports.append(report)
        all_fold_reports[gi] = reports
        f1s = [r.f1 for r in reports if r.f1 is not None]
        grid_results.append((hp, sum(f1s) / len(f1s) if f1s else None))

    def selection_key(gi: int):
        mean_f1 = grid_results[gi][1]
        return (-(mean_f1 if mean_f1 is not None else -math.inf), _hp_key(grid[gi]))

    best = min(range(len(grid)), key=selection_key)
    fold_reports = all_fold_reports[best]
    return CVResult(
        kind=kind,
        chosen_hyperparams=dict(grid[best]),
        fold_reports=fold_reports,
        mean_report=_mean_report(fold_reports, threshold),
        grid_results=grid_results,
    )


# ----------------------------------------------------------- interchange files

def load_predictions(path, threshold: float = 0.5) -> list[Prediction]:
    """Read the predictions interchange file (one JSON object per line).

    Labels derive from prob >= threshold (inclusive). Duplicate sentence
    ids and probabilities outside [0,1] are errors.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"predictions file not found: {path}")
    preds: list[Prediction] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            sid = str(obj["sentence_id"])
            prob = float(obj["prob"])
            if sid in seen:
                raise ValueError(f"duplicate sentence_id '{sid}' at line {lineno}")
            if not 0.0 <= prob <= 1.0:
                raise ValueError(f"prob {prob} outside [0,1] at line {lineno}")
            seen.add(sid)
            preds.append(Prediction(sentence_id=sid, prob=prob, label=int(prob >= threshold)))
    return preds


def write_predictions(pairs: Iterable[tuple[str, float]], path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for sid, prob in pairs:
            fh.write(json.dumps({"sentence_id": sid, "prob": float(prob)}))
            fh.write("\n")
            n += 1
    return n


def read_labels_csv(path) -> dict[str, int]:
    """Pipeline-wide gold label contract: CSV with columns id,label."""
    labels: dict[str, int] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            label = int(row["label"])
            if label not in (0, 1):
                raise ValueError(f"label for id {row['id']} must be 0 or 1")
            labels[row["id"]] = label
    return labels


def write_labels_csv(labels: dict[str, int], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "label"])
        for sid in sorted(labels):
            writer.writerow([sid, labels[sid]])


# -------------------------------------------------------------- model file io

def save_model(tfidf: TfidfModel, model: LinearModel, path) -> None:
    payload = {
        "format_version": 1,
        "kind": model.kind.value,
        "vocabulary": tfidf.vocabulary,
        "idf": tfidf.idf.tolist(),
        "weights": model.weights.tolist(),
        "bias": model.bias,
        "hyperparams": model.hyperparams,
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, separators=(",", ":"))
        fh.write("\n")


def load_model(path) -> tuple[TfidfModel, LinearModel]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format_version") != 1:
        raise ValueError("unsupported model file version")
    tfidf = TfidfModel(
        vocabulary={t: int(i) for t, i in payload["vocabulary"].items()},
        idf=np.asarray(payload["idf"], dtype=np.float64),
    )
    model = LinearModel(
        kind=ModelKind(payload["kind"]),
        weights=np.asarray(payload["weights"], dtype=np.float64),
        bias=float(payload["bias"]),
        hyperparams=payload["hyperparams"],
    )
    return tfidf, model
