"""Dataset-construction utilities: random/judgmental samples, double annotation.

Sampling uses numpy's PCG64 generator (a named, portable algorithm with a
stable stream across platforms), so a (population, plan) pair always
reproduces the same sample.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .classify import Prediction, read_labels_csv
from .metrics import AgreementReport, cohen_kappa


class SampleMode(Enum):
    RANDOM = "random"
    JUDGMENTAL = "judgmental"


@dataclass
class SamplePlan:
    mode: SampleMode
    size: int = 0
    seed: int = 42
    exclude_ids: frozenset = field(default_factory=frozenset)
    per_class: Optional[tuple[int, int]] = None  # (pos_n, neg_n), judgmental only

    def __post_init__(self):
        if self.mode is SampleMode.RANDOM and self.size <= 0:
            raise ValueError("random sampling needs a positive size")
        if self.mode is SampleMode.JUDGMENTAL and self.per_class is None:
            raise ValueError("judgmental sampling needs per_class = (pos_n, neg_n)")


def _sentence_ids(sentences: Iterable) -> list[str]:
    ids = []
    for s in sentences:
        ids.append(s.id if hasattr(s, "id") else str(s))
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate sentence ids in population")
    return ids


def _draw(population: list[str], n: int, rng: np.random.Generator) -> list[str]:
    if n > len(population):
        raise ValueError("requested sample larger than population")
    pool = sorted(population)
    picked = rng.permutation(len(pool))[:n]
    return [pool[i] for i in picked]


def draw_sample(
    sentences: Iterable,
    plan: SamplePlan,
    predictions: Optional[Sequence[Prediction]] = None,
) -> list[str]:
    """Uniform sample without replacement, deterministic under the plan's seed.

    Judgmental mode draws exactly per_class predicted positives and
    negatives (stratified on the supplied predictions). The result is
    sorted by id; exclude_ids never appear.
    """
    ids = [i for i in _sentence_ids(sentences) if i not in plan.exclude_ids]
    rng = np.random.default_rng(plan.seed)

    if plan.mode is SampleMode.RANDOM:
        if len(ids) < plan.size:
            raise ValueError(
                f"population too small: need {plan.size}, have {len(ids)} after exclusions"
            )
        return sorted(_draw(ids, plan.size, rng))

    if predictions is None:
        raise ValueError("judgmental sampling requires predictions")
    label_by_id = {p.sentence_id: p.label for p in predictions}
    pos = [i for i in ids if label_by_id.get(i) == 1]
    neg = [i for i in ids if label_by_id.get(i) == 0]
    pos_n, neg_n = plan.per_class
    if len(pos) < pos_n:
        raise ValueError(
            f"predicted-positive stratum too small: need {pos_n}, have {len(pos)}"
        )
    if len(neg) < neg_n:
        raise ValueError(
            f"predicted-negative stratum too small: need {neg_n}, have {len(neg)}"
        )
    return sorted(_draw(pos, pos_n, rng) + _draw(neg, neg_n, rng))


def merge_annotations(path_a, path_b) -> tuple[AgreementReport, list[tuple[str, int, int]]]:
    """Agreement between two raters' label files plus their disagreements.

    Both files must cover the same id set; disagreement rows support the
    adjudication workflow (see apply_adjudication).
    """
    labels_a = read_labels_csv(path_a)
    labels_b = read_labels_csv(path_b)
    if set(labels_a) != set(labels_b):
        diff = sorted(set(labels_a) ^ set(labels_b))
        raise ValueError(f"rater files cover different ids; symmetric difference: {diff}")
    ids = sorted(labels_a)
    report = cohen_kappa([labels_a[i] for i in ids], [labels_b[i] for i in ids])
    disagreements = [
        (i, labels_a[i], labels_b[i]) for i in ids if labels_a[i] != labels_b[i]
    ]
    return report, disagreements


def write_disagreements_csv(disagreements: Sequence[tuple[str, int, int]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "label_a", "label_b", "resolved"])
        for sid, a, b in disagreements:
            writer.writerow([sid, a, b, ""])


def apply_adjudication(path_a, path_b, adjudicated_path) -> dict[str, int]:
    """Final gold labels: agreed labels plus the resolved column for the rest."""
    labels_a = read_labels_csv(path_a)
    labels_b = read_labels_csv(path_b)
    gold = {i: labels_a[i] for i in labels_a if labels_b.get(i) == labels_a[i]}
    with open(adjudicated_path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            sid = row["id"]
            resolved = row.get("resolved", "").strip()
            if resolved not in ("0", "1"):
                raise ValueError(f"disagreement {sid} lacks a resolved 0/1 label")
            gold[sid] = int(resolved)
    missing = (set(labels_a) | set(labels_b)) - set(gold)
    if missing:
        raise ValueError(f"ids left unresolved after adjudication: {sorted(missing)}")
    return gold
