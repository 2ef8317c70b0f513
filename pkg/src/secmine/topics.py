"""LDA topic modeling with collapsed Gibbs sampling and c_v coherence.

The sampler resamples every token's topic from
    p(z=k) ~ (n_dk + alpha) * (n_kw + beta) / (n_k + V*beta)
with the token's own counts excluded. All randomness comes from a numpy
PCG64 generator seeded once, so a fitted model is bit-reproducible; the
inner sweep is numba-compiled and consumes pre-drawn uniforms.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from numba import njit


@dataclass
class LdaConfig:
    k: int
    alpha: Optional[float] = None  # None -> 50/k
    beta: float = 0.01
    iterations: int = 1000
    burn_in: int = 200
    seed: int = 42

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.alpha is None:
            self.alpha = 50.0 / self.k
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be > 0")
        if self.iterations < 1 or not 0 <= self.burn_in < self.iterations:
            raise ValueError("need 0 <= burn_in < iterations")


@dataclass
class TopicModel:
    config: LdaConfig
    phi: np.ndarray    # K x V, rows sum to 1
    theta: np.ndarray  # D x K, rows sum to 1
    vocab: Optional[dict[str, int]] = None
    coherence: Optional[float] = None

    @property
    def index_to_term(self) -> Optional[list[str]]:
        if self.vocab is None:
            return None
        terms = [""] * len(self.vocab)
        for t, i in self.vocab.items():
            terms[i] = t
        return terms


@dataclass(frozen=True)
class CoherenceScore:
    metric: str
    value: float
    k: int
    top_n: int = 10
    window: int = 110


@njit(cache=True)
def _gibbs_sweep(token_word, token_doc, z, n_dk, n_kw, n_k, alpha, beta, uniforms, probs):
    K, V = n_kw.shape
    for t in range(token_word.shape[0]):
        w = token_word[t]
        d = token_doc[t]
        old = z[t]
        n_dk[d, old] -= 1
        n_kw[old, w] -= 1
        n_k[old] -= 1
        total = 0.0
        for kk in range(K):
            p = (n_dk[d, kk] + alpha) * (n_kw[kk, w] + beta) / (n_k[kk] + V * beta)
            probs[kk] = p
            total += p
        u = uniforms[t] * total
        acc = 0.0
        new = K - 1
        for kk in range(K):
            acc += probs[kk]
            if u < acc:
                new = kk
                break
        z[t] = new
        n_dk[d, new] += 1
        n_kw[new, w] += 1
        n_k[new] += 1


def _flatten(docs: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    doc_len = np.array([len(d) for d in docs], dtype=np.int64)
    token_word = np.fromiter((w for d in docs for w in d), dtype=np.int32, count=int(doc_len.sum()))
    token_doc = np.repeat(np.arange(len(docs), dtype=np.int32), doc_len)
    return token_word, token_doc, doc_len


def fit_lda(
    docs: Sequence[Sequence[int]],
    cfg: LdaConfig,
    vocab_size: Optional[int] = None,
    vocab: Optional[dict[str, int]] = None,
    check_counts: bool = False,
) -> TopicModel:
    """Fit by collapsed Gibbs sampling; counts after burn-in are averaged.

    `docs` are index-encoded and must all be non-empty. With
    check_counts=True the count bookkeeping is verified after every sweep
    (sum_k n_dk = doc length, sum_w n_kw = n_k).
    """
    if not docs:
        raise ValueError("no documents to model")
    for i, d in enumerate(docs):
        if len(d) == 0:
            raise ValueError(f"empty document at position {i}; drop empty docs before fitting")
    token_word, token_doc, doc_len = _flatten(docs)
    n_tokens = int(token_word.shape[0])
    if cfg.k > n_tokens:
        raise ValueError(f"k={cfg.k} exceeds total token count {n_tokens}")
    if vocab is not None and vocab_size is None:
        vocab_size = len(vocab)
    V = int(vocab_size) if vocab_size is not None else int(token_word.max()) + 1
    if token_word.max() >= V:
        raise ValueError("token index outside vocabulary")
    K, D = cfg.k, len(docs)

    rng = np.random.default_rng(cfg.seed)
    z = rng.integers(0, K, n_tokens, dtype=np.int32)
    n_dk = np.zeros((D, K), dtype=np.int64)
    n_kw = np.zeros((K, V), dtype=np.int64)
    n_k = np.zeros(K, dtype=np.int64)
    np.add.at(n_dk, (token_doc, z), 1)
    np.add.at(n_kw, (z, token_word), 1)
    np.add.at(n_k, z, 1)

    acc_kw = np.zeros((K, V), dtype=np.float64)
    acc_dk = np.zeros((D, K), dtype=np.float64)
    probs = np.empty(K, dtype=np.float64)
    kept = 0
    for sweep in range(cfg.iterations):
        uniforms = rng.random(n_tokens)
        _gibbs_sweep(
            token_word, token_doc, z, n_dk, n_kw, n_k,
            float(cfg.alpha), float(cfg.beta), uniforms, probs,
        )
        if check_counts:
            if not np.array_equal(n_dk.sum(axis=1), doc_len):
                raise AssertionError(f"count conservation broken in sweep {sweep}: n_dk")
            if not np.array_equal(n_kw.sum(axis=1), n_k):
                raise AssertionError(f"count conservation broken in sweep {sweep}: n_kw")
        if sweep >= cfg.burn_in:
            acc_kw += n_kw
            acc_dk += n_dk
            kept += 1

    mean_kw = acc_kw / kept
    mean_dk = acc_dk / kept
    mean_k = mean_kw.sum(axis=1)
    phi = (mean_kw + cfg.beta) / (mean_k + V * cfg.beta)[:, None]
    theta = (mean_dk + cfg.alpha) / (doc_len + K * cfg.alpha)[:, None]
    return TopicModel(config=cfg, phi=phi, theta=theta, vocab=vocab)


def dominant_topic(model: TopicModel, doc_index: int) -> int:
    """Argmax of the document's topic distribution; ties go to the lower id."""
    if not 0 <= doc_index < model.theta.shape[0]:
        raise IndexError(f"document index {doc_index} out of range")
    return int(np.argmax(model.theta[doc_index]))


def _ranked_indices(model: TopicModel, topic: int) -> list[int]:
    row = model.phi[topic]
    terms = model.index_to_term
    if terms is not None:
        return sorted(range(len(row)), key=lambda i: (-row[i], terms[i]))
    return sorted(range(len(row)), key=lambda i: (-row[i], i))


def top_words(model: TopicModel, topic: int, n: int = 10) -> list[tuple[str, float]]:
    """Top-n (term, probability); ties in phi break lexicographically."""
    if not 0 <= topic < model.phi.shape[0]:
        raise IndexError(f"topic {topic} out of range")
    terms = model.index_to_term
    ranked = _ranked_indices(model, topic)[:n]
    return [(terms[i] if terms else str(i), float(model.phi[topic, i])) for i in ranked]


# ------------------------------------------------------------------ coherence

def _window_counts(
    docs: Sequence[Sequence[int]], candidates: Sequence[int], window: int
) -> tuple[np.ndarray, np.ndarray, int]:
    """Occurrence / co-occurrence counts over boolean sliding windows.

    Docs shorter than the window contribute a single window.
    """
    pos = {w: i for i, w in enumerate(candidates)}
    m = len(candidates)
    occur = np.zeros(m, dtype=np.int64)
    joint = np.zeros((m, m), dtype=np.int64)
    n_windows = 0
    for doc in docs:
        span = max(1, len(doc) - window + 1)
        for start in range(span):
            n_windows += 1
            present = sorted({pos[w] for w in doc[start : start + window] if w in pos})
            for a_i, a in enumerate(present):
                occur[a] += 1
                for b in present[a_i:]:
                    joint[a, b] += 1
                    if a != b:
                        joint[b, a] += 1
    return occur, joint, n_windows


_EPS = 1e-12


def _npmi(p_joint: float, p_a: float, p_b: float) -> float:
    p_joint = p_joint + _EPS
    p_a = max(p_a, _EPS)
    p_b = max(p_b, _EPS)
    return math.log(p_joint / (p_a * p_b)) / (-math.log(p_joint))


def coherence_cv(
    model: TopicModel,
    docs: Sequence[Sequence[int]],
    top_n: int = 10,
    window: int = 110,
) -> CoherenceScore:
    """The c_v coherence of the fitted model on its own corpus.

    Per topic: NPMI context vectors of the top words over sliding-window
    counts, one-set segmentation (cosine of each word's vector against the
    sum vector), averaged over words; c_v averages over topics.
    """
    topic_words = [
        [i for i in _ranked_indices(model, k)[:top_n]] for k in range(model.phi.shape[0])
    ]
    candidates = sorted({w for ws in topic_words for w in ws})
    occur, joint, n_windows = _window_counts(docs, candidates, window)
    pos = {w: i for i, w in enumerate(candidates)}

    per_topic = []
    for words in topic_words:
        idx = [pos[w] for w in words]
        m = len(idx)
        vectors = np.empty((m, m))
        for a in range(m):
            for b in range(m):
                vectors[a, b] = _npmi(
                    joint[idx[a], idx[b]] / n_windows,
                    occur[idx[a]] / n_windows,
                    occur[idx[b]] / n_windows,
                )
        total = vectors.sum(axis=0)
        sims = []
        for a in range(m):
            na = np.linalg.norm(vectors[a])
            nt = np.linalg.norm(total)
            if na == 0.0 or nt == 0.0:
                sims.append(0.0)
            else:
                sims.append(float(vectors[a] @ total / (na * nt)))
        per_topic.append(sum(sims) / len(sims))

    value = sum(per_topic) / len(per_topic)
    return CoherenceScore(
        metric="CV", value=value, k=model.phi.shape[0], top_n=top_n, window=window
    )


def select_k(
    docs: Sequence[Sequence[int]],
    k_grid: Sequence[int],
    seed: int = 42,
    alpha: Optional[float] = None,
    beta: float = 0.01,
    iterations: int = 1000,
    burn_in: int = 200,
    top_n: int = 10,
    window: int = 110,
    vocab: Optional[dict[str, int]] = None,
) -> tuple[int, list[CoherenceScore], TopicModel]:
    """Fit one model per distinct k and return the k with highest c_v.

    The grid is deduplicated; every fit uses the same seed; ties break
    toward the smaller k. Also returns the winning model.
    """
    if not k_grid:
        raise ValueError("k_grid must be non-empty")
    scores: list[CoherenceScore] = []
    best: Optional[tuple[float, int, TopicModel]] = None
    for k in sorted(set(k_grid)):
        cfg = LdaConfig(
            k=k, alpha=alpha, beta=beta, iterations=iterations, burn_in=burn_in, seed=seed
        )
        model = fit_lda(docs, cfg, vocab=vocab)
        score = coherence_cv(model, docs, top_n=top_n, window=window)
        model.coherence = score.value
        scores.append(score)
        if best is None or score.value > best[0]:
            best = (score.value, k, model)
    return best[1], scores, best[2]


# -------------------------------------------------------------------- file io

def save_topic_model(model: TopicModel, path, top_n: int = 30, theta_path=None) -> None:
    payload = {
        "format_version": 1,
        "config": {
            "k": model.config.k,
            "alpha": model.config.alpha,
            "beta": model.config.beta,
            "iterations": model.config.iterations,
            "burn_in": model.config.burn_in,
            "seed": model.config.seed,
        },
        "coherence": model.coherence,
        "topics": [
            {
                "topic": k,
                "top_words": [
                    {"term": t, "prob": p} for t, p in top_words(model, k, top_n)
                ],
            }
            for k in range(model.phi.shape[0])
        ],
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if theta_path is not None:
        np.save(theta_path, model.theta)


def write_coherence_csv(scores: Iterable[CoherenceScore], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "metric", "value"])
        for s in scores:
            writer.writerow([s.k, s.metric, repr(s.value)])


def write_assignments_csv(assignments: dict[str, int], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sentence_id", "topic"])
        for sid in sorted(assignments):
            writer.writerow([sid, assignments[sid]])


def read_assignments_csv(path) -> dict[str, int]:
    out: dict[str, int] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out[row["sentence_id"]] = int(row["topic"])
    return out


def export_topic_samples(
    assignments: dict[str, int],
    texts: dict[str, str],
    path,
    per_topic: int = 50,
    seed: int = 42,
) -> None:
    """Up to `per_topic` randomly sampled sentences per topic, for manual labeling."""
    rng = np.random.default_rng(seed)
    by_topic: dict[int, list[str]] = {}
    for sid in sorted(assignments):
        by_topic.setdefault(assignments[sid], []).append(sid)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["topic", "sentence_id", "text"])
        for topic in sorted(by_topic):
            ids = by_topic[topic]
            if len(ids) > per_topic:
                chosen = [ids[i] for i in rng.permutation(len(ids))[:per_topic]]
                chosen.sort()
            else:
                chosen = ids
            for sid in chosen:
                writer.writerow([topic, sid, texts.get(sid, "")])
