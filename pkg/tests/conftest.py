"""Shared fixtures and synthetic-corpus generators for the test suite."""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pytest

from secmine.corpus import Sentence, TokenizedDoc
from secmine.dump_ingest import Post, PostKind

REPO_ROOT = Path(__file__).resolve().parent.parent
MINI_DUMP = REPO_ROOT / "data" / "mini_dump_posts.xml"
MINI_LABELS = REPO_ROOT / "data" / "mini_labels.csv"


@pytest.fixture
def mini_dump_path() -> Path:
    assert MINI_DUMP.is_file(), "bundled mini dump is missing"
    return MINI_DUMP


@pytest.fixture
def mini_labels_path() -> Path:
    assert MINI_LABELS.is_file(), "bundled mini labels file is missing"
    return MINI_LABELS


def utc(year, month, day, hour=0) -> datetime:
    return datetime(year, month, day, hour, tzinfo=timezone.utc)


def make_question(post_id, tags, created=None, view_count=0, has_accepted=False, body="") -> Post:
    return Post(
        id=post_id,
        kind=PostKind.QUESTION,
        parent_id=None,
        created_at=created or utc(2019, 1, 1),
        tags=tuple(tags),
        body_text=body,
        view_count=view_count,
        has_accepted_answer=has_accepted,
    )


def make_sentence(sid, post_id, created, tags=("iot",), is_question=True, text="hello world") -> Sentence:
    return Sentence(
        id=sid, post_id=post_id, text=text, created_at=created,
        tags=tuple(tags), is_question=is_question,
    )


def planted_signal_docs(seed=5, n=200):
    """Class-1 docs always contain the token "attack"; class-0 docs never do."""
    rng = np.random.default_rng(seed)
    filler = [f"w{i}" for i in range(30)]
    docs, labels = [], []
    for i in range(n):
        label = i % 2
        toks = [filler[j] for j in rng.integers(0, 30, rng.integers(5, 12))]
        if label == 1:
            toks.insert(int(rng.integers(0, len(toks) + 1)), "attack")
        docs.append(TokenizedDoc(f"s{i}", tuple(toks)))
        labels.append(label)
    return docs, labels


def planted_topic_corpus(seed, n_docs=600, vocab=60, n_topics=3, doc_len=(10, 25)):
    """Each doc draws all tokens from one of `n_topics` disjoint word families."""
    rng = np.random.default_rng(seed)
    fam = vocab // n_topics
    docs, labels = [], []
    for i in range(n_docs):
        t = i % n_topics
        length = int(rng.integers(doc_len[0], doc_len[1] + 1))
        docs.append(rng.integers(t * fam, (t + 1) * fam, length).tolist())
        labels.append(t)
    return docs, labels
