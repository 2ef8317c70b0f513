"""Topic evolution, popularity/difficulty, and tag discoverability analytics.

Buckets are half-year windows anchored at Jan 1 / Jul 1 (UTC); a sentence's
creation time is the creation time of the post it came from.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date, datetime
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

from .corpus import Sentence
from .dump_ingest import Post

# the security-specific tags the analysis defaults to
DEFAULT_SECURITY_TAGS = (
    "security",
    "ssh",
    "ssl",
    "passwords",
    "authentication",
    "authorization",
    "encryption",
    "cryptography",
    "hash",
)


class Granularity(Enum):
    TOPIC = "topic"
    CATEGORY = "category"


@dataclass(frozen=True)
class TrendBucket:
    bucket_start: date
    group: str
    count: int


@dataclass(frozen=True)
class PopularityDifficulty:
    topic: int
    question_count: int
    avg_view_count: Optional[float]
    pct_without_accepted: Optional[float]


def half_year_start(ts: datetime) -> date:
    return date(ts.year, 1 if ts.month <= 6 else 7, 1)


def month_start(ts: datetime) -> date:
    return date(ts.year, ts.month, 1)


def _next_half_year(d: date) -> date:
    return date(d.year, 7, 1) if d.month == 1 else date(d.year + 1, 1, 1)


def absolute_impact(
    assignments: Mapping[str, int],
    sentences: Sequence[Sentence],
    category_map: Optional[Mapping[int, str]] = None,
    granularity: Granularity = Granularity.TOPIC,
) -> list[TrendBucket]:
    """Sentence counts per group per six-month bucket.

    Groups are topic ids or, with CATEGORY granularity, the mapped category
    names (the map must cover every assigned topic). Buckets between the
    first and last observed are zero-filled for every group.
    """
    if not sentences:
        return []
    counts: dict[tuple[date, str], int] = {}
    groups: set[str] = set()
    first: Optional[date] = None
    last: Optional[date] = None
    for s in sentences:
        if s.id not in assignments:
            raise ValueError(f"sentence {s.id} has no topic assignment")
        topic = assignments[s.id]
        if granularity is Granularity.CATEGORY:
            if category_map is None or topic not in category_map:
                raise ValueError(f"topic {topic} missing from the category map")
            group = str(category_map[topic])
        else:
            group = str(topic)
        bucket = half_year_start(s.created_at)
        counts[(bucket, group)] = counts.get((bucket, group), 0) + 1
        groups.add(group)
        first = bucket if first is None or bucket < first else first
        last = bucket if last is None or bucket > last else last

    out = []
    bucket = first
    while bucket <= last:
        for group in sorted(groups):
            out.append(
                TrendBucket(bucket_start=bucket, group=group, count=counts.get((bucket, group), 0))
            )
        bucket = _next_half_year(bucket)
    return out


def monthly_counts(sentences: Iterable[Sentence]) -> dict[date, int]:
    counts: dict[date, int] = {}
    for s in sentences:
        m = month_start(s.created_at)
        counts[m] = counts.get(m, 0) + 1
    return counts


def relative_growth(
    security_counts: Mapping[date, int],
    total_counts: Mapping[date, int],
) -> tuple[list[tuple[date, float]], list[date]]:
    """Per-month security share: security sentences / all sentences.

    Months whose total is zero (or absent) are returned separately as
    omitted instead of producing a ratio.
    """
    ratios: list[tuple[date, float]] = []
    omitted: list[date] = []
    for month in sorted(set(security_counts) | set(total_counts)):
        total = total_counts.get(month, 0)
        sec = security_counts.get(month, 0)
        if total <= 0:
            omitted.append(month)
            continue
        if sec > total:
            raise ValueError(f"security count exceeds total for {month}")
        ratios.append((month, sec / total))
    return ratios, omitted


def popularity_difficulty(
    assignments: Mapping[str, int],
    sentences: Mapping[str, Sentence],
    posts: Mapping[int, Post],
    topics: Optional[Iterable[int]] = None,
) -> list[PopularityDifficulty]:
    """Per-topic question popularity (avg views) and difficulty (% unaccepted).

    Only sentences from question posts participate; a question counts once
    per topic any of its sentences is assigned to.
    """
    questions_by_topic: dict[int, set[int]] = {}
    for sid, topic in assignments.items():
        sent = sentences.get(sid)
        if sent is None or not sent.is_question:
            continue
        questions_by_topic.setdefault(topic, set()).add(sent.post_id)

    topic_ids = sorted(set(topics)) if topics is not None else sorted(questions_by_topic)
    out = []
    for topic in topic_ids:
        qids = sorted(questions_by_topic.get(topic, set()))
        if not qids:
            out.append(
                PopularityDifficulty(
                    topic=topic, question_count=0, avg_view_count=None, pct_without_accepted=None
                )
            )
            continue
        views = []
        without_accepted = 0
        for qid in qids:
            post = posts.get(qid)
            if post is None:
                raise KeyError(f"question post {qid} missing from the post store")
            views.append(post.view_count or 0)
            if not post.has_accepted_answer:
                without_accepted += 1
        out.append(
            PopularityDifficulty(
                topic=topic,
                question_count=len(qids),
                avg_view_count=sum(views) / len(qids),
                pct_without_accepted=without_accepted / len(qids),
            )
        )
    return out


def discoverability(
    security_sentences: Sequence[Sentence],
    posts: Mapping[int, Post],
    security_tags: Sequence[str] = DEFAULT_SECURITY_TAGS,
) -> float:
    """Fraction of security sentences whose post carries a security tag."""
    if not security_tags:
        raise ValueError("security_tags must be non-empty")
    tag_set = {t.lower() for t in security_tags}
    if not security_sentences:
        return 0.0
    found = 0
    for s in security_sentences:
        post = posts.get(s.post_id)
        tags = post.tags if post is not None else s.tags
        if any(t in tag_set for t in tags):
            found += 1
    return found / len(security_sentences)


# -------------------------------------------------------------------- file io

def write_trend_csv(buckets: Sequence[TrendBucket], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bucket_start", "group", "count"])
        for b in buckets:
            writer.writerow([b.bucket_start.isoformat(), b.group, b.count])


def write_popularity_csv(rows: Sequence[PopularityDifficulty], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["topic", "questions", "avg_views", "pct_without_accepted"])
        for r in rows:
            writer.writerow(
                [
                    r.topic,
                    r.question_count,
                    "" if r.avg_view_count is None else repr(r.avg_view_count),
                    "" if r.pct_without_accepted is None else repr(r.pct_without_accepted),
                ]
            )


def write_relative_growth_csv(
    ratios: Sequence[tuple[date, float]], omitted: Sequence[date], path
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["month", "ratio", "omitted"])
        for month, ratio in ratios:
            writer.writerow([month.isoformat(), repr(ratio), "false"])
        for month in omitted:
            writer.writerow([month.isoformat(), "", "true"])
