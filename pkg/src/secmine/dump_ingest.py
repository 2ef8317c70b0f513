"""Stream-parse a Stack Overflow style Posts XML dump into normalized posts.

Keeps questions (optionally filtered by tag) and the accepted answers of the
retained questions. Resolution is two-pass so row order in the file never
matters: pass one collects questions and their AcceptedAnswerId, pass two
picks up the referenced answer rows.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Optional


class PostKind(str, Enum):
    QUESTION = "Question"
    ACCEPTED_ANSWER = "AcceptedAnswer"


@dataclass(frozen=True)
class Post:
    id: int
    kind: PostKind
    parent_id: Optional[int]
    created_at: datetime
    tags: tuple[str, ...]
    body_text: str
    view_count: Optional[int]          # questions only
    has_accepted_answer: Optional[bool]  # questions only


@dataclass
class DumpStats:
    total_rows: int = 0
    questions_kept: int = 0
    accepted_answers_kept: int = 0
    rows_skipped: int = 0


# code/pre blocks go first (content dropped entirely), then any remaining tag
# is stripped but its inner text kept. An unterminated tag runs to the end.
_PRE_RE = re.compile(r"<pre\b[^>]*>.*?(?:</pre\s*>|$)", re.IGNORECASE | re.DOTALL)
_CODE_RE = re.compile(r"<code\b[^>]*>.*?(?:</code\s*>|$)", re.IGNORECASE | re.DOTALL)
_TAG_RE = re.compile(r"<[^>]*(?:>|$)", re.DOTALL)
_URL_RE = re.compile(r"(?:https?|ftp)://\S+")
_WS_RE = re.compile(r"\s+")

_TAGLIST_RE = re.compile(r"<([^<>]+)>")


def strip_body(body_html: str) -> str:
    """Reduce an HTML body to plain text.

    Drops <code>/<pre> blocks wholesale, strips other tags keeping their
    inner text, removes URLs and collapses whitespace. Idempotent.
    """
    text = _PRE_RE.sub(" ", body_html)
    text = _CODE_RE.sub(" ", text)
    text = _TAG_RE.sub(" ", text)
    text = _URL_RE.sub(" ", text)
    return _WS_RE.sub(" ", text).strip()


def parse_tag_list(raw: str) -> tuple[str, ...]:
    """Decode a Tags attribute like "<iot><ssl>" into lowercase tag names."""
    return tuple(m.group(1).strip().lower() for m in _TAGLIST_RE.finditer(raw))


def _parse_creation_date(raw: str) -> datetime:
    value = raw.strip()
    if value.endswith("Z"):
        value = value[:-1]
    dt = datetime.fromisoformat(value)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def _iter_row_lines(path: Path) -> Iterator[str]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            stripped = line.strip()
            if stripped.startswith("<row"):
                yield stripped


def _row_attrs(line: str) -> Optional[dict]:
    try:
        elem = ET.fromstring(line)
    except ET.ParseError:
        return None
    if elem.tag != "row":
        return None
    return dict(elem.attrib)


def parse_dump(
    path,
    tag_filter: Optional[Iterable[str]] = None,
) -> tuple[Iterator[Post], DumpStats]:
    """Parse a Posts XML file into (stream of Post, DumpStats).

    A question is kept when any of its tags is in `tag_filter` (all tagged
    questions when the filter is None); an answer is kept when its Id equals
    a retained question's AcceptedAnswerId, inheriting that question's tags.
    Malformed or incomplete rows are counted in rows_skipped, never fatal.
    The stats are final once the stream is exhausted.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"dump file not found: {path}")
    filter_set = {t.lower() for t in tag_filter} if tag_filter is not None else None
    stats = DumpStats()

    def generate() -> Iterator[Post]:
        # answer id -> (question id, question tags)
        wanted_answers: dict[int, tuple[int, tuple[str, ...]]] = {}
        for line in _iter_row_lines(path):
            stats.total_rows += 1
            attrs = _row_attrs(line)
            if attrs is None or attrs.get("PostTypeId") != "1":
                continue
            post = _build_question(attrs, filter_set)
            if post is None:
                continue
            stats.questions_kept += 1
            accepted = attrs.get("AcceptedAnswerId")
            if accepted is not None:
                try:
                    wanted_answers[int(accepted)] = (post.id, post.tags)
                except ValueError:
                    pass
            yield post

        for line in _iter_row_lines(path):
            attrs = _row_attrs(line)
            if attrs is None or attrs.get("PostTypeId") != "2":
                continue
            post = _build_answer(attrs, wanted_answers)
            if post is None:
                continue
            stats.accepted_answers_kept += 1
            yield post

        stats.rows_skipped = (
            stats.total_rows - stats.questions_kept - stats.accepted_answers_kept
        )

    return generate(), stats


def _build_question(attrs: dict, filter_set: Optional[set]) -> Optional[Post]:
    try:
        post_id = int(attrs["Id"])
        created = _parse_creation_date(attrs["CreationDate"])
        body = attrs["Body"]
    except (KeyError, ValueError):
        return None
    tags = parse_tag_list(attrs.get("Tags", ""))
    if not 1 <= len(tags) <= 5:
        return None
    if filter_set is not None and not any(t in filter_set for t in tags):
        return None
    try:
        view_count = max(0, int(attrs.get("ViewCount", "0")))
    except ValueError:
        view_count = 0
    return Post(
        id=post_id,
        kind=PostKind.QUESTION,
        parent_id=None,
        created_at=created,
        tags=tags,
        body_text=strip_body(body),
        view_count=view_count,
        has_accepted_answer="AcceptedAnswerId" in attrs,
    )


def _build_answer(
    attrs: dict, wanted: dict[int, tuple[int, tuple[str, ...]]]
) -> Optional[Post]:
    try:
        post_id = int(attrs["Id"])
        created = _parse_creation_date(attrs["CreationDate"])
        body = attrs["Body"]
    except (KeyError, ValueError):
        return None
    if post_id not in wanted:
        return None
    question_id, tags = wanted[post_id]
    return Post(
        id=post_id,
        kind=PostKind.ACCEPTED_ANSWER,
        parent_id=question_id,
        created_at=created,
        tags=tags,
        body_text=strip_body(attrs["Body"]),
        view_count=None,
        has_accepted_answer=None,
    )


def post_to_dict(post: Post) -> dict:
    return {
        "id": post.id,
        "kind": post.kind.value,
        "parent_id": post.parent_id,
        "created_at": post.created_at.isoformat(),
        "tags": list(post.tags),
        "body_text": post.body_text,
        "view_count": post.view_count,
        "has_accepted_answer": post.has_accepted_answer,
    }


def post_from_dict(d: dict) -> Post:
    return Post(
        id=int(d["id"]),
        kind=PostKind(d["kind"]),
        parent_id=d["parent_id"],
        created_at=datetime.fromisoformat(d["created_at"]),
        tags=tuple(d["tags"]),
        body_text=d["body_text"],
        view_count=d["view_count"],
        has_accepted_answer=d["has_accepted_answer"],
    )


def write_posts_jsonl(posts: Iterable[Post], path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for post in posts:
            fh.write(json.dumps(post_to_dict(post), separators=(",", ":")))
            fh.write("\n")
            n += 1
    return n


def read_posts_jsonl(path) -> list[Post]:
    posts = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                posts.append(post_from_dict(json.loads(line)))
    return posts
