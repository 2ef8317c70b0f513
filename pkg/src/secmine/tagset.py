"""Expand a seed tag set into the final domain tag set.

For each candidate tag t (any tag co-occurring with a seed tag on a
question), two ratios are computed over the seed-tagged question set P and
the whole dump D:

    significance mu(t) = #questions with t in P / #questions with t in D
    relevance    nu(t) = #questions with t in P / |P|

Tags passing both thresholds (inclusive) are selected, seeds always.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .dump_ingest import Post, PostKind

DEFAULT_SEED_TAGS = ("iot", "arduino", "raspberry-pi")


@dataclass(frozen=True)
class TagStats:
    tag: str
    count_in_p: int
    count_in_dump: int
    significance_mu: float
    relevance_nu: float


@dataclass
class TagSetConfig:
    seed_tags: tuple[str, ...] = DEFAULT_SEED_TAGS
    # any observed tag containing this substring also counts as a seed
    seed_substring: Optional[str] = "iot"
    mu_threshold: float = 0.3
    nu_threshold: float = 0.001

    def __post_init__(self):
        if not self.seed_tags:
            raise ValueError("seed_tags must be non-empty")
        for name in ("mu_threshold", "nu_threshold"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")


def effective_seed_tags(cfg: TagSetConfig, observed_tags: Iterable[str]) -> set[str]:
    seeds = {t.lower() for t in cfg.seed_tags}
    if cfg.seed_substring:
        needle = cfg.seed_substring.lower()
        seeds.update(t for t in observed_tags if needle in t.lower())
    return seeds


def compute_tag_stats(
    questions: Iterable[Post],
    cfg: TagSetConfig,
    dump_tag_counts: Optional[Mapping[str, int]] = None,
) -> list[TagStats]:
    """One TagStats per distinct tag co-occurring with a seed tag.

    `questions` is a full-dump question pass; when `dump_tag_counts` is
    given it overrides the denominator table (then `questions` may already
    be restricted to the seed-tagged set).
    """
    tag_lists: list[tuple[str, ...]] = []
    for post in questions:
        if post.kind is not PostKind.QUESTION:
            raise ValueError("compute_tag_stats expects question posts only")
        tag_lists.append(post.tags)

    observed = {t for tags in tag_lists for t in tags}
    if dump_tag_counts is not None:
        observed.update(dump_tag_counts)
    seeds = effective_seed_tags(cfg, observed)

    p_lists = [tags for tags in tag_lists if any(t in seeds for t in tags)]
    if not p_lists:
        raise ValueError("seed tags matched no questions")
    p_size = len(p_lists)

    count_in_p: dict[str, int] = {}
    for tags in p_lists:
        for t in set(tags):
            count_in_p[t] = count_in_p.get(t, 0) + 1

    if dump_tag_counts is None:
        dump_counts: dict[str, int] = {}
        for tags in tag_lists:
            for t in set(tags):
                dump_counts[t] = dump_counts.get(t, 0) + 1
    else:
        dump_counts = dict(dump_tag_counts)

    stats = []
    for tag in sorted(count_in_p):
        in_p = count_in_p[tag]
        in_dump = dump_counts.get(tag, 0)
        if in_dump < in_p:
            raise ValueError(
                f"dump count for tag '{tag}' ({in_dump}) is smaller than its "
                f"seed-set count ({in_p}); the supplied table is inconsistent"
            )
        stats.append(
            TagStats(
                tag=tag,
                count_in_p=in_p,
                count_in_dump=in_dump,
                significance_mu=in_p / in_dump,
                relevance_nu=in_p / p_size,
            )
        )
    return stats


def select_final_tags(stats: list[TagStats], cfg: TagSetConfig) -> list[str]:
    """Tags meeting both thresholds (>=), plus all seed tags, sorted."""
    seeds = effective_seed_tags(cfg, (s.tag for s in stats))
    chosen = set(seeds)
    for s in stats:
        if s.significance_mu >= cfg.mu_threshold and s.relevance_nu >= cfg.nu_threshold:
            chosen.add(s.tag)
    return sorted(chosen)


def write_tag_stats_csv(stats: list[TagStats], selected: Iterable[str], path) -> None:
    """Emit the stats table; selected seed tags unseen in the data get 0-count rows
    so the file alone reconstructs the final tag set."""
    chosen = set(selected)
    by_tag = {s.tag: s for s in stats}
    extra = [
        TagStats(tag=t, count_in_p=0, count_in_dump=0, significance_mu=0.0, relevance_nu=0.0)
        for t in sorted(chosen - set(by_tag))
    ]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["tag", "count_in_p", "count_in_dump", "mu", "nu", "selected"])
        for s in sorted(list(stats) + extra, key=lambda s: s.tag):
            writer.writerow(
                [
                    s.tag,
                    s.count_in_p,
                    s.count_in_dump,
                    repr(s.significance_mu),
                    repr(s.relevance_nu),
                    "true" if s.tag in chosen else "false",
                ]
            )


def read_selected_tags_csv(path) -> list[str]:
    tags = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            if row["selected"] == "true":
                tags.append(row["tag"])
    return sorted(tags)
