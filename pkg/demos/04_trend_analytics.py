#!/usr/bin/env python3
"""Topic evolution and popularity analytics over the mini-dump sentences.

Assignments come from a quick LDA fit; in the real pipeline they are the
dominant topics of classifier-flagged security sentences.
"""

from pathlib import Path

from secmine import corpus, topics, trends
from secmine.dump_ingest import parse_dump
from secmine.tagset import TagSetConfig, compute_tag_stats, select_final_tags

DATA = Path(__file__).resolve().parent.parent / "data"

stream, _ = parse_dump(DATA / "mini_dump_posts.xml")
questions = [p for p in stream if p.kind.value == "Question"]
tag_cfg = TagSetConfig()
selected = select_final_tags(compute_tag_stats(questions, tag_cfg), tag_cfg)
stream, _ = parse_dump(DATA / "mini_dump_posts.xml", tag_filter=selected)
posts = {p.id: p for p in stream}
sentences = [s for p in posts.values() for s in corpus.segment_sentences(p)]

# quick two-topic model over the whole mini corpus
docs = [corpus.tokenize(s, corpus.Profile.TOPICS) for s in sentences]
vocab, filtered, _ = corpus.build_vocab(docs, min_count=2, max_count=500)
encoded = corpus.encode_docs(filtered, vocab)
kept = [i for i, d in enumerate(encoded) if d]
model = topics.fit_lda([encoded[i] for i in kept],
                       topics.LdaConfig(k=2, iterations=120, burn_in=40, seed=11),
                       vocab=vocab)
assignments = {sentences[kept[d]].id: topics.dominant_topic(model, d)
               for d in range(len(kept))}
assigned = [s for s in sentences if s.id in assignments]
print(f"{len(assigned)} sentences assigned to {model.phi.shape[0]} topics")

# --- absolute impact: new sentences per topic per half-year ------------------
buckets = trends.absolute_impact(assignments, assigned)
print("\nabsolute impact (first 8 buckets):")
for b in buckets[:8]:
    print(f"  {b.bucket_start}  topic {b.group}: {b.count}")

# --- relative growth: security share of each month's sentences ---------------
# here "security" = sentences mentioning obviously secure-ish terms
security = [s for s in assigned
            if any(k in s.text.lower() for k in ("ssl", "encrypt", "password", "attack"))]
ratios, omitted = trends.relative_growth(
    trends.monthly_counts(security), trends.monthly_counts(assigned))
print(f"\nrelative growth over {len(ratios)} months "
      f"({len(omitted)} months had no sentences); last 5:")
for month, ratio in ratios[-5:]:
    print(f"  {month}: {ratio:.2f}")

# --- popularity and difficulty per topic --------------------------------------
rows = trends.popularity_difficulty(
    assignments, {s.id: s for s in assigned}, posts,
    topics=range(model.phi.shape[0]))
print("\ntopic popularity/difficulty:")
for r in rows:
    print(f"  topic {r.topic}: {r.question_count} questions, "
          f"avg views {r.avg_view_count:.0f}, "
          f"{100 * r.pct_without_accepted:.0f}% without an accepted answer")

# --- discoverability: would security tags alone have found these? ------------
frac = trends.discoverability(security, posts)
print(f"\n{100 * frac:.0f}% of the security sentences sit in posts carrying "
      f"one of the {len(trends.DEFAULT_SECURITY_TAGS)} security tags")
