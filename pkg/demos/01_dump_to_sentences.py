#!/usr/bin/env python3
"""Walk through dump ingestion: tag expansion, filtering, sentence extraction.

Runs entirely on the bundled 100-row mini dump.
"""

from pathlib import Path

from secmine import corpus, tagset
from secmine.dump_ingest import parse_dump

DATA = Path(__file__).resolve().parent.parent / "data"
DUMP = DATA / "mini_dump_posts.xml"

# --- 1. expand the seed tags into the final tag set -------------------------
# Every tag co-occurring with a seed tag gets a significance (share of its
# dump-wide questions that sit in the seed-tagged set P) and a relevance
# (share of P it covers); both thresholds must pass.
cfg = tagset.TagSetConfig()  # seeds: iot, arduino, raspberry-pi (+ "*iot*" tags)
stream, _ = parse_dump(DUMP)
questions = [p for p in stream if p.kind.value == "Question"]
stats = tagset.compute_tag_stats(questions, cfg)
selected = tagset.select_final_tags(stats, cfg)

print(f"{len(questions)} questions in the dump, {len(stats)} candidate tags")
print(f"{'tag':<16}{'in_P':>6}{'in_D':>6}{'mu':>8}{'nu':>8}  selected")
for s in stats:
    mark = "yes" if s.tag in selected else "no"
    print(f"{s.tag:<16}{s.count_in_p:>6}{s.count_in_dump:>6}"
          f"{s.significance_mu:>8.3f}{s.relevance_nu:>8.3f}  {mark}")

# --- 2. re-parse keeping only posts matching the final tag set --------------
stream, dump_stats = parse_dump(DUMP, tag_filter=selected)
posts = list(stream)
print(f"\nkept {dump_stats.questions_kept} questions and "
      f"{dump_stats.accepted_answers_kept} accepted answers "
      f"({dump_stats.rows_skipped} of {dump_stats.total_rows} rows skipped)")

# bodies arrive as HTML; code blocks, tags and URLs are already stripped
sample = posts[0]
print(f"\npost {sample.id} [{', '.join(sample.tags)}]:")
print(" ", sample.body_text[:120], "...")

# --- 3. segment into sentences, the unit everything downstream works on -----
sentences = [s for p in posts for s in corpus.segment_sentences(p)]
print(f"\n{len(sentences)} sentences; first three of post {sample.id}:")
for s in corpus.segment_sentences(sample)[:3]:
    print(f"  {s.id}: {s.text}")

# the two preprocessing profiles: classification keeps surface forms,
# topic modeling also strips suffixes
text = "The passwords were hashed before storing"
print(f"\ntokenize({text!r})")
print("  classify profile:", corpus.tokenize_text(text, corpus.Profile.CLASSIFY))
print("  topics profile:  ", corpus.tokenize_text(text, corpus.Profile.TOPICS))
