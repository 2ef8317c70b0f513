#!/usr/bin/env python3
"""Generate the bundled mini dump fixture (deterministic).

Produces data/mini_dump_posts.xml with exactly 100 rows:
60 tagged questions, 25 accepted answers, 15 rows that must be skipped
(10 non-accepted answers, 3 tag-wiki rows, 1 malformed row, 1 row missing
its Body attribute), plus data/mini_labels.csv with keyword-derived gold
labels over the sentences of the seed-tagged subset.
"""

import random
import sys
from pathlib import Path
from xml.sax.saxutils import quoteattr

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from secmine import corpus, tagset  # noqa: E402
from secmine.dump_ingest import parse_dump  # noqa: E402

SEED_TAGS = ["iot", "arduino", "raspberry-pi"]
CO_TAGS = ["ssl", "security", "encryption", "authentication", "mqtt", "sensors", "azure-iot-hub"]
OFF_TAGS = ["python", "networking", "linux", "javascript"]

SECURITY_SNIPPETS = [
    "I want to encrypt the payload before sending it to the broker.",
    "The TLS handshake fails with a certificate error. How can I fix the chain?",
    "Is it safe to store the password in plain text on the device?",
    "An attacker could intercept the traffic, so we enabled SSL everywhere.",
    "Authentication against the hub uses a shared access signature token.",
    "We hash the credentials with a per-device salt before persisting them.",
    "The firmware update channel must be signed to prevent tampering.",
    "How do I rotate the API keys without bricking deployed sensors?",
]
PLAIN_SNIPPETS = [
    "The LED blinks twice and then the board resets.",
    "I am reading temperature values from the sensor every five seconds.",
    "The loop runs fine on my laptop but hangs on the device.",
    "Which library should I use to parse the JSON response?",
    "My breadboard wiring follows the tutorial, e.g. pin 7 to the relay.",
    "After the update to version 1.0.2 the serial monitor shows garbage.",
    "The motor driver gets warm but works.",
    "Deployment takes around ten minutes per device.",
    "It compiles without warnings under gcc 9.",
]
HTML_DECOR = [
    "<p>{s1}</p><p>{s2}</p>",
    "<p>{s1}</p><pre>int main() {{ return 0; }}</pre><p>{s2}</p>",
    "<p>{s1} See https://example.org/docs?page=2 for details. {s2}</p>",
    "<p>{s1}</p><code>curl -k https://broker.local</code><p>{s2}</p>",
    "<p><b>{s1}</b> {s2}</p>",
]


def make_body(rng):
    n_sec = rng.choice([0, 0, 1, 1, 2])
    parts = rng.sample(SECURITY_SNIPPETS, n_sec) + rng.sample(PLAIN_SNIPPETS, 2 - min(n_sec, 2) + 1)
    rng.shuffle(parts)
    decor = rng.choice(HTML_DECOR)
    s1 = parts[0]
    s2 = " ".join(parts[1:])
    return decor.format(s1=s1, s2=s2)


def main():
    rng = random.Random(20190901)
    rows = []

    questions = []
    for i in range(60):
        qid = 1001 + i
        year = 2015 + (i % 5)
        month = 1 + (i * 5) % 12
        day = 1 + (i * 3) % 27
        created = f"{year:04d}-{month:02d}-{day:02d}T{(8 + i) % 24:02d}:15:{i % 60:02d}.{(i * 37) % 1000:03d}"
        if i < 48:
            tags = [rng.choice(SEED_TAGS)]
            tags += rng.sample(CO_TAGS, rng.choice([1, 2]))
            if i % 4 == 0 and i < 20:  # python co-occurs with seeds on 5 questions
                tags.append("python")
        else:
            # 12 seedless questions keep "python" under the mu threshold (5/17)
            tags = ["python", OFF_TAGS[1 + i % 3]]
        tags = list(dict.fromkeys(tags))
        view_count = 40 + (i * 97) % 900
        accepted = 5001 + i if i < 25 else None
        if i in (30, 31):  # accepted answer id pointing at a deleted answer
            accepted = 9900 + i
        questions.append((qid, created, tags, accepted))
        attrs = [
            ("Id", str(qid)),
            ("PostTypeId", "1"),
            ("CreationDate", created),
            ("ViewCount", str(view_count)),
            ("Body", make_body(rng)),
            ("Tags", "".join(f"<{t}>" for t in tags)),
        ]
        if accepted is not None:
            attrs.insert(3, ("AcceptedAnswerId", str(accepted)))
        rows.append(attrs)

    for i in range(25):
        qid, q_created, _, _ = questions[i]
        attrs = [
            ("Id", str(5001 + i)),
            ("PostTypeId", "2"),
            ("ParentId", str(qid)),
            ("CreationDate", q_created[:8] + f"{min(28, int(q_created[8:10]) + 1):02d}" + q_created[10:]),
            ("Body", make_body(rng)),
        ]
        rows.append(attrs)

    for i in range(10):  # non-accepted answers
        qid = questions[(i * 7) % 60][0]
        attrs = [
            ("Id", str(6001 + i)),
            ("PostTypeId", "2"),
            ("ParentId", str(qid)),
            ("CreationDate", f"2018-0{1 + i % 9}-15T12:00:00.000"),
            ("Body", make_body(rng)),
        ]
        rows.append(attrs)
    for i in range(3):  # tag wiki rows
        rows.append(
            [
                ("Id", str(7001 + i)),
                ("PostTypeId", "4"),
                ("CreationDate", "2017-03-01T00:00:00.000"),
                ("Body", "<p>Tag wiki text.</p>"),
            ]
        )

    rng.shuffle(rows)
    lines = ['<?xml version="1.0" encoding="utf-8"?>', "<posts>"]
    for attrs in rows:
        parts = " ".join(f"{k}={quoteattr(v)}" for k, v in attrs)
        lines.append(f"  <row {parts} />")
    # one malformed row (raw '<' inside an attribute) and one row missing Body
    lines.append('  <row Id="8001" PostTypeId="1" CreationDate="2018-01-01T00:00:00.000" Body="broken <p> body" Tags="&lt;iot&gt;" />')
    lines.append('  <row Id="8002" PostTypeId="1" CreationDate="2018-01-02T00:00:00.000" Tags="&lt;iot&gt;" />')
    lines.append("</posts>")

    data_dir = ROOT / "data"
    data_dir.mkdir(exist_ok=True)
    dump_path = data_dir / "mini_dump_posts.xml"
    dump_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    # gold labels over the seed-tag-filtered sentence set, by keyword rule
    cfg = tagset.TagSetConfig()
    stream, _ = parse_dump(dump_path)
    qs = [p for p in stream if p.kind.value == "Question"]
    stats = tagset.compute_tag_stats(qs, cfg)
    selected = tagset.select_final_tags(stats, cfg)
    stream, stats2 = parse_dump(dump_path, tag_filter=selected)
    posts = list(stream)
    keywords = ("password", "encrypt", "ssl", "tls", "attack", "secure", "auth", "hash", "sign", "credential", "salt", "key")
    lab_lines = ["id,label"]
    n_pos = 0
    for post in posts:
        for s in corpus.segment_sentences(post):
            label = int(any(k in s.text.lower() for k in keywords))
            n_pos += label
            lab_lines.append(f"{s.id},{label}")
    (data_dir / "mini_labels.csv").write_text("\n".join(lab_lines) + "\n", encoding="utf-8")

    stream, stats3 = parse_dump(dump_path)
    list(stream)
    print("dump rows:", stats3.total_rows, "q:", stats3.questions_kept,
          "a:", stats3.accepted_answers_kept, "skipped:", stats3.rows_skipped)
    print("selected tags:", selected)
    print("labeled sentences:", len(lab_lines) - 1, "positives:", n_pos)


if __name__ == "__main__":
    main()
