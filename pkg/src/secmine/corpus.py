"""Sentence segmentation and the two token preprocessing profiles.

The CLASSIFY profile lowercases, splits on non-alphanumerics, folds
diacritics, and drops short tokens and stopwords. The TOPICS profile
additionally applies a deterministic suffix-stripping lemmatizer.
Corpus-level frequency filtering lives in build_vocab.
"""

from __future__ import annotations

import csv
import json
import re
import unicodedata
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from importlib import resources
from typing import Iterable, Optional, Sequence

from .dump_ingest import Post, PostKind


class Profile(Enum):
    CLASSIFY = "classify"
    TOPICS = "topics"


@dataclass(frozen=True)
class Sentence:
    id: str            # "<postId>-<seq>", seq 0-based within the post
    post_id: int
    text: str
    created_at: datetime
    tags: tuple[str, ...]
    is_question: bool


@dataclass(frozen=True)
class TokenizedDoc:
    sentence_id: str
    tokens: tuple[str, ...]


# ---------------------------------------------------------------- segmentation

# tokens that end with '.' but do not close a sentence; abbreviations with
# an internal period (e.g., i.e.) are already caught by the digit/period guard
_ABBREVIATIONS = {
    "etc.", "vs.", "cf.", "al.", "mr.", "mrs.", "ms.", "dr.", "prof.",
    "fig.", "st.", "no.", "approx.", "resp.", "ca.",
}
_OPEN_QUOTES = "\"'“‘«"
_TERMINALS = ".!?"


def _starts_sentence(ch: str) -> bool:
    return ch.isupper() or ch.isdigit() or ch in _OPEN_QUOTES


def _token_ending_at(text: str, idx: int) -> str:
    start = idx
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start : idx + 1]


def _period_splits(text: str, idx: int) -> bool:
    token = _token_ending_at(text, idx)
    head = token[:-1]
    # periods attached to version-like tokens (1.0.2) never split
    if any(c.isdigit() or c == "." for c in head):
        return False
    bare = token.lstrip("(" + _OPEN_QUOTES).lower()
    if bare in _ABBREVIATIONS:
        return False
    stripped = bare[:-1]
    if len(stripped) == 1 and stripped.isalpha():  # single-letter initial
        return False
    return True


def segment_text(text: str) -> list[str]:
    """Split plain text into sentences with a rule-based boundary detector."""
    sentences = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in _TERMINALS and i + 1 < n and text[i + 1].isspace():
            j = i + 1
            while j < n and text[j].isspace():
                j += 1
            if j < n and _starts_sentence(text[j]):
                if ch != "." or _period_splits(text, i):
                    fragment = text[start : i + 1].strip()
                    if fragment:
                        sentences.append(fragment)
                    start = j
                    i = j
                    continue
        i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def segment_sentences(post: Post) -> list[Sentence]:
    out = []
    for seq, fragment in enumerate(segment_text(post.body_text)):
        out.append(
            Sentence(
                id=f"{post.id}-{seq}",
                post_id=post.id,
                text=fragment,
                created_at=post.created_at,
                tags=post.tags,
                is_question=post.kind is PostKind.QUESTION,
            )
        )
    return out


# --------------------------------------------------------------- tokenization

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# roots the suffix rules would mangle; value overrides the stripped form
_LEMMA_EXCEPTIONS = {
    "series": "series",
    "species": "species",
    "https": "https",
    "nodejs": "nodejs",
    "alias": "alias",
    "bias": "bias",
    "canvas": "canvas",
    "kubernetes": "kubernetes",
    "cookies": "cookie",
    "embed": "embed",
    "hundred": "hundred",
}


def load_stopwords(path=None) -> frozenset:
    if path is None:
        data = resources.files("secmine.data").joinpath("stopwords_en.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            data = fh.read()
    return frozenset(w.strip() for w in data.split() if w.strip())


_DEFAULT_STOPWORDS: Optional[frozenset] = None


def default_stopwords() -> frozenset:
    global _DEFAULT_STOPWORDS
    if _DEFAULT_STOPWORDS is None:
        _DEFAULT_STOPWORDS = load_stopwords()
    return _DEFAULT_STOPWORDS


def _undouble(stem: str) -> str:
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in "aeiouslz":
        return stem[:-1]
    return stem


def lemmatize(word: str) -> str:
    """Deterministic suffix stripper: plural -s/-es, -ing, -ed, -ies -> y.

    Never returns a form shorter than 3 characters; when a rule would,
    the word is kept as-is.
    """
    if word in _LEMMA_EXCEPTIONS:
        return _LEMMA_EXCEPTIONS[word]

    if word.endswith("ies") and len(word) >= 5:
        return word[:-3] + "y"
    if word.endswith("sses") and len(word) >= 6:
        return word[:-2]
    if word.endswith(("ches", "shes", "xes")) and len(word) >= 5:
        return word[:-2]
    if word.endswith("ss"):
        return word
    if word.endswith("s") and not word.endswith(("us", "is")) and len(word) >= 4:
        return word[:-1]

    if word.endswith("ing") and len(word) >= 7:
        stem = _undouble(word[:-3])
        if len(stem) >= 3:
            return stem
    if word.endswith("ed") and not word.endswith("eed") and len(word) >= 5:
        stem = _undouble(word[:-2])
        if len(stem) >= 3:
            return stem
    return word


def _fold_ascii(token: str) -> str:
    decomposed = unicodedata.normalize("NFKD", token)
    return decomposed.encode("ascii", "ignore").decode("ascii")


def tokenize_text(
    text: str,
    profile: Profile,
    stopwords: Optional[frozenset] = None,
    min_len: int = 3,
) -> tuple[str, ...]:
    if stopwords is None:
        stopwords = default_stopwords()
    tokens = []
    for raw in _TOKEN_RE.findall(text.lower()):
        tok = _fold_ascii(raw)
        if len(tok) < min_len or tok in stopwords:
            continue
        if profile is Profile.TOPICS:
            tok = lemmatize(tok)
        tokens.append(tok)
    return tuple(tokens)


def tokenize(
    sentence: Sentence,
    profile: Profile,
    stopwords: Optional[frozenset] = None,
    min_len: int = 3,
) -> TokenizedDoc:
    return TokenizedDoc(
        sentence_id=sentence.id,
        tokens=tokenize_text(sentence.text, profile, stopwords, min_len),
    )


# ----------------------------------------------------------------- vocabulary

def build_vocab(
    docs: Iterable[TokenizedDoc],
    min_count: int = 20,
    max_count: int = 2000,
) -> tuple[dict[str, int], list[TokenizedDoc], dict[str, int]]:
    """Corpus-frequency filter: keep terms with count in [min_count, max_count].

    Returns (term -> dense index in lexicographic order, docs with dropped
    terms removed, kept-term frequency table).
    """
    docs = list(docs)
    counts: dict[str, int] = {}
    for doc in docs:
        for tok in doc.tokens:
            counts[tok] = counts.get(tok, 0) + 1

    kept = {t: c for t, c in counts.items() if min_count <= c <= max_count}
    if not kept:
        raise ValueError("all terms filtered: vocabulary is empty")
    vocab = {t: i for i, t in enumerate(sorted(kept))}

    filtered = [
        TokenizedDoc(
            sentence_id=doc.sentence_id,
            tokens=tuple(t for t in doc.tokens if t in vocab),
        )
        for doc in docs
    ]
    return vocab, filtered, kept


def encode_docs(docs: Sequence[TokenizedDoc], vocab: dict[str, int]) -> list[list[int]]:
    return [[vocab[t] for t in doc.tokens if t in vocab] for doc in docs]


# -------------------------------------------------------------------- file io

def sentence_to_dict(s: Sentence) -> dict:
    return {
        "id": s.id,
        "post_id": s.post_id,
        "text": s.text,
        "created_at": s.created_at.isoformat(),
        "tags": list(s.tags),
        "is_question": s.is_question,
    }


def sentence_from_dict(d: dict) -> Sentence:
    return Sentence(
        id=d["id"],
        post_id=int(d["post_id"]),
        text=d["text"],
        created_at=datetime.fromisoformat(d["created_at"]),
        tags=tuple(d["tags"]),
        is_question=bool(d["is_question"]),
    )


def write_sentences_jsonl(sentences: Iterable[Sentence], path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for s in sentences:
            fh.write(json.dumps(sentence_to_dict(s), separators=(",", ":")))
            fh.write("\n")
            n += 1
    return n


def read_sentences_jsonl(path) -> list[Sentence]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(sentence_from_dict(json.loads(line)))
    return out


def write_vocab_tsv(vocab: dict[str, int], counts: dict[str, int], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        for term in sorted(vocab, key=vocab.get):
            writer.writerow([term, vocab[term], counts[term]])


def read_vocab_tsv(path) -> tuple[dict[str, int], dict[str, int]]:
    vocab: dict[str, int] = {}
    counts: dict[str, int] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh, delimiter="\t"):
            vocab[row[0]] = int(row[1])
            counts[row[0]] = int(row[2])
    return vocab, counts
