"""Mining of security-related sentences from developer-forum data dumps.

Subpackages cover the full batch pipeline: dump ingestion, tag-set
expansion, sentence extraction, TF-IDF linear classification with
cross-validation, evaluation statistics, LDA topic modeling with
coherence-driven model selection, and topic-trend analytics.
"""

from . import classify, corpus, dump_ingest, metrics, sampling, tagset, topics, trends

__version__ = "0.1.0"

__all__ = [
    "classify",
    "corpus",
    "dump_ingest",
    "metrics",
    "sampling",
    "tagset",
    "topics",
    "trends",
    "__version__",
]
