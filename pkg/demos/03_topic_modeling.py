#!/usr/bin/env python3
"""LDA over a planted corpus: coherence-driven K selection, then topic inspection.

Uses a synthetic three-family corpus so the "right" answer is known; swap in
real sentences (see demo 01) for actual mining.
"""

import numpy as np

from secmine import topics

# --- build a corpus with three disjoint word families ------------------------
rng = np.random.default_rng(7)
families = {
    0: [f"crypto{i}" for i in range(12)],   # encryption-flavored vocabulary
    1: [f"network{i}" for i in range(12)],
    2: [f"hardware{i}" for i in range(12)],
}
vocab = {t: i for i, t in enumerate(sorted(w for ws in families.values() for w in ws))}
docs = []
truth = []
for d in range(450):
    fam = d % 3
    words = rng.choice(families[fam], size=int(rng.integers(8, 20)))
    docs.append([vocab[w] for w in words])
    truth.append(fam)
print(f"{len(docs)} documents over a {len(vocab)}-term vocabulary, 3 planted topics")

# --- sweep K and keep the most coherent model --------------------------------
# alpha defaults to 50/K, beta to 0.01; same seed for every candidate K
k_star, scores, model = topics.select_k(
    docs, k_grid=[2, 3, 5], seed=3, iterations=200, burn_in=60, vocab=vocab,
)
print("\ncoherence by K (c_v, higher is better):")
for s in scores:
    marker = "  <- selected" if s.k == k_star else ""
    print(f"  K={s.k}: {s.value:.4f}{marker}")

# --- inspect the selected model ----------------------------------------------
print(f"\ntop words of the K={k_star} model:")
for t in range(k_star):
    words = ", ".join(w for w, _ in topics.top_words(model, t, 6))
    print(f"  topic {t}: {words}")

assign = [topics.dominant_topic(model, d) for d in range(len(docs))]
from collections import Counter

purity = 0
for t in set(assign):
    purity += Counter(f for a, f in zip(assign, truth) if a == t).most_common(1)[0][1]
print(f"\ndominant-topic purity vs planted families: {purity / len(docs):.3f}")
print("theta row sums (should all be 1):",
      np.unique(np.round(model.theta.sum(axis=1), 9)))
