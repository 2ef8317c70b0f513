#!/usr/bin/env python3
"""Train and evaluate the two baseline classifiers on the bundled labels.

Shows TF-IDF featurization, stratified cross-validated grid search, and the
full metric set including a ROC-derived AUC.
"""

from pathlib import Path

from secmine import classify, corpus, metrics
from secmine.dump_ingest import parse_dump

DATA = Path(__file__).resolve().parent.parent / "data"

# assemble the labeled sentence set shipped with the repo
from secmine.tagset import TagSetConfig, compute_tag_stats, select_final_tags

stream, _ = parse_dump(DATA / "mini_dump_posts.xml")
questions = [p for p in stream if p.kind.value == "Question"]
selected = select_final_tags(compute_tag_stats(questions, TagSetConfig()), TagSetConfig())
stream, _ = parse_dump(DATA / "mini_dump_posts.xml", tag_filter=selected)
sentences = {s.id: s for p in stream for s in corpus.segment_sentences(p)}
labels = classify.read_labels_csv(DATA / "mini_labels.csv")

ids = sorted(labels)
docs = [corpus.tokenize(sentences[i], corpus.Profile.CLASSIFY) for i in ids]
y = [labels[i] for i in ids]
print(f"{len(ids)} labeled sentences, {sum(y)} positive ({100 * sum(y) / len(y):.1f}%)")

# --- cross-validated grid search over a small lattice ------------------------
grid = [
    {"lam": 1e-3, "lr": 0.5, "epochs": 200},
    {"lam": 1e-2, "lr": 0.5, "epochs": 200},
]
for kind in (classify.ModelKind.LOGIT, classify.ModelKind.LINEAR_SVM):
    result = classify.cross_validate(kind, docs, y, grid=grid, k=5, seed=42)
    m = result.mean_report
    print(f"\n{kind.value}: chosen {result.chosen_hyperparams}")
    print(f"  mean of 5 folds: P={m.precision:.3f} R={m.recall:.3f} "
          f"F1={m.f1:.3f} Acc={m.accuracy:.3f} MCC={m.mcc:.3f} AUC={m.auc:.3f}")

# --- fit a final model on everything and inspect the strongest features ------
tfidf = classify.fit_tfidf(docs)
X = classify.transform_matrix(tfidf, docs)
model = classify.train(classify.ModelKind.LOGIT, X, y, grid[0], seed=42)
by_weight = sorted(tfidf.vocabulary, key=lambda t: -model.weights[tfidf.vocabulary[t]])
print("\nmost security-indicative terms:", ", ".join(by_weight[:8]))

# held-in confusion, just to show the report plumbing
pred = classify.predict_labels(model, X)
report = metrics.metrics_from_confusion(metrics.confusion_from_labels(pred.tolist(), y))
report.auc = metrics.auc(classify.decision_scores(model, X).tolist(), y)
print(f"training-set report: {report.to_dict()}")
