import math

import numpy as np
import pytest

from conftest import planted_signal_docs
from secmine.classify import (
    ModelKind,
    cross_validate,
    decision_scores,
    evaluate_fold,
    fit_tfidf,
    iter_splits,
    load_model,
    load_predictions,
    logistic_loss_and_grad,
    predict_probs,
    read_labels_csv,
    save_model,
    stratified_folds,
    train,
    transform,
    transform_matrix,
    write_labels_csv,
    write_predictions,
)
from secmine.corpus import TokenizedDoc

D1 = TokenizedDoc("d1", ("secure", "key"))
D2 = TokenizedDoc("d2", ("key", "setup"))


class TestTfidf:
    def test_idf_formula(self):
        model = fit_tfidf([D1, D2])
        assert model.idf[model.vocabulary["key"]] == math.log(3 / 3) + 1
        assert model.idf[model.vocabulary["secure"]] == pytest.approx(math.log(3 / 2) + 1)

    def test_empty_doc_transforms_to_zero_vector(self):
        model = fit_tfidf([D1, D2])
        vec = transform(model, TokenizedDoc("e", ()))
        assert vec.nnz == 0

    def test_transform_nonzero_at_doc_terms_with_unit_norm(self):
        model = fit_tfidf([D1, D2])
        vec = transform(model, D1).toarray().ravel()
        nonzero = {i for i in range(len(vec)) if vec[i] != 0}
        assert nonzero == {model.vocabulary["secure"], model.vocabulary["key"]}
        assert np.linalg.norm(vec) == pytest.approx(1.0)

    def test_unseen_terms_ignored(self):
        model = fit_tfidf([D1, D2])
        vec = transform(model, TokenizedDoc("x", ("unseen", "key")))
        assert vec.nnz == 1

    def test_count_scaling_invariance(self):
        model = fit_tfidf([D1, D2])
        base = transform(model, TokenizedDoc("a", ("secure", "key"))).toarray()
        tripled = transform(
            model, TokenizedDoc("b", ("secure",) * 3 + ("key",) * 3)
        ).toarray()
        assert np.allclose(base, tripled, atol=1e-12)

    def test_empty_corpus_errors(self):
        with pytest.raises(ValueError):
            fit_tfidf([])


class TestTrain:
    def test_separable_points(self):
        X = np.array([[1.0, 0.0], [0.0, 1.0]])
        for kind in ModelKind:
            model = train(kind, X, [1, 0], {"lam": 1e-4, "lr": 0.5, "epochs": 200}, seed=1)
            pred = (predict_probs(model, X) >= 0.5).astype(int)
            assert pred.tolist() == [1, 0]

    def test_all_zero_features(self):
        X = np.zeros((4, 3))
        model = train(ModelKind.LOGIT, X, [1, 1, 1, 0], {"epochs": 500}, seed=0)
        assert np.all(model.weights == 0)
        expected = 1.0 / (1.0 + math.exp(-model.bias))
        assert predict_probs(model, X)[0] == pytest.approx(expected)
        assert expected > 0.5  # driven by the 3:1 class prior

    def test_single_class_errors(self):
        X = np.eye(3)
        with pytest.raises(ValueError, match="degenerate training set"):
            train(ModelKind.LOGIT, X, [1, 1, 1])

    def test_deterministic_weights(self):
        docs, labels = planted_signal_docs(seed=2, n=60)
        tfidf = fit_tfidf(docs)
        X = transform_matrix(tfidf, docs)
        for kind in ModelKind:
            a = train(kind, X, labels, {"lam": 1e-3, "lr": 0.3, "epochs": 50}, seed=9)
            b = train(kind, X, labels, {"lam": 1e-3, "lr": 0.3, "epochs": 50}, seed=9)
            assert np.array_equal(a.weights, b.weights)
            assert a.bias == b.bias

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(123)
        for _ in range(10):
            n, d = int(rng.integers(3, 12)), int(rng.integers(2, 6))
            X = rng.normal(size=(n, d))
            y = rng.integers(0, 2, n).astype(float)
            w = rng.normal(size=d)
            b = float(rng.normal())
            lam = float(rng.uniform(1e-4, 1e-1))
            _, grad_w, grad_b = logistic_loss_and_grad(w, b, X, y, lam)
            eps = 1e-6
            for j in range(d):
                wp, wm = w.copy(), w.copy()
                wp[j] += eps
                wm[j] -= eps
                num = (logistic_loss_and_grad(wp, b, X, y, lam)[0]
                       - logistic_loss_and_grad(wm, b, X, y, lam)[0]) / (2 * eps)
                assert abs(num - grad_w[j]) / max(1.0, abs(num)) < 1e-5
            num_b = (logistic_loss_and_grad(w, b + eps, X, y, lam)[0]
                     - logistic_loss_and_grad(w, b - eps, X, y, lam)[0]) / (2 * eps)
            assert abs(num_b - grad_b) / max(1.0, abs(num_b)) < 1e-5


class TestStratifiedFolds:
    def test_pigeonhole_example(self):
        y = [1, 1, 1, 0, 0, 0, 0, 0, 0, 0]
        plan = stratified_folds(y, k=5, seed=0)
        pos_counts = sorted(sum(y[i] for i in fold) for fold in plan.folds)
        assert pos_counts == [0, 0, 1, 1, 1]

    def test_determinism(self):
        y = [0, 1] * 25
        a = stratified_folds(y, k=5, seed=42)
        b = stratified_folds(y, k=5, seed=42)
        assert a.folds == b.folds
        c = stratified_folds(y, k=5, seed=43)
        assert a.folds != c.folds

    def test_17_positives_over_10_folds(self):
        rng = np.random.default_rng(4)
        y = np.zeros(100, dtype=int)
        y[rng.permutation(100)[:17]] = 1
        plan = stratified_folds(y.tolist(), k=10, seed=1)
        pos_counts = [sum(y[i] for i in fold) for fold in plan.folds]
        assert all(c in (1, 2) for c in pos_counts)
        assert sum(pos_counts) == 17
        flat = sorted(i for fold in plan.folds for i in fold)
        assert flat == list(range(100))

    def test_k_bounds(self):
        with pytest.raises(ValueError):
            stratified_folds([0, 1, 0], k=1)
        with pytest.raises(ValueError):
            stratified_folds([0, 1, 0], k=4)

    def test_iter_splits_partition(self):
        y = [0, 1] * 10
        plan = stratified_folds(y, k=4, seed=3)
        for train_idx, test_idx in iter_splits(plan, len(y)):
            assert sorted(train_idx + test_idx) == list(range(len(y)))
            assert not set(train_idx) & set(test_idx)


class TestCrossValidate:
    def test_grid_of_one_equals_plain_kfold(self):
        docs, labels = planted_signal_docs(seed=8, n=60)
        hp = {"lam": 1e-3, "lr": 0.5, "epochs": 60}
        res = cross_validate(ModelKind.LOGIT, docs, labels, grid=[hp], k=5, seed=7)
        assert res.chosen_hyperparams == hp
        plan = stratified_folds(labels, 5, 7)
        direct = [
            evaluate_fold(ModelKind.LOGIT, docs, labels, tr, te, hp, 7)
            for tr, te in iter_splits(plan, len(labels))
        ]
        assert [r.f1 for r in res.fold_reports] == [r.f1 for r in direct]

    def test_planted_signal_high_f1(self):
        docs, labels = planted_signal_docs(seed=5, n=200)
        grid = [{"lam": 1e-2, "lr": 0.5, "epochs": 300}]
        res = cross_validate(ModelKind.LOGIT, docs, labels, grid=grid, k=10, seed=42)
        assert res.mean_report.f1 >= 0.95

    def test_tie_breaks_to_smaller_tuple(self):
        docs, labels = planted_signal_docs(seed=1, n=40)
        hp_hi = {"lam": 1e-2, "lr": 0.5, "epochs": 50}
        hp_lo = {"lam": 1e-3, "lr": 0.5, "epochs": 50}
        res = cross_validate(
            ModelKind.LOGIT, docs, labels, grid=[hp_hi, hp_lo, hp_lo], k=4, seed=2
        )
        f1s = [f1 for _, f1 in res.grid_results]
        if f1s[0] == f1s[1]:
            assert res.chosen_hyperparams == hp_lo

    def test_no_leakage_from_test_only_terms(self):
        docs, labels = planted_signal_docs(seed=3, n=40)
        plan = stratified_folds(labels, 4, 5)
        train_idx, test_idx = next(iter(iter_splits(plan, len(labels))))
        hp = {"lam": 1e-3, "lr": 0.5, "epochs": 40}
        base = evaluate_fold(ModelKind.LOGIT, docs, labels, train_idx, test_idx, hp, 5)
        poisoned = list(docs)
        j = test_idx[0]
        poisoned[j] = TokenizedDoc(docs[j].sentence_id, docs[j].tokens + ("zzzleak",) * 5)
        after = evaluate_fold(ModelKind.LOGIT, poisoned, labels, train_idx, test_idx, hp, 5)
        assert base == after

    def test_fold_vocab_subset_of_training_terms(self):
        docs, labels = planted_signal_docs(seed=6, n=30)
        plan = stratified_folds(labels, 3, 1)
        for train_idx, _ in iter_splits(plan, len(labels)):
            tfidf = fit_tfidf([docs[i] for i in train_idx])
            train_terms = {t for i in train_idx for t in docs[i].tokens}
            assert set(tfidf.vocabulary) <= train_terms


class TestPredictionsFile:
    def test_threshold_and_labels(self, tmp_path):
        path = tmp_path / "p.jsonl"
        write_predictions([("12-0", 0.91), ("12-1", 0.5), ("12-2", 0.49)], path)
        preds = load_predictions(path)
        assert [p.label for p in preds] == [1, 1, 0]

    def test_duplicate_id_errors(self, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_text('{"sentence_id": "a", "prob": 0.2}\n{"sentence_id": "a", "prob": 0.3}\n')
        with pytest.raises(ValueError, match="duplicate"):
            load_predictions(path)

    def test_out_of_range_prob_errors(self, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_text('{"sentence_id": "a", "prob": 1.2}\n')
        with pytest.raises(ValueError, match="outside"):
            load_predictions(path)

    def test_missing_file_fatal(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_predictions(tmp_path / "nope.jsonl")

    def test_labels_csv_roundtrip(self, tmp_path):
        labels = {"1-0": 1, "1-1": 0, "2-0": 1}
        path = tmp_path / "labels.csv"
        write_labels_csv(labels, path)
        assert read_labels_csv(path) == labels


class TestModelFile:
    def test_roundtrip_preserves_predictions(self, tmp_path):
        docs, labels = planted_signal_docs(seed=11, n=50)
        tfidf = fit_tfidf(docs)
        X = transform_matrix(tfidf, docs)
        model = train(ModelKind.LINEAR_SVM, X, labels, {"lam": 1e-3, "lr": 0.2, "epochs": 30}, 3)
        path = tmp_path / "model.json"
        save_model(tfidf, model, path)
        tfidf2, model2 = load_model(path)
        assert np.array_equal(
            decision_scores(model, transform_matrix(tfidf, docs)),
            decision_scores(model2, transform_matrix(tfidf2, docs)),
        )
