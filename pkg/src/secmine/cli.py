"""Pipeline orchestration: subcommands over the stage artifacts.

Every stage writes its declared output files plus a `<stage>.manifest.json`
recording inputs, resolved parameters, a config hash, seeds, library
versions and wall time. Stage outputs are deterministic under fixed seeds;
manifests are not (they carry wall time).

Config file: INI sections mirroring the stages; command-line flags
override config values. All randomized stages take their seed from
config/flags only, never from OS entropy.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__, classify, corpus, metrics, sampling, tagset, topics, trends
from .dump_ingest import parse_dump, read_posts_jsonl, write_posts_jsonl

# which stage produces an input file, for actionable missing-artifact errors
_PRODUCED_BY = {
    "posts": "ingest",
    "sentences": "sentences",
    "tags_file": "tags",
    "model": "train",
    "predictions": "predict",
    "assignments": "topics",
}

DEFAULTS = {
    "tags": {"seed_tags": "iot, arduino, raspberry-pi", "mu": "0.3", "nu": "0.001"},
    "corpus": {"min_token_len": "3", "stopword_file": ""},
    "classify": {
        "model_kind": "logit",
        "folds": "10",
        "seed": "42",
        "grid": "",  # empty -> built-in lattice
        "threshold": "0.5",
    },
    "topics": {
        "k_grid": "1, 4, 8, 9, 10, 11, 12, 16, 20, 24, 28, 32, 36, 40",
        "alpha_policy": "50/k",
        "beta": "0.01",
        "iterations": "1000",
        "burn_in": "200",
        "seed": "42",
        "top_n": "10",
        "window": "110",
        "min_count": "20",
        "max_count": "2000",
    },
    "trends": {"security_tags": ", ".join(trends.DEFAULT_SECURITY_TAGS), "bucket": "half-year"},
    "sample": {"seed": "42", "size": "384"},
}


class StageError(Exception):
    pass


def _load_config(path: str | None) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    cfg.read_dict(DEFAULTS)
    if path:
        if not Path(path).is_file():
            raise StageError(f"config file not found: {path}")
        cfg.read(path)
    return cfg


def _resolve(cfg, section, option, flag_value, cast=str):
    if flag_value is not None:
        return flag_value
    value = cfg.get(section, option, fallback=DEFAULTS.get(section, {}).get(option, ""))
    return cast(value)


def _split_list(raw: str) -> list[str]:
    return [item.strip() for item in raw.replace(",", " ").split() if item.strip()]


def _require_file(path, role: str):
    if path is None:
        raise StageError(f"missing required input: --{role.replace('_', '-')}")
    if not Path(path).is_file():
        producer = _PRODUCED_BY.get(role)
        hint = f" (produce it with the '{producer}' stage)" if producer else ""
        raise StageError(f"input file not found: {path}{hint}")
    return Path(path)


def _config_hash(params: dict) -> str:
    blob = json.dumps(params, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def _write_manifest(stage, out_dir, inputs, outputs, params, seed, elapsed):
    manifest = {
        "stage": stage,
        "inputs": {k: str(v) for k, v in inputs.items()},
        "outputs": [str(o) for o in outputs],
        "params": params,
        "config_hash": _config_hash(params),
        "seed": seed,
        "versions": {
            "secmine": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "wall_time_s": round(elapsed, 6),
    }
    path = Path(out_dir) / f"{stage}.manifest.json"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _json_dump(obj, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _stopwords(cfg, args):
    path = _resolve(cfg, "corpus", "stopword_file", getattr(args, "stopword_file", None))
    return corpus.load_stopwords(path or None)


def _min_len(cfg, args):
    return int(_resolve(cfg, "corpus", "min_token_len", getattr(args, "min_token_len", None)))


# ------------------------------------------------------------------- stages

def cmd_tags(args, cfg) -> list[Path]:
    dump = _require_file(args.dump, "dump")
    seeds = args.seed_tag or _split_list(cfg.get("tags", "seed_tags"))
    mu = float(_resolve(cfg, "tags", "mu", args.mu))
    nu = float(_resolve(cfg, "tags", "nu", args.nu))
    tcfg = tagset.TagSetConfig(seed_tags=tuple(seeds), mu_threshold=mu, nu_threshold=nu)

    stream, _ = parse_dump(dump, tag_filter=None)
    questions = [p for p in stream if p.kind.value == "Question"]
    stats = tagset.compute_tag_stats(questions, tcfg)
    selected = tagset.select_final_tags(stats, tcfg)
    out = Path(args.out)
    tagset.write_tag_stats_csv(stats, selected, out)
    print(f"tags: {len(stats)} candidates, {len(selected)} selected -> {out}")
    return [out]


def cmd_ingest(args, cfg) -> list[Path]:
    dump = _require_file(args.dump, "dump")
    tag_filter = None
    if args.tags_file:
        tag_filter = tagset.read_selected_tags_csv(_require_file(args.tags_file, "tags_file"))
    if args.tag:
        tag_filter = (tag_filter or []) + args.tag
    stream, stats = parse_dump(dump, tag_filter=tag_filter)
    out = Path(args.out)
    n = write_posts_jsonl(stream, out)
    print(
        f"ingest: {stats.total_rows} rows -> {stats.questions_kept} questions + "
        f"{stats.accepted_answers_kept} accepted answers kept, {stats.rows_skipped} skipped"
    )
    args._extra_manifest = {"dump_stats": vars(stats)}
    return [out]


def cmd_sentences(args, cfg) -> list[Path]:
    posts = read_posts_jsonl(_require_file(args.posts, "posts"))
    out = Path(args.out)
    n = 0
    with open(out, "w", encoding="utf-8", newline="") as fh:
        for post in posts:
            for s in corpus.segment_sentences(post):
                fh.write(json.dumps(corpus.sentence_to_dict(s), separators=(",", ":")))
                fh.write("\n")
                n += 1
    print(f"sentences: {n} sentences from {len(posts)} posts -> {out}")
    return [out]


def cmd_sample(args, cfg) -> list[Path]:
    sentences = corpus.read_sentences_jsonl(_require_file(args.sentences, "sentences"))
    seed = int(_resolve(cfg, "sample", "seed", args.seed))
    exclude = frozenset()
    if args.exclude:
        exclude = frozenset(classify.read_labels_csv(args.exclude))
    mode = sampling.SampleMode(args.mode)
    preds = None
    per_class = None
    if mode is sampling.SampleMode.JUDGMENTAL:
        preds = classify.load_predictions(_require_file(args.predictions, "predictions"))
        per_class = (args.positives, args.negatives)
    size = int(_resolve(cfg, "sample", "size", args.size))
    plan = sampling.SamplePlan(
        mode=mode, size=size, seed=seed, exclude_ids=exclude, per_class=per_class
    )
    ids = sampling.draw_sample(sentences, plan, preds)
    out = Path(args.out)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write("id\n")
        for sid in ids:
            fh.write(sid + "\n")
    print(f"sample: {len(ids)} ids -> {out}")
    return [out]


def cmd_agreement(args, cfg) -> list[Path]:
    a = _require_file(args.rater_a, "rater_a")
    b = _require_file(args.rater_b, "rater_b")
    report, disagreements = sampling.merge_annotations(a, b)
    outputs = [Path(args.out)]
    _json_dump(
        {
            "kappa": report.kappa,
            "percent": report.percent,
            "contingency": report.contingency,
            "disagreements": len(disagreements),
        },
        args.out,
    )
    if args.disagreements:
        sampling.write_disagreements_csv(disagreements, args.disagreements)
        outputs.append(Path(args.disagreements))
    if args.adjudicated:
        gold = sampling.apply_adjudication(a, b, _require_file(args.adjudicated, "adjudicated"))
        gold_out = args.gold_out or "gold_labels.csv"
        classify.write_labels_csv(gold, gold_out)
        outputs.append(Path(gold_out))
    kappa_s = "undefined" if report.kappa is None else f"{report.kappa:.4f}"
    print(f"agreement: kappa={kappa_s} percent={report.percent:.4f}")
    return outputs


def _parse_grid(raw: str) -> list[dict]:
    # triples "lam:lr:epochs" separated by commas/space
    grid = []
    for chunk in raw.replace(",", " ").split():
        lam, lr, epochs = chunk.split(":")
        grid.append({"lam": float(lam), "lr": float(lr), "epochs": int(epochs)})
    return grid


def cmd_train(args, cfg) -> list[Path]:
    sentences = corpus.read_sentences_jsonl(_require_file(args.sentences, "sentences"))
    labels = classify.read_labels_csv(_require_file(args.labels, "labels"))
    kind = classify.ModelKind(_resolve(cfg, "classify", "model_kind", args.kind))
    folds = int(_resolve(cfg, "classify", "folds", args.folds))
    seed = int(_resolve(cfg, "classify", "seed", args.seed))
    grid_raw = _resolve(cfg, "classify", "grid", args.grid)
    grid = _parse_grid(grid_raw) if grid_raw else None

    stopwords = _stopwords(cfg, args)
    min_len = _min_len(cfg, args)
    by_id = {s.id: s for s in sentences}
    missing = sorted(set(labels) - set(by_id))
    if missing:
        raise StageError(f"labeled ids missing from sentence file: {missing[:5]}...")
    ids = sorted(labels)
    docs = [
        corpus.tokenize(by_id[i], corpus.Profile.CLASSIFY, stopwords, min_len) for i in ids
    ]
    y = [labels[i] for i in ids]

    result = classify.cross_validate(kind, docs, y, grid=grid, k=folds, seed=seed)
    tfidf = classify.fit_tfidf(docs)
    X = classify.transform_matrix(tfidf, docs)
    model = classify.train(kind, X, y, result.chosen_hyperparams, seed)
    out = Path(args.out)
    classify.save_model(tfidf, model, out)
    outputs = [out]
    if args.cv_report:
        _json_dump(
            {
                "kind": kind.value,
                "chosen_hyperparams": result.chosen_hyperparams,
                "mean": result.mean_report.to_dict(),
                "folds": [r.to_dict() for r in result.fold_reports],
                "grid": [
                    {"hyperparams": hp, "mean_f1": f1} for hp, f1 in result.grid_results
                ],
            },
            args.cv_report,
        )
        outputs.append(Path(args.cv_report))
    mf1 = result.mean_report.f1
    print(f"train: {kind.value} mean F1={'undefined' if mf1 is None else f'{mf1:.4f}'} -> {out}")
    return outputs


def cmd_predict(args, cfg) -> list[Path]:
    tfidf, model = classify.load_model(_require_file(args.model, "model"))
    sentences = corpus.read_sentences_jsonl(_require_file(args.sentences, "sentences"))
    stopwords = _stopwords(cfg, args)
    min_len = _min_len(cfg, args)
    docs = [corpus.tokenize(s, corpus.Profile.CLASSIFY, stopwords, min_len) for s in sentences]
    X = classify.transform_matrix(tfidf, docs)
    probs = classify.predict_probs(model, X)
    out = Path(args.out)
    classify.write_predictions(
        ((s.id, float(p)) for s, p in zip(sentences, probs)), out
    )
    print(f"predict: {len(sentences)} sentences -> {out}")
    return [out]


def cmd_eval(args, cfg) -> list[Path]:
    preds = classify.load_predictions(
        _require_file(args.predictions, "predictions"), threshold=args.threshold
    )
    labels = classify.read_labels_csv(_require_file(args.labels, "labels"))
    by_id = {p.sentence_id: p for p in preds}
    shared = sorted(set(by_id) & set(labels))
    if not shared:
        raise StageError("no shared ids between predictions and labels")
    gold = [labels[i] for i in shared]
    pred_labels = [by_id[i].label for i in shared]
    report = metrics.metrics_from_confusion(
        metrics.confusion_from_labels(pred_labels, gold), args.threshold
    )
    outputs = [Path(args.out)]
    if len(set(gold)) == 2:
        scores = [by_id[i].prob for i in shared]
        report.auc = metrics.auc(scores, gold)
        if args.roc:
            points = metrics.roc_points(scores, gold)
            with open(args.roc, "w", encoding="utf-8", newline="") as fh:
                fh.write("threshold,fpr,tpr\n")
                for thr, fpr, tpr in points:
                    fh.write(f"{'inf' if thr == float('inf') else repr(thr)},{repr(fpr)},{repr(tpr)}\n")
            outputs.append(Path(args.roc))
    _json_dump(report.to_dict(), args.out)
    if args.csv:
        metrics.write_report_csv(report, args.csv)
        outputs.append(Path(args.csv))
    if args.misclassified:
        sentences = corpus.read_sentences_jsonl(_require_file(args.sentences, "sentences"))
        texts = {s.id: s for s in sentences}
        counts = metrics.export_misclassifications(
            {p.sentence_id: (p.prob, p.label) for p in preds}, labels, texts, args.misclassified
        )
        outputs.append(Path(args.misclassified))
        print(f"eval: exported {counts['fp']} FP + {counts['fn']} FN for annotation")
    if args.annotations:
        cats = metrics.import_annotations(_require_file(args.annotations, "annotations"))
        counts_path = Path(args.annotations).with_suffix(".counts.json")
        _json_dump(dict(sorted(cats.items())), counts_path)
        outputs.append(counts_path)
        print(f"eval: tabulated {sum(cats.values())} annotations over {len(cats)} categories")
    f1 = report.f1
    print(f"eval: n={report.n} F1={'undefined' if f1 is None else f'{f1:.4f}'}")
    return outputs


def cmd_topics(args, cfg) -> list[Path]:
    sentences = corpus.read_sentences_jsonl(_require_file(args.sentences, "sentences"))
    if args.predictions:
        preds = classify.load_predictions(
            _require_file(args.predictions, "predictions"), threshold=args.threshold
        )
        keep = {p.sentence_id for p in preds if p.label == 1}
        sentences = [s for s in sentences if s.id in keep]
        if not sentences:
            raise StageError("no sentences predicted positive; nothing to model")

    stopwords = _stopwords(cfg, args)
    min_len = _min_len(cfg, args)
    k_grid = [int(v) for v in (args.k_grid or _split_list(cfg.get("topics", "k_grid")))]
    seed = int(_resolve(cfg, "topics", "seed", args.seed))
    beta = float(_resolve(cfg, "topics", "beta", args.beta))
    iterations = int(_resolve(cfg, "topics", "iterations", args.iterations))
    burn_in = int(_resolve(cfg, "topics", "burn_in", args.burn_in))
    top_n = int(_resolve(cfg, "topics", "top_n", args.top_n))
    window = int(_resolve(cfg, "topics", "window", args.window))
    min_count = int(_resolve(cfg, "topics", "min_count", args.min_count))
    max_count = int(_resolve(cfg, "topics", "max_count", args.max_count))
    alpha_raw = _resolve(cfg, "topics", "alpha_policy", args.alpha)
    alpha = None if str(alpha_raw).strip().lower() in ("", "50/k") else float(alpha_raw)

    docs = [corpus.tokenize(s, corpus.Profile.TOPICS, stopwords, min_len) for s in sentences]
    vocab, filtered, counts = corpus.build_vocab(docs, min_count=min_count, max_count=max_count)
    encoded_all = corpus.encode_docs(filtered, vocab)
    keep_idx = [i for i, d in enumerate(encoded_all) if d]
    encoded = [encoded_all[i] for i in keep_idx]
    if not encoded:
        raise StageError("every document became empty after vocabulary filtering")

    k_star, scores, model = topics.select_k(
        encoded, k_grid, seed=seed, alpha=alpha, beta=beta,
        iterations=iterations, burn_in=burn_in, top_n=top_n, window=window, vocab=vocab,
    )
    assignments = {
        sentences[keep_idx[d]].id: topics.dominant_topic(model, d) for d in range(len(encoded))
    }

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    vocab_path = out_dir / "vocab.tsv"
    model_path = out_dir / "topic_model.json"
    coherence_path = out_dir / "coherence.csv"
    assign_path = out_dir / "assignments.csv"
    samples_path = out_dir / "topic_samples.csv"
    corpus.write_vocab_tsv(vocab, counts, vocab_path)
    theta_path = out_dir / "theta.npy" if args.save_theta else None
    topics.save_topic_model(model, model_path, top_n=30, theta_path=theta_path)
    topics.write_coherence_csv(scores, coherence_path)
    topics.write_assignments_csv(assignments, assign_path)
    topics.export_topic_samples(
        assignments, {s.id: s.text for s in sentences}, samples_path, per_topic=50, seed=seed
    )
    outputs = [vocab_path, model_path, coherence_path, assign_path, samples_path]
    if theta_path is not None:
        outputs.append(theta_path)
    dropped = len(docs) - len(encoded)
    print(f"topics: k*={k_star} over grid {sorted(set(k_grid))}, {dropped} empty docs dropped")
    return outputs


def _read_category_map(path) -> dict[int, str]:
    import csv as _csv

    out: dict[int, str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in _csv.DictReader(fh):
            out[int(row["topic"])] = row["category"]
    return out


def cmd_trends(args, cfg) -> list[Path]:
    sentences = corpus.read_sentences_jsonl(_require_file(args.sentences, "sentences"))
    posts = {p.id: p for p in read_posts_jsonl(_require_file(args.posts, "posts"))}
    assignments = topics.read_assignments_csv(_require_file(args.assignments, "assignments"))
    assigned = [s for s in sentences if s.id in assignments]
    security_tags = args.security_tag or _split_list(cfg.get("trends", "security_tags"))

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []

    impact = trends.absolute_impact(assignments, assigned)
    impact_path = out_dir / "absolute_impact.csv"
    trends.write_trend_csv(impact, impact_path)
    outputs.append(impact_path)

    if args.category_map:
        cat_map = _read_category_map(_require_file(args.category_map, "category_map"))
        cat_impact = trends.absolute_impact(
            assignments, assigned, cat_map, trends.Granularity.CATEGORY
        )
        cat_path = out_dir / "absolute_impact_category.csv"
        trends.write_trend_csv(cat_impact, cat_path)
        outputs.append(cat_path)

    security_sents = assigned
    if args.predictions:
        preds = classify.load_predictions(_require_file(args.predictions, "predictions"))
        keep = {p.sentence_id for p in preds if p.label == 1}
        security_sents = [s for s in sentences if s.id in keep]
    ratios, omitted = trends.relative_growth(
        trends.monthly_counts(security_sents), trends.monthly_counts(sentences)
    )
    growth_path = out_dir / "relative_growth.csv"
    trends.write_relative_growth_csv(ratios, omitted, growth_path)
    outputs.append(growth_path)

    pop = trends.popularity_difficulty(
        assignments, {s.id: s for s in sentences}, posts,
        topics=sorted(set(assignments.values())),
    )
    pop_path = out_dir / "popularity.csv"
    trends.write_popularity_csv(pop, pop_path)
    outputs.append(pop_path)

    frac = trends.discoverability(security_sents, posts, security_tags)
    disc_path = out_dir / "discoverability.json"
    _json_dump(
        {"fraction_found": frac, "security_tags": sorted(t.lower() for t in security_tags),
         "n_sentences": len(security_sents)},
        disc_path,
    )
    outputs.append(disc_path)
    print(f"trends: {len(impact)} impact buckets, discoverability={frac:.4f}")
    return outputs


def cmd_report(args, cfg) -> list[Path]:
    art_dir = Path(args.dir)
    if not art_dir.is_dir():
        raise StageError(f"artifact directory not found: {art_dir}")
    summary: dict = {"artifact_dir": str(art_dir), "present": []}

    def maybe_json(name):
        p = art_dir / name
        if p.is_file():
            summary["present"].append(name)
            with open(p, encoding="utf-8") as fh:
                return json.load(fh)
        return None

    def maybe_csv(name):
        import csv as _csv

        p = art_dir / name
        if p.is_file():
            summary["present"].append(name)
            with open(p, encoding="utf-8", newline="") as fh:
                return list(_csv.DictReader(fh))
        return None

    summary["eval"] = maybe_json("eval_report.json")
    summary["cv"] = maybe_json("cv_report.json")
    summary["agreement"] = maybe_json("agreement.json")
    summary["discoverability"] = maybe_json("discoverability.json")
    summary["coherence"] = maybe_csv("coherence.csv")
    summary["popularity"] = maybe_csv("popularity.csv")
    summary["absolute_impact"] = maybe_csv("absolute_impact.csv")
    topic_model = maybe_json("topic_model.json")
    if topic_model:
        summary["topics"] = {
            "k": topic_model["config"]["k"],
            "coherence": topic_model.get("coherence"),
            "top_words": {
                str(t["topic"]): [w["term"] for w in t["top_words"][:10]]
                for t in topic_model["topics"]
            },
        }

    out = Path(args.out)
    _json_dump(summary, out)
    outputs = [out]
    if args.markdown:
        md = _render_markdown(summary)
        with open(args.markdown, "w", encoding="utf-8", newline="") as fh:
            fh.write(md)
        outputs.append(Path(args.markdown))
    print(f"report: {len(summary['present'])} artifacts aggregated -> {out}")
    return outputs


def _render_markdown(summary: dict) -> str:
    lines = ["# Pipeline report", ""]
    ev = summary.get("eval")
    if ev:
        lines += ["## Classification metrics", "", "| metric | value |", "|---|---|"]
        for key in ("precision", "recall", "f1", "accuracy", "mcc", "auc"):
            val = ev.get(key)
            lines.append(f"| {key} | {'undefined' if val is None else f'{val:.4f}'} |")
        lines.append("")
    coh = summary.get("coherence")
    if coh:
        lines += ["## Coherence grid", "", "| k | c_v |", "|---|---|"]
        for row in coh:
            lines.append(f"| {row['k']} | {float(row['value']):.4f} |")
        lines.append("")
    topics_summary = summary.get("topics")
    if topics_summary:
        lines += [f"## Topics (k={topics_summary['k']})", ""]
        for tid, words in topics_summary["top_words"].items():
            lines.append(f"- topic {tid}: {', '.join(words)}")
        lines.append("")
    pop = summary.get("popularity")
    if pop:
        lines += ["## Popularity / difficulty", "", "| topic | questions | avg views | % without accepted |", "|---|---|---|---|"]
        for row in pop:
            lines.append(
                f"| {row['topic']} | {row['questions']} | {row['avg_views']} | {row['pct_without_accepted']} |"
            )
        lines.append("")
    disc = summary.get("discoverability")
    if disc:
        lines.append(f"Security-tag discoverability: {disc['fraction_found']:.4f}")
        lines.append("")
    return "\n".join(lines)


# --------------------------------------------------------------------- main

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secmine", description="Security-sentence mining pipeline"
    )
    parser.add_argument("--config", help="INI config file; flags override its values")
    parser.add_argument("--threads", type=int, default=1, help="worker cap (results are independent of it)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tags", help="compute tag significance/relevance and select the tag set")
    p.add_argument("--dump", required=True)
    p.add_argument("--seed-tag", action="append")
    p.add_argument("--mu", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--out", default="tags.csv")
    p.set_defaults(func=cmd_tags)

    p = sub.add_parser("ingest", help="parse the dump into a posts JSONL store")
    p.add_argument("--dump", required=True)
    p.add_argument("--tags-file")
    p.add_argument("--tag", action="append")
    p.add_argument("--out", default="posts.jsonl")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("sentences", help="segment post bodies into sentences")
    p.add_argument("--posts", required=True)
    p.add_argument("--out", default="sentences.jsonl")
    p.set_defaults(func=cmd_sentences)

    p = sub.add_parser("sample", help="draw a random or judgmental sample of sentence ids")
    p.add_argument("--sentences", required=True)
    p.add_argument("--mode", choices=["random", "judgmental"], default="random")
    p.add_argument("--size", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--exclude", help="labels CSV whose ids are excluded")
    p.add_argument("--predictions")
    p.add_argument("--positives", type=int, default=300)
    p.add_argument("--negatives", type=int, default=300)
    p.add_argument("--out", default="sample.csv")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("agreement", help="inter-rater agreement and adjudication")
    p.add_argument("--rater-a", required=True)
    p.add_argument("--rater-b", required=True)
    p.add_argument("--out", default="agreement.json")
    p.add_argument("--disagreements")
    p.add_argument("--adjudicated")
    p.add_argument("--gold-out")
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser("train", help="cross-validated grid search + final model")
    p.add_argument("--sentences", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--kind", choices=["logit", "linear_svm"])
    p.add_argument("--folds", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--grid", help="lam:lr:epochs triples, comma separated")
    p.add_argument("--stopword-file")
    p.add_argument("--min-token-len", type=int)
    p.add_argument("--out", default="model.json")
    p.add_argument("--cv-report")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score sentences with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--sentences", required=True)
    p.add_argument("--stopword-file")
    p.add_argument("--min-token-len", type=int)
    p.add_argument("--out", default="predictions.jsonl")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="evaluate predictions against gold labels")
    p.add_argument("--predictions", "--pred", dest="predictions", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--out", default="eval_report.json")
    p.add_argument("--csv", help="also write the report as one-row CSV")
    p.add_argument("--roc")
    p.add_argument("--misclassified", help="export FP/FN rows for manual annotation")
    p.add_argument("--annotations", help="annotated export to tabulate into category counts")
    p.add_argument("--sentences")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("topics", help="LDA with coherence-driven K selection")
    p.add_argument("--sentences", required=True)
    p.add_argument("--predictions", help="keep only sentences predicted positive")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--k-grid", type=int, nargs="+")
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha")
    p.add_argument("--beta", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--top-n", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--min-count", type=int)
    p.add_argument("--max-count", type=int)
    p.add_argument("--stopword-file")
    p.add_argument("--min-token-len", type=int)
    p.add_argument("--save-theta", action="store_true",
                   help="also write the document-topic matrix as theta.npy")
    p.add_argument("--out-dir", default="topics_out")
    p.set_defaults(func=cmd_topics)

    p = sub.add_parser("trends", help="evolution, popularity/difficulty, discoverability")
    p.add_argument("--sentences", required=True)
    p.add_argument("--posts", required=True)
    p.add_argument("--assignments", required=True)
    p.add_argument("--category-map")
    p.add_argument("--predictions")
    p.add_argument("--security-tag", action="append")
    p.add_argument("--out-dir", default="trends_out")
    p.set_defaults(func=cmd_trends)

    p = sub.add_parser("report", help="aggregate existing artifacts, never recompute")
    p.add_argument("--dir", required=True)
    p.add_argument("--out", default="report.json")
    p.add_argument("--markdown")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        started = time.monotonic()
        outputs = args.func(args, cfg)
        elapsed = time.monotonic() - started
        out_dir = Path(outputs[0]).parent if outputs else Path(".")
        params = {
            k: v for k, v in vars(args).items()
            if k not in ("func", "command", "_extra_manifest") and not k.startswith("_")
        }
        inputs = {
            k: v for k, v in params.items()
            if k in ("dump", "posts", "sentences", "labels", "predictions", "model",
                     "assignments", "rater_a", "rater_b", "tags_file", "category_map",
                     "adjudicated", "exclude", "dir") and v
        }
        seed = params.get("seed")
        extra = getattr(args, "_extra_manifest", None)
        if extra:
            params.update(extra)
        _write_manifest(args.command, out_dir, inputs, outputs, params, seed, elapsed)
        return 0
    except StageError as exc:
        json.dump({"error": str(exc), "stage": args.command}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except (FileNotFoundError, ValueError) as exc:
        json.dump({"error": str(exc), "stage": args.command}, sys.stderr)
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
