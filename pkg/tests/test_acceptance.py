"""End-to-end gate: one pass/fail line per shipped guarantee.

Each test re-derives its expected values with an independent oracle inside
the test body, asserts the library matches, and enforces a wall-clock
budget. The PASS lines are written straight to the real stdout so they
survive pytest's capture and show up in piped logs.
"""

from __future__ import annotations

import math
import sys
import time

import numpy as np

from textdrift.classifiers import ModelKind, log_loss_and_grad
from textdrift.corpus import dataset_from_documents, stratified_split
from textdrift.drift import SimilaritySeries, variance_rank
from textdrift.lexmetrics import (
    LexMetric,
    compute_metric,
    familiarity,
    information_rate,
    jaccard,
)
from textdrift.tempeval import (
    FileSource,
    NativeSource,
    correlate_metrics,
    enumerate_pairs,
    macro_f1,
    performance_change,
    run_harness,
    write_predictions,
)
from textdrift.vocab import LifetimeClass, VocabularyProfile, classify_lifetimes
from textdrift.cli import main as cli_main
from conftest import drifting_corpus, make_docs, make_slice, write_corpus_csv
from test_cli import dir_bytes, drift_fixture, run_split
from test_tempeval import brute_force_macro_f1, perfect_records


def report(name: str, started: float, budget: float) -> None:
    elapsed = time.perf_counter() - started
    assert elapsed < budget, f"{name} took {elapsed:.2f}s, budget {budget}s"
    sys.__stdout__.write(f"ACCEPTANCE {name}: PASS ({elapsed:.2f}s)\n")
    sys.__stdout__.flush()


def test_gap_enumeration_produces_all_seven_groups():
    started = time.perf_counter()
    pairs = enumerate_pairs([2015, 2016, 2017, 2018])
    groups: dict[int, list[tuple[int, int]]] = {}
    for i, j in pairs:
        groups.setdefault(j - i, []).append((i, j))
    assert groups == {
        -3: [(2018, 2015)],
        -2: [(2017, 2015), (2018, 2016)],
        -1: [(2016, 2015), (2017, 2016), (2018, 2017)],
        0: [(2015, 2015), (2016, 2016), (2017, 2017), (2018, 2018)],
        1: [(2015, 2016), (2016, 2017), (2017, 2018)],
        2: [(2015, 2017), (2016, 2018)],
        3: [(2015, 2018)],
    }
    report("gap-enumeration", started, budget=1.0)


def test_macro_f1_agrees_with_bruteforce_on_thousand_sets():
    started = time.perf_counter()
    rng = np.random.RandomState(20240816)
    labels = ["neg", "pos"]
    for _ in range(1000):
        golds = [labels[k] for k in rng.randint(0, 2, size=50)]
        preds = [labels[k] for k in rng.randint(0, 2, size=50)]
        expected = brute_force_macro_f1(golds, preds, {"neg", "pos"})
        assert abs(macro_f1(golds, preds, {"neg", "pos"}) - expected) <= 1e-12
    report("macro-f1-oracle", started, budget=5.0)


def test_perfect_predictions_score_one_at_every_gap(tmp_path):
    started = time.perf_counter()
    per_year = {
        year: [(f"alpha y{year} k{k}", "A") for k in range(6)]
        + [(f"beta y{year} k{k}", "B") for k in range(6)]
        for year in (2015, 2016, 2017, 2018)
    }
    from textdrift.corpus import dataset_from_documents

    dataset = dataset_from_documents(make_docs(per_year))
    splits = [stratified_split(s, seed=42) for s in dataset.slices]
    path = tmp_path / "perfect.csv"
    write_predictions(path, perfect_records(splits))
    result = run_harness(splits, FileSource(paths=(path,)))
    aggregates = performance_change(result.pairs)
    assert sorted(a.gap for a in aggregates) == list(range(-3, 4))
    assert all(a.mean_f_macro == 1.0 for a in aggregates)
    report("perfect-classifier-identity", started, budget=1.0)


def test_lexical_metric_hand_cases_match_oracles():
    started = time.perf_counter()
    assert familiarity({"a", "b", "c"}, {"b", "c", "d"}) == 2.0
    assert jaccard({"a", "b", "c"}, {"b", "c", "d"}) == 0.5

    texts = ["x x", "x y", "y y", "y z"]
    fixture = make_slice(2015, texts)

    # independent order-1 add-one-smoothed cross-entropy over the same docs
    bos, eos, unk = "<s>", "</s>", "<unk>"
    docs = [t.split() for t in texts]
    vocab = {tok for doc in docs for tok in doc}
    alphabet = len(vocab) + 2  # continuations: vocab, <unk>, </s>
    pair_counts: dict[tuple[str, str], int] = {}
    context_counts: dict[str, int] = {}
    for doc in docs:
        chain = [bos] + doc + [eos]
        for u, v in zip(chain, chain[1:]):
            pair_counts[(u, v)] = pair_counts.get((u, v), 0) + 1
            context_counts[u] = context_counts.get(u, 0) + 1
    total = 0.0
    transitions = 0
    for doc in docs:
        chain = [bos] + [tok if tok in vocab else unk for tok in doc] + [eos]
        for u, v in zip(chain, chain[1:]):
            p = (pair_counts.get((u, v), 0) + 1) / (context_counts.get(u, 0) + alphabet)
            total += math.log2(p)
            transitions += 1
    expected = -total / transitions

    assert abs(information_rate(fixture, fixture) - expected) <= 1e-12
    report("lexical-hand-cases", started, budget=1.0)


def test_similarity_variance_matches_independent_oracle():
    started = time.perf_counter()
    sims = [0.8542, 0.7838, 0.6222, 0.6222, 0.6119, 0.5368, 0.5171]
    series = SimilaritySeries(
        aspect="service",
        pivot_year=2010,
        sims=tuple((2011 + k, v) for k, v in enumerate(sims)),
        mean=sum(sims) / len(sims),
    )
    ranks = variance_rank([series])
    mean = sum(sims) / len(sims)
    expected = sum((v - mean) ** 2 for v in sims) / len(sims)
    assert len(ranks) == 1
    assert abs(ranks[0].variance - expected) <= 1e-12
    report("variance-fixture", started, budget=1.0)


def test_taxonomy_partitions_random_corpora():
    started = time.perf_counter()
    rng = np.random.RandomState(424242)
    years = [2014, 2015, 2016, 2017]
    pool = [f"t{k}" for k in range(12)]
    for _ in range(100):
        presence: dict[int, set[str]] = {}
        for year in years:
            terms = {t for t in pool if rng.uniform() < 0.55}
            if not terms:
                terms = {pool[rng.randint(len(pool))]}
            presence[year] = terms
        profiles = [
            VocabularyProfile(year=year, counts={t: int(rng.randint(1, 4)) for t in presence[year]})
            for year in years
        ]
        report_obj = classify_lifetimes(profiles)

        common_counts = []
        for year in years:
            by_class = report_obj.per_year[year]
            assert sum(by_class.values()) == len(presence[year])
            common_counts.append(by_class.get(LifetimeClass.COMMON, 0))
        assert len(set(common_counts)) == 1

        occurrences: dict[str, list[int]] = {}
        for year in years:
            for term in presence[year]:
                occurrences.setdefault(term, []).append(year)
        for (term, year), assigned in report_obj.assignments.items():
            occ = occurrences[term]
            if len(occ) == len(years):
                expected = LifetimeClass.COMMON
            elif len(occ) == 1:
                expected = LifetimeClass.UNIQUE
            elif year == min(occ):
                expected = LifetimeClass.EMERGING
            elif year == max(occ) and year != years[-1]:
                expected = LifetimeClass.DYING
            else:
                expected = LifetimeClass.SEASONAL
            assert assigned is expected, (term, year, assigned, expected)
    report("taxonomy-partition", started, budget=10.0)


def test_log_loss_gradients_match_finite_differences():
    started = time.perf_counter()
    rng = np.random.RandomState(77)
    eps = 1e-5
    for _ in range(100):
        n = rng.randint(2, 8)
        d = rng.randint(1, 5)
        features = rng.normal(size=(n, d))
        targets = rng.randint(0, 2, size=n).astype(np.float64)
        weights = rng.normal(scale=0.5, size=d)
        bias = float(rng.normal(scale=0.5))
        l2 = float(rng.uniform(0.0, 0.1))

        _, grad_w, grad_b = log_loss_and_grad(weights, bias, features, targets, l2)

        numeric_w = np.zeros(d)
        for k in range(d):
            up, down = weights.copy(), weights.copy()
            up[k] += eps
            down[k] -= eps
            loss_up, _, _ = log_loss_and_grad(up, bias, features, targets, l2)
            loss_down, _, _ = log_loss_and_grad(down, bias, features, targets, l2)
            numeric_w[k] = (loss_up - loss_down) / (2 * eps)
        loss_up, _, _ = log_loss_and_grad(weights, bias + eps, features, targets, l2)
        loss_down, _, _ = log_loss_and_grad(weights, bias - eps, features, targets, l2)
        numeric_b = (loss_up - loss_down) / (2 * eps)

        analytic = np.append(grad_w, grad_b)
        numeric = np.append(numeric_w, numeric_b)
        denom = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-8)
        assert np.linalg.norm(analytic - numeric) / denom < 1e-5
    report("gradient-check", started, budget=5.0)


def test_synthetic_drift_end_to_end():
    started = time.perf_counter()
    dataset = dataset_from_documents(drifting_corpus())
    splits = [stratified_split(s, seed=42) for s in dataset.slices]
    result = run_harness(splits, NativeSource(kind=ModelKind.MULTINOMIAL_NB))
    aggregates = performance_change(result.pairs)
    by_gap = {a.gap: a.mean_f_macro for a in aggregates}

    # moving one more year away never helps by more than the tolerance band
    for gap in range(1, 6):
        assert by_gap[gap] <= by_gap[gap - 1] + 0.02, (gap, by_gap)
        assert by_gap[-gap] <= by_gap[-(gap - 1)] + 0.02, (-gap, by_gap)

    train_docs = {s.year: s.train for s in splits}
    test_docs = {s.year: s.test for s in splits}
    values = [
        compute_metric(LexMetric.FAMILIARITY, i, j, train_docs[i], test_docs[j])
        for i, j in enumerate_pairs(train_docs)
    ]
    correlations = correlate_metrics(values, result.pairs)
    assert len(correlations) == 1
    assert correlations[0].r > 0.5, correlations
    report("synthetic-drift-end-to-end", started, budget=60.0)


def test_every_subcommand_rerun_is_byte_identical(tmp_path):
    started = time.perf_counter()
    # small corpus with real year-over-year churn so every downstream
    # artifact (metrics, pair scores, correlations) has varying values
    docs = drifting_corpus(
        n_years=3, docs_per_year=60, replace_per_year=0.3, pool_size=20, first_year=2015
    )
    corpus = tmp_path / "docs.csv"
    write_corpus_csv(corpus, docs)

    split_dirs = [run_split(tmp_path, corpus, name) for name in ("split_a", "split_b")]
    assert dir_bytes(split_dirs[0]) == dir_bytes(split_dirs[1])
    split_dir = split_dirs[0]

    reruns = [
        ("vocab", ["vocab-report", "--split-dir", str(split_dir)]),
        ("lex", ["lexmetrics", "--split-dir", str(split_dir)]),
        ("eval_nb", ["evaluate", "--split-dir", str(split_dir), "--model", "mnb"]),
        ("eval_lr", ["evaluate", "--split-dir", str(split_dir), "--model", "logreg"]),
        ("eval_svm", ["evaluate", "--split-dir", str(split_dir), "--model", "svm"]),
    ]
    for name, argv in reruns:
        outs = []
        for suffix in ("a", "b"):
            out_dir = tmp_path / f"{name}_{suffix}"
            assert cli_main(argv + ["--out-dir", str(out_dir)]) == 0
            outs.append(out_dir)
        assert dir_bytes(outs[0]) == dir_bytes(outs[1]), name

    corr_outs = []
    for suffix in ("a", "b"):
        out_dir = tmp_path / f"corr_{suffix}"
        code = cli_main(
            [
                "correlate",
                "--metrics", str(tmp_path / "lex_a" / "metrics.csv"),
                "--pairs", str(tmp_path / "eval_nb_a" / "pairs.csv"),
                "--out-dir", str(out_dir),
            ]
        )
        assert code == 0
        corr_outs.append(out_dir)
    assert dir_bytes(corr_outs[0]) == dir_bytes(corr_outs[1])

    tagged_dir, lexicon_path, manifest = drift_fixture(tmp_path)
    drift_outs = []
    for suffix in ("a", "b"):
        out_dir = tmp_path / f"drift_{suffix}"
        code = cli_main(
            [
                "drift",
                "--tagged-dir", str(tagged_dir),
                "--lexicon", str(lexicon_path),
                "--manifest", str(manifest),
                "--out-dir", str(out_dir),
            ]
        )
        assert code == 0
        drift_outs.append(out_dir)
    assert dir_bytes(drift_outs[0]) == dir_bytes(drift_outs[1])
    report("cli-determinism", started, budget=30.0)
