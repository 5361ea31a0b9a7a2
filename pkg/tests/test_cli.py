"""Exit codes, output files, and determinism of the command line."""

from __future__ import annotations

import json
import math

import pytest

from textdrift.cli import main
from textdrift.corpus import load_splits
from textdrift.lexmetrics import ALL_METRICS, LexMetric, MetricValue, compute_metric, read_metrics_csv, write_metrics_csv
from textdrift.tempeval import PairResult, PredictionRecord, read_pairs_csv, write_pairs_csv, write_predictions
from textdrift.drift import make_table, write_embedding_table, write_manifest
from conftest import make_docs, write_corpus_csv


def three_year_corpus(tmp_path, years=(2015, 2016, 2017), per_label=20):
    per_year = {}
    for year in years:
        docs = []
        for k in range(per_label):
            docs.append((f"alpha y{year} tok{k % 5}", "A"))
            docs.append((f"beta y{year} tok{k % 5}", "B"))
        per_year[year] = docs
    path = tmp_path / "docs.csv"
    write_corpus_csv(path, make_docs(per_year))
    return path


def run_split(tmp_path, corpus_path, name="splits"):
    out_dir = tmp_path / name
    code = main(["split", "--input", str(corpus_path), "--out-dir", str(out_dir)])
    assert code == 0
    return out_dir


def read_warnings(out_dir):
    return json.loads((out_dir / "warnings.json").read_text(encoding="utf-8"))


def dir_bytes(directory):
    return {
        p.relative_to(directory).as_posix(): p.read_bytes()
        for p in sorted(directory.rglob("*"))
        if p.is_file()
    }


# split


def test_split_writes_per_year_parts(tmp_path, capsys):
    corpus = three_year_corpus(tmp_path)
    out_dir = run_split(tmp_path, corpus)
    names = sorted(p.name for p in out_dir.iterdir())
    expected = sorted(
        [f"{year}.{part}" for year in (2015, 2016, 2017) for part in ("train", "dev", "test")]
        + ["warnings.json"]
    )
    assert names == expected
    # 40 docs/year at 0.75/0.10/0.15 with two strata of 20: 30/4/6
    splits = load_splits(out_dir)
    for split in splits:
        assert (len(split.train), len(split.dev), len(split.test)) == (30, 4, 6)
    assert read_warnings(out_dir) == {"warnings": []}
    assert "wrote 10 file(s)" in capsys.readouterr().out


def test_split_missing_input_is_io_error(tmp_path, capsys):
    code = main(["split", "--input", str(tmp_path / "absent.csv"), "--out-dir", str(tmp_path / "o")])
    assert code == 1
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "absent.csv" in err


def test_split_rebalance_flags_must_pair(tmp_path, capsys):
    corpus = three_year_corpus(tmp_path)
    code = main(
        ["split", "--input", str(corpus), "--out-dir", str(tmp_path / "o"), "--per-year-size", "10"]
    )
    assert code == 2
    assert "together" in capsys.readouterr().err


def test_split_rerun_byte_identical(tmp_path):
    corpus = three_year_corpus(tmp_path)
    first = run_split(tmp_path, corpus, "a")
    second = run_split(tmp_path, corpus, "b")
    assert dir_bytes(first) == dir_bytes(second)


# vocab-report


def test_vocab_report_taxonomy_shape(tmp_path):
    corpus = three_year_corpus(tmp_path)
    split_dir = run_split(tmp_path, corpus)
    out_dir = tmp_path / "vocab"
    code = main(["vocab-report", "--split-dir", str(split_dir), "--out-dir", str(out_dir)])
    assert code == 0
    taxonomy = (out_dir / "taxonomy.csv").read_text(encoding="utf-8").splitlines()
    assert taxonomy[0] == "year,class,count"
    assert len(taxonomy) == 1 + 3 * 5  # three years, five lifetime classes
    assert (out_dir / "assignments.csv").exists()


def test_vocab_report_needs_three_years(tmp_path, capsys):
    corpus = three_year_corpus(tmp_path, years=(2015, 2016))
    split_dir = run_split(tmp_path, corpus)
    code = main(
        ["vocab-report", "--split-dir", str(split_dir), "--out-dir", str(tmp_path / "v")]
    )
    assert code == 2
    assert "error:" in capsys.readouterr().err


# lexmetrics


def test_lexmetrics_full_matrix_with_oracle_spot_checks(tmp_path):
    corpus = three_year_corpus(tmp_path)
    split_dir = run_split(tmp_path, corpus)
    out_dir = tmp_path / "lex"
    code = main(["lexmetrics", "--split-dir", str(split_dir), "--out-dir", str(out_dir)])
    assert code == 0

    values = read_metrics_csv(out_dir / "metrics.csv")
    assert len(values) == len(ALL_METRICS) * 9  # four metrics, 3x3 year pairs

    splits = load_splits(split_dir)
    train_docs = {s.year: s.train for s in splits}
    test_docs = {s.year: s.test for s in splits}
    by_key = {(mv.metric, mv.source_year, mv.target_year): mv.value for mv in values}
    for metric in (LexMetric.JACCARD, LexMetric.FAMILIARITY, LexMetric.INFORMATION_RATE):
        expected = compute_metric(metric, 2015, 2017, train_docs[2015], test_docs[2017])
        assert by_key[(metric, 2015, 2017)] == pytest.approx(expected.value, abs=1e-12)

    for metric in ALL_METRICS:
        heatmap = (out_dir / f"heatmap_{metric.value}.csv").read_text(encoding="utf-8")
        lines = heatmap.splitlines()
        assert lines[0] == "train_year,test_year,value"
        assert len(lines) == 10


def test_lexmetrics_undefined_pairs_become_nan_with_warning(tmp_path):
    # one year is punctuation-only: its test vocabulary is empty
    per_year = {
        2015: [("alpha beta", "A")] * 8 + [("beta gamma", "B")] * 8,
        2016: [("?!", "A")] * 8 + [("?!", "B")] * 8,
    }
    corpus_path = tmp_path / "docs.csv"
    write_corpus_csv(corpus_path, make_docs(per_year))
    split_dir = run_split(tmp_path, corpus_path)
    out_dir = tmp_path / "lex"
    code = main(["lexmetrics", "--split-dir", str(split_dir), "--out-dir", str(out_dir)])
    assert code == 0
    warnings_doc = read_warnings(out_dir)
    assert warnings_doc["warnings"]
    assert any("undefined" in w["message"] for w in warnings_doc["warnings"])
    values = read_metrics_csv(out_dir / "metrics.csv")
    assert any(math.isnan(mv.value) for mv in values)


# evaluate


def two_year_split_dir(tmp_path):
    per_year = {}
    for year in (2015, 2016):
        per_year[year] = [(f"alpha common y{year}", "A")] * 12 + [
            (f"beta filler y{year}", "B")
        ] * 12
    corpus_path = tmp_path / "docs.csv"
    write_corpus_csv(corpus_path, make_docs(per_year))
    return run_split(tmp_path, corpus_path)


def test_evaluate_native_writes_pairs_gaps_heatmap_predictions(tmp_path):
    split_dir = two_year_split_dir(tmp_path)
    out_dir = tmp_path / "eval"
    code = main(
        [
            "evaluate",
            "--split-dir", str(split_dir),
            "--out-dir", str(out_dir),
            "--model", "mnb",
        ]
    )
    assert code == 0
    pairs = read_pairs_csv(out_dir / "pairs.csv")
    assert sorted(p.gap for p in pairs) == [-1, 0, 0, 1]
    gaps_lines = (out_dir / "gaps.csv").read_text(encoding="utf-8").splitlines()
    assert gaps_lines[0] == "gap,mean_f_macro,n_pairs"
    assert len(gaps_lines) == 4  # gaps -1, 0, 1
    heatmap_lines = (out_dir / "heatmap.csv").read_text(encoding="utf-8").splitlines()
    assert len(heatmap_lines) == 5
    pred_files = sorted(p.name for p in (out_dir / "predictions").iterdir())
    assert pred_files == [
        "pair_2015_2015.csv",
        "pair_2015_2016.csv",
        "pair_2016_2015.csv",
        "pair_2016_2016.csv",
    ]


def test_evaluate_rerun_byte_identical(tmp_path):
    split_dir = two_year_split_dir(tmp_path)
    dirs = []
    for name in ("ev_a", "ev_b"):
        out_dir = tmp_path / name
        code = main(
            [
                "evaluate",
                "--split-dir", str(split_dir),
                "--out-dir", str(out_dir),
                "--model", "logreg",
            ]
        )
        assert code == 0
        dirs.append(out_dir)
    assert dir_bytes(dirs[0]) == dir_bytes(dirs[1])


def perfect_prediction_file(tmp_path, split_dir):
    splits = load_splits(split_dir)
    records = []
    years = [s.year for s in splits]
    test_docs = {s.year: s.test for s in splits}
    for i in years:
        for j in years:
            for doc in test_docs[j]:
                records.append(PredictionRecord(i, j, doc.id, doc.label, doc.label, None))
    path = tmp_path / "perfect.csv"
    write_predictions(path, records)
    return path, records


def test_evaluate_perfect_prediction_file_scores_one(tmp_path):
    split_dir = two_year_split_dir(tmp_path)
    pred_path, _ = perfect_prediction_file(tmp_path, split_dir)
    out_dir = tmp_path / "eval"
    code = main(
        [
            "evaluate",
            "--split-dir", str(split_dir),
            "--out-dir", str(out_dir),
            "--predictions", str(pred_path),
        ]
    )
    assert code == 0
    pairs = read_pairs_csv(out_dir / "pairs.csv")
    assert len(pairs) == 4
    assert all(p.f_macro == 1.0 for p in pairs)
    # file mode does not re-emit per-pair prediction files
    assert not (out_dir / "predictions").exists()


def test_evaluate_incomplete_prediction_file_fails(tmp_path, capsys):
    split_dir = two_year_split_dir(tmp_path)
    pred_path, records = perfect_prediction_file(tmp_path, split_dir)
    write_predictions(pred_path, records[1:])
    code = main(
        [
            "evaluate",
            "--split-dir", str(split_dir),
            "--out-dir", str(tmp_path / "eval"),
            "--predictions", str(pred_path),
        ]
    )
    assert code == 2
    assert "missing" in capsys.readouterr().err


# correlate


def correlate_fixture(tmp_path, transform):
    pairs = []
    fs = {(2015, 2015): 0.9, (2015, 2016): 0.7, (2016, 2015): 0.65, (2016, 2016): 0.95}
    for (i, j), f in sorted(fs.items()):
        pairs.append(PairResult(i, j, j - i, f, None, None, 6))
    pairs_path = tmp_path / "pairs.csv"
    write_pairs_csv(pairs_path, pairs)
    values = [
        MetricValue(LexMetric.JACCARD, i, j, transform(f)) for (i, j), f in sorted(fs.items())
    ]
    metrics_path = tmp_path / "metrics.csv"
    write_metrics_csv(metrics_path, values)
    return metrics_path, pairs_path


def test_correlate_metric_tracking_performance(tmp_path):
    metrics_path, pairs_path = correlate_fixture(tmp_path, lambda f: 2.0 * f)
    out_dir = tmp_path / "corr"
    code = main(
        [
            "correlate",
            "--metrics", str(metrics_path),
            "--pairs", str(pairs_path),
            "--out-dir", str(out_dir),
        ]
    )
    assert code == 0
    lines = (out_dir / "correlations.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "metric,r,p,n"
    name, r, p, n = lines[1].split(",")
    assert name == "jaccard"
    assert float(r) == pytest.approx(1.0, abs=1e-12)
    assert n == "4"
    assert 0.0 < float(p) <= 1.0


def test_correlate_all_nonfinite_metric_fails(tmp_path, capsys):
    metrics_path, pairs_path = correlate_fixture(tmp_path, lambda f: math.inf)
    code = main(
        [
            "correlate",
            "--metrics", str(metrics_path),
            "--pairs", str(pairs_path),
            "--out-dir", str(tmp_path / "corr"),
        ]
    )
    assert code == 2
    assert "error:" in capsys.readouterr().err


# drift


def drift_fixture(tmp_path, vectors_by_year=None):
    tagged_dir = tmp_path / "tagged"
    tagged_dir.mkdir()
    for year in (2014, 2015, 2016):
        (tagged_dir / f"{year}.tsv").write_text(
            "good\tADJ\nfilm\tNOUN\n\ngood\tADJ\n", encoding="utf-8"
        )
    lexicon_path = tmp_path / "lexicon.txt"
    lexicon_path.write_text("good\n", encoding="utf-8")

    emb_dir = tmp_path / "embeddings"
    emb_dir.mkdir()
    if vectors_by_year is None:
        vectors_by_year = {
            year: {"good": [1.0, 0.0], "good film": [0.0, 1.0]} for year in (2014, 2015, 2016)
        }
    names = {}
    for year, vectors in vectors_by_year.items():
        write_embedding_table(emb_dir / f"{year}.jsonl", make_table(year, vectors))
        names[year] = f"{year}.jsonl"
    manifest = emb_dir / "manifest.json"
    dimension = len(next(iter(next(iter(vectors_by_year.values())).values())))
    write_manifest(manifest, dimension, names)
    return tagged_dir, lexicon_path, manifest


def test_drift_constant_vectors_rank_at_zero_variance(tmp_path):
    tagged_dir, lexicon_path, manifest = drift_fixture(tmp_path)
    out_dir = tmp_path / "drift"
    code = main(
        [
            "drift",
            "--tagged-dir", str(tagged_dir),
            "--lexicon", str(lexicon_path),
            "--manifest", str(manifest),
            "--out-dir", str(out_dir),
        ]
    )
    assert code == 0
    series_lines = (out_dir / "series.csv").read_text(encoding="utf-8").splitlines()
    assert series_lines[0] == "aspect,year,similarity"
    # two aspects, two post-pivot years each
    assert len(series_lines) == 5
    rank_lines = (out_dir / "drift_rank.csv").read_text(encoding="utf-8").splitlines()
    assert rank_lines == [
        "aspect,class,variance",
        "good,common,0.0",
        "good film,common,0.0",
    ]


def test_drift_missing_pivot_year_fails(tmp_path, capsys):
    tagged_dir, lexicon_path, manifest = drift_fixture(tmp_path)
    code = main(
        [
            "drift",
            "--tagged-dir", str(tagged_dir),
            "--lexicon", str(lexicon_path),
            "--manifest", str(manifest),
            "--out-dir", str(tmp_path / "drift"),
            "--pivot-year", "1999",
        ]
    )
    assert code == 2
    assert "1999" in capsys.readouterr().err


def test_drift_rerun_byte_identical(tmp_path):
    tagged_dir, lexicon_path, manifest = drift_fixture(tmp_path)
    dirs = []
    for name in ("dr_a", "dr_b"):
        out_dir = tmp_path / name
        code = main(
            [
                "drift",
                "--tagged-dir", str(tagged_dir),
                "--lexicon", str(lexicon_path),
                "--manifest", str(manifest),
                "--out-dir", str(out_dir),
            ]
        )
        assert code == 0
        dirs.append(out_dir)
    assert dir_bytes(dirs[0]) == dir_bytes(dirs[1])


# version


def test_version_flag_exits_zero(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert "textdrift" in capsys.readouterr().out
