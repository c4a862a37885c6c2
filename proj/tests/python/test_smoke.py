"""End-to-end smoke tests for the python bindings."""

import json
import math

import pytest

import glovekit as gk


@pytest.fixture()
def tiny_docs():
    return [
        ["the", "cat", "sat", "on", "the", "mat"],
        ["the", "dog", "sat", "on", "the", "log"],
        ["cats", "and", "dogs"],
    ] * 20


def test_version():
    assert gk.__version__ == "0.1.0"


def test_count_and_vocab(tiny_docs):
    counts = gk.count_tokens(tiny_docs)
    assert counts["the"] == 80
    vocab = gk.Vocabulary.build(counts, mft=21)
    assert vocab.word(0) == "the"
    assert vocab.find("cats") is None  # 20 occurrences, below the threshold
    vocab_all = gk.Vocabulary.build(counts, mft=20)
    assert vocab_all.find("cats") is not None  # boundary: count >= mft stays


def test_vocab_merge_matches_build(tiny_docs):
    counts = gk.count_tokens(tiny_docs)
    half = len(tiny_docs) // 2
    c1 = gk.count_tokens(tiny_docs[:half])
    c2 = gk.count_tokens(tiny_docs[half:])
    merged = gk.Vocabulary.merge([c1, c2], mft=2)
    direct = gk.Vocabulary.build(counts, mft=2)
    assert merged.items() == direct.items()


def test_cooccurrence_values():
    docs = [["a", "b", "c"]]
    vocab = gk.Vocabulary.build({"a": 1, "b": 1, "c": 1}, mft=1)
    records = gk.build_cooccurrence(docs, vocab, window=10)
    cells = {(i, j): x for i, j, x in records}
    ia, ib, ic = vocab.find("a"), vocab.find("b"), vocab.find("c")
    assert cells[(ia, ib)] == 1.0
    assert cells[(ia, ic)] == 0.5
    assert len(cells) == 6


def test_shuffle_is_seeded_permutation():
    records = [(i, i % 3, float(i + 1)) for i in range(50)]
    a = gk.shuffle_records(records, seed=123)
    b = gk.shuffle_records(records, seed=123)
    c = gk.shuffle_records(records, seed=2024)
    assert a == b
    assert sorted(a) == sorted(records)
    assert sorted(c) == sorted(records)
    assert a != c


def test_train_and_export(tiny_docs):
    vocab = gk.Vocabulary.build(gk.count_tokens(tiny_docs), mft=1)
    records = gk.build_cooccurrence(tiny_docs, vocab, window=5)
    shuffled = gk.shuffle_records(records, seed=7)
    cfg = gk.TrainConfig(dim=8, epochs=12, seed=11)
    params, costs, skipped = gk.train(shuffled, len(vocab), cfg)
    assert skipped == 0
    assert len(costs) == 12
    assert costs[-1] < costs[0]
    emb = gk.export_embeddings(params, vocab, mode="sum")
    assert emb.dim == 8
    assert len(emb.word_vector("the")) == 8
    concat = gk.export_embeddings(params, vocab, mode="concat")
    assert concat.dim == 16


def test_weight_function():
    assert gk.weight(100.0, alpha=0.75, xmax=100.0) == 1.0
    assert gk.weight(200.0) == 1.0
    assert abs(gk.weight(50.0) - 0.5 ** 0.75) < 1e-12


def test_analogy_and_similarity():
    words = ["a", "b", "c", "gold", "noise"]
    s = 1.0 / math.sqrt(3.0)
    vectors = [
        [1, 0, 0],
        [0, 1, 0],
        [0, 0, 1],
        [-s, s, s],
        [0.5, -0.5, 0.1],
    ]
    emb = make_embedding(words, vectors)
    report = gk.analogy_eval(emb, [("a", "b", "c", "gold"), ("a", "b", "c", "missing")])
    assert report["answered"] == 1
    assert report["skipped"] == 1
    assert report["value"] == 1.0

    pairs = [("a", "b", 1.0), ("a", "c", 2.0), ("a", "gold", 3.0), ("b", "c", 0.5)]
    sim = gk.similarity_eval(emb, pairs)
    assert sim["metric"] == "spearman_rho"
    assert -1.0 <= sim["value"] <= 1.0


def make_embedding(words, vectors):
    params_file = None  # build via text round-trip
    import tempfile, os

    with tempfile.NamedTemporaryFile("w", suffix=".txt", delete=False) as f:
        for w, v in zip(words, vectors):
            f.write(w + " " + " ".join(repr(float(x)) for x in v) + "\n")
        params_file = f.name
    try:
        return gk.EmbeddingSet.load_text(params_file)
    finally:
        os.unlink(params_file)


def test_lexicon_diff():
    new_vocab = gk.Vocabulary.build(
        {"covid": 9, "tiktok": 8, "covid19": 7, "café": 6, "cat": 5}, mft=1
    )
    old_vocab = gk.Vocabulary.build({"cat": 5}, mft=1)
    assert gk.lexicon_diff(new_vocab, old_vocab) == ["covid", "tiktok"]
    assert gk.lexicon_diff(new_vocab, old_vocab, exclude_digits=False) == [
        "covid",
        "covid19",
        "tiktok",
    ]


def test_wls_objective_is_conditional_optimum(tiny_docs):
    vocab = gk.Vocabulary.build(gk.count_tokens(tiny_docs), mft=1)
    records = gk.build_cooccurrence(tiny_docs, vocab, window=5)
    cfg = gk.TrainConfig(dim=4, epochs=5, seed=3)
    params, _, _ = gk.train(gk.shuffle_records(records, seed=1), len(vocab), cfg)
    row = [r for r in records if r[0] == 0]
    result = gk.wls_vector(0, params, row, cfg)
    assert result["support"] == len(row)
    assert result["objective_wls"] <= result["objective_trained"] + 1e-12


def test_mft_selection(tiny_docs):
    cfg = gk.TrainConfig(dim=2, epochs=3, seed=5)
    chosen, table = gk.mft_selection(tiny_docs, [1, 5], cfg, window=4, sample_size=10)
    assert chosen in (1, 5)
    assert len(table) == 2
    assert all(row["vocab_size"] > 0 for row in table)


def test_run_pipeline(tmp_path):
    gk.write_synth_corpus(str(tmp_path / "corpus.txt"), seed=4, target_bytes=16384,
                          vocab_size=200)
    (tmp_path / "corpus.manifest").write_text("lowercase true\nsource corpus.txt 1\n")
    config = {
        "workdir": str(tmp_path / "run"),
        "corpus": {"manifest": "corpus.manifest"},
        "vocab": {"mft": 2},
        "cooccur": {"window": 4, "memory_mb": 32},
        "seed": 123,
        "train": {"dim": 6, "epochs": 2, "threads": 1},
        "export": {"mode": "sum", "precision": 6},
    }
    (tmp_path / "pipeline.json").write_text(json.dumps(config))

    result = gk.run_pipeline(str(tmp_path / "pipeline.json"))
    assert (tmp_path / "run" / "vectors.txt").exists()
    assert all(not s["cache_hit"] for s in result["stages"])

    again = gk.run_pipeline(str(tmp_path / "pipeline.json"))
    assert all(s["cache_hit"] for s in again["stages"])

    manifest = json.loads((tmp_path / "run" / "run_manifest.json").read_text())
    assert manifest["rng"] == "splitmix64"
    assert manifest["config"]["train"]["seed"] == 123


def test_validation_errors_are_value_errors():
    with pytest.raises(ValueError):
        gk.Vocabulary.build({"a": 1}, mft=0)
    with pytest.raises(ValueError):
        gk.TrainConfig(eta=-1.0)
