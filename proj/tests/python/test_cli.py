"""Exercises the installed command-line binary end to end."""

import json
import os
import subprocess

import pytest

CLI = os.environ.get("GLOVEKIT_CLI")
FIXTURE = os.environ.get("GLOVEKIT_FIXTURE")

pytestmark = pytest.mark.skipif(CLI is None, reason="GLOVEKIT_CLI not set")


def run(*args, check=True):
    result = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)
    if check and result.returncode != 0:
        raise AssertionError(
            f"command {args} failed ({result.returncode}):\n{result.stderr}"
        )
    return result


@pytest.fixture()
def workspace(tmp_path):
    (tmp_path / "corpus.txt").write_text("a b c\na b\n")
    (tmp_path / "corpus.manifest").write_text("source corpus.txt 1\n")
    return tmp_path


def test_vocab_and_cooccur_fixture(workspace):
    vocab = workspace / "vocab.txt"
    run("vocab", "--manifest", workspace / "corpus.manifest", "--output", vocab)
    lines = vocab.read_text().splitlines()
    assert lines[0].split() == ["a", "2"]
    assert lines[1].split() == ["b", "2"]
    assert lines[2].split() == ["c", "1"]

    cooc = workspace / "cooc.bin"
    run("cooccur", "--manifest", workspace / "corpus.manifest", "--vocab", vocab,
        "--output", cooc, "--window", "10")
    # 3-token doc plus a 2-token doc: "a b c" alone yields the 6-record stream
    meta = json.loads((workspace / "cooc.bin.meta.json").read_text())
    assert meta["records"] == 6  # pair set is {ab, ba, bc, cb, ac, ca}
    assert meta["window"] == 10
    assert meta["weighting"] == "harmonic"


def test_diff_identical_vocabs_is_empty_exit_zero(workspace):
    vocab = workspace / "vocab.txt"
    run("vocab", "--manifest", workspace / "corpus.manifest", "--output", vocab)
    out = workspace / "diff.txt"
    result = run("diff", "--new", vocab, "--old", vocab, "--output", out)
    assert result.returncode == 0
    assert out.read_text() == ""


def test_exit_codes(workspace):
    # validation error -> 1
    result = run("vocab", "--manifest", workspace / "corpus.manifest",
                 "--output", workspace / "v.txt", "--mft", "0", check=False)
    assert result.returncode == 1
    # runtime error (missing file) -> 2
    result = run("shuffle", "--input", workspace / "absent.bin",
                 "--output", workspace / "out.bin", check=False)
    assert result.returncode == 2


def test_resume_conflict_exits_three(workspace):
    config = workspace / "pipeline.json"
    config.write_text(json.dumps({
        "workdir": "run",
        "corpus": {"manifest": "corpus.manifest"},
        "vocab": {"mft": 1},
        "cooccur": {"window": 3},
        "train": {"dim": 2, "epochs": 1},
    }))
    run("run", "--config", config)
    # crash leftovers from a different configuration
    (workspace / "run" / "train.incomplete").write_text("running\n")
    config.write_text(config.read_text().replace('"dim": 2', '"dim": 3'))
    result = run("run", "--config", config, check=False)
    assert result.returncode == 3
    forced = run("run", "--config", config, "--force")
    assert forced.returncode == 0


def test_full_cli_pipeline(tmp_path):
    if FIXTURE is None:
        pytest.skip("GLOVEKIT_FIXTURE not set")
    demo = tmp_path / "demo"
    subprocess.run([FIXTURE, "--dir", str(demo), "--size-kb", "48", "--vocab", "400"],
                   check=True, capture_output=True)
    result = run("run", "--config", demo / "pipeline.json", "--workdir", demo / "run")
    assert "done" in result.stdout
    assert (demo / "run" / "vectors.txt").exists()

    again = run("run", "--config", demo / "pipeline.json", "--workdir", demo / "run")
    assert "skipped (up to date)" in again.stdout

    # stage artifacts feed the standalone subcommands
    nn = run("neighbors", "--vectors", demo / "run" / "vectors.txt", "--word", "ba",
             "-k", "3")
    assert len(nn.stdout.splitlines()) == 3

    ev = run("eval", "--vectors", demo / "run" / "vectors.txt")
    assert ev.returncode == 0


def test_train_epoch_defaults(workspace):
    vocab = workspace / "vocab.txt"
    run("vocab", "--manifest", workspace / "corpus.manifest", "--output", vocab)
    cooc = workspace / "cooc.bin"
    run("cooccur", "--manifest", workspace / "corpus.manifest", "--vocab", vocab,
        "--output", cooc)
    shuf = workspace / "shuf.bin"
    run("shuffle", "--input", cooc, "--output", shuf, "--seed", "123")
    # d=300 defaults to 100 epochs per the hyperparameter table
    result = run("train", "--input", shuf, "--vocab", vocab, "--dim", "300",
                 "--output-params", workspace / "p.bin",
                 "--cost-log", workspace / "costs.tsv")
    costs = (workspace / "costs.tsv").read_text().splitlines()
    assert len(costs) == 1 + 100  # header + one line per epoch
    assert result.returncode == 0
