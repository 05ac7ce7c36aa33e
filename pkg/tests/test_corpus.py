import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import hyp_ref_pairs
from imteval.backends import NoisyOracleBackend
from imteval.corpus import (
    CorpusError,
    load_corpus,
    read_logs,
    sample_corpus,
    write_logs,
)
from imteval.session import SessionConfig, run_session
from imteval.text import Sentence


def test_load_tsv(tmp_path):
    p = tmp_path / "c.tsv"
    p.write_text("a\tb\n", encoding="utf-8")
    c = load_corpus(p, "tsv", "en", "de")
    assert len(c) == 1
    assert c.pairs[0] == (Sentence("a", "en"), Sentence("b", "de"))


def test_load_tsv_missing_tab_errors_with_line(tmp_path):
    p = tmp_path / "c.tsv"
    p.write_text("no tab here\n", encoding="utf-8")
    with pytest.raises(CorpusError, match=":1:"):
        load_corpus(p, "tsv", "en", "de")


def test_load_tsv_reports_correct_line_number(tmp_path):
    p = tmp_path / "c.tsv"
    p.write_text("a\tb\nbad line\n", encoding="utf-8")
    with pytest.raises(CorpusError, match=":2:"):
        load_corpus(p, "tsv", "en", "de")


def test_load_jsonl(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text('{"src":"x","ref":"y"}\n', encoding="utf-8")
    c = load_corpus(p, "jsonl", "zh", "en")
    assert c.pairs[0][0].lang == "zh"
    assert c.pairs[0] == (Sentence("x", "zh"), Sentence("y", "en"))


def test_load_jsonl_malformed(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text('{"src":"x"}\n', encoding="utf-8")
    with pytest.raises(CorpusError, match=":1:"):
        load_corpus(p, "jsonl", "en", "en")


def test_load_missing_file():
    with pytest.raises(CorpusError):
        load_corpus("/nonexistent/corpus.tsv", "tsv", "en", "en")


def test_load_rejects_empty_source(tmp_path):
    p = tmp_path / "c.tsv"
    p.write_text("\tref\n", encoding="utf-8")
    with pytest.raises(CorpusError, match=":1:"):
        load_corpus(p, "tsv", "en", "en")


def test_load_unknown_format(tmp_path):
    with pytest.raises(CorpusError):
        load_corpus(tmp_path / "x", "csv", "en", "en")


def _corpus(n):
    from imteval.corpus import ParallelCorpus

    pairs = tuple(
        (Sentence(f"src {i}"), Sentence(f"ref {i}")) for i in range(n)
    )
    return ParallelCorpus(pairs=pairs, src_lang="en", tgt_lang="en")


def test_sample_identity():
    c = _corpus(4)
    assert sample_corpus(c, 4, 0).pairs == c.pairs


def test_sample_deterministic_and_order_preserving():
    c = _corpus(5)
    s1 = sample_corpus(c, 2, 7)
    s2 = sample_corpus(c, 2, 7)
    assert s1.pairs == s2.pairs
    idx = [c.pairs.index(p) for p in s1.pairs]
    assert idx == sorted(idx)


def test_sample_different_seeds_differ():
    c = _corpus(10)
    samples = {sample_corpus(c, 3, seed).pairs for seed in range(100)}
    assert len(samples) > 1


def test_sample_too_large():
    with pytest.raises(CorpusError):
        sample_corpus(_corpus(2), 3, 0)


# --- log persistence ------------------------------------------------------------

def test_logs_round_trip_empty(tmp_path):
    p = tmp_path / "logs.jsonl"
    write_logs(p, [])
    assert read_logs(p) == []


def test_logs_round_trip_single(tmp_path):
    cfg = SessionConfig(
        source=Sentence("s"), reference=Sentence("the cat sat"), policy="l2ri",
        backend_spec="noisy", seed=3, turn_limit_override=50,
    )
    log = run_session(cfg, NoisyOracleBackend(cfg.reference, 0.5, 0.2, seed=3))
    p = tmp_path / "logs.jsonl"
    write_logs(p, [log])
    assert read_logs(p) == [log]


def test_logs_corrupt_line_reports_number(tmp_path):
    cfg = SessionConfig(
        source=Sentence("s"), reference=Sentence("a b"), policy="l2r",
        backend_spec="noisy",
    )
    log = run_session(cfg, NoisyOracleBackend(cfg.reference, 0, 0, seed=1))
    p = tmp_path / "logs.jsonl"
    write_logs(p, [log, log])
    lines = p.read_text().splitlines()
    lines[1] = '{"broken":'
    p.write_text("\n".join(lines) + "\n")
    with pytest.raises(CorpusError, match=":2:"):
        read_logs(p)


@given(pair=hyp_ref_pairs(), seed=st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_logs_round_trip_randomized(pair, seed, tmp_path_factory):
    _, ref = pair
    cfg = SessionConfig(
        source=Sentence("source text"), reference=ref, policy="randi",
        backend_spec="noisy", seed=seed, turn_limit_override=20,
    )
    log = run_session(cfg, NoisyOracleBackend(ref, 0.5, 0.3, seed=seed))
    p = tmp_path_factory.mktemp("logs") / "l.jsonl"
    write_logs(p, [log])
    assert read_logs(p) == [log]
