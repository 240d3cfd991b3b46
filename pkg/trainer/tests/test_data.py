import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spantrainer.data import DataError, build_vocab, make_examples, read_records
from spantrainer.sweep import nested_split
from spantrainer.toy import write_task


def _write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def test_read_records_roundtrip(tmp_path):
    paths = write_task(tmp_path, n_cloze=30, n_train=10, n_dev=5, seed=1)
    records = read_records(paths["cloze"])
    assert len(records) == 30
    for r in records:
        assert r.passage[r.answer_start : r.answer_end] == r.answer_text


def test_bad_json_names_line(tmp_path):
    ok = json.dumps(
        {"id": "a", "passage": "x y", "question": "q", "answer": {"text": "x", "start": 0, "end": 1}}
    )
    path = _write_lines(tmp_path / "bad.jsonl", [ok, "{not json"])
    with pytest.raises(DataError, match=r"bad\.jsonl:2"):
        read_records(path)


def test_missing_field_names_line(tmp_path):
    ok = json.dumps(
        {"id": "a", "passage": "x y", "question": "q", "answer": {"text": "x", "start": 0, "end": 1}}
    )
    path = _write_lines(tmp_path / "bad.jsonl", [ok, '{"id": "b", "passage": "x"}'])
    with pytest.raises(DataError, match=r"bad\.jsonl:2"):
        read_records(path)


def test_span_mismatch_is_fatal(tmp_path):
    rec = {"id": "a", "passage": "x y", "question": "q", "answer": {"text": "y", "start": 0, "end": 1}}
    path = _write_lines(tmp_path / "bad.jsonl", [json.dumps(rec)])
    with pytest.raises(DataError, match="does not match span"):
        read_records(path)


def test_token_alignment(tmp_path):
    paths = write_task(tmp_path, n_cloze=40, n_train=10, n_dev=5, seed=2)
    records = read_records(paths["cloze"])
    vocab = build_vocab([records])
    for ex, rec in zip(make_examples(records, vocab), records):
        span = ex.passage[ex.offsets[ex.start][0] : ex.offsets[ex.end][1]]
        assert rec.answer_text in span and span in rec.passage


@settings(max_examples=200, deadline=None)
@given(
    n=st.integers(1, 500),
    seed=st.integers(0, 10**6),
    f=st.sampled_from([0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 0.9, 1.0]),
    g=st.sampled_from([0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 0.9, 1.0]),
)
def test_nested_split_property(n, seed, f, g):
    lo, hi = sorted((f, g))
    assert set(nested_split(n, lo, seed)) <= set(nested_split(n, hi, seed))
    assert nested_split(n, 1.0, seed) and len(nested_split(n, 1.0, seed)) == n
    assert nested_split(n, 0.0, seed) == []
