"""Triple scoring, subset selection, dataset export/import, and statistics."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import math
import random
from collections import Counter
from datetime import datetime, timezone
from pathlib import Path

from .annotate import tokenize
from .clozegen import Answer, ClozeTriple, CriterionScores, Provenance

logger = logging.getLogger(__name__)

CRITERIA = ("jaccard", "tfidf", "ans_len", "none")


class IntegrityError(Exception):
    """Dataset file and manifest disagree."""


def _content_types(text: str) -> set[str]:
    return {
        t.lower for t in tokenize(text) if not t.is_stopword and any(c.isalnum() for c in t.text)
    }


def _word_tokens(text: str) -> list[str]:
    return [t.lower for t in tokenize(text) if any(c.isalnum() for c in t.text)]


def jaccard(a: set[str], b: set[str]) -> float:
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


class PassageIndex:
    """Document-frequency index over the passages of one run; idf uses the
    smoothed form ln(1 + N/df)."""

    def __init__(self):
        self.n_passages = 0
        self.df: Counter[str] = Counter()

    def add_passage(self, text: str):
        self.n_passages += 1
        self.df.update(set(_word_tokens(text)))

    def idf(self, term: str) -> float:
        df = self.df.get(term, 0) or 1  # unseen term: treat as df 1 (max idf)
        return math.log(1 + self.n_passages / df)


def score_triple(triple: ClozeTriple, index: PassageIndex, placeholder: str) -> CriterionScores:
    answer_sentence = triple.question.replace(placeholder, triple.answer.text, 1)
    j = jaccard(_content_types(answer_sentence), _content_types(triple.passage))
    p_counts = Counter(_word_tokens(triple.passage))
    tfidf = sum(p_counts[tok] * index.idf(tok) for tok in _word_tokens(triple.answer.text))
    ans_len = len(tokenize(triple.answer.text))
    return CriterionScores(j, tfidf, max(1, ans_len))


def score(triples: list[ClozeTriple], index: PassageIndex, placeholder: str = "@placeholder") -> list[ClozeTriple]:
    """Fill CriterionScores on every triple (returns the same list)."""
    for t in triples:
        t.scores = score_triple(t, index, placeholder)
    return triples


def select_subset(triples: list[ClozeTriple], criterion: str, top_k) -> list[ClozeTriple]:
    """Top-k triples under one criterion: jaccard/tfidf descending, ans_len
    ascending (shorter answers rank higher), ties broken by cloze_id.

    ``top_k`` may be an absolute count or a float fraction in (0, 1].
    criterion "none" returns the whole set unsorted.
    """
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion: {criterion!r}")
    if criterion == "none":
        return list(triples)
    if isinstance(top_k, float) and top_k <= 1.0:
        top_k = math.ceil(top_k * len(triples))
    top_k = int(top_k)
    if top_k <= 0:
        return []
    if criterion == "ans_len":
        key = lambda t: (t.scores.ans_len, t.cloze_id)
    elif criterion == "jaccard":
        key = lambda t: (-t.scores.jaccard, t.cloze_id)
    else:
        key = lambda t: (-t.scores.tfidf, t.cloze_id)
    return sorted(triples, key=key)[:top_k]


def triple_to_record(t: ClozeTriple) -> dict:
    rec = {
        "id": t.cloze_id,
        "passage": t.passage,
        "question": t.question,
        "answer": {
            "text": t.answer.text,
            "start": t.answer.passage_char_start,
            "end": t.answer.passage_char_end,
            "kind": t.answer.kind,
        },
        "prov": {
            "doc": t.provenance.doc_id,
            "q": t.provenance.intro_ordinal,
            "p": t.provenance.passage_ordinal,
        },
        "scores": None,
    }
    if t.scores is not None:
        rec["scores"] = {
            "jaccard": t.scores.jaccard,
            "tfidf": t.scores.tfidf,
            "ans_len": t.scores.ans_len,
        }
    return rec


def record_to_triple(rec: dict) -> ClozeTriple:
    ans = rec["answer"]
    scores = rec.get("scores")
    return ClozeTriple(
        cloze_id=rec["id"],
        passage=rec["passage"],
        question=rec["question"],
        answer=Answer(ans["text"], ans["start"], ans["end"], ans["kind"]),
        provenance=Provenance(rec["prov"]["doc"], rec["prov"]["q"], rec["prov"]["p"]),
        scores=CriterionScores(scores["jaccard"], scores["tfidf"], scores["ans_len"])
        if scores
        else None,
    )


def manifest_path(data_path: str | Path) -> Path:
    p = Path(data_path)
    return p.with_name(p.name.removesuffix(".jsonl") + ".manifest.json")


def _deciles(values: list[float]) -> dict:
    if not values:
        return {}
    vs = sorted(values)
    n = len(vs)
    deciles = [vs[min(n - 1, int(i * n / 10))] for i in range(1, 10)]
    return {
        "min": vs[0],
        "max": vs[-1],
        "mean": sum(vs) / n,
        "deciles": deciles,
    }


def export(triples: list[ClozeTriple], path: str | Path, config_snapshot: dict | None = None) -> dict:
    """Write one JSON object per line in cloze_id order plus a sidecar
    manifest; returns the manifest dict."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ordered = sorted(triples, key=lambda t: t.cloze_id)
    lines = [json.dumps(triple_to_record(t), ensure_ascii=False, sort_keys=True) for t in ordered]
    data = "".join(line + "\n" for line in lines)
    path.write_text(data, encoding="utf-8")

    scored = [t for t in ordered if t.scores is not None]
    manifest = {
        "corpus_hash": hashlib.sha256(data.encode("utf-8")).hexdigest(),
        "config": config_snapshot or {},
        "triple_count": len(ordered),
        "score_distributions": {
            "jaccard": _deciles([t.scores.jaccard for t in scored]),
            "tfidf": _deciles([t.scores.tfidf for t in scored]),
            "ans_len": _deciles([float(t.scores.ans_len) for t in scored]),
        },
        "created_at": datetime.now(timezone.utc).isoformat(),
    }
    manifest_path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def import_dataset(path: str | Path) -> list[ClozeTriple]:
    """Read a cloze jsonl file, verifying the manifest triple count."""
    path = Path(path)
    triples = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                triples.append(record_to_triple(json.loads(line)))
    mpath = manifest_path(path)
    if mpath.exists():
        manifest = json.loads(mpath.read_text())
        if manifest.get("triple_count") != len(triples):
            raise IntegrityError(
                f"{path}: manifest says {manifest.get('triple_count')} triples, file has {len(triples)}"
            )
    else:
        logger.warning("%s: no manifest sidecar; skipping count verification", path)
    return triples


def stats(triples: list[ClozeTriple], sample_n: int = 0, seed: int = 0) -> dict:
    """Counts, score distributions, answer-kind distribution, and a seeded
    random sample formatted for a manual answerability audit."""
    scored = [t for t in triples if t.scores is not None]
    report = {
        "triple_count": len(triples),
        "answer_kinds": dict(sorted(Counter(t.answer.kind for t in triples).items())),
        "score_distributions": {
            "jaccard": _deciles([t.scores.jaccard for t in scored]),
            "tfidf": _deciles([t.scores.tfidf for t in scored]),
            "ans_len": _deciles([float(t.scores.ans_len) for t in scored]),
        },
        "samples": [],
    }
    if sample_n > 0 and triples:
        rng = random.Random(seed)
        picks = rng.sample(triples, min(sample_n, len(triples)))
        report["samples"] = [
            {
                "id": t.cloze_id,
                "question": t.question,
                "passage": t.passage,
                "answer": t.answer.text,
            }
            for t in picks
        ]
    return report


def format_audit_sample(report: dict) -> str:
    """Human-readable audit sheet: question + passage, answer at the bottom."""
    blocks = []
    for i, s in enumerate(report["samples"], start=1):
        blocks.append(
            f"--- sample {i} (id {s['id']}) ---\n"
            f"Q: {s['question']}\n"
            f"P: {s['passage']}\n"
            f"A: {s['answer']}\n"
        )
    return "\n".join(blocks)
