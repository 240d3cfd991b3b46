"""Evaluation measures: span F1 / Exact Match, MRR, and list F1.

Same normalization and token-F1 semantics as the official SQuAD evaluation
script: lowercase, strip articles and punctuation, collapse whitespace,
token-multiset overlap.
"""

from __future__ import annotations

import re
import string
from collections import Counter
from dataclasses import dataclass

_ARTICLE_RE = re.compile(r"\b(a|an|the)\b")


@dataclass(frozen=True)
class EvalScore:
    f1: float
    em: float
    n: int


def normalize(answer: str) -> str:
    """Lowercase, strip punctuation, strip articles (a/an/the), collapse
    whitespace; same operation order as the official SQuAD script."""
    s = "".join(ch for ch in answer.lower() if ch not in string.punctuation)
    return " ".join(_ARTICLE_RE.sub(" ", s).split())


def _f1_single(pred: str, gold: str) -> float:
    pred_tokens = normalize(pred).split()
    gold_tokens = normalize(gold).split()
    if not pred_tokens or not gold_tokens:
        return float(pred_tokens == gold_tokens)
    common = Counter(pred_tokens) & Counter(gold_tokens)
    num_same = sum(common.values())
    if num_same == 0:
        return 0.0
    precision = num_same / len(pred_tokens)
    recall = num_same / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


def span_f1(pred: str, golds: set[str] | list[str]) -> float:
    """Max token-level F1 over the acceptable gold strings."""
    if not golds:
        raise ValueError("gold set must be nonempty")
    return max(_f1_single(pred, g) for g in golds)


def exact_match(pred: str, golds: set[str] | list[str]) -> int:
    if not golds:
        raise ValueError("gold set must be nonempty")
    norm = normalize(pred)
    return int(any(norm == normalize(g) for g in golds))


def evaluate_spans(preds: dict[str, str], golds: dict[str, list[str]]) -> EvalScore:
    """Aggregate F1/EM over qid-aligned prediction and gold maps."""
    missing = sorted(set(golds) - set(preds))
    if missing:
        raise KeyError(f"missing predictions for qids: {missing}")
    n = len(golds)
    if n == 0:
        raise ValueError("empty gold set")
    f1 = sum(span_f1(preds[q], golds[q]) for q in golds) / n
    em = sum(exact_match(preds[q], golds[q]) for q in golds) / n
    return EvalScore(f1, em, n)


def reciprocal_rank(candidates: list[str], golds: set[str] | list[str]) -> float:
    """1/rank of the first candidate matching a gold (normalized), else 0."""
    gold_norm = {normalize(g) for g in golds}
    for rank, cand in enumerate(candidates, start=1):
        if normalize(cand) in gold_norm:
            return 1.0 / rank
    return 0.0


def mrr(ranked: list[tuple[list[str], set[str] | list[str]]]) -> float:
    """Mean reciprocal rank over (candidates, golds) pairs."""
    if not ranked:
        raise ValueError("no ranked lists to evaluate")
    return sum(reciprocal_rank(c, g) for c, g in ranked) / len(ranked)


def list_f1(pred_set: set[str] | list[str], gold_set: set[str] | list[str]) -> float:
    """Set-level F1 on normalized items."""
    pred = {normalize(p) for p in pred_set} - {""}
    gold = {normalize(g) for g in gold_set} - {""}
    if not pred or not gold:
        return float(pred == gold)
    tp = len(pred & gold)
    if tp == 0:
        return 0.0
    precision = tp / len(pred)
    recall = tp / len(gold)
    return 2 * precision * recall / (precision + recall)
