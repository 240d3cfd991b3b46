"""Cloze triple construction.

An introduction sentence becomes a question by blanking out a span that
also occurs, as a phrase, inside a body passage; the passage supplies the
context and the phrase is the answer.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field, replace

from .annotate import AnnotatedSentence, PhraseSpan, tokenize
from .corpus import Document, Passage

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClozeConfig:
    min_overlap: int = 2
    placeholder: str = "@placeholder"
    allowed_kinds: tuple[str, ...] = ("NP", "VP", "ADJP", "NE")
    max_answer_tokens: int = 10
    per_pair_limit: int = 1
    suffix_only: bool = False

    def __post_init__(self):
        if self.min_overlap < 0:
            raise ValueError("min_overlap must be >= 0")
        if len(tokenize(self.placeholder)) != 1:
            raise ValueError(f"placeholder must be a single token: {self.placeholder!r}")


@dataclass(frozen=True)
class Answer:
    text: str
    passage_char_start: int
    passage_char_end: int
    kind: str


@dataclass(frozen=True)
class Provenance:
    doc_id: str
    intro_ordinal: int
    passage_ordinal: int


@dataclass(frozen=True)
class CriterionScores:
    jaccard: float
    tfidf: float
    ans_len: int


@dataclass(frozen=True)
class MatchCandidate:
    """A passage phrase span whose folded token sequence occurs in q."""

    span: PhraseSpan
    p_sent_index: int
    q_token_start: int
    q_token_end: int
    length: int


@dataclass
class ClozeTriple:
    cloze_id: str
    passage: str
    question: str
    answer: Answer
    provenance: Provenance
    scores: CriterionScores | None = field(default=None)


def _occurrences(needle: tuple[str, ...], haystack: tuple[str, ...]) -> list[int]:
    n, h = len(needle), len(haystack)
    return [i for i in range(h - n + 1) if haystack[i : i + n] == needle]


def _suffix_end(q: AnnotatedSentence) -> int:
    """Index one past q's last word token (trailing punctuation ignored)."""
    for i in range(len(q.tokens) - 1, -1, -1):
        if any(c.isalnum() for c in q.tokens[i].text):
            return i + 1
    return len(q.tokens)


def find_matches(
    q: AnnotatedSentence,
    p_sents: list[AnnotatedSentence],
    cfg: ClozeConfig,
) -> list[MatchCandidate]:
    """All (passage phrase span, q occurrence) pairs where the span's folded
    token sequence occurs contiguously in q; ordered longest span first,
    then earliest position in q."""
    q_folded = q.folded()
    suffix_end = _suffix_end(q) if cfg.suffix_only else None
    out = []
    for si, sent in enumerate(p_sents):
        folded = sent.folded()
        for span in sent.phrase_spans:
            length = span.token_end - span.token_start
            if span.kind not in cfg.allowed_kinds or length > cfg.max_answer_tokens:
                continue
            seq = folded[span.token_start : span.token_end]
            for pos in _occurrences(seq, q_folded):
                if suffix_end is not None and pos + length != suffix_end:
                    continue
                out.append(MatchCandidate(span, si, pos, pos + length, length))
    out.sort(key=lambda c: (-c.length, c.q_token_start, c.p_sent_index, c.span.token_start, c.span.kind))
    return out


def make_cloze(
    q: AnnotatedSentence,
    passage: Passage,
    p_sents: list[AnnotatedSentence],
    cand: MatchCandidate,
    cfg: ClozeConfig,
) -> ClozeTriple:
    """Blank the matched span out of q and record the passage-side answer."""
    sent = p_sents[cand.p_sent_index]
    sent_base = passage.sentences[cand.p_sent_index].char_start
    a_start = sent_base + sent.tokens[cand.span.token_start].char_start
    a_end = sent_base + sent.tokens[cand.span.token_end - 1].char_end
    answer = Answer(passage.text[a_start:a_end], a_start, a_end, cand.span.kind)

    q_cut_start = q.tokens[cand.q_token_start].char_start
    q_cut_end = q.tokens[cand.q_token_end - 1].char_end
    question = q.text[:q_cut_start] + cfg.placeholder + q.text[q_cut_end:]

    doc_id, _, q_ord = q.sent_id
    prov = Provenance(doc_id, q_ord, passage.ordinal)
    raw = f"{doc_id}|{q_ord}|{passage.ordinal}|{a_start}|{a_end}"
    cloze_id = hashlib.sha1(raw.encode("utf-8")).hexdigest()[:16]
    return ClozeTriple(cloze_id, passage.text, question, answer, prov)


def question_passage_overlap(triple: ClozeTriple, placeholder: str) -> int:
    """Distinct non-stopword token types shared by Q (placeholder excluded) and P."""
    def word(t):
        return any(c.isalnum() for c in t.text)

    q_types = {
        t.lower
        for t in tokenize(triple.question)
        if word(t) and not t.is_stopword and t.text != placeholder
    }
    p_types = {t.lower for t in tokenize(triple.passage) if word(t) and not t.is_stopword}
    return len(q_types & p_types)


def prune(triples: list[ClozeTriple], cfg: ClozeConfig) -> list[ClozeTriple]:
    """Drop triples whose question/passage content-word overlap is below
    cfg.min_overlap; logs the drop count."""
    kept = [t for t in triples if question_passage_overlap(t, cfg.placeholder) >= cfg.min_overlap]
    dropped = len(triples) - len(kept)
    if dropped:
        logger.info("pruned %d triple(s) below overlap %d", dropped, cfg.min_overlap)
    return kept


def annotate_document(doc: Document, annotator):
    """Annotate intro sentences and passage sentences once per document."""
    intro = [
        annotator.annotate((doc.doc_id, "intro", i), ref.text)
        for i, ref in enumerate(doc.intro_sentences)
    ]
    passages = [
        [
            annotator.annotate((doc.doc_id, "passage", (p.ordinal, si)), s.text)
            for si, s in enumerate(p.sentences)
        ]
        for p in doc.passages
    ]
    return intro, passages


def generate_document(doc: Document, annotator, cfg: ClozeConfig) -> list[ClozeTriple]:
    """All pruned, deduplicated cloze triples for one document, in stable
    (intro ordinal, passage ordinal, candidate rank) order."""
    intro_sents, passage_sents = annotate_document(doc, annotator)
    triples: list[ClozeTriple] = []
    for q in intro_sents:
        for passage, p_sents in zip(doc.passages, passage_sents):
            emitted = 0
            for cand in find_matches(q, p_sents, cfg):
                if emitted >= cfg.per_pair_limit:
                    break
                triple = make_cloze(q, passage, p_sents, cand, cfg)
                # surfaces must agree exactly for the cloze to round-trip
                if q.span_text(cand.q_token_start, cand.q_token_end) != triple.answer.text:
                    continue
                triples.append(triple)
                emitted += 1
    triples = prune(triples, cfg)
    seen: set[tuple] = set()
    out = []
    for t in triples:
        key = (t.question, t.answer.text, t.provenance.passage_ordinal)
        if key not in seen:
            seen.add(key)
            out.append(t)
    return out
