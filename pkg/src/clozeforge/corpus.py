"""Document model and corpus ingestion.

A document's opening text is treated as its introduction and the remainder
is grouped into passages; the introduction either comes from an explicit
``intro`` field or is the leading fraction of the sentence sequence.
"""

from __future__ import annotations

import json
import logging
import math
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .annotate import SentenceSplitter

logger = logging.getLogger(__name__)

_PARA_SPLIT_RE = re.compile(r"\n\s*\n")

# Window size for splitting a body with no paragraph boundaries into passages.
FALLBACK_WINDOW = 5


class DocumentSkipped(Exception):
    """Raised when a document cannot proceed to cloze generation."""


@dataclass
class RawDocument:
    doc_id: str
    text: str
    title: str = ""
    intro: str | None = None
    source_meta: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class SentenceRef:
    """One sentence with offsets into the normalized document text."""

    text: str
    char_start: int
    char_end: int
    paragraph: int


@dataclass(frozen=True)
class Passage:
    doc_id: str
    ordinal: int
    text: str
    char_start: int
    char_end: int
    sentences: tuple[SentenceRef, ...]


@dataclass
class Document:
    doc_id: str
    title: str
    text: str  # normalized full text; paragraphs joined by "\n\n"
    intro_sentences: list[SentenceRef]
    passages: list[Passage]
    source_meta: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class SegmentationConfig:
    intro_fraction: float = 0.20
    marker_mode: str = "explicit-section-marker"  # or "fraction-of-sentences"
    min_intro_sentences: int = 1

    def __post_init__(self):
        if not 0 < self.intro_fraction <= 1:
            raise ValueError("intro_fraction must lie in (0, 1]")
        if self.min_intro_sentences < 1:
            raise ValueError("min_intro_sentences must be >= 1")
        if self.marker_mode not in ("explicit-section-marker", "fraction-of-sentences"):
            raise ValueError(f"unknown marker_mode: {self.marker_mode!r}")


def normalize_paragraphs(text: str) -> list[str]:
    """NFC-normalize and collapse whitespace to single spaces, per paragraph.

    Paragraphs are blank-line-delimited blocks; empty blocks are dropped.
    """
    text = unicodedata.normalize("NFC", text)
    paras = [" ".join(p.split()) for p in _PARA_SPLIT_RE.split(text)]
    return [p for p in paras if p]


def ingest_corpus(
    path: str | Path,
    fmt: str = "jsonl",
    skipped: list[str] | None = None,
) -> Iterator[RawDocument]:
    """Yield RawDocuments from a jsonl file or a directory of plain-text files.

    Malformed records are skipped with a warning (collected into ``skipped``
    when given); an unreadable path raises immediately.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"corpus path does not exist: {path}")
    if fmt == "jsonl":
        yield from _ingest_jsonl(path, skipped)
    elif fmt == "plain-text-dir":
        yield from _ingest_textdir(path, skipped)
    else:
        raise ValueError(f"unknown corpus format: {fmt!r}")


def _ingest_jsonl(path: Path, skipped: list[str] | None) -> Iterator[RawDocument]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                doc_id = str(rec["id"])
                text = rec["text"]
                if not isinstance(text, str):
                    raise TypeError("'text' must be a string")
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                msg = f"{path.name}:{lineno}: skipping malformed record ({exc})"
                logger.warning(msg)
                if skipped is not None:
                    skipped.append(msg)
                continue
            meta = {k: str(v) for k, v in rec.items() if k not in ("id", "text", "title", "intro")}
            yield RawDocument(doc_id, text, rec.get("title", "") or "", rec.get("intro"), meta)


def _ingest_textdir(path: Path, skipped: list[str] | None) -> Iterator[RawDocument]:
    for p in sorted(path.iterdir()):
        if not p.is_file():
            continue
        try:
            text = p.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            msg = f"{p.name}: skipping unreadable file ({exc})"
            logger.warning(msg)
            if skipped is not None:
                skipped.append(msg)
            continue
        yield RawDocument(p.stem, text)


def _sentences_of(paras: list[str], splitter: SentenceSplitter, base: int, para_base: int):
    """Sentence refs for a run of paragraphs laid out from offset ``base``,
    paragraphs separated by two chars ("\\n\\n"). Returns (refs, end_offset)."""
    refs: list[SentenceRef] = []
    offset = base
    for pi, para in enumerate(paras):
        for s, e in splitter.split_spans(para):
            refs.append(SentenceRef(para[s:e], offset + s, offset + e, para_base + pi))
        offset += len(para) + 2
    return refs, offset - 2


def _group_passages(doc_id: str, refs: list[SentenceRef], n_paragraphs: int) -> list[Passage]:
    """Group body sentences into passages: one per paragraph, or windows of
    FALLBACK_WINDOW sentences when the document has no paragraph boundaries."""
    groups: list[list[SentenceRef]] = []
    if n_paragraphs > 1:
        for ref in refs:
            if groups and groups[-1][-1].paragraph == ref.paragraph:
                groups[-1].append(ref)
            else:
                groups.append([ref])
    else:
        for i in range(0, len(refs), FALLBACK_WINDOW):
            groups.append(refs[i : i + FALLBACK_WINDOW])
    passages = []
    for ordinal, group in enumerate(groups):
        start, end = group[0].char_start, group[-1].char_end
        rel = [
            SentenceRef(r.text, r.char_start - start, r.char_end - start, r.paragraph)
            for r in group
        ]
        # passage text reconstructed from its sentences: single space inside a
        # paragraph, blank line across (window fallback only)
        parts = [group[0].text]
        for prev, cur in zip(group, group[1:]):
            parts.append("\n\n" if cur.paragraph != prev.paragraph else " ")
            parts.append(cur.text)
        passages.append(Passage(doc_id, ordinal, "".join(parts), start, end, tuple(rel)))
    return passages


def segment(doc: RawDocument, cfg: SegmentationConfig, splitter: SentenceSplitter) -> Document:
    """Partition a raw document into introduction sentences and body passages.

    Raises DocumentSkipped when the document cannot yield both a nonempty
    introduction and a nonempty body.
    """
    if not doc.text.strip():
        raise DocumentSkipped(f"{doc.doc_id}: empty text")

    explicit = cfg.marker_mode == "explicit-section-marker" and doc.intro is not None

    if explicit:
        intro_paras = normalize_paragraphs(doc.intro)
        body_paras = normalize_paragraphs(doc.text)
        if not intro_paras or not body_paras:
            raise DocumentSkipped(f"{doc.doc_id}: empty intro or body after normalization")
        intro_refs, intro_end = _sentences_of(intro_paras, splitter, 0, 0)
        body_refs, _ = _sentences_of(body_paras, splitter, intro_end + 2, len(intro_paras))
        if not intro_refs or not body_refs:
            raise DocumentSkipped(f"{doc.doc_id}: no sentences in intro or body")
        text = "\n\n".join(intro_paras + body_paras)
        passages = _group_passages(doc.doc_id, body_refs, len(body_paras))
    else:
        paras = normalize_paragraphs(doc.text)
        if not paras:
            raise DocumentSkipped(f"{doc.doc_id}: empty text after normalization")
        refs, _ = _sentences_of(paras, splitter, 0, 0)
        n_sent = len(refs)
        if n_sent < 2:
            raise DocumentSkipped(f"{doc.doc_id}: only {n_sent} sentence(s)")
        n_intro = max(cfg.min_intro_sentences, math.ceil(cfg.intro_fraction * n_sent))
        n_intro = min(n_intro, n_sent - 1)  # body must stay nonempty
        intro_refs, body_refs = refs[:n_intro], refs[n_intro:]
        text = "\n\n".join(paras)
        passages = _group_passages(doc.doc_id, body_refs, len(paras))

    return Document(doc.doc_id, doc.title, text, intro_refs, passages, dict(doc.source_meta))


def reconstruct_text(doc: Document) -> str:
    """Rebuild the normalized document text from recorded sentence offsets.

    Consecutive sentences are separated by one space within a paragraph and
    a blank line across paragraphs; offset gaps encode which.
    """
    refs = sorted(
        list(doc.intro_sentences)
        + [
            SentenceRef(s.text, s.char_start + p.char_start, s.char_end + p.char_start, s.paragraph)
            for p in doc.passages
            for s in p.sentences
        ],
        key=lambda r: r.char_start,
    )
    parts = []
    prev_end = 0
    for ref in refs:
        gap = ref.char_start - prev_end
        if parts:
            parts.append(" " if gap == 1 else "\n\n")
        parts.append(ref.text)
        prev_end = ref.char_end
    return "".join(parts)
