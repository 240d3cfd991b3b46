"""End-to-end corpus -> cloze dataset pipeline with a document worker pool.

Documents fan out to worker processes; results merge back in input order,
so output is deterministic regardless of worker count.
"""

from __future__ import annotations

import dataclasses
import logging
import multiprocessing as mp
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .annotate import SentenceSplitter, make_annotator
from .clozegen import ClozeConfig, ClozeTriple, generate_document
from .corpus import Document, DocumentSkipped, SegmentationConfig, ingest_corpus, segment
from .dataset import PassageIndex, export, score, select_subset

logger = logging.getLogger(__name__)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass
class RunConfig:
    segmentation: SegmentationConfig = field(default_factory=SegmentationConfig)
    cloze: ClozeConfig = field(default_factory=ClozeConfig)
    criterion: str = "none"
    top_k: float | int | None = None
    annotator: str = "builtin"
    seed: int = 0
    workers: int = 1

    def snapshot(self) -> dict:
        """Effective config as a plain dict (echoed into manifests)."""
        d = dataclasses.asdict(self)
        d["segmentation"] = dataclasses.asdict(self.segmentation)
        d["cloze"] = dataclasses.asdict(self.cloze)
        return d

    @classmethod
    def from_toml(cls, path: str | Path) -> "RunConfig":
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        seg = SegmentationConfig(**raw.get("segmentation", {}))
        cz = raw.get("cloze", {})
        if "allowed_kinds" in cz:
            cz["allowed_kinds"] = tuple(cz["allowed_kinds"])
        cloze = ClozeConfig(**cz)
        run = raw.get("run", {})
        return cls(
            segmentation=seg,
            cloze=cloze,
            criterion=run.get("criterion", "none"),
            top_k=run.get("top_k"),
            annotator=run.get("annotator", "builtin"),
            seed=run.get("seed", 0),
            workers=run.get("workers", 1),
        )


@dataclass
class RunReport:
    documents: int = 0
    skipped_records: int = 0
    skipped_documents: int = 0
    triples: int = 0


_worker_state: dict = {}


def _init_worker(annotator_spec: str, cloze_cfg: ClozeConfig):
    _worker_state["annotator"] = make_annotator(annotator_spec)
    _worker_state["cfg"] = cloze_cfg


def _generate_one(doc: Document) -> list[ClozeTriple]:
    return generate_document(doc, _worker_state["annotator"], _worker_state["cfg"])


def segment_corpus(
    corpus_path: str | Path,
    fmt: str,
    cfg: RunConfig,
    report: RunReport,
) -> list[Document]:
    splitter = SentenceSplitter()
    skipped: list[str] = []
    docs = []
    for raw in ingest_corpus(corpus_path, fmt, skipped):
        try:
            docs.append(segment(raw, cfg.segmentation, splitter))
        except DocumentSkipped as exc:
            logger.info("skipping document: %s", exc)
            report.skipped_documents += 1
    report.skipped_records = len(skipped)
    report.documents = len(docs)
    return docs


def generate_corpus(docs: list[Document], cfg: RunConfig) -> list[ClozeTriple]:
    """Cloze triples for a segmented corpus, scored against a corpus-wide
    passage index, in stable document order."""
    index = PassageIndex()
    for doc in docs:
        for p in doc.passages:
            index.add_passage(p.text)

    if cfg.workers > 1:
        ctx = mp.get_context("fork") if sys.platform != "win32" else mp.get_context("spawn")
        with ctx.Pool(cfg.workers, initializer=_init_worker, initargs=(cfg.annotator, cfg.cloze)) as pool:
            per_doc = pool.map(_generate_one, docs, chunksize=16)
    else:
        _init_worker(cfg.annotator, cfg.cloze)
        per_doc = [_generate_one(doc) for doc in docs]

    triples = [t for doc_triples in per_doc for t in doc_triples]
    return score(triples, index, cfg.cloze.placeholder)


def run_generate(
    corpus_path: str | Path,
    out_path: str | Path,
    cfg: RunConfig,
    fmt: str = "jsonl",
) -> tuple[dict, RunReport]:
    """ingest -> segment -> generate -> score -> (optional subset) -> export."""
    report = RunReport()
    docs = segment_corpus(corpus_path, fmt, cfg, report)
    triples = generate_corpus(docs, cfg)
    if cfg.criterion != "none" and cfg.top_k is not None:
        triples = select_subset(triples, cfg.criterion, cfg.top_k)
    report.triples = len(triples)
    manifest = export(triples, out_path, cfg.snapshot())
    return manifest, report
