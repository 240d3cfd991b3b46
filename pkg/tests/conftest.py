import random
from pathlib import Path

import pytest

from clozeforge.annotate import BuiltinAnnotator, SentenceSplitter
from clozeforge.corpus import DocumentSkipped, SegmentationConfig, segment

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def annotator() -> BuiltinAnnotator:
    return BuiltinAnnotator()


def make_documents(seed: int, n_docs: int, max_sentences: int = 50):
    """Segmented synthetic documents (skipping any too short to segment)."""
    from synth import random_raw_document

    rng = random.Random(seed)
    splitter = SentenceSplitter()
    cfg = SegmentationConfig()
    docs = []
    for i in range(n_docs):
        raw = random_raw_document(rng, f"doc{i:05d}", max_sentences)
        try:
            docs.append(segment(raw, cfg, splitter))
        except DocumentSkipped:
            continue
    return docs
