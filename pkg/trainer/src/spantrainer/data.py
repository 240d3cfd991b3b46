"""Reading cloze/labeled jsonl files and turning them into padded tensors.

The record schema is the dataset toolkit's export format: one JSON object
per line with "id", "passage", "question", and "answer" {"text", "start",
"end"} where start/end are character offsets into the passage. Extra keys
are ignored. Malformed lines are fatal and name the offending line.
"""

import json
import re
from collections import Counter
from dataclasses import dataclass, field

import torch

# "@placeholder" must stay one token so cloze questions line up with text.
_TOKEN_RE = re.compile(r"@\w+|\w+|[^\w\s]")

PAD, UNK = 0, 1


class DataError(ValueError):
    pass


def tokenize(text: str) -> list[tuple[str, int, int]]:
    return [(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


@dataclass(frozen=True)
class Record:
    qid: str
    passage: str
    question: str
    answer_text: str
    answer_start: int
    answer_end: int


@dataclass(frozen=True)
class Example:
    qid: str
    question_ids: tuple[int, ...]
    passage_ids: tuple[int, ...]
    start: int
    end: int
    passage: str
    offsets: tuple[tuple[int, int], ...]
    golds: tuple[str, ...]


@dataclass
class Vocab:
    itos: list[str] = field(default_factory=lambda: ["<pad>", "<unk>"])

    def __post_init__(self):
        self.stoi = {w: i for i, w in enumerate(self.itos)}

    def __len__(self):
        return len(self.itos)

    def encode(self, tokens: list[str]) -> tuple[int, ...]:
        return tuple(self.stoi.get(t.lower(), UNK) for t in tokens)


def build_vocab(record_lists: list[list[Record]], min_count: int = 1) -> Vocab:
    counts: Counter[str] = Counter()
    for records in record_lists:
        for r in records:
            counts.update(t.lower() for t, _, _ in tokenize(r.passage))
            counts.update(t.lower() for t, _, _ in tokenize(r.question))
    words = sorted(w for w, c in counts.items() if c >= min_count)
    return Vocab(["<pad>", "<unk>"] + words)


def read_records(path: str) -> list[Record]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: not valid JSON: {exc}") from None
            try:
                ans = obj["answer"]
                rec = Record(
                    str(obj["id"]),
                    obj["passage"],
                    obj["question"],
                    ans["text"],
                    int(ans["start"]),
                    int(ans["end"]),
                )
            except (KeyError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: missing or bad field: {exc}") from None
            if not (0 <= rec.answer_start < rec.answer_end <= len(rec.passage)):
                raise DataError(f"{path}:{lineno}: answer span outside passage")
            if rec.passage[rec.answer_start : rec.answer_end] != rec.answer_text:
                raise DataError(f"{path}:{lineno}: answer text does not match span")
            records.append(rec)
    return records


def make_examples(records: list[Record], vocab: Vocab) -> list[Example]:
    out = []
    for r in records:
        p_toks = tokenize(r.passage)
        q_toks = tokenize(r.question)
        # token span = tokens overlapping the answer's char range
        overlapping = [
            i for i, (_, s, e) in enumerate(p_toks) if s < r.answer_end and e > r.answer_start
        ]
        if not overlapping:
            raise DataError(f"record {r.qid}: answer span covers no tokens")
        out.append(
            Example(
                r.qid,
                vocab.encode([t for t, _, _ in q_toks]),
                vocab.encode([t for t, _, _ in p_toks]),
                overlapping[0],
                overlapping[-1],
                r.passage,
                tuple((s, e) for _, s, e in p_toks),
                (r.answer_text,),
            )
        )
    return out


def collate(examples: list[Example]) -> dict[str, torch.Tensor]:
    """Pad a batch to rectangular id/mask tensors plus gold span indices."""
    q_len = max(len(e.question_ids) for e in examples)
    p_len = max(len(e.passage_ids) for e in examples)
    q_ids = torch.full((len(examples), q_len), PAD, dtype=torch.long)
    p_ids = torch.full((len(examples), p_len), PAD, dtype=torch.long)
    q_mask = torch.zeros(len(examples), q_len, dtype=torch.bool)
    p_mask = torch.zeros(len(examples), p_len, dtype=torch.bool)
    for i, e in enumerate(examples):
        q_ids[i, : len(e.question_ids)] = torch.tensor(e.question_ids)
        p_ids[i, : len(e.passage_ids)] = torch.tensor(e.passage_ids)
        q_mask[i, : len(e.question_ids)] = True
        p_mask[i, : len(e.passage_ids)] = True
    return {
        "q_ids": q_ids,
        "q_mask": q_mask,
        "p_ids": p_ids,
        "p_mask": p_mask,
        "start": torch.tensor([e.start for e in examples]),
        "end": torch.tensor([e.end for e in examples]),
    }
