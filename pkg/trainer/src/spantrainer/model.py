"""Span model: embeddings, BiGRU encoders, bilinear start/end scorers.

Deliberately small (well under 2M parameters at toy vocab sizes) so CPU
training stays honest; the experiment protocol, not the architecture, is
the point.
"""

from dataclasses import asdict, dataclass

import torch
import torch.nn.functional as F
from torch import nn

NEG_INF = -1e9


@dataclass(frozen=True)
class SpanModelConfig:
    vocab_size: int
    dim: int = 48
    hidden: int = 48
    max_answer_tokens: int = 8

    def __post_init__(self):
        if self.vocab_size < 2:
            raise ValueError("vocab_size must include pad and unk")

    def to_dict(self):
        return asdict(self)


class SpanModel(nn.Module):
    def __init__(self, cfg: SpanModelConfig):
        super().__init__()
        self.cfg = cfg
        h2 = 2 * cfg.hidden
        self.emb = nn.Embedding(cfg.vocab_size, cfg.dim, padding_idx=0)
        self.q_enc = nn.GRU(cfg.dim, cfg.hidden, bidirectional=True, batch_first=True)
        self.p_enc = nn.GRU(cfg.dim, cfg.hidden, bidirectional=True, batch_first=True)
        self.w_start = nn.Linear(h2, h2, bias=False)
        self.w_end = nn.Linear(h2, h2, bias=False)

    def param_count(self) -> int:
        return sum(p.numel() for p in self.parameters())

    def forward(self, batch: dict) -> tuple[torch.Tensor, torch.Tensor]:
        """Start and end logits over passage tokens; padding gets NEG_INF."""
        q_h, _ = self.q_enc(self.emb(batch["q_ids"]))
        p_h, _ = self.p_enc(self.emb(batch["p_ids"]))
        q_mask = batch["q_mask"].unsqueeze(-1)
        q_vec = (q_h * q_mask).sum(1) / q_mask.sum(1).clamp(min=1)
        start = torch.einsum("bth,bh->bt", p_h, self.w_start(q_vec))
        end = torch.einsum("bth,bh->bt", p_h, self.w_end(q_vec))
        pad = ~batch["p_mask"]
        return start.masked_fill(pad, NEG_INF), end.masked_fill(pad, NEG_INF)

    def loss(self, batch: dict) -> torch.Tensor:
        start_logits, end_logits = self(batch)
        return F.cross_entropy(start_logits, batch["start"]) + F.cross_entropy(
            end_logits, batch["end"]
        )

    def distributions(self, batch: dict) -> tuple[torch.Tensor, torch.Tensor]:
        start_logits, end_logits = self(batch)
        return F.softmax(start_logits, dim=-1), F.softmax(end_logits, dim=-1)

    @torch.no_grad()
    def decode(self, batch: dict) -> list[tuple[int, int]]:
        """Best (start, end) per example with end >= start and the span no
        longer than max_answer_tokens."""
        p_start, p_end = self.distributions(batch)
        n = p_start.shape[1]
        joint = p_start.unsqueeze(2) * p_end.unsqueeze(1)
        band = torch.triu(torch.ones(n, n, dtype=torch.bool)) & ~torch.triu(
            torch.ones(n, n, dtype=torch.bool), diagonal=self.cfg.max_answer_tokens
        )
        joint = joint.masked_fill(~band, 0.0)
        flat = joint.flatten(1).argmax(1)
        return [(int(i // n), int(i % n)) for i in flat]
