"""Training loop, evaluation, and checkpointing for the span model."""

import hashlib
import json
import logging
import random

import numpy as np
import torch

from spantrainer.data import Example, Vocab, build_vocab, collate, make_examples, read_records
from spantrainer.metrics import exact_match, span_f1
from spantrainer.model import SpanModel, SpanModelConfig

log = logging.getLogger("spantrainer")


def set_seed(seed: int):
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)


def train_model(
    model: SpanModel,
    examples: list[Example],
    epochs: int,
    lr: float = 2e-3,
    batch_size: int = 32,
    seed: int = 0,
) -> list[float]:
    """Returns mean loss per epoch. Shuffling is seed-determined."""
    opt = torch.optim.Adam(model.parameters(), lr=lr)
    rng = random.Random(seed)
    order = list(range(len(examples)))
    losses = []
    model.train()
    for epoch in range(epochs):
        rng.shuffle(order)
        total, n_batches = 0.0, 0
        for i in range(0, len(order), batch_size):
            batch = collate([examples[j] for j in order[i : i + batch_size]])
            opt.zero_grad()
            loss = model.loss(batch)
            loss.backward()
            opt.step()
            total += float(loss.detach())
            n_batches += 1
        losses.append(total / max(1, n_batches))
        log.debug("epoch %d loss %.4f", epoch, losses[-1])
    return losses


def predict(model: SpanModel, examples: list[Example], batch_size: int = 64) -> list[str]:
    model.eval()
    preds = []
    for i in range(0, len(examples), batch_size):
        chunk = examples[i : i + batch_size]
        spans = model.decode(collate(chunk))
        for e, (s, t) in zip(chunk, spans):
            t = min(t, len(e.offsets) - 1)
            preds.append(e.passage[e.offsets[s][0] : e.offsets[t][1]])
    return preds


def evaluate(model: SpanModel, examples: list[Example]) -> tuple[float, float, list[dict]]:
    """Mean span F1 and EM plus per-example prediction records."""
    preds = predict(model, examples)
    f1 = sum(span_f1(p, list(e.golds)) for p, e in zip(preds, examples)) / len(examples)
    em = sum(exact_match(p, list(e.golds)) for p, e in zip(preds, examples)) / len(examples)
    records = [{"id": e.qid, "prediction": p} for e, p in zip(examples, preds)]
    return f1, em, records


def config_hash(cfg: SpanModelConfig) -> str:
    return hashlib.sha256(json.dumps(cfg.to_dict(), sort_keys=True).encode()).hexdigest()[:16]


def save_checkpoint(path: str, model: SpanModel, vocab: Vocab):
    torch.save(
        {
            "state": model.state_dict(),
            "config": model.cfg.to_dict(),
            "config_hash": config_hash(model.cfg),
            "vocab": vocab.itos,
        },
        path,
    )


def load_checkpoint(path: str) -> tuple[SpanModel, Vocab]:
    blob = torch.load(path, weights_only=False)
    cfg = SpanModelConfig(**blob["config"])
    if blob["config_hash"] != config_hash(cfg):
        raise ValueError(f"checkpoint {path}: config hash mismatch")
    model = SpanModel(cfg)
    model.load_state_dict(blob["state"])
    return model, Vocab(blob["vocab"])


def pretrain(
    cloze_path: str,
    out_path: str,
    epochs: int = 3,
    seed: int = 0,
    vocab: Vocab | None = None,
    dim: int = 48,
    hidden: int = 48,
) -> list[float]:
    """Train a fresh model on a cloze jsonl file and write a checkpoint.
    Pass a shared vocab when the model will later see other datasets."""
    records = read_records(cloze_path)
    if vocab is None:
        vocab = build_vocab([records])
    set_seed(seed)
    model = SpanModel(SpanModelConfig(len(vocab), dim=dim, hidden=hidden))
    losses = train_model(model, make_examples(records, vocab), epochs=epochs, seed=seed)
    if len(losses) > 1 and not losses[-1] < losses[0]:
        log.warning("pretraining loss did not decrease: %.4f -> %.4f", losses[0], losses[-1])
    save_checkpoint(out_path, model, vocab)
    return losses
