"""Experiment sweep: regimes x labeled fractions x seeds.

SL trains from scratch on the labeled fraction; Cloze-pretrain starts from
a checkpoint trained on the cloze file with the same seed. Fraction splits
are nested prefixes of a seed-determined shuffle, so the 1% set is always
contained in the 5% set and so on. Regimes run sequentially for
reproducibility.
"""

import csv
import json
import logging
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from spantrainer.data import Example, build_vocab, make_examples, read_records
from spantrainer.model import SpanModel, SpanModelConfig
from spantrainer.train import evaluate, load_checkpoint, pretrain, set_seed, train_model

log = logging.getLogger("spantrainer")

ALLOWED_FRACTIONS = (0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 0.9, 1.0)
REGIMES = ("SL", "Cloze")


@dataclass
class ExperimentPlan:
    cloze_path: str | None
    labeled_path: str
    dev_path: str
    out_dir: str
    fractions: tuple[float, ...] = (0.01, 0.1, 0.5, 1.0)
    regimes: tuple[str, ...] = REGIMES
    seeds: tuple[int, ...] = (0, 1, 2)
    pretrain_epochs: int = 3
    finetune_epochs: int = 20
    dim: int = 48
    hidden: int = 48

    def __post_init__(self):
        bad = set(self.fractions) - set(ALLOWED_FRACTIONS)
        if bad:
            raise ValueError(f"fractions {sorted(bad)} not in {ALLOWED_FRACTIONS}")
        bad = set(self.regimes) - set(REGIMES)
        if bad:
            raise ValueError(f"unknown regimes {sorted(bad)}")
        if "Cloze" in self.regimes and not self.cloze_path:
            raise ValueError("Cloze regime requires a cloze_path")
        if not self.seeds:
            raise ValueError("at least one seed required")


def nested_split(n: int, fraction: float, seed: int) -> list[int]:
    """Indices of the fraction split; prefixes of one shuffle, so splits
    for the same seed are nested across fractions."""
    order = list(range(n))
    random.Random(seed).shuffle(order)
    return order[: math.ceil(fraction * n)]


@dataclass
class SweepRow:
    regime: str
    fraction: float
    seed: int
    f1: float
    em: float
    n_train: int = field(default=0)


def run_sweep(plan: ExperimentPlan) -> list[SweepRow]:
    out_dir = Path(plan.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    labeled = read_records(plan.labeled_path)
    dev = read_records(plan.dev_path)
    sources = [labeled, dev]
    if plan.cloze_path:
        sources.append(read_records(plan.cloze_path))
    # one vocab across all files so checkpoints transfer
    vocab = build_vocab(sources)
    train_ex = make_examples(labeled, vocab)
    dev_ex = make_examples(dev, vocab)

    checkpoints: dict[int, str] = {}
    if "Cloze" in plan.regimes:
        for seed in plan.seeds:
            ckpt = str(out_dir / f"pretrain_seed{seed}.pt")
            losses = pretrain(
                plan.cloze_path, ckpt, epochs=plan.pretrain_epochs, seed=seed,
                vocab=vocab, dim=plan.dim, hidden=plan.hidden,
            )
            log.info("pretrain seed %d: loss %.3f -> %.3f", seed, losses[0], losses[-1])
            checkpoints[seed] = ckpt

    rows = []
    for regime in plan.regimes:
        for fraction in plan.fractions:
            for seed in plan.seeds:
                subset = [train_ex[i] for i in nested_split(len(train_ex), fraction, seed)]
                if regime == "Cloze":
                    model, _ = load_checkpoint(checkpoints[seed])
                else:
                    set_seed(seed)
                    model = SpanModel(
                        SpanModelConfig(len(vocab), dim=plan.dim, hidden=plan.hidden)
                    )
                if subset:
                    train_model(model, subset, epochs=plan.finetune_epochs, seed=seed)
                f1, em, preds = evaluate(model, dev_ex)
                rows.append(SweepRow(regime, fraction, seed, f1, em, len(subset)))
                pred_path = out_dir / f"preds_{regime}_f{fraction}_s{seed}.jsonl"
                with open(pred_path, "w", encoding="utf-8") as fh:
                    for rec in preds:
                        fh.write(json.dumps(rec, sort_keys=True) + "\n")
                log.info("%s f=%s seed=%d: F1 %.3f EM %.3f", regime, fraction, seed, f1, em)

    with open(out_dir / "results.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["regime", "fraction", "seed", "n_train", "f1", "em"])
        for r in rows:
            writer.writerow([r.regime, r.fraction, r.seed, r.n_train, f"{r.f1:.4f}", f"{r.em:.4f}"])
    return rows
