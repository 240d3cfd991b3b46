"""Toy-scale extractive QA: a small span model, cloze pretraining, and a
labeled-fraction experiment sweep. Consumes cloze/gold data as jsonl files
only; no in-process dependency on the dataset toolkit.
"""

from spantrainer.data import DataError, Example, Vocab, make_examples, read_records
from spantrainer.model import SpanModel, SpanModelConfig
from spantrainer.sweep import ExperimentPlan, run_sweep
from spantrainer.train import evaluate, load_checkpoint, pretrain, save_checkpoint, train_model

__all__ = [
    "DataError",
    "Example",
    "Vocab",
    "make_examples",
    "read_records",
    "SpanModel",
    "SpanModelConfig",
    "ExperimentPlan",
    "run_sweep",
    "evaluate",
    "load_checkpoint",
    "pretrain",
    "save_checkpoint",
    "train_model",
]
