#!/usr/bin/env python3
"""Run the labeled-fraction sweep on the synthetic task (or on your own
cloze/labeled jsonl files) and print the results table."""

import argparse
import logging
import tempfile
from pathlib import Path

from spantrainer.sweep import ExperimentPlan, run_sweep
from spantrainer.toy import write_task


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cloze", help="cloze jsonl (default: generate synthetic)")
    ap.add_argument("--train", help="labeled train jsonl")
    ap.add_argument("--dev", help="labeled dev jsonl")
    ap.add_argument("-o", "--out-dir", default="sweep_out")
    ap.add_argument("--fractions", type=float, nargs="+", default=[0.0, 0.01, 0.1, 1.0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--task-seed", type=int, default=0)
    args = ap.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(message)s")
    if args.cloze and args.train and args.dev:
        paths = {"cloze": args.cloze, "train": args.train, "dev": args.dev}
    elif args.cloze or args.train or args.dev:
        ap.error("--cloze/--train/--dev must be given together")
    else:
        task_dir = Path(tempfile.mkdtemp(prefix="toytask_"))
        paths = write_task(task_dir, seed=args.task_seed)
        print(f"synthetic task written to {task_dir}")

    plan = ExperimentPlan(
        paths["cloze"], paths["train"], paths["dev"], args.out_dir,
        fractions=tuple(args.fractions), seeds=tuple(args.seeds),
    )
    rows = run_sweep(plan)
    print(f"\n{'regime':8} {'fraction':>8} {'seed':>4} {'n':>5} {'F1':>7} {'EM':>7}")
    for r in rows:
        print(f"{r.regime:8} {r.fraction:8} {r.seed:4} {r.n_train:5} {r.f1:7.4f} {r.em:7.4f}")
    print(f"\nresults.csv and per-run predictions are in {args.out_dir}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
