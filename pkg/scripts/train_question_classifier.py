#!/usr/bin/env python3
"""Train the coarse question-type classifier from a TREC-format label file.

Each input line is "COARSE:fine question text ...". The fitted model is
written with joblib and can be passed to `clozeforge analyze --qtype-model`.
"""

import argparse
import random
import sys

from clozeforge.analysis import COARSE_LABELS, load_trec, train_coarse_classifier


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("train_file", help="TREC-format labeled questions")
    ap.add_argument("-o", "--out", default="qtype.joblib", help="model output path")
    ap.add_argument("--holdout", type=float, default=0.1,
                    help="fraction held out for an accuracy report (0 disables)")
    ap.add_argument("--seed", type=int, default=13)
    args = ap.parse_args(argv)

    examples = load_trec(args.train_file)
    if not examples:
        print(f"no usable examples in {args.train_file}", file=sys.stderr)
        return 1
    print(f"loaded {len(examples)} examples, labels: {sorted(COARSE_LABELS)}")

    rng = random.Random(args.seed)
    rng.shuffle(examples)
    n_hold = int(len(examples) * args.holdout)
    hold, train = examples[:n_hold], examples[n_hold:]

    pipe = train_coarse_classifier(train, args.out)
    print(f"wrote model to {args.out}")

    if hold:
        correct = sum(pipe.predict([q])[0] == lab for lab, q in hold)
        print(f"holdout accuracy: {correct}/{len(hold)} = {correct / len(hold):.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
