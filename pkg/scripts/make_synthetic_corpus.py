#!/usr/bin/env python3
"""Emit a synthetic jsonl corpus for smoke tests and benchmarks.

Documents are built so that short phrases from body sentences also occur in
the opening sentences, which guarantees the generator has matches to find.
"""

import argparse
import json
import random

CONTENT = (
    "glacier voltage orchid tribunal catalyst harbor nebula quorum sonnet "
    "ledger turbine fresco magma pylon abbey cipher delta ember forge "
    "grotto helix isthmus jetty krill lagoon meadow nectar obelisk prism"
).split()
NAMES = "Darwin Curie Tesla Noether Euler Lovelace Turing Hopper Kepler Gauss".split()
FILLERS = "studied observed described measured reported examined compared noted".split()


def make_doc(rng, doc_id, max_sentences):
    n = rng.randint(4, max_sentences)
    phrases = [
        " ".join(rng.sample(CONTENT, rng.randint(1, 3))) for _ in range(rng.randint(1, 4))
    ]
    sentences = []
    for i in range(n):
        bits = [rng.choice(NAMES), rng.choice(FILLERS), "the"]
        bits += rng.sample(CONTENT, rng.randint(2, 5))
        if phrases and rng.random() < 0.6:
            bits.append(rng.choice(phrases))
        sentences.append(" ".join(bits).capitalize() + ".")
    paras, i = [], 0
    while i < n:
        size = rng.randint(1, 4)
        paras.append(" ".join(sentences[i : i + size]))
        i += size
    return {"id": doc_id, "text": "\n\n".join(paras)}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", help="output jsonl path")
    ap.add_argument("-n", "--n-docs", type=int, default=1000)
    ap.add_argument("--max-sentences", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = random.Random(args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        for i in range(args.n_docs):
            fh.write(json.dumps(make_doc(rng, f"syn{i:06d}", args.max_sentences)) + "\n")
    print(f"wrote {args.n_docs} documents to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
