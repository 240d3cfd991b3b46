"""Synthetic extractive-QA task for desk-scale experiments.

Passages are short templated sentences ("Curie measured the turbine in
Berlin."). Cloze examples blank one argument with "@placeholder"; labeled
examples ask a wh-question about the same argument with question word
order, so they are near the cloze distribution but not identical to it.
"""

import json
import random

NAMES = "Curie Darwin Euler Gauss Hopper Kepler Lovelace Noether Tesla Turing".split()
VERBS = "measured studied repaired observed sketched weighed".split()
OBJECTS = "turbine glacier obelisk fresco cipher pylon lagoon helix".split()
PLACES = "Berlin Paris Lagos Oslo Quito Cairo Lima Kyoto".split()


def _sentence(rng):
    return rng.choice(NAMES), rng.choice(VERBS), rng.choice(OBJECTS), rng.choice(PLACES)


def make_passage(rng, n_sentences=4):
    """Sentences plus per-sentence argument char offsets into the passage."""
    parts, spans, pos = [], [], 0
    for _ in range(n_sentences):
        name, verb, obj, place = _sentence(rng)
        text = f"{name} {verb} the {obj} in {place}."
        arg_offsets = {
            "name": (pos, pos + len(name)),
            "obj": (pos + len(name) + len(verb) + 6, pos + len(name) + len(verb) + 6 + len(obj)),
            "place": (pos + len(text) - 1 - len(place), pos + len(text) - 1),
        }
        spans.append(((name, verb, obj, place), arg_offsets))
        parts.append(text)
        pos += len(text) + 1
    return " ".join(parts), spans


def make_example(rng, qid, labeled):
    passage, spans = make_passage(rng)
    (name, verb, obj, place), offsets = spans[rng.randrange(len(spans))]
    slot = rng.choice(("name", "obj", "place"))
    if labeled:
        question = {
            "name": f"Who {verb} the {obj} in {place} ?",
            "obj": f"What did {name} {verb.rstrip('d')} in {place} ?",
            "place": f"Where did {name} {verb.rstrip('d')} the {obj} ?",
        }[slot]
    else:
        question = {
            "name": f"@placeholder {verb} the {obj} in {place}.",
            "obj": f"{name} {verb} the @placeholder in {place}.",
            "place": f"{name} {verb} the {obj} in @placeholder.",
        }[slot]
    start, end = offsets[slot]
    return {
        "id": qid,
        "passage": passage,
        "question": question,
        "answer": {"text": passage[start:end], "start": start, "end": end, "kind": "NP"},
        "prov": {"doc": qid, "q": 0, "p": 0},
        "scores": None,
    }


def write_task(out_dir, n_cloze=1500, n_train=600, n_dev=200, seed=0):
    """Write cloze.jsonl, train.jsonl, dev.jsonl under out_dir."""
    rng = random.Random(seed)
    files = {
        "cloze.jsonl": (n_cloze, False),
        "train.jsonl": (n_train, True),
        "dev.jsonl": (n_dev, True),
    }
    paths = {}
    for fname, (n, labeled) in files.items():
        path = out_dir / fname
        with open(path, "w", encoding="utf-8") as fh:
            for i in range(n):
                fh.write(json.dumps(make_example(rng, f"{fname[:-6]}{i:05d}", labeled)) + "\n")
        paths[fname[:-6]] = str(path)
    return paths
