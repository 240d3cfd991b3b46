#!/usr/bin/env python3
"""Minimal external annotator speaking the line-delimited JSON protocol.

Tokenizes on whitespace and marks the first token as an NE span; useful as
a wire-protocol smoke test and as a template for wrapping real NLP tools.
"""

import json
import sys


def main():
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        req = json.loads(line)
        text = req["text"]
        tokens = []
        pos = 0
        for word in text.split():
            start = text.index(word, pos)
            tokens.append({"t": word, "s": start, "e": start + len(word)})
            pos = start + len(word)
        spans = [{"s": 0, "e": 1, "kind": "NE", "label": "ECHO"}] if tokens else []
        sys.stdout.write(json.dumps({"sid": req["sid"], "tokens": tokens, "spans": spans}) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
