"""Tokenization, sentence splitting, and phrase/entity annotation.

The builtin annotator is deterministic and dependency-free; heavier NLP
tools (constituency parsers, biomedical NER) attach through a line-delimited
JSON protocol over stdin/stdout (see :class:`ExternalAnnotator`).
"""

from __future__ import annotations

import json
import logging
import re
import subprocess
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

logger = logging.getLogger(__name__)

# "@word" is kept as one token so placeholder markers survive tokenization.
_TOKEN_RE = re.compile(r"@\w+|\w+|[^\w\s]")

PHRASE_KINDS = ("NP", "VP", "ADJP", "NE")

# Maximum tokens in a non-stopword run emitted as an NP by the builtin chunker.
MAX_CHUNK_LEN = 5


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    """The bundled 127-word stopword list (lowercased)."""
    text = resources.files("clozeforge.data").joinpath("stopwords.txt").read_text()
    return frozenset(text.split())


@lru_cache(maxsize=1)
def gazetteer() -> frozenset[str]:
    text = resources.files("clozeforge.data").joinpath("gazetteer.txt").read_text()
    return frozenset(text.split())


@dataclass(frozen=True)
class Token:
    text: str
    char_start: int
    char_end: int
    is_stopword: bool
    lower: str


@dataclass(frozen=True)
class PhraseSpan:
    """Half-open token span [token_start, token_end) of one phrase."""

    token_start: int
    token_end: int
    kind: str
    ne_label: str | None = None

    def __post_init__(self):
        if self.kind not in PHRASE_KINDS:
            raise ValueError(f"unknown phrase kind: {self.kind!r}")
        if not (0 <= self.token_start < self.token_end):
            raise ValueError(f"bad span bounds [{self.token_start}, {self.token_end})")


@dataclass
class AnnotatedSentence:
    sent_id: tuple
    text: str
    tokens: list[Token]
    phrase_spans: list[PhraseSpan] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.tokens)

    def folded(self) -> tuple[str, ...]:
        return tuple(t.lower for t in self.tokens)

    def span_text(self, token_start: int, token_end: int) -> str:
        """Surface text covered by a token span, straight from the sentence."""
        return self.text[self.tokens[token_start].char_start : self.tokens[token_end - 1].char_end]


def tokenize(text: str) -> list[Token]:
    """Split on whitespace/punctuation boundaries; punctuation marks become tokens."""
    stops = stopwords()
    out = []
    for m in _TOKEN_RE.finditer(text):
        lower = m.group().casefold()
        out.append(Token(m.group(), m.start(), m.end(), lower in stops, lower))
    return out


DEFAULT_ABBREVIATIONS = frozenset(
    {"mr", "mrs", "ms", "dr", "prof", "st", "vs", "etc", "fig", "al", "inc", "ltd", "jr", "sr"}
)

_BOUNDARY_RE = re.compile(r"[.!?]+(?=\s+[\"'(]?[A-Z0-9])")
_LAST_WORD_RE = re.compile(r"(\w+)$")


class SentenceSplitter:
    """Rule-based splitter: sentence-final punctuation followed by whitespace
    and an uppercase letter or digit ends a sentence, with an abbreviation
    exception list and an optional single-letter-initial exception."""

    def __init__(
        self,
        abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
        single_letter_abbrev: bool = True,
    ):
        self.abbreviations = abbreviations
        self.single_letter_abbrev = single_letter_abbrev

    def split_spans(self, text: str) -> list[tuple[int, int]]:
        """Sentence (start, end) character spans, whitespace-trimmed."""
        cuts = []
        for m in _BOUNDARY_RE.finditer(text):
            word = _LAST_WORD_RE.search(text, 0, m.start())
            if word:
                w = word.group(1).lower()
                if w in self.abbreviations:
                    continue
                if self.single_letter_abbrev and len(w) == 1 and w.isalpha() and m.group() == ".":
                    continue
            cuts.append(m.end())
        spans = []
        prev = 0
        for cut in cuts + [len(text)]:
            chunk = text[prev:cut]
            lead = len(chunk) - len(chunk.lstrip())
            trail = len(chunk) - len(chunk.rstrip())
            if chunk.strip():
                spans.append((prev + lead, cut - trail))
            prev = cut
        return spans

    def split(self, text: str) -> list[str]:
        return [text[s:e] for s, e in self.split_spans(text)]


def split_sentences(text: str, splitter: SentenceSplitter | None = None) -> list[str]:
    return (splitter or SentenceSplitter()).split(text)


def _capitalized(tok: Token) -> bool:
    return tok.text[:1].isupper() and any(c.isalpha() for c in tok.text)


def _chunk_builtin(tokens: list[Token]) -> list[PhraseSpan]:
    """Deterministic phrase spans: maximal capitalized runs (NP, and NE when
    gazetteer-backed or not sentence-initial) plus maximal non-stopword runs
    of length <= MAX_CHUNK_LEN bounded by stopwords/punctuation (NP)."""
    spans: dict[tuple[int, int, str], PhraseSpan] = {}
    gaz = gazetteer()

    def add(start, end, kind, label=None):
        key = (start, end, kind)
        if key not in spans:
            spans[key] = PhraseSpan(start, end, kind, label)

    def is_word(tok: Token) -> bool:
        return any(c.isalnum() for c in tok.text)

    # maximal runs of capitalized word tokens
    i = 0
    n = len(tokens)
    while i < n:
        if _capitalized(tokens[i]):
            j = i
            while j < n and _capitalized(tokens[j]):
                j += 1
            if any(not tokens[k].is_stopword for k in range(i, j)):
                add(i, j, "NP")
                in_gaz = any(tokens[k].lower in gaz for k in range(i, j))
                if in_gaz or i > 0:
                    add(i, j, "NE", "MISC")
            i = j
        else:
            i += 1

    # maximal non-stopword word runs bounded by stopwords/punctuation
    i = 0
    while i < n:
        if is_word(tokens[i]) and not tokens[i].is_stopword:
            j = i
            while j < n and is_word(tokens[j]) and not tokens[j].is_stopword:
                j += 1
            if j - i <= MAX_CHUNK_LEN:
                add(i, j, "NP")
            i = j
        else:
            i += 1

    return sorted(spans.values(), key=lambda s: (s.token_start, s.token_end, s.kind))


class BuiltinAnnotator:
    """Pure, deterministic annotator; safe for concurrent use."""

    def annotate(self, sent_id: tuple, text: str) -> AnnotatedSentence:
        tokens = tokenize(text)
        return AnnotatedSentence(sent_id, text, tokens, _chunk_builtin(tokens))

    def close(self):
        pass


class ExternalAnnotator:
    """Annotator backed by a subprocess speaking line-delimited JSON.

    Request:  {"sid": str, "text": str}
    Response: {"sid": str, "tokens": [{"t": str, "s": int, "e": int}],
               "spans": [{"s": int, "e": int, "kind": "NP|VP|ADJP|NE", "label": str?}]}

    Responses must arrive in request order. Any per-sentence failure falls
    back to the builtin annotator and is counted.
    """

    def __init__(self, command: str):
        self.command = command
        self._fallback = BuiltinAnnotator()
        self.fallback_count = 0
        self._proc: subprocess.Popen | None = None

    def _ensure_proc(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.command,
                shell=True,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        return self._proc

    def annotate(self, sent_id: tuple, text: str) -> AnnotatedSentence:
        sid = "/".join(str(x) for x in sent_id)
        try:
            proc = self._ensure_proc()
            proc.stdin.write(json.dumps({"sid": sid, "text": text}) + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
            if not line:
                raise RuntimeError("annotator process closed its stdout")
            resp = json.loads(line)
            if resp.get("sid") != sid:
                raise RuntimeError(f"out-of-order response: {resp.get('sid')!r} != {sid!r}")
            return self._parse(sent_id, text, resp)
        except Exception as exc:
            self.fallback_count += 1
            logger.warning("external annotator failed (%s); builtin fallback", exc)
            return self._fallback.annotate(sent_id, text)

    def _parse(self, sent_id: tuple, text: str, resp: dict) -> AnnotatedSentence:
        stops = stopwords()
        tokens = [
            Token(t["t"], t["s"], t["e"], t["t"].casefold() in stops, t["t"].casefold())
            for t in resp["tokens"]
        ]
        spans = [
            PhraseSpan(s["s"], s["e"], s["kind"], s.get("label"))
            for s in resp.get("spans", [])
            if 0 <= s["s"] < s["e"] <= len(tokens)
        ]
        return AnnotatedSentence(sent_id, text, tokens, spans)

    def close(self):
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=5)
        self._proc = None


def make_annotator(spec: str):
    """Build an annotator from a spec string: "builtin" or "exec:CMD"."""
    if spec == "builtin":
        return BuiltinAnnotator()
    if spec.startswith("exec:"):
        return ExternalAnnotator(spec[len("exec:") :])
    raise ValueError(f"unknown annotator spec: {spec!r}")
