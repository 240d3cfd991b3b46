import re
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clozeforge.annotate import (
    BuiltinAnnotator,
    ExternalAnnotator,
    SentenceSplitter,
    split_sentences,
    stopwords,
    tokenize,
)

FIFTY = Path(__file__).parent / "fixtures" / "fifty_sentences.txt"
ECHO = f"{sys.executable} {Path(__file__).parent.parent / 'scripts' / 'echo_annotator.py'}"


class TestTokenize:
    def test_basic(self):
        assert [t.text for t in tokenize("social interaction.")] == ["social", "interaction", "."]

    def test_hyphen(self):
        assert [t.text for t in tokenize("non-verbal communication")] == [
            "non", "-", "verbal", "communication",
        ]

    def test_empty(self):
        assert tokenize("") == []

    def test_placeholder_is_one_token(self):
        assert [t.text for t in tokenize("no @placeholder.")] == ["no", "@placeholder", "."]

    def test_stopword_flags(self):
        toks = tokenize("The zebra is small")
        assert [t.is_stopword for t in toks] == [True, False, True, False]

    def test_long_sentence_matches_regex_oracle(self):
        words = [f"w{i}" for i in range(500)] + [f"p-{i}" for i in range(250)]
        text = " ".join(words)
        oracle = re.findall(r"@\w+|\w+|[^\w\s]", text)
        assert [t.text for t in tokenize(text)] == oracle
        assert len(tokenize(text)) == 500 + 250 * 3

    @given(st.text(max_size=200))
    @settings(max_examples=200)
    def test_offsets_slice_back(self, text):
        for tok in tokenize(text):
            assert text[tok.char_start : tok.char_end] == tok.text
            assert tok.char_start < tok.char_end

    @given(st.text(max_size=200))
    def test_tokens_ordered_nonoverlapping(self, text):
        toks = tokenize(text)
        for a, b in zip(toks, toks[1:]):
            assert a.char_end <= b.char_start


class TestSplitSentences:
    def test_single_letter_exception_disabled(self):
        splitter = SentenceSplitter(single_letter_abbrev=False)
        assert splitter.split("A. B? C!") == ["A.", "B?", "C!"]

    def test_single_letter_exception_default(self):
        assert split_sentences("A. B? C!") == ["A. B?", "C!"]

    def test_no_terminal_punctuation(self):
        assert split_sentences("no punctuation at all") == ["no punctuation at all"]

    def test_abbreviations_not_split(self):
        assert split_sentences("Dr. Smith left. Mr. Jones stayed.") == [
            "Dr. Smith left.",
            "Mr. Jones stayed.",
        ]

    def test_lowercase_continuation_not_split(self):
        assert split_sentences("It was 3.14 exactly. done") == ["It was 3.14 exactly. done"]

    def test_fifty_sentence_fixture(self):
        text = FIFTY.read_text().strip()
        assert len(split_sentences(text)) == 50

    def test_spans_slice_back(self):
        text = "First one. Second one! Third?"
        splitter = SentenceSplitter()
        assert [text[s:e] for s, e in splitter.split_spans(text)] == splitter.split(text)


class TestBuiltinAnnotator:
    def test_autism_np_spans(self):
        sent = BuiltinAnnotator().annotate(("d", "intro", 0), "Autism is a neurodevelopmental disorder")
        phrases = {
            sent.span_text(s.token_start, s.token_end) for s in sent.phrase_spans if s.kind == "NP"
        }
        assert {"Autism", "neurodevelopmental disorder"} <= phrases

    def test_all_stopwords_no_spans(self):
        sent = BuiltinAnnotator().annotate(("d", "intro", 0), "The of and with it")
        assert sent.phrase_spans == []

    def test_long_runs_not_chunked(self):
        text = "alpha beta gamma delta epsilon zeta eta"  # 7-token run, over the cap
        sent = BuiltinAnnotator().annotate(("d", "intro", 0), text)
        assert all(s.token_end - s.token_start <= 5 for s in sent.phrase_spans)
        assert sent.phrase_spans == []

    def test_gazetteer_ne(self):
        sent = BuiltinAnnotator().annotate(("d", "intro", 0), "Paris is lovely")
        assert any(s.kind == "NE" for s in sent.phrase_spans)

    def test_deterministic(self):
        ann = BuiltinAnnotator()
        text = "Newton wrote about copper magnets in Berlin."
        assert ann.annotate(("d", "intro", 0), text) == ann.annotate(("d", "intro", 0), text)

    @given(st.text(alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Nd", "Po", "Zs")), max_size=120))
    @settings(max_examples=200)
    def test_span_bounds_invariant(self, text):
        sent = BuiltinAnnotator().annotate(("d", "intro", 0), text)
        for s in sent.phrase_spans:
            assert 0 <= s.token_start < s.token_end <= len(sent.tokens)


class TestExternalAnnotator:
    def test_echo_roundtrip(self):
        ann = ExternalAnnotator(ECHO)
        try:
            sent = ann.annotate(("d", "intro", 0), "Quito is a city")
            assert [t.text for t in sent.tokens] == ["Quito", "is", "a", "city"]
            assert sent.tokens[0].char_start == 0 and sent.tokens[0].char_end == 5
            (span,) = sent.phrase_spans
            assert (span.token_start, span.token_end, span.kind, span.ne_label) == (0, 1, "NE", "ECHO")
            assert ann.fallback_count == 0
        finally:
            ann.close()

    def test_failure_falls_back_to_builtin(self):
        ann = ExternalAnnotator("false")
        try:
            sent = ann.annotate(("d", "intro", 0), "Autism is a neurodevelopmental disorder")
            assert ann.fallback_count == 1
            assert any(s.kind == "NP" for s in sent.phrase_spans)
        finally:
            ann.close()

    def test_garbage_output_falls_back(self):
        ann = ExternalAnnotator("cat /dev/null; echo 'not json'")
        try:
            ann.annotate(("d", "intro", 0), "Some text here")
            assert ann.fallback_count == 1
        finally:
            ann.close()


def test_stopword_list_is_127_words():
    assert len(stopwords()) == 127
