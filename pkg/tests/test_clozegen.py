import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clozeforge.annotate import BuiltinAnnotator, PhraseSpan, tokenize
from clozeforge.clozegen import (
    ClozeConfig,
    MatchCandidate,
    find_matches,
    generate_document,
    make_cloze,
    prune,
    question_passage_overlap,
)
from clozeforge.corpus import Passage, SentenceRef
from clozeforge.dataset import triple_to_record
from conftest import make_documents
from oracle import oracle_generate

ANN = BuiltinAnnotator()
CFG = ClozeConfig()

PAPER_P = (
    "Autism is a neurodevelopmental disorder characterized by impaired social "
    "interaction, verbal and non-verbal communication, and restricted behavior."
)
PAPER_Q_SRC = "People with autism tend to be a little aloof with little to no social interaction."


def single_sentence_passage(text, doc_id="d", ordinal=0):
    return Passage(doc_id, ordinal, text, 0, len(text), (SentenceRef(text, 0, len(text), 0),))


def annotate_q(text, doc_id="d", ordinal=0):
    return ANN.annotate((doc_id, "intro", ordinal), text)


def annotate_p(passage):
    return [
        ANN.annotate((passage.doc_id, "passage", (passage.ordinal, si)), s.text)
        for si, s in enumerate(passage.sentences)
    ]


def span_for(sent, phrase, kind="NP"):
    """PhraseSpan over the token run matching `phrase` (case-folded)."""
    want = [t.lower for t in tokenize(phrase)]
    toks = [t.lower for t in sent.tokens]
    for i in range(len(toks) - len(want) + 1):
        if toks[i : i + len(want)] == want:
            return PhraseSpan(i, i + len(want), kind)
    raise AssertionError(f"{phrase!r} not found in {sent.text!r}")


class TestFindMatches:
    def test_social_interaction_single_candidate(self):
        q = annotate_q("There was no social interaction.")
        p = single_sentence_passage("Therapy improved social interaction.")
        sents = annotate_p(p)
        sents[0].phrase_spans = [span_for(sents[0], "social interaction")]
        cands = find_matches(q, sents, CFG)
        assert len(cands) == 1
        assert cands[0].length == 2

    def test_absent_phrase_no_candidates(self):
        q = annotate_q("There was no social interaction.")
        p = single_sentence_passage("A theory of quantum gravity.")
        sents = annotate_p(p)
        sents[0].phrase_spans = [span_for(sents[0], "quantum gravity")]
        assert find_matches(q, sents, CFG) == []

    def test_planted_overlaps_equal_enumeration(self):
        q = annotate_q("Copper magnets and copper coils and copper magnets again.")
        p = single_sentence_passage("They used copper magnets and copper coils.")
        sents = annotate_p(p)
        spans = [
            span_for(sents[0], "copper magnets"),
            span_for(sents[0], "copper coils"),
            span_for(sents[0], "copper"),
        ]
        sents[0].phrase_spans = spans
        got = {(c.span.token_start, c.span.token_end, c.q_token_start) for c in find_matches(q, sents, CFG)}
        # brute-force enumeration of every (span, occurrence) pair
        qf = [t.lower for t in q.tokens]
        expected = set()
        for span in spans:
            seq = [t.lower for t in sents[0].tokens[span.token_start : span.token_end]]
            for pos in range(len(qf) - len(seq) + 1):
                if qf[pos : pos + len(seq)] == seq:
                    expected.add((span.token_start, span.token_end, pos))
        assert got == expected
        assert len(expected) == 2 + 1 + 3  # magnets x2, coils x1, copper x3

    def test_ordering_longest_then_position(self):
        cands = find_matches(
            annotate_q("alpha beta gamma alpha beta."),
            [self._sent_with_spans()],
            CFG,
        )
        keys = [(c.length, c.q_token_start) for c in cands]
        assert keys == sorted(keys, key=lambda k: (-k[0], k[1]))

    def _sent_with_spans(self):
        p = single_sentence_passage("Use alpha beta and gamma alpha every day.")
        (sent,) = annotate_p(p)
        sent.phrase_spans = [span_for(sent, "alpha beta"), span_for(sent, "alpha")]
        return sent

    def test_max_answer_tokens_filter(self):
        q = annotate_q("zebra quartz orbit glacier ember falcon here.")
        p = single_sentence_passage("zebra quartz orbit glacier ember falcon there.")
        sents = annotate_p(p)
        sents[0].phrase_spans = [PhraseSpan(0, 6, "NP")]
        assert find_matches(q, sents, ClozeConfig(max_answer_tokens=5)) == []
        assert len(find_matches(q, sents, ClozeConfig(max_answer_tokens=6))) == 1

    def test_kind_filter(self):
        q = annotate_q("The copper coil hummed.")
        p = single_sentence_passage("A copper coil was found.")
        sents = annotate_p(p)
        sents[0].phrase_spans = [span_for(sents[0], "copper coil", kind="VP")]
        assert find_matches(q, sents, ClozeConfig(allowed_kinds=("NP",))) == []
        assert len(find_matches(q, sents, ClozeConfig(allowed_kinds=("NP", "VP")))) == 1

    def test_suffix_only_mode(self):
        q = annotate_q("The coil used copper magnets.")
        p = single_sentence_passage("Big copper magnets and a copper coil.")
        sents = annotate_p(p)
        sents[0].phrase_spans = [
            span_for(sents[0], "copper magnets"),
            span_for(sents[0], "copper coil"),
        ]
        strict = find_matches(q, sents, ClozeConfig(suffix_only=True))
        # only the match ending at q's last word token survives
        assert [(c.q_token_start, c.length) for c in strict] == [(3, 2)]


class TestMakeCloze:
    def test_paper_example(self):
        q = annotate_q(PAPER_Q_SRC, doc_id="autism")
        p = single_sentence_passage(PAPER_P, doc_id="autism")
        sents = annotate_p(p)
        sents[0].phrase_spans = [span_for(sents[0], "social interaction")]
        (cand,) = find_matches(q, sents, CFG)
        triple = make_cloze(q, p, sents, cand, CFG)
        assert triple.question == (
            "People with autism tend to be a little aloof with little to no @placeholder."
        )
        assert triple.answer.text == "social interaction"
        assert triple.passage == PAPER_P
        assert PAPER_P[triple.answer.passage_char_start : triple.answer.passage_char_end] == (
            "social interaction"
        )

    def test_sentence_initial_answer(self):
        q = annotate_q("Copper coils hum quietly.")
        p = single_sentence_passage("They wound copper coils there.")
        sents = annotate_p(p)
        sents[0].phrase_spans = [span_for(sents[0], "copper coils")]
        (cand,) = find_matches(q, sents, CFG)
        triple = make_cloze(q, p, sents, cand, CFG)
        assert triple.question.startswith("@placeholder")

    def test_custom_placeholder(self):
        q = annotate_q("The copper coil hummed.")
        p = single_sentence_passage("A copper coil was found.")
        sents = annotate_p(p)
        sents[0].phrase_spans = [span_for(sents[0], "copper coil")]
        cfg = ClozeConfig(placeholder="@blank")
        (cand,) = find_matches(q, sents, cfg)
        assert "@blank" in make_cloze(q, p, sents, cand, cfg).question

    def test_multiword_placeholder_rejected(self):
        with pytest.raises(ValueError):
            ClozeConfig(placeholder="two words")


def mk_triple(question, passage):
    from clozeforge.clozegen import Answer, ClozeTriple, Provenance

    return ClozeTriple("x" * 16, passage, question, Answer("a", 0, 1, "NP"), Provenance("d", 0, 0))


class TestPrune:
    def test_stopword_only_overlap_dropped(self):
        t = mk_triple("The of @placeholder.", "The of and by it.")
        assert prune([t], CFG) == []

    def test_two_content_words_kept(self):
        t = mk_triple(
            "People with autism show the @placeholder disorder.",
            "Autism is a disorder of development.",
        )
        assert question_passage_overlap(t, "@placeholder") == 2  # {autism, disorder}
        assert prune([t], CFG) == [t]

    def test_zero_threshold_passthrough(self):
        triples = [mk_triple("Unrelated @placeholder.", "Nothing shared here.")]
        assert prune(triples, ClozeConfig(min_overlap=0)) == triples

    def test_placeholder_excluded_from_overlap(self):
        t = mk_triple("@placeholder only.", "The @placeholder appears here too.")
        assert question_passage_overlap(t, "@placeholder") == 0


class TestGenerateDocument:
    def test_disjoint_intro_body_empty(self):
        from clozeforge.corpus import RawDocument, SegmentationConfig, segment
        from clozeforge.annotate import SentenceSplitter

        raw = RawDocument("d", "Zebras graze calmly. Quartz forms in veins.")
        doc = segment(raw, SegmentationConfig(), SentenceSplitter())
        assert generate_document(doc, ANN, CFG) == []

    def test_oracle_equivalence_small(self):
        for doc in make_documents(seed=23, n_docs=30, max_sentences=20):
            got = generate_document(doc, ANN, CFG)
            want = oracle_generate(doc, ANN, CFG)
            assert [triple_to_record(t) for t in got] == [triple_to_record(t) for t in want]

    def test_oracle_equivalence_suffix_mode(self):
        cfg = ClozeConfig(suffix_only=True, min_overlap=0)
        for doc in make_documents(seed=29, n_docs=20, max_sentences=20):
            got = generate_document(doc, ANN, cfg)
            want = oracle_generate(doc, ANN, cfg)
            assert [triple_to_record(t) for t in got] == [triple_to_record(t) for t in want]

    def test_per_pair_limit(self):
        cfg2 = ClozeConfig(per_pair_limit=2, min_overlap=0)
        docs = make_documents(seed=31, n_docs=25, max_sentences=15)
        cfg1 = ClozeConfig(min_overlap=0)
        n1 = sum(len(generate_document(d, ANN, cfg1)) for d in docs)
        n2 = sum(len(generate_document(d, ANN, cfg2)) for d in docs)
        assert n2 >= n1

    def test_monotonicity_in_min_overlap(self):
        docs = make_documents(seed=37, n_docs=20, max_sentences=15)
        counts = []
        for mo in (0, 1, 2, 3, 5):
            cfg = ClozeConfig(min_overlap=mo)
            counts.append(sum(len(generate_document(d, ANN, cfg)) for d in docs))
        assert counts == sorted(counts, reverse=True)

    def test_determinism(self):
        (doc,) = make_documents(seed=41, n_docs=1, max_sentences=30)
        a = json.dumps([triple_to_record(t) for t in generate_document(doc, ANN, CFG)])
        b = json.dumps([triple_to_record(t) for t in generate_document(doc, ANN, CFG)])
        assert a == b


@st.composite
def doc_strategy(draw):
    seed = draw(st.integers(0, 10**6))
    docs = make_documents(seed=seed, n_docs=1, max_sentences=12)
    if not docs:
        return None
    return docs[0]


class TestTripleInvariants:
    @given(doc_strategy())
    @settings(max_examples=150, deadline=None)
    def test_invariants_random_docs(self, doc):
        if doc is None:
            return
        for t in generate_document(doc, ANN, CFG):
            assert t.question.count(CFG.placeholder) == 1
            assert t.passage[t.answer.passage_char_start : t.answer.passage_char_end] == t.answer.text
            src = doc.intro_sentences[t.provenance.intro_ordinal].text
            assert t.question.replace(CFG.placeholder, t.answer.text, 1) == src
            assert question_passage_overlap(t, CFG.placeholder) >= CFG.min_overlap
