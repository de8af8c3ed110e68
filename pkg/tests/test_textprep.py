import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sentihier.errors import ConfigurationError
from sentihier.textprep import (
    PAD_INDEX,
    UNK_INDEX,
    UNK_TOKEN,
    build_vocab,
    index_document,
    split_sentences,
    tokenize,
    tokenize_document,
)


class TestSplitSentences:
    def test_two_terminators(self):
        assert split_sentences("Great app. Crashes a lot!") == ["Great app.", "Crashes a lot!"]

    def test_no_terminator(self):
        assert split_sentences("works fine") == ["works fine"]

    def test_abbreviation_guard(self):
        # Hand-walk: '.' of "e.g." is guarded, '.' of "docs." splits.
        assert split_sentences("see e.g. the docs. thanks") == ["see e.g. the docs.", "thanks"]

    def test_whitespace_only(self):
        assert split_sentences("   ") == [UNK_TOKEN]
        assert split_sentences("") == [UNK_TOKEN]

    def test_question_and_exclamation(self):
        assert split_sentences("Why? Because! Ok") == ["Why?", "Because!", "Ok"]

    @given(st.text(min_size=1, max_size=200))
    @settings(max_examples=300, deadline=None)
    def test_never_empty_and_preserves_characters(self, text):
        out = split_sentences(text)
        assert out
        if text.strip():
            assert "".join("".join(out).split()) == "".join(text.split())


class TestTokenize:
    def test_basic(self):
        assert tokenize("Crashes a lot!") == ["crashes", "a", "lot"]

    def test_url_rule(self):
        assert tokenize("Check http://x.io now") == ["check", "<url>", "now"]

    def test_pure_punctuation_falls_back_to_unk(self):
        assert tokenize("... !!") == [UNK_TOKEN]


class TestBuildVocab:
    def test_frequency_order(self):
        corpus = [tokenize_document("a b"), tokenize_document("a")]
        vocab = build_vocab(corpus)
        assert vocab.token_to_index == {UNK_TOKEN: 0, "<pad>": 1, "a": 2, "b": 3}

    def test_min_count_threshold(self):
        corpus = [tokenize_document("a b"), tokenize_document("a")]
        vocab = build_vocab(corpus, min_count=2)
        assert "a" in vocab.token_to_index
        assert "b" not in vocab.token_to_index

    def test_frequency_ties_break_lexicographically(self):
        corpus = [tokenize_document("zz aa zz aa zz aa")]
        vocab = build_vocab(corpus)
        assert vocab.index_of("aa") < vocab.index_of("zz")

    def test_empty_corpus_rejected(self):
        with pytest.raises(ConfigurationError):
            build_vocab([])

    def test_deterministic_regardless_of_document_order(self):
        docs = [tokenize_document(t) for t in ("x y z", "y z", "z q r s")]
        v1 = build_vocab(docs)
        v2 = build_vocab(list(reversed(docs)))
        assert v1.index_to_token == v2.index_to_token
        assert v1.fingerprint() == v2.fingerprint()


class TestIndexDocument:
    def test_known_tokens(self):
        vocab = build_vocab([tokenize_document("a b"), tokenize_document("a")])
        assert index_document(tokenize_document("a b"), vocab) == [[2, 3]]

    def test_oov_maps_to_unk(self):
        vocab = build_vocab([tokenize_document("a b")])
        assert index_document(tokenize_document("z"), vocab) == [[UNK_INDEX]]

    def test_round_trip_in_vocab(self):
        vocab = build_vocab([tokenize_document("alpha beta. gamma")])
        doc = tokenize_document("Alpha beta. Gamma")
        indexed = index_document(doc, vocab)
        recovered = [[vocab.token_of(i) for i in sent] for sent in indexed]
        assert recovered == [list(s) for s in doc.sentences]

    @given(st.text(min_size=0, max_size=100))
    @settings(max_examples=100, deadline=None)
    def test_total_on_any_text(self, text):
        vocab = build_vocab([tokenize_document("hello world")])
        indexed = index_document(tokenize_document(text), vocab)
        assert indexed and all(sent for sent in indexed)
        assert all(0 <= i < len(vocab) for sent in indexed for i in sent)

    def test_pad_index_reserved(self):
        vocab = build_vocab([tokenize_document("a")])
        assert vocab.token_of(PAD_INDEX) == "<pad>"
