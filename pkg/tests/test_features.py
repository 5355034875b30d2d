import csv

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ein.corpus import Corpus, Document
from ein.features import (EmbeddingTable, FeatureError, WordList, avg_embedding, bow_features,
                          bow_transform, corpus_mean_value, emotion_features, emotion_matrix,
                          feature_dimension, feature_names, fit_vocabulary, lexical_mean_value,
                          load_embeddings, load_stop_words, load_wordlist, save_embeddings,
                          write_feature_csv)
from ein.lexicon import Lexicon, get_schema


def _small_lexicons():
    emolex = Lexicon.from_pairs(get_schema("EmoLex"), [
        ("happy", "joy"), ("glad", "joy"), ("happy", "trust"), ("war", "fear"), ("war", "anger")])
    liwc = Lexicon.from_pairs(get_schema("LIWC"), [
        ("happy", "positive emotion"), ("war", "negative emotion"), ("cry", "sadness")])
    return [emolex, liwc]


SMALL = _small_lexicons()


@pytest.fixture
def small_lexicons():
    return SMALL


def test_hand_count_fixture(small_lexicons):
    toks = ["happy", "glad", "a", "b", "c", "d", "e", "f", "g", "h"]
    v = emotion_features(toks, small_lexicons)
    names = v.names
    assert v.values[names.index("EmoLex:joy")] == pytest.approx(0.2)
    assert v.values[names.index("EmoLex:trust")] == pytest.approx(0.1)
    assert v.values[names.index("LIWC:pos_emo")] == pytest.approx(0.1)
    assert v.values[names.index("EmoLex:fear")] == 0.0


def test_multi_emotion_token_counts_once_per_emotion(small_lexicons):
    v = emotion_features(["war", "peace"], small_lexicons)
    d = dict(zip(v.names, v.values))
    assert d["EmoLex:fear"] == d["EmoLex:anger"] == d["LIWC:neg_emo"] == 0.5


def test_empty_doc_zero_vector(lexicons):
    v = emotion_features([], lexicons)
    assert len(v) == 38 and not v.values.any()


def test_dimension_laws(lexicons):
    assert feature_dimension(lexicons) == 38
    assert feature_dimension([lexicons[1]]) == 8
    assert feature_dimension([]) == 0


def test_layout_is_contiguous_per_lexicon(lexicons):
    names = feature_names(lexicons)
    blocks = [n.split(":")[0] for n in names]
    for lex in lexicons:
        idx = [i for i, b in enumerate(blocks) if b == lex.name]
        assert idx == list(range(idx[0], idx[0] + lex.schema.dimension))
        assert [names[i].split(":")[1] for i in idx] == list(lex.schema.emotions)


def test_stop_words_leave_denominator(small_lexicons):
    v = emotion_features(["happy", "the", "the", "the"], small_lexicons, stop_words={"the"})
    assert dict(zip(v.names, v.values))["EmoLex:joy"] == 1.0


def test_emotion_matrix_accepts_documents(small_lexicons):
    docs = [Document("1", "happy war", "x"), Document("2", "nothing here", "x")]
    X = emotion_matrix(docs, small_lexicons)
    assert X.shape == (2, 12)
    assert emotion_matrix([], small_lexicons).shape == (0, 12)


_vocab = ["happy", "glad", "war", "cry", "x", "y"]


@given(st.lists(st.sampled_from(_vocab), max_size=30), st.randoms(use_true_random=False))
def test_permutation_duplication_and_bounds(toks, rnd):
    small_lexicons = SMALL
    base = emotion_features(toks, small_lexicons).values
    shuffled = list(toks)
    rnd.shuffle(shuffled)
    assert np.array_equal(emotion_features(shuffled, small_lexicons).values, base)
    np.testing.assert_allclose(emotion_features(toks + toks, small_lexicons).values, base, atol=1e-15)
    assert len(base) == feature_dimension(small_lexicons)
    assert ((base >= 0) & (base <= 1)).all()


@given(st.lists(st.sampled_from(_vocab), max_size=30))
def test_lexicon_order_permutes_blocks(toks):
    small_lexicons = SMALL
    a = emotion_features(toks, small_lexicons)
    b = emotion_features(toks, small_lexicons[::-1])
    assert dict(zip(a.names, a.values)) == dict(zip(b.names, b.values))


class TestBagOfWords:
    def test_hand_counts(self):
        vocab, X = bow_features([["a", "a", "b"], ["b", "c"]])
        assert vocab == ["a", "b", "c"]
        assert X.toarray()[0].tolist() == [2, 1, 0]

    def test_min_df(self):
        vocab = fit_vocabulary([["a", "a", "b"], ["b", "c"]], min_df=2)
        assert vocab == ["b"]

    def test_max_vocab_and_tie_break(self):
        docs = [["z", "y", "x", "x"]]
        assert fit_vocabulary(docs, max_vocab=2) == ["x", "y"]

    def test_deterministic(self):
        docs = [["q", "r"], ["r", "s", "q"]]
        assert fit_vocabulary(docs) == fit_vocabulary(docs)

    def test_empty_vocab_error(self):
        with pytest.raises(FeatureError):
            fit_vocabulary([["a"]], min_df=2)

    def test_unknown_tokens_ignored(self):
        X = bow_transform([["a", "zz"]], ["a"])
        assert X.toarray().tolist() == [[1.0]]


class TestEmbeddings:
    table = EmbeddingTable(["w1", "w2"], np.array([[1.0, 0.0], [0.0, 1.0]]), oov=np.array([9.0, 9.0]))

    def test_mean(self):
        np.testing.assert_allclose(avg_embedding(["w1", "w2"], self.table), [0.5, 0.5])
        np.testing.assert_allclose(avg_embedding(["w1", "w1", "w2"], self.table), [2 / 3, 1 / 3])

    def test_oov_handling(self):
        assert not avg_embedding(["q", "r"], self.table).any()
        np.testing.assert_allclose(avg_embedding(["w1", "q"], self.table, skip_oov=False), [5.0, 4.5])

    def test_file_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        t = EmbeddingTable(["a", "b", "c"], rng.normal(size=(3, 4)))
        save_embeddings(t, tmp_path / "e.txt")
        back = load_embeddings(tmp_path / "e.txt")
        assert back.words == t.words
        assert np.array_equal(back.vectors, t.vectors)
        sub = load_embeddings(tmp_path / "e.txt", vocabulary={"b"})
        assert sub.words == ["b"]

    def test_bad_files(self, tmp_path):
        p = tmp_path / "e.txt"
        p.write_text("2 3\na 1 2 3\nb 1 2\n")
        with pytest.raises(FeatureError, match=":3:"):
            load_embeddings(p)
        p.write_text("3 1\na 1\n")
        with pytest.raises(FeatureError, match="announces 3"):
            load_embeddings(p)
        p.write_text("nonsense\n")
        with pytest.raises(FeatureError):
            load_embeddings(p)

    def test_coverage(self):
        assert self.table.coverage([["w1", "x"], ["w2", "w2"]]) == 0.75


class TestMeanValue:
    wl = WordList("bad", frozenset({"damn"}))

    def test_ratio(self):
        assert lexical_mean_value(["damn"] + ["ok"] * 9, self.wl) == pytest.approx(0.1)
        assert lexical_mean_value(["ok", "fine"], self.wl) == 0.0
        assert lexical_mean_value([], self.wl) == 0.0

    def test_corpus_level_is_macro(self):
        docs = [["damn", "ok"], ["ok"] * 8]
        assert corpus_mean_value(docs, self.wl) == pytest.approx(0.25)

    def test_twitter_above_news_ordering(self):
        # short texts with the occasional listed word beat long ones with a few
        tweets = [["damn"] + ["w"] * 332] * 3
        news = [["damn"] + ["w"] * 416] * 3
        assert corpus_mean_value(news, self.wl) < corpus_mean_value(tweets, self.wl)

    def test_load_wordlist(self, tmp_path):
        p = tmp_path / "insults.txt"
        p.write_text("# comment\nDamn\n\nheck\n")
        wl = load_wordlist(p)
        assert wl.name == "insults" and wl.words == {"damn", "heck"}
        (tmp_path / "empty.txt").write_text("# nothing\n")
        with pytest.raises(FeatureError):
            load_wordlist(tmp_path / "empty.txt")

    @given(st.lists(st.sampled_from(["damn", "a", "b"]), max_size=20), st.randoms(use_true_random=False))
    def test_order_and_scale_invariant(self, toks, rnd):
        v = lexical_mean_value(toks, self.wl)
        s = list(toks)
        rnd.shuffle(s)
        assert lexical_mean_value(s, self.wl) == v
        assert lexical_mean_value(toks + toks, self.wl) == pytest.approx(v)


def test_feature_csv(tmp_path, small_lexicons):
    X = emotion_matrix([["happy", "war"]], small_lexicons)
    write_feature_csv(tmp_path / "f.csv", ["d1"], X, feature_names(small_lexicons), labels=["x"])
    rows = list(csv.reader(open(tmp_path / "f.csv", encoding="utf-8")))
    assert rows[0][:3] == ["id", "label", "EmoLex:anger"]
    assert [float(v) for v in rows[1][2:]] == X[0].tolist()


def test_stop_words_list():
    sw = load_stop_words()
    assert "the" in sw and "war" not in sw
