from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tonguetwist.errors import EmptyCandidateListError, EmptyInputError, FormatError
from tonguetwist.lexicon import transcribe_word
from tonguetwist.phonology import default_table
from tonguetwist.vocab import (EmbeddingTable, TopicPhrase, bank_sizes, build_candidate_list,
                               candidate_words, cooccurrence_embeddings, cosine, default_embeddings,
                               default_pos_lists, embed_phrase, load_embeddings, sample_topic,
                               secondary_phoneme, select_phoneme_pair)

TABLE = default_table()
WIP = TABLE.word_initial_set()


def brute_nearest(ph, pool):
    others = [p for p in pool if p.ipa != ph]
    ds = [TABLE.distance(ph, p) for p in others]
    return others[ds.index(min(ds))].ipa


def test_sample_topic():
    assert str(sample_topic(5, ["rural"], ["brewery"])) == "rural brewery"
    mods, nouns = default_pos_lists()
    assert sample_topic(11, mods, nouns) == sample_topic(11, mods, nouns)
    with pytest.raises(EmptyInputError):
        sample_topic(1, [], ["x"])


def test_sample_topic_covers_cross_product():
    mods, nouns = ["a", "b"], ["x", "y", "z"]
    seen = Counter(str(sample_topic(s, mods, nouns)) for s in range(600))
    assert len(seen) == 6 and min(seen.values()) > 60


def test_pair_examples():
    assert secondary_phoneme("f", WIP).ipa == "v"
    assert secondary_phoneme("p", WIP).ipa == "b"
    t, d = TABLE.lookup("t"), TABLE.lookup("d")
    assert select_phoneme_pair("anything", [t, d], 0) in [(t, d), (d, t)]
    with pytest.raises(EmptyInputError):
        select_phoneme_pair("x", [t], 0)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["fun", "public commentator", "rural brewery"]))
def test_pair_properties(seed, topic):
    ph1, ph2 = select_phoneme_pair(topic, WIP, seed)
    assert ph1 != ph2 and ph1 in WIP and ph2 in WIP
    assert ph2.ipa == brute_nearest(ph1.ipa, WIP)
    assert select_phoneme_pair(topic, WIP, seed) == (ph1, ph2)


def test_embed_phrase():
    emb = EmbeddingTable({"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0])})
    np.testing.assert_allclose(embed_phrase(["a", "b"], emb), [0.5, 0.5])
    np.testing.assert_allclose(embed_phrase(["a", "zzz"], emb), [1.0, 0.0])
    with pytest.raises(EmptyInputError):
        embed_phrase(["zzz"], emb)
    assert cosine(np.zeros(2), np.ones(2)) == 0.0


def test_embedding_file_format():
    emb = load_embeddings("2 3\nfox 1 2 3\nFun 0 0 1\n")
    assert emb.dimension == 3 and "fun" in emb
    assert load_embeddings(emb.dumps()).dumps() == emb.dumps()
    with pytest.raises(FormatError) as exc:
        load_embeddings("fox 1 2\nfun 1\n")
    assert exc.value.lineno == 2


def test_candidate_words_trivia(toy_lex):
    only_pat = EmbeddingTable({"pat": np.array([1.0, 2.0]), "topic": np.array([1.0, 0.0])})
    assert [w.token for w in candidate_words(toy_lex, "p", "topic", only_pat)] == ["pat"]
    emb = EmbeddingTable({"fun": np.array([1.0, 0.0]), "fast": np.array([0.0, 1.0]),
                          "fox": np.array([1.0, 1.0]), "funny": np.array([1.0, 1.0])})
    ranked = candidate_words(toy_lex, "f", "fun", emb, n=10)
    assert [w.token for w in ranked] == ["fun", "fox", "funny", "fast"]  # tie fox/funny alphabetical
    assert ranked[0].score == pytest.approx(1.0)
    assert [w.token for w in candidate_words(toy_lex, "f", "fun", emb, n=2)] == ["fun", "fox"]
    assert candidate_words(toy_lex, "f", "nothing known", emb) == []
    with pytest.raises(ValueError):
        candidate_words(toy_lex, "f", "fun", emb, n=0)


def test_public_commentator(lex):
    words = [w.token for w in candidate_words(lex, "p", "public commentator", default_embeddings(), 10)]
    assert "public" in words[:3]


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([5, 10]))
def test_candidate_list_invariants(lex, seed, n):
    mods, nouns = default_pos_lists()
    topic = sample_topic(seed, mods, nouns)
    try:
        cl = build_candidate_list(topic, WIP, lex, default_embeddings(), n, seed)
    except EmptyCandidateListError:
        return
    codes = {cl.ph1.arpabet, cl.ph2.arpabet}
    assert all(transcribe_word(t, lex).initial in codes for t in cl.tokens)
    assert all(v <= n for v in bank_sizes(cl).values())
    assert all(np.isfinite(w.score) for w in cl.words)
    again = build_candidate_list(topic, WIP, lex, default_embeddings(), n, seed)
    assert again.tokens == cl.tokens
    unshuffled = (candidate_words(lex, cl.ph1, topic, default_embeddings(), n)
                  + candidate_words(lex, cl.ph2, topic, default_embeddings(), n))
    assert Counter(w.token for w in unshuffled) == Counter(cl.tokens)


def test_candidate_list_sizes(lex):
    cl = build_candidate_list(TopicPhrase("public", "commentator"), WIP, lex, default_embeddings(),
                              5, 68, pair=("p", "b"))
    assert len(cl.words) == 10
    assert bank_sizes(cl) == Counter({"P": 5, "B": 5})


def test_empty_banks(toy_lex):
    emb = EmbeddingTable({"topic": np.array([1.0])})
    with pytest.raises(EmptyCandidateListError):
        build_candidate_list("topic", WIP, toy_lex, emb, 5, 0, pair=("p", "b"))


def test_cooccurrence_embeddings_reproducible():
    lines = ["the fox ran fast", "the fox ate fruit", "a bat sat", "the bat flew fast"]
    a, b = cooccurrence_embeddings(lines, dim=3), cooccurrence_embeddings(lines, dim=3)
    assert a.dumps() == b.dumps() and a.dimension == 3


def test_bundled_assets_cover_pos_lists():
    emb = default_embeddings()
    mods, nouns = default_pos_lists()
    assert all(w in emb for w in mods + nouns)
