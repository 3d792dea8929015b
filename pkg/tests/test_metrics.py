import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tonguetwist import metrics as M
from tonguetwist.errors import EmptyInputError, MissingAssetError
from tonguetwist.lexicon import load_lexicon, transcribe_text
from tonguetwist.phonology import phoneme_distance

# text -> (words, sentences, characters, syllables, complex words), counted by hand
HAND_COUNTS = {
    "The cat sat.": (3, 1, 9, 3, 0),
    "A big dog ran home. It was happy.": (8, 2, 24, 9, 0),
    "Wonderful elephants celebrated yesterday.": (4, 1, 37, 13, 4),
    "Is it raining?": (3, 1, 11, 4, 0),
    "Go! Stop! Wait!": (3, 3, 10, 3, 0),
}


def test_bob_bob_bob(lex):
    t = "bob bob bob"
    assert M.po(t, lex) == pytest.approx(2 / 9, abs=1e-12)
    assert M.init_po(t, lex) == pytest.approx(1 / 3, abs=1e-12)
    assert M.iped(t, lex=lex) == 0
    with pytest.raises(EmptyInputError):
        M.iped("bob", lex=lex)


def test_po_examples(lex):
    assert M.po("a", lex) == 1.0
    assert M.init_po("cat dog", lex) == 1.0
    assert M.po("she sells sea shells by the seashore", lex) == pytest.approx(12 / 21)
    assert M.init_po("she sells sea shells by the seashore", lex) == pytest.approx(4 / 7)
    with pytest.raises(EmptyInputError):
        M.po("", lex)
    with pytest.raises(EmptyInputError):
        M.init_po("", lex)


def test_iped_examples(lex):
    assert M.iped("bob bought big bread", lex=lex) == 0
    assert M.iped("tick dock", lex=lex) == phoneme_distance("t", "d")
    tr = transcribe_text("she sells sea", lex)
    expected = (phoneme_distance("SH", "S") + phoneme_distance("S", "S")) / 2
    assert M.iped(tr) == pytest.approx(expected)


def test_oped_examples(lex):
    toy = load_lexicon("TS  T S\n")
    assert M.oped(transcribe_text("ts", toy)) == phoneme_distance("t", "s")
    tr = transcribe_text("its", lex)  # IH T S
    assert M.oped(tr) == pytest.approx((phoneme_distance("IH", "T") + phoneme_distance("T", "S")) / 2)
    assert M.oped("ah ah ah ah", lex=lex) == 0
    with pytest.raises(EmptyInputError):
        M.oped("a", lex=lex)


@pytest.mark.parametrize("text", list(HAND_COUNTS))
def test_readability_against_hand_counts(lex, text):
    w, s, c, syl, cx = HAND_COUNTS[text]
    stats = M.text_stats(text, lex)
    assert (stats.words, stats.sentences, stats.characters, stats.syllables, stats.complex_words) == (w, s, c, syl, cx)
    assert M.readability(text, "ari", lex) == pytest.approx(4.71 * c / w + 0.5 * w / s - 21.43, abs=1e-9)
    assert M.readability(text, "gunning_fog", lex) == pytest.approx(0.4 * (w / s + 100 * cx / w), abs=1e-9)
    assert M.readability(text, "flesch_kincaid", lex) == pytest.approx(0.39 * w / s + 11.8 * syl / w - 15.59, abs=1e-9)


def test_readability_trivia(lex):
    assert M.readability("The cat sat.", "ari", lex) == pytest.approx(-5.8, abs=1e-9)
    assert M.readability("a", "flesch_kincaid", lex) == pytest.approx(-3.40, abs=1e-9)
    ten = "the cat and the dog sat on a red mat"
    assert M.readability(ten, "gunning_fog", lex) == pytest.approx(4.0, abs=1e-9)
    assert M.count_sentences("no terminator here") == 1
    with pytest.raises(EmptyInputError):
        M.readability("", "ari", lex)
    with pytest.raises(ValueError):
        M.readability("hi", "smog", lex)


def test_dale_chall(lex):
    text = "The cat sat on the zeppelin."
    with pytest.raises(MissingAssetError):
        M.readability(text, "dale_chall", lex)
    fam = {"the", "cat", "sat", "on"}
    pct = 100 * 1 / 6
    assert M.readability(text, "dale_chall", lex, fam) == pytest.approx(0.1579 * pct + 0.0496 * 6 + 3.6365)
    all_known = fam | {"zeppelin"}
    assert M.readability(text, "dale_chall", lex, all_known) == pytest.approx(0.0496 * 6)


def test_bundled_familiar_list():
    fam = M.default_familiar_words()
    assert len(fam) > 2900 and "cat" in fam and "zeppelin" not in fam
    with pytest.raises(MissingAssetError):
        M.load_word_list("/nonexistent/list.txt")


def test_score_text(lex):
    r = M.score_text("bob bob bob", "x", lex, familiar=M.default_familiar_words())
    row = r.as_row()
    assert tuple(row) == M.REPORT_FIELDS
    assert row["word_count"] == 3 and row["phoneme_count"] == 9
    assert row["iped"] == 0 and row["re_dale_chall"] is not None
    single = M.score_text("bob", "y", lex)
    assert single.iped is None and single.re_dale_chall is None and single.po == pytest.approx(2 / 3)
    empty = M.score_text("", "z", lex)
    assert empty.po is None and empty.re_ari is None and empty.word_count == 0


words = st.lists(st.sampled_from(["she", "sells", "sea", "shells", "peter", "picks", "big", "black", "bugs"]),
                 min_size=2, max_size=10)


@settings(max_examples=60, deadline=None)
@given(words)
def test_ranges_and_duplication(lex, ws):
    text = " ".join(ws)
    tr = transcribe_text(text, lex)
    assert 0 < M.po(tr) <= 1 and 0 < M.init_po(tr) <= 1
    assert M.iped(tr) >= 0 and M.oped(tr) >= 0
    doubled = transcribe_text(text + " " + text, lex)
    assert M.init_po(doubled) < M.init_po(tr)
    assert M.po(doubled) <= M.po(tr)
    spaced = transcribe_text("   ".join(ws), lex)
    assert M.iped(spaced) == M.iped(tr) and M.oped(spaced) == M.oped(tr)


@settings(max_examples=60, deadline=None)
@given(words)
def test_iped_zero_iff_identical_rows(lex, ws):
    tr = transcribe_text(" ".join(ws), lex)
    same = all(phoneme_distance(a, b) == 0 for a, b in zip(tr.initials, tr.initials[1:]))
    assert (M.iped(tr) == 0) == same
