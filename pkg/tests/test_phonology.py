import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tonguetwist.errors import EmptyInputError, FormatError, UnknownPhonemeError
from tonguetwist.phonology import (arpabet_to_ipa, default_table, feature_vector, ipa_to_arpabet,
                                   nearest_phoneme, parse_feature_table, phoneme_distance,
                                   sequence_ped, strip_stress)

TABLE = default_table()
CODES = [p.arpabet for p in TABLE]
codes = st.sampled_from(CODES)
seqs = st.lists(codes, max_size=3)


def brute_distance(a, b, table=TABLE):
    x, y = table.vector(a), table.vector(b)
    return sum(w * abs(int(u) - int(v)) / 2 for w, u, v in zip(table.weights, x, y))


def alignments(n, m):
    """Every monotone alignment as a list of ops: ('s', i, j), ('d', i), ('i', j)."""
    if n == 0 and m == 0:
        yield []
        return
    if n and m:
        for rest in alignments(n - 1, m - 1):
            yield rest + [("s", n - 1, m - 1)]
    if n:
        for rest in alignments(n - 1, m):
            yield rest + [("d", n - 1)]
    if m:
        for rest in alignments(n, m - 1):
            yield rest + [("i", m - 1)]


def brute_ped(a, b, table=TABLE):
    indel = table.indel_cost
    best = math.inf
    for al in alignments(len(a), len(b)):
        cost = sum(brute_distance(a[op[1]], b[op[2]], table) if op[0] == "s" else indel for op in al)
        best = min(best, cost)
    return best


def test_inventory_is_bijective():
    ipas = [p.ipa for p in TABLE]
    assert len(set(ipas)) == len(ipas) == len(set(CODES)) == 39
    for p in TABLE:
        assert ipa_to_arpabet(arpabet_to_ipa(p.arpabet)) == p.arpabet
        assert arpabet_to_ipa(ipa_to_arpabet(p.ipa)) == p.ipa


def test_table_shape():
    assert len(TABLE.features) == 22
    assert all(w >= 0 for w in TABLE.weights) and max(TABLE.weights) > 0
    for p in TABLE:
        assert set(TABLE.vector(p).tolist()) <= {-1, 0, 1}


def test_conversions():
    assert arpabet_to_ipa("HH") == "h"
    assert arpabet_to_ipa("T") == "t"
    assert arpabet_to_ipa("ER0") == arpabet_to_ipa("ER") == arpabet_to_ipa("ER1")
    assert ipa_to_arpabet("g") == "G"  # ascii g accepted for the script g
    assert strip_stress("AH0") == "AH"
    with pytest.raises(UnknownPhonemeError) as exc:
        arpabet_to_ipa("QQ")
    assert exc.value.symbol == "QQ"
    with pytest.raises(UnknownPhonemeError):
        feature_vector("Q")


def test_t_d_differ_only_in_voicing():
    t, d = feature_vector("t"), feature_vector("d")
    assert {k for k in t if t[k] != d[k]} == {"voiced"}
    w = dict(zip(TABLE.features, TABLE.weights))
    assert phoneme_distance("t", "d") == w["voiced"] == 1.0


def test_p_b_closer_than_p_g():
    assert phoneme_distance("p", "b") < phoneme_distance("p", "g")


def test_distance_matches_brute_force_everywhere():
    for a, b in itertools.product(CODES, repeat=2):
        assert phoneme_distance(a, b) == pytest.approx(brute_distance(a, b), abs=1e-12)


def test_distance_axioms():
    for a, b in itertools.product(CODES, repeat=2):
        d = phoneme_distance(a, b)
        assert d >= 0
        assert d == phoneme_distance(b, a)
        same_row = np.array_equal(TABLE.vector(a), TABLE.vector(b))
        assert (d == 0) == same_row


def test_half_cost_for_unspecified():
    src = "features\tx,y\nweights\t1,2\na\tA\tconsonant\tyes\t+,0\nb\tB\tconsonant\tyes\t-,-\n"
    t = parse_feature_table(src)
    assert t.distance("a", "b") == 1.0 + 2 * 0.5
    assert t.indel_cost == pytest.approx(t.max_distance / 2)


def test_indel_cost_is_half_max():
    assert TABLE.indel_cost == TABLE.max_distance / 2
    assert TABLE.max_distance == max(brute_distance(a, b) for a, b in itertools.product(CODES, repeat=2))


def test_sequence_examples():
    assert sequence_ped(["S", "T"], ["S", "T"]) == 0
    assert sequence_ped(["T"], []) == TABLE.indel_cost
    assert sequence_ped(["T", "S"], ["D", "S"]) == phoneme_distance("t", "d")
    assert sequence_ped([], ["P", "B", "K"]) == 3 * TABLE.indel_cost
    assert sequence_ped([], []) == 0


@settings(max_examples=300, deadline=None)
@given(seqs, seqs)
def test_sequence_ped_equals_alignment_oracle(a, b):
    assert sequence_ped(a, b) == pytest.approx(brute_ped(a, b), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(seqs, seqs)
def test_sequence_ped_properties(a, b):
    d = sequence_ped(a, b)
    assert d == pytest.approx(sequence_ped(b, a))
    assert sequence_ped(a, a) == 0
    assert d <= (len(a) + len(b)) * TABLE.indel_cost + 1e-9


@given(codes, codes)
def test_length_one_reduces_to_phoneme_distance(a, b):
    assert sequence_ped([a], [b]) == phoneme_distance(a, b)


def brute_argmin(target, cands, table=TABLE):
    scores = [brute_distance(target, c, table) for c in cands]
    return cands[scores.index(min(scores))]


@pytest.mark.parametrize("ph,expected", [("f", "v"), ("p", "b"), ("t", "d"), ("b", "p"), ("ʃ", "s"), ("s", "z")])
def test_nearest_in_wip(ph, expected):
    wip = [p.ipa for p in TABLE.word_initial_set() if p.ipa != ph]
    got = nearest_phoneme(ph, wip)
    assert got.ipa == expected == brute_argmin(ph, wip)


def test_nearest_singleton_and_empty():
    assert nearest_phoneme("t", ["k"]).ipa == "k"
    with pytest.raises(EmptyInputError):
        nearest_phoneme("t", [])


def test_nearest_tie_goes_to_first():
    src = "features\tx\nweights\t1\na\tA\tconsonant\tyes\t+\nb\tB\tconsonant\tyes\t-\nc\tC\tconsonant\tyes\t-\n"
    t = parse_feature_table(src)
    assert nearest_phoneme("a", ["b", "c"], t).ipa == "b"
    assert nearest_phoneme("a", ["c", "b"], t).ipa == "c"


@settings(max_examples=50, deadline=None)
@given(codes, st.floats(min_value=0.01, max_value=100))
def test_nearest_invariant_under_weight_scaling(ph, scale):
    scaled = TABLE.with_weights([w * scale for w in TABLE.weights])
    cands = [c for c in CODES if c != ph]
    assert nearest_phoneme(ph, cands, scaled) == nearest_phoneme(ph, cands, TABLE)


def test_wip_membership_and_order():
    assert [p.ipa for p in TABLE.word_initial_set()] == [
        "p", "b", "t", "d", "k", "ɡ", "tʃ", "dʒ", "f", "v", "θ", "s", "z", "ʃ", "h", "m", "n", "l", "ɹ", "w", "j"]


def test_dumps_round_trip():
    again = parse_feature_table(TABLE.dumps())
    assert again.dumps() == TABLE.dumps()
    assert [p.ipa for p in again] == [p.ipa for p in TABLE]


@pytest.mark.parametrize("bad,line", [
    ("weights\t1\n", None),
    ("features\tx,y\nweights\t1,1\na\tA\tconsonant\tyes\t+\n", 3),
    ("features\tx\nweights\t-1\na\tA\tconsonant\tyes\t+\n", 2),
    ("features\tx\nweights\t1\na\tA\tconsonant\tyes\t+\na\tB\tconsonant\tyes\t-\n", 4),
    ("features\tx\nweights\t1\na\tA\tconsonant\tyes\t7\n", 3),
])
def test_parse_errors_carry_line_numbers(bad, line):
    with pytest.raises(FormatError) as exc:
        parse_feature_table(bad)
    assert exc.value.lineno == line
