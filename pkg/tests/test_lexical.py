import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from likefarm.datamodel import Post, PostKind
from likefarm.lexical import (
    LEXICAL_FIELDS, STOPWORDS, ari, count_syllables, english_ratio, flesch, is_english,
    lexical_profile, lexical_profile_from_texts, tokenize,
)
from oracles import syllables_by_hand


def _post(text, kind=PostKind.TEXT):
    return Post("u", kind, text, 0, 0, False, 0)


def test_stopword_list_size():
    assert len(STOPWORDS) == 200


def test_tokenize_simple():
    t = tokenize("The cat sat.")
    assert list(t.words) == ["The", "cat", "sat"]
    assert (t.sentences, t.uppercase, t.punctuation) == (1, 1, 1)


def test_tokenize_empty():
    t = tokenize("")
    assert len(t.words) == 0
    assert (t.sentences, t.chars, t.uppercase, t.punctuation, t.digits, t.non_letters) == (0,) * 6


def test_tokenize_emoticon_and_digits():
    t = tokenize("Hi!! :) 42")
    assert list(t.words) == ["Hi", "42"]
    assert t.sentences == 1
    assert t.digits == 2
    assert t.non_letters >= 2


def test_tokenize_apostrophes_kept_inside_words():
    assert list(tokenize("don't stop").words) == ["don't", "stop"]


@given(st.text(max_size=80))
@settings(max_examples=200, deadline=None)
def test_character_classes_partition(text):
    t = tokenize(text)
    assert t.letters + t.digits + t.whitespace + t.non_letters == t.chars == len(text)
    assert t.punctuation <= t.non_letters
    assert t.uppercase <= t.letters


def test_is_english():
    assert is_english("the quick brown fox and the dog")
    assert not is_english("xqz blorf ktt")
    assert not is_english("")


def test_english_ratio_cases():
    en = [_post("the cat is on the mat")] * 4
    other = [_post("αβγ δεζ ηθι")] * 5
    assert english_ratio(en).r == 1.0
    assert english_ratio(other).r == 0.0
    assert english_ratio(en[:3] + other[:3]).r == 0.5
    assert english_ratio([]).r == 0.0
    # posts without text do not count towards the denominator
    assert english_ratio(en + [_post("", PostKind.PHOTO)]).r == 1.0


def test_ari_oracles():
    assert ari(5.7, 22.8) == pytest.approx(4.71 * 5.7 + 0.5 * 22.8 - 21.43)
    assert ari(0, 0) == 0.0


@given(st.floats(0.1, 20), st.floats(0.1, 50), st.floats(0.01, 5))
def test_ari_monotone(awl, asl, d):
    assert ari(awl + d, asl) > ari(awl, asl)
    assert ari(awl, asl + d) > ari(awl, asl)


def test_flesch_oracles():
    assert flesch(3, 1, 3) == pytest.approx(206.835 - 1.015 * 3 - 84.6, abs=1e-12)
    assert round(flesch(3, 1, 3), 2) == 119.19
    assert flesch(0, 1, 0) == 0.0 and flesch(5, 0, 5) == 0.0


@pytest.mark.parametrize("word,n", [("cat", 1), ("hello", 2), ("the", 1), ("rhythm", 1), ("queue", 1),
                                    ("lime", 1), ("create", 1), ("be", 1), ("syzygy", 3)])
def test_syllables_hand_counts(word, n):
    assert count_syllables(word) == n


@given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=15))
def test_syllables_match_oracle(word):
    assert count_syllables(word) == syllables_by_hand(word) >= 1


def test_profile_hand_count():
    lx = lexical_profile([_post("The cat sat. The dog ran.")])
    assert lx.n_words == 6 and lx.n_sentences == 2
    assert lx.richness == pytest.approx(5 / 6)
    assert lx.avg_word_length == pytest.approx(3.0)
    assert lx.avg_sentence_length == pytest.approx(3.0)
    assert lx.avg_uppercase == pytest.approx(2.0)
    assert lx.n_chars == len("The cat sat. The dog ran.")
    assert lx.pct_punctuation == pytest.approx(2 / 25)
    assert lx.flesch == pytest.approx(flesch(6, 2, 6))
    assert lx.ari == pytest.approx(ari(3.0, 3.0))


def test_profile_zero_english_posts():
    lx = lexical_profile([_post("αβγ δεζ"), _post("", PostKind.VIDEO)])
    assert lx.as_tuple() == (0.0,) * 12
    assert len(LEXICAL_FIELDS) == 12


english_texts = st.lists(
    st.lists(st.sampled_from(["the", "and", "cat", "dog", "Runs", "fast", "of", "is", "a", "blue"]),
             min_size=3, max_size=12).map(lambda ws: " ".join(ws) + "."),
    min_size=1, max_size=5)


@given(english_texts)
@settings(max_examples=100, deadline=None)
def test_duplication_never_increases_richness(texts):
    once = lexical_profile_from_texts(texts)
    twice = lexical_profile_from_texts(texts + texts)
    assert twice.richness <= once.richness + 1e-12


@given(english_texts, st.randoms())
@settings(max_examples=100, deadline=None)
def test_profile_order_invariant(texts, rnd):
    posts = [_post(t) for t in texts]
    shuffled = posts[:]
    rnd.shuffle(shuffled)
    a, b = lexical_profile(posts).as_tuple(), lexical_profile(shuffled).as_tuple()
    assert a == pytest.approx(b)


@given(english_texts)
@settings(max_examples=100, deadline=None)
def test_profile_ranges(texts):
    lx = lexical_profile_from_texts(texts)
    assert 0 < lx.richness <= 1
    for f in ("pct_punctuation", "pct_numbers", "pct_non_letters"):
        assert 0 <= getattr(lx, f) <= 1
    assert lx.pct_punctuation + lx.pct_numbers <= lx.pct_non_letters + lx.pct_numbers <= 1


def test_english_detector_agrees_with_generator(small_dataset):
    """Generated English posts are built from the English vocabulary, the rest
    from a disjoint alphabet; the detector must recover that split."""
    texts = [p.text for p in small_dataset.posts if p.text]
    random.Random(0).shuffle(texts)
    en = [t for t in texts if t.isascii()][:1000]
    other = [t for t in texts if not t.isascii()][:1000]
    assert len(en) >= 500 and len(other) >= 200
    agree = sum(is_english(t) for t in en) + sum(not is_english(t) for t in other)
    assert agree / (len(en) + len(other)) >= 0.99
