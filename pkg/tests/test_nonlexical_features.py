import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from likefarm.datamodel import BASELINE, Post, PostKind
from likefarm.features import (
    FEATURE_NAMES, N_FEATURES, FeatureError, FeatureVector, Scaler, apply_scaler, assemble, extract_features,
    fit_scaler,
)
from likefarm.lexical import LexicalFeatures, lexical_profile_from_texts
from likefarm.nonlexical import NONLEXICAL_FIELDS, NonLexicalFeatures, nonlexical_profile, post_type_histogram


def _p(kind=PostKind.PHOTO, text="", c=0, lk=0, shared=False):
    return Post("u", kind, text, c, lk, shared, 0)


def test_average_likes():
    assert nonlexical_profile([_p(lk=3), _p(lk=5)]).avg_likes_per_post == 4.0


def test_share_fraction():
    posts = [_p(shared=True)] * 2 + [_p()] * 3
    assert nonlexical_profile(posts).share_fraction == pytest.approx(0.4)


def test_zero_posts():
    nl = nonlexical_profile([])
    assert (nl.avg_words_per_post, nl.avg_comments_per_post, nl.avg_likes_per_post, nl.share_fraction) == (0, 0, 0, 0)
    assert len(NONLEXICAL_FIELDS) == 4


def test_words_per_post_counts_any_language_text_posts_only():
    posts = [_p(PostKind.TEXT, "one two three"), _p(PostKind.TEXT, "αβγ δεζ"), _p(PostKind.PHOTO)]
    assert nonlexical_profile(posts).avg_words_per_post == pytest.approx(2.5)


def test_histogram():
    h = post_type_histogram([_p(PostKind.TEXT, "a"), _p(PostKind.TEXT, "b"), _p(PostKind.LINK)])
    assert h.total == 3 and h.counts[PostKind.TEXT] == 2 and h.counts[PostKind.LINK] == 1
    assert sum(h.counts.values()) == h.total
    empty = post_type_histogram([])
    assert empty.total == 0 and sum(empty.counts.values()) == 0


posts_st = st.lists(st.builds(
    _p, st.sampled_from([PostKind.PHOTO, PostKind.LINK]), st.just(""),
    st.integers(0, 30), st.integers(0, 30), st.booleans()), min_size=1, max_size=20)


@given(posts_st)
@settings(max_examples=80, deadline=None)
def test_duplication_and_order_invariance(posts):
    a = nonlexical_profile(posts)
    b = nonlexical_profile(posts + posts)
    c = nonlexical_profile(posts[::-1])
    for f in NONLEXICAL_FIELDS:
        assert getattr(a, f) == pytest.approx(getattr(b, f))
        assert getattr(a, f) == pytest.approx(getattr(c, f))
    assert 0 <= a.share_fraction <= 1


def test_text_fraction_higher_for_baseline(small_dataset):
    by = small_dataset.posts_by_author()
    labels = small_dataset.labels()
    base = post_type_histogram([p for u, ps in by.items() if labels[u] == BASELINE for p in ps])
    farm = post_type_histogram([p for u, ps in by.items() if labels[u] != BASELINE for p in ps])
    assert base.fraction(PostKind.TEXT) > farm.fraction(PostKind.TEXT)


# -- features -------------------------------------------------------------

LX = lexical_profile_from_texts(["The cat sat. The dog ran."])
NL = NonLexicalFeatures(6.0, 1.0, 2.0, 0.5)


def test_canonical_order():
    assert N_FEATURES == 16
    assert FEATURE_NAMES[:12] == tuple(LexicalFeatures.__dataclass_fields__)
    assert FEATURE_NAMES[12:] == NONLEXICAL_FIELDS


def test_zero_fill():
    v = assemble(LX, NL, 0.0, "u", BASELINE)
    assert v.values[:12] == (0.0,) * 12
    assert v.values[12:] == (6.0, 1.0, 2.0, 0.5)


def test_identity_placement():
    v = assemble(LX, NL, 1.0, "u", BASELINE)
    assert v.values == LX.as_tuple() + (6.0, 1.0, 2.0, 0.5)


def test_mismatched_users():
    with pytest.raises(FeatureError):
        assemble(LX, NL, 1.0, "u", BASELINE, lexical_user="a", nonlexical_user="b")


def test_non_finite_names_field():
    with pytest.raises(FeatureError, match="avg_likes_per_post"):
        assemble(LX, NonLexicalFeatures(1.0, 1.0, math.nan, 0.0), 1.0, "u", BASELINE)


def test_vector_round_trip():
    v = assemble(LX, NL, 0.5, "u7", "farm:AL-USA")
    assert FeatureVector.from_dict(v.as_dict()) == v


def test_scaler_examples():
    s = fit_scaler([[0.0], [2.0]])
    assert s.transform(np.array([[0.0], [2.0]])).ravel().tolist() == [-1.0, 1.0]
    const = fit_scaler([[3.0, 0.0], [3.0, 2.0]])
    assert const.transform(np.array([[3.0, 1.0]]))[0, 0] == 3.0
    assert Scaler(np.array([1.0]), np.array([1.0])).transform(np.array([[4.0]]))[0, 0] == 3.0
    with pytest.raises(FeatureError):
        fit_scaler([[1.0]])


@given(st.lists(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3), min_size=2, max_size=20))
@settings(max_examples=80, deadline=None)
def test_scaler_invertible(rows):
    X = np.array(rows)
    s = fit_scaler(X)
    assert np.allclose(s.inverse_transform(s.transform(X)), X, atol=1e-6)
    assert Scaler.from_dict(s.to_dict()).transform(X) == pytest.approx(s.transform(X))


def test_apply_scaler_keeps_identity():
    v = assemble(LX, NL, 1.0, "u", BASELINE)
    s = fit_scaler(np.array([v.values, np.zeros(16)]))
    out = apply_scaler(s, v)
    assert out.user == "u" and len(out.values) == 16


def test_extract_features_zero_fill(small_dataset, small_vectors):
    assert len(small_vectors) == len(small_dataset.accounts)
    zero = [v for v in small_vectors if v.english_ratio == 0]
    assert zero, "corpus should contain users without English posts"
    for v in zero:
        assert v.values[:12] == (0.0,) * 12
    assert all(np.isfinite(v.values).all() for v in small_vectors)
    assert extract_features(small_dataset) == small_vectors
