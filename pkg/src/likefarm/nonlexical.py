"""Engagement features and post-type counts."""

from __future__ import annotations

from dataclasses import astuple, dataclass, field, fields
from typing import Iterable

from .datamodel import Post, PostKind
from .lexical import _WORD_RE


@dataclass(frozen=True)
class NonLexicalFeatures:
    avg_words_per_post: float = 0.0
    avg_comments_per_post: float = 0.0
    avg_likes_per_post: float = 0.0
    share_fraction: float = 0.0

    def as_tuple(self) -> tuple[float, ...]:
        return astuple(self)


NONLEXICAL_FIELDS = tuple(f.name for f in fields(NonLexicalFeatures))


def nonlexical_profile(posts: Iterable[Post]) -> NonLexicalFeatures:
    """Per-post means over one user's timeline.

    Words per post is averaged over text-bearing posts in any language;
    the other three are averaged over every post.
    """
    posts = list(posts)
    if not posts:
        return NonLexicalFeatures()
    word_counts = [len(_WORD_RE.findall(p.text)) for p in posts if p.text.strip()]
    n = len(posts)
    return NonLexicalFeatures(
        avg_words_per_post=sum(word_counts) / len(word_counts) if word_counts else 0.0,
        avg_comments_per_post=sum(p.n_comments for p in posts) / n,
        avg_likes_per_post=sum(p.n_likes for p in posts) / n,
        share_fraction=sum(p.is_shared for p in posts) / n,
    )


@dataclass(frozen=True)
class PostTypeHistogram:
    counts: dict[PostKind, int] = field(default_factory=lambda: {k: 0 for k in PostKind})
    total: int = 0

    def fraction(self, kind: PostKind) -> float:
        return self.counts[kind] / self.total if self.total else 0.0


def post_type_histogram(posts: Iterable[Post]) -> PostTypeHistogram:
    counts = {k: 0 for k in PostKind}
    total = 0
    for p in posts:
        counts[p.kind] += 1
        total += 1
    return PostTypeHistogram(counts, total)
