"""Lexical timeline features: tokenization, readability and vocabulary richness."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Sequence

from .datamodel import Post

# 200 high-frequency English function and common words.
STOPWORDS = frozenset("""
a about above after again against all also am an and any are as at be because
been before being below between both but by can could did do does doing down
during each few for from further had has have having he her here hers herself
him himself his how i if in into is it its itself just me more most my myself
no nor not now of off on once only or other our ours ourselves out over own
same she should so some such than that the their theirs them themselves then
there these they this those through to too under until up very was we were
what when where which while who whom why will with would you your yours
yourself yourselves get got go going good great like love know time day today
new one two see make made people really back think well way want need much
many still even first last year years home life thanks thank happy lol oh
yes yeah let us may might must shall said say says come came look little
never always every something nothing anything everyone best better right work
around another often next maybe sure
""".split())

_WORD_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*")
_SENT_SPLIT_RE = re.compile(r"[.!?]")
_VOWEL_GROUP_RE = re.compile(r"[aeiouy]+")


@dataclass(frozen=True)
class TokenizedPost:
    words: tuple[str, ...]
    sentences: int
    chars: int
    uppercase: int
    punctuation: int
    digits: int
    non_letters: int
    letters: int = 0
    whitespace: int = 0


def tokenize(text: str) -> TokenizedPost:
    """Split ``text`` into word tokens and count sentences and character classes.

    A sentence is a segment ended by ``.``, ``!``, ``?`` or the end of the
    text; segments with no alphabetic word (e.g. a trailing ``:) 42``) are
    not counted. ``non_letters`` covers every character that is not a letter,
    digit or whitespace, so it includes punctuation and emoticons.
    """
    words = tuple(_WORD_RE.findall(text))
    sentences = 0
    for seg in _SENT_SPLIT_RE.split(text):
        if any(ch.isalpha() for w in _WORD_RE.findall(seg) for ch in w):
            sentences += 1
    upper = punct = digits = non_letters = letters = ws = 0
    for ch in text:
        if ch.isalpha():
            letters += 1
            if ch.isupper():
                upper += 1
        elif ch.isdigit():
            digits += 1
        elif ch.isspace():
            ws += 1
        else:
            non_letters += 1
            if unicodedata.category(ch).startswith("P"):
                punct += 1
    return TokenizedPost(words, sentences, len(text), upper, punct, digits, non_letters, letters, ws)


def count_syllables(word: str) -> int:
    """Vowel-group syllable estimate: one per run of a/e/i/o/u/y, minus one
    for a trailing 'e' when there is more than one group; never below 1."""
    w = word.lower()
    n = len(_VOWEL_GROUP_RE.findall(w))
    if n > 1 and w.endswith("e"):
        n -= 1
    return max(n, 1)


def is_english(text: str) -> bool:
    words = [w.lower() for w in _WORD_RE.findall(text)]
    if not words:
        return False
    letters = [ch for ch in text if ch.isalpha()]
    if not letters:
        return False
    ascii_frac = sum(1 for ch in letters if ch.isascii()) / len(letters)
    coverage = sum(1 for w in words if w in STOPWORDS) / len(words)
    return coverage >= 0.15 and ascii_frac >= 0.5


@dataclass(frozen=True)
class EnglishRatio:
    r: float


def english_ratio(posts: Iterable[Post]) -> EnglishRatio:
    texts = [p.text for p in posts if p.text.strip()]
    if not texts:
        return EnglishRatio(0.0)
    return EnglishRatio(sum(map(is_english, texts)) / len(texts))


def ari(avg_word_length: float, avg_sentence_length: float) -> float:
    """Automated Readability Index; 0 for text without words or sentences."""
    if avg_word_length <= 0 or avg_sentence_length <= 0:
        return 0.0
    return 4.71 * avg_word_length + 0.5 * avg_sentence_length - 21.43


def flesch(total_words: int, total_sentences: int, total_syllables: int) -> float:
    """Flesch Reading Ease; 0 for text without words or sentences."""
    if total_words <= 0 or total_sentences <= 0:
        return 0.0
    return (206.835 - 1.015 * (total_words / total_sentences)
            - 84.6 * (total_syllables / total_words))


@dataclass(frozen=True)
class LexicalFeatures:
    n_chars: float = 0.0
    n_words: float = 0.0
    n_sentences: float = 0.0
    avg_word_length: float = 0.0
    avg_sentence_length: float = 0.0
    avg_uppercase: float = 0.0
    pct_punctuation: float = 0.0
    pct_numbers: float = 0.0
    pct_non_letters: float = 0.0
    richness: float = 0.0
    ari: float = 0.0
    flesch: float = 0.0

    def as_tuple(self) -> tuple[float, ...]:
        return astuple(self)


LEXICAL_FIELDS = tuple(f.name for f in fields(LexicalFeatures))


def lexical_profile_from_texts(texts: Sequence[str]) -> LexicalFeatures:
    """Lexical features over a user's English texts (already filtered)."""
    if not texts:
        return LexicalFeatures()
    toks = [tokenize(t) for t in texts]
    n_words = sum(len(t.words) for t in toks)
    if n_words == 0:
        return LexicalFeatures()
    n_chars = sum(t.chars for t in toks)
    n_sent = sum(t.sentences for t in toks)
    word_chars = sum(len(w) for t in toks for w in t.words)
    syllables = sum(count_syllables(w) for t in toks for w in t.words)
    unique = {w.lower() for t in toks for w in t.words}
    awl = word_chars / n_words
    asl = n_words / n_sent if n_sent else 0.0
    return LexicalFeatures(
        n_chars=float(n_chars),
        n_words=float(n_words),
        n_sentences=float(n_sent),
        avg_word_length=awl,
        avg_sentence_length=asl,
        avg_uppercase=sum(t.uppercase for t in toks) / len(toks),
        pct_punctuation=sum(t.punctuation for t in toks) / n_chars,
        pct_numbers=sum(t.digits for t in toks) / n_chars,
        pct_non_letters=sum(t.non_letters for t in toks) / n_chars,
        richness=len(unique) / n_words,
        ari=ari(awl, asl),
        flesch=flesch(n_words, n_sent, syllables),
    )


def lexical_profile(posts: Iterable[Post]) -> LexicalFeatures:
    """Lexical features of one user, computed over their English posts only."""
    texts = [p.text for p in posts if p.text.strip() and is_english(p.text)]
    return lexical_profile_from_texts(texts)
