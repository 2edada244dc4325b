"""Labeled synthetic corpora: normal users, naive farms and stealthy farms.

Each behavior profile controls how an account likes pages (how many, how
concentrated on popular pages, which target pages it must like, over what
time span) and what its timeline looks like (post counts and kinds, words
per post, vocabulary, word and sentence length, language mix, engagement).

Synthetic English text mixes real stopwords with generated content words
whose lengths and syllable counts are tuned so the token-weighted means hit
the profile targets. Non-English text uses Greek letters only, so the
English detector separates the two pools exactly.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .datamodel import (
    BASELINE, Account, Dataset, LikeEvent, Page, Post, PostKind, campaign_of, farm_label,
)
from .lexical import STOPWORDS, count_syllables


class ConfigError(ValueError):
    pass


EPOCH = 1_438_387_200          # 2015-08-01, start of the like window
DAY = 86_400
MAX_POSTS = 500
STOPWORD_SHARE = 0.4            # token mass of stopwords in English text
MIN_STOPWORD_COVERAGE = 0.2     # enforced per English post
CONTENT_ZIPF = 0.8
CAPTION_PROB = 0.5              # chance a non-text post carries a caption
KIND_ORDER = tuple(PostKind)

_VOWELS = "aiou"
_CONSONANTS = "bcdfghjklmnprstvwz"
_FOREIGN = "αβγδζηθικλμνξπρστφχψω"


@dataclass(frozen=True)
class Dist:
    """Count distribution: negative binomial with variance mean + dispersion * mean**2.

    ``dispersion == 0`` means every draw equals ``round(mean)``.
    """

    mean: float
    dispersion: float = 0.0

    def sample(self, rng: np.random.Generator, size=None):
        if self.dispersion <= 0:
            return np.full(size, int(round(self.mean))) if size is not None else int(round(self.mean))
        if self.mean <= 0:
            return np.zeros(size, dtype=int) if size is not None else 0
        r = 1.0 / self.dispersion
        p = r / (r + self.mean)
        return rng.negative_binomial(r, p, size=size)


@dataclass(frozen=True)
class LexicalGenParams:
    vocabulary_size: int
    mean_words_per_post: float
    mean_word_length: float
    mean_sentence_length: float
    english_fraction: float
    mean_syllables_per_word: float = 1.5
    english_concentration: float = 4.0
    non_english_users: float = 0.0        # share of users who never post in English
    target_richness: float | None = None   # what vocabulary_size was calibrated for


@dataclass(frozen=True)
class EngagementParams:
    mean_comments: float
    mean_likes: float
    share_fraction: float
    dispersion: float = 1.0
    user_spread: float = 0.5     # lognormal sigma of per-user engagement rates


@dataclass(frozen=True)
class BehaviorProfile:
    label: str
    n_users: int
    likes_per_user: Dist
    target_pages: tuple[int, ...]
    popular_page_affinity: float
    like_time_spread: int
    posts_per_user: Dist
    lexical_params: LexicalGenParams
    engagement_params: EngagementParams
    post_kind_weights: tuple[float, ...] = (0.52, 0.10, 0.06, 0.16, 0.04, 0.12)
    user_word_spread: float = 0.3


@dataclass(frozen=True)
class GenConfig:
    profiles: tuple[BehaviorProfile, ...]
    n_pages: int
    zipf_exponent: float = 1.0
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "GenConfig":
        profiles = []
        for p in d["profiles"]:
            p = dict(p)
            p["likes_per_user"] = Dist(**p["likes_per_user"])
            p["posts_per_user"] = Dist(**p["posts_per_user"])
            p["lexical_params"] = LexicalGenParams(**p["lexical_params"])
            p["engagement_params"] = EngagementParams(**p["engagement_params"])
            p["target_pages"] = tuple(p.get("target_pages", ()))
            if "post_kind_weights" in p:
                p["post_kind_weights"] = tuple(p["post_kind_weights"])
            profiles.append(BehaviorProfile(**p))
        return cls(tuple(profiles), int(d["n_pages"]), float(d.get("zipf_exponent", 1.0)), int(d.get("seed", 0)))


def read_toml(path) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:        # Python < 3.11
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def load_config(path) -> GenConfig:
    """Read a GenConfig from TOML or JSON; keys mirror the dataclass fields."""
    path = Path(path)
    try:
        if path.suffix.lower() == ".toml":
            data = read_toml(path)
        else:
            data = json.loads(path.read_text(encoding="utf-8"))
        return GenConfig.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: invalid config ({exc!r})") from None


def validate(config: GenConfig) -> None:
    if not config.profiles:
        raise ConfigError("at least one profile is required")
    if config.n_pages < 1:
        raise ConfigError("n_pages must be positive")
    if config.zipf_exponent <= 0:
        raise ConfigError("zipf_exponent must be positive")
    labels = [p.label for p in config.profiles]
    if len(set(labels)) != len(labels):
        raise ConfigError("profile labels must be unique")
    for p in config.profiles:
        where = f"profile {p.label!r}"
        if p.n_users < 0:
            raise ConfigError(f"{where}: n_users must be >= 0")
        if not 0 <= p.popular_page_affinity <= 1:
            raise ConfigError(f"{where}: popular_page_affinity must lie in [0, 1]")
        if p.like_time_spread <= 0:
            raise ConfigError(f"{where}: like_time_spread must be positive")
        if any(t < 0 or t >= config.n_pages for t in p.target_pages):
            raise ConfigError(f"{where}: target page index outside [0, n_pages)")
        if len(set(p.target_pages)) != len(p.target_pages):
            raise ConfigError(f"{where}: duplicate target pages")
        for name, d in (("likes_per_user", p.likes_per_user), ("posts_per_user", p.posts_per_user)):
            if d.mean < 0 or d.dispersion < 0:
                raise ConfigError(f"{where}: {name} mean and dispersion must be >= 0")
        if p.likes_per_user.mean > config.n_pages:
            raise ConfigError(
                f"{where}: likes_per_user mean {p.likes_per_user.mean:g} exceeds n_pages={config.n_pages}"
            )
        if p.likes_per_user.dispersion == 0 and len(p.target_pages) > round(p.likes_per_user.mean):
            raise ConfigError(f"{where}: more target pages than likes per user")
        lx = p.lexical_params
        if lx.vocabulary_size < 1:
            raise ConfigError(f"{where}: vocabulary_size must be >= 1")
        for name in ("mean_words_per_post", "mean_word_length", "mean_sentence_length", "mean_syllables_per_word"):
            if getattr(lx, name) <= 0:
                raise ConfigError(f"{where}: {name} must be positive")
        if not 0 <= lx.english_fraction <= 1:
            raise ConfigError(f"{where}: english_fraction must lie in [0, 1]")
        if not 0 <= lx.non_english_users <= 1:
            raise ConfigError(f"{where}: non_english_users must lie in [0, 1]")
        en = p.engagement_params
        if not 0 <= en.share_fraction <= 1:
            raise ConfigError(f"{where}: share_fraction must lie in [0, 1]")
        if en.mean_comments < 0 or en.mean_likes < 0:
            raise ConfigError(f"{where}: engagement means must be >= 0")
        if len(p.post_kind_weights) != len(KIND_ORDER) or min(p.post_kind_weights) < 0 or sum(p.post_kind_weights) <= 0:
            raise ConfigError(f"{where}: post_kind_weights needs {len(KIND_ORDER)} non-negative weights")


# -- vocabulary ------------------------------------------------------------

def _zipf(n: int, s: float) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1) ** s
    return w / w.sum()


def _nudge(values: np.ndarray, weights: np.ndarray, target: float, floor: np.ndarray,
           rng: np.random.Generator, tol: float = 0.004) -> np.ndarray:
    """Move integer ``values`` by +-1 at random until their weighted mean is near ``target``."""
    values = values.copy()
    for _ in range(400):
        diff = target - float(weights @ values)
        if abs(diff) < tol:
            break
        step = 1 if diff > 0 else -1
        prob = min(1.0, abs(diff) / max(float(weights @ np.ones_like(weights)), 1e-12))
        hit = rng.random(len(values)) < prob
        if step < 0:
            hit &= values > floor
        values[hit] += step
    return values


def _content_word(n_syll: int, length: int, rng: np.random.Generator) -> str:
    vowel_lens = [2 if rng.random() < 0.15 else 1 for _ in range(n_syll)]
    cons_total = max(length - sum(vowel_lens), n_syll - 1)
    slots = [0] * (n_syll + 1)
    for k in range(1, n_syll):
        slots[k] = 1
    for _ in range(cons_total - (n_syll - 1)):
        slots[int(rng.integers(0, n_syll + 1))] += 1
    parts = []
    for k in range(n_syll):
        parts.append("".join(rng.choice(list(_CONSONANTS), slots[k])))
        parts.append("".join(rng.choice(list(_VOWELS), vowel_lens[k])))
    parts.append("".join(rng.choice(list(_CONSONANTS), slots[n_syll])))
    return "".join(parts)


@dataclass
class Vocabulary:
    words: list[str]
    probs: np.ndarray
    stop_idx: np.ndarray
    stop_probs: np.ndarray


_STOP_ORDER = sorted(STOPWORDS)


def _stopword_probs(rng: np.random.Generator) -> tuple[list[str], np.ndarray]:
    words = list(_STOP_ORDER)
    order = rng.permutation(len(words))
    return [words[i] for i in order], _zipf(len(words), 1.0)


def build_vocabulary(lx: LexicalGenParams, rng: np.random.Generator) -> Vocabulary:
    stop_words, stop_p = _stopword_probs(rng)
    V = lx.vocabulary_size
    content_p = _zipf(V, CONTENT_ZIPF)
    stop_len = float(stop_p @ np.array([len(w) for w in stop_words]))
    stop_syl = float(stop_p @ np.array([count_syllables(w) for w in stop_words]))
    want_len = (lx.mean_word_length - STOPWORD_SHARE * stop_len) / (1 - STOPWORD_SHARE)
    want_syl = (lx.mean_syllables_per_word - STOPWORD_SHARE * stop_syl) / (1 - STOPWORD_SHARE)
    want_syl = max(want_syl, 1.0)
    syl = 1 + rng.poisson(max(want_syl - 1, 0.0), size=V)
    syl = _nudge(syl, content_p, want_syl, np.ones(V, dtype=int), rng)
    min_len = np.maximum(2 * syl - 1, 2)
    length = np.maximum(min_len, np.round(rng.normal(want_len, 2.0, size=V)).astype(int))
    length = _nudge(length, content_p, max(want_len, float(content_p @ min_len)), min_len, rng)
    seen = set(STOPWORDS)
    content = []
    for s, n in zip(syl, length):
        w = _content_word(int(s), int(n), rng)
        while w in seen:
            w = _content_word(int(s), int(n), rng)
        seen.add(w)
        content.append(w)
    words = stop_words + content
    probs = np.concatenate([STOPWORD_SHARE * stop_p, (1 - STOPWORD_SHARE) * content_p])
    return Vocabulary(words, probs, np.arange(len(stop_words)), stop_p)


def _foreign_vocabulary(rng: np.random.Generator, size: int = 3000) -> tuple[list[str], np.ndarray]:
    letters = list(_FOREIGN)
    seen, words = set(), []
    while len(words) < size:
        w = "".join(rng.choice(letters, int(rng.integers(2, 10))))
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words, _zipf(size, 1.0)


def expected_richness(probs: np.ndarray, n_words) -> np.ndarray:
    """Expected distinct/total ratio for ``n`` i.i.d. draws from ``probs``."""
    n = np.atleast_1d(np.asarray(n_words, dtype=float))
    log_miss = np.log1p(-np.minimum(probs, 1 - 1e-15))
    uniq = np.array([np.sum(-np.expm1(k * log_miss)) for k in n])
    return uniq / n


# -- per-user sampling -----------------------------------------------------

def _beta_rate(rng: np.random.Generator, mean: float, concentration: float) -> float:
    if mean <= 0:
        return 0.0
    if mean >= 1:
        return 1.0
    return float(rng.beta(mean * concentration, (1 - mean) * concentration))


def _lognormal_unit(rng: np.random.Generator, sigma: float) -> float:
    return float(np.exp(sigma * rng.standard_normal() - sigma * sigma / 2))


def _split_sentences(n: int, mean_len: float, rng: np.random.Generator) -> list[int]:
    k = max(1, int(round(n / mean_len)))
    k = min(k, n)
    if k == 1:
        return [n]
    cuts = np.sort(rng.choice(np.arange(1, n), size=k - 1, replace=False))
    return list(np.diff(np.concatenate([[0], cuts, [n]])))


def _english_text(n: int, vocab: Vocabulary, lx: LexicalGenParams, rng: np.random.Generator) -> str:
    idx = rng.choice(len(vocab.words), size=n, p=vocab.probs)
    n_stop = len(vocab.stop_idx)
    need = math.ceil(MIN_STOPWORD_COVERAGE * n)
    have = int((idx < n_stop).sum())
    if have < need:
        slots = rng.permutation(np.flatnonzero(idx >= n_stop))[: need - have]
        idx[slots] = rng.choice(n_stop, size=len(slots), p=vocab.stop_probs)
    words = [vocab.words[i] for i in idx]
    return _render(words, lx.mean_sentence_length, rng)


def _render(words: list[str], mean_sentence_length: float, rng: np.random.Generator) -> str:
    out, pos = [], 0
    for size in _split_sentences(len(words), mean_sentence_length, rng):
        chunk = words[pos:pos + size]
        pos += size
        chunk[0] = chunk[0][:1].upper() + chunk[0][1:]
        u = rng.random()
        end = "!" if u < 0.1 else "?" if u < 0.15 else "."
        out.append(" ".join(chunk) + end)
    text = " ".join(out)
    if rng.random() < 0.1:
        text += " :)"
    return text


def _foreign_text(n: int, pool: tuple[list[str], np.ndarray], rng: np.random.Generator) -> str:
    words, p = pool
    idx = rng.choice(len(words), size=n, p=p)
    return " ".join(words[i] for i in idx) + "."


def _words_in_post(mean: float, rng: np.random.Generator) -> int:
    return 1 + int(rng.poisson(max(mean - 1.0, 0.0)))


@dataclass
class _UserPlan:
    n_posts: int
    english_rate: float
    word_scale: float
    comment_scale: float
    like_scale: float
    share_rate: float


def _plan_user(profile: BehaviorProfile, rng: np.random.Generator) -> _UserPlan:
    lx, en = profile.lexical_params, profile.engagement_params
    n_posts = min(MAX_POSTS, int(profile.posts_per_user.sample(rng)))
    silent = rng.random() < lx.non_english_users
    rate = _beta_rate(rng, lx.english_fraction, lx.english_concentration)
    return _UserPlan(
        n_posts=n_posts,
        english_rate=0.0 if silent else rate,
        word_scale=_lognormal_unit(rng, profile.user_word_spread),
        comment_scale=_lognormal_unit(rng, en.user_spread),
        like_scale=_lognormal_unit(rng, en.user_spread),
        share_rate=_beta_rate(rng, en.share_fraction, 8.0),
    )


def _kind_probs(profile: BehaviorProfile) -> np.ndarray:
    w = np.asarray(profile.post_kind_weights, dtype=float)
    return w / w.sum()


def _english_word_totals(profile: BehaviorProfile, n_users: int, seed: int) -> np.ndarray:
    """Simulated per-user English word totals, used for richness calibration."""
    rng = np.random.default_rng(seed)
    kinds = _kind_probs(profile)
    p_text = kinds[KIND_ORDER.index(PostKind.TEXT)]
    p_bearing = p_text + (1 - p_text) * CAPTION_PROB
    mean = profile.lexical_params.mean_words_per_post
    totals = []
    for _ in range(n_users):
        plan = _plan_user(profile, rng)
        n_text = rng.binomial(plan.n_posts, p_bearing)
        n_en = rng.binomial(n_text, plan.english_rate)
        lam = max(mean * plan.word_scale - 1.0, 0.0)
        totals.append(n_en + rng.poisson(lam * n_en) if n_en else 0)
    return np.asarray(totals)


def calibrate_vocabulary_size(profile: BehaviorProfile, target_richness: float,
                              n_users: int = 400, seed: int = 12345) -> int:
    """Smallest content vocabulary whose expected mean user richness reaches
    ``target_richness`` under the profile's own word-count distribution."""
    totals = _english_word_totals(profile, n_users, seed)
    totals = totals[totals > 0]
    if not len(totals):
        return 1
    qs = np.unique(np.quantile(totals, np.linspace(0.01, 0.99, 40)).round().astype(int))
    weights = np.array([np.sum(np.abs(totals[:, None] - qs[None, :]).argmin(1) == k) for k in range(len(qs))], float)
    weights /= weights.sum()
    stop_p = _zipf(len(_STOP_ORDER), 1.0)

    def mean_richness(V: int) -> float:
        probs = np.concatenate([STOPWORD_SHARE * stop_p, (1 - STOPWORD_SHARE) * _zipf(V, CONTENT_ZIPF)])
        return float(weights @ expected_richness(probs, qs))

    lo, hi = 1, 400_000
    if mean_richness(lo) >= target_richness:
        return lo
    if mean_richness(hi) < target_richness:
        return hi
    while hi - lo > max(1, lo // 100):
        mid = int(math.sqrt(lo * hi)) if hi > 2 * lo else (lo + hi) // 2
        if mean_richness(mid) >= target_richness:
            hi = mid
        else:
            lo = mid
    return hi


# -- generation ------------------------------------------------------------

def _slug(label: str) -> str:
    return campaign_of(label) or label


def _page_id(i: int) -> str:
    return f"p{i:06d}"


def _gen_likes(profile: BehaviorProfile, uid: str, page_probs: np.ndarray, n_pages: int,
               rng: np.random.Generator) -> list[LikeEvent]:
    targets = list(profile.target_pages)
    total = int(profile.likes_per_user.sample(rng))
    extra = min(max(total - len(targets), 0), n_pages - len(targets))
    chosen = list(targets)
    if extra > 0:
        a = profile.popular_page_affinity
        p = a * page_probs + (1 - a) / n_pages
        if targets:
            p = p.copy()
            p[targets] = 0.0
        p /= p.sum()
        chosen += rng.choice(n_pages, size=extra, replace=False, p=p).tolist()
    ts = EPOCH + rng.integers(0, profile.like_time_spread, size=len(chosen))
    return [LikeEvent(uid, _page_id(pg), int(t)) for pg, t in zip(chosen, ts)]


def _gen_posts(profile: BehaviorProfile, uid: str, plan: _UserPlan, vocab: Vocabulary,
               foreign, rng: np.random.Generator) -> list[Post]:
    lx, en = profile.lexical_params, profile.engagement_params
    kind_p = _kind_probs(profile)
    p_shared_kind = kind_p[KIND_ORDER.index(PostKind.SHARED)]
    other_share = max(0.0, (plan.share_rate - p_shared_kind) / (1 - p_shared_kind)) if p_shared_kind < 1 else 0.0
    c_dist = Dist(en.mean_comments * plan.comment_scale, en.dispersion)
    l_dist = Dist(en.mean_likes * plan.like_scale, en.dispersion)
    words_mean = lx.mean_words_per_post * plan.word_scale
    posts = []
    for _ in range(plan.n_posts):
        kind = KIND_ORDER[int(rng.choice(len(KIND_ORDER), p=kind_p))]
        text = ""
        if kind is PostKind.TEXT or rng.random() < CAPTION_PROB:
            n = _words_in_post(words_mean, rng)
            if rng.random() < plan.english_rate:
                text = _english_text(n, vocab, lx, rng)
            else:
                text = _foreign_text(n, foreign, rng)
        shared = kind is PostKind.SHARED or bool(rng.random() < other_share)
        posts.append(Post(
            author=uid, kind=kind, text=text,
            n_comments=int(c_dist.sample(rng)), n_likes=int(l_dist.sample(rng)),
            is_shared=shared, timestamp=int(EPOCH - rng.integers(0, 365 * DAY)),
        ))
    return posts


def _label_key(label: str) -> int:
    # streams keyed by label, so dropping a profile leaves the others unchanged
    return int.from_bytes(hashlib.sha256(label.encode()).digest()[:4], "little")


def generate(config: GenConfig, with_posts: bool = True) -> Dataset:
    """Generate a labeled corpus; identical configs give identical output.

    Likes and timelines use separate random streams per profile, so
    ``with_posts=False`` (likes only, for graph experiments) yields the same
    likes as a full run, and dropping a profile leaves the others unchanged.
    """
    validate(config)
    page_probs = _zipf(config.n_pages, config.zipf_exponent)
    pages = tuple(
        Page(_page_id(i), int(round(1_000_000 * page_probs[i] / page_probs[0])))
        for i in range(config.n_pages)
    )
    foreign = _foreign_vocabulary(np.random.default_rng([config.seed, 7919]))
    accounts, posts, likes = [], [], []
    for profile in config.profiles:
        key = _label_key(profile.label)
        like_rng = np.random.default_rng([config.seed, key, 0])
        post_rng = np.random.default_rng([config.seed, key, 1])
        vocab = build_vocabulary(profile.lexical_params, post_rng) if with_posts else None
        slug = _slug(profile.label)
        for i in range(profile.n_users):
            uid = f"{slug}-{i:05d}"
            accounts.append(Account(uid, profile.label))
            likes += _gen_likes(profile, uid, page_probs, config.n_pages, like_rng)
            if with_posts:
                plan = _plan_user(profile, post_rng)
                posts += _gen_posts(profile, uid, plan, vocab, foreign, post_rng)
    used = {lk.page for lk in likes}
    return Dataset(tuple(accounts), tuple(posts), tuple(likes), tuple(p for p in pages if p.id in used))


# -- paper-calibrated defaults ---------------------------------------------

# Campaign sizes and timeline statistics of the studied farms and baseline.
# Word length and sentence length follow the ARI-consistent reading of the
# lexical table (baseline: 6.9 characters per word, 17.6 words per sentence).
_PAPER_USERS = {"baseline": 1408, "BL-USA": 583, "AL-ALL": 707, "AL-USA": 827,
                "SF-ALL": 870, "SF-USA": 653, "MS-USA": 259}

# name: (word_len, sent_len, richness, flesch, words_per_post, english_fraction)
_LEXICAL_TABLE = {
    "baseline": (6.9, 17.6, 0.70, 55.1, 17.6, 0.86),
    "BL-USA":   (5.7, 22.8, 0.58, 51.5, 16.0, 0.90),
    "AL-ALL":   (6.2, 13.9, 0.59, 43.6, 10.0, 0.10),
    "AL-USA":   (6.2, 12.7, 0.49, 54.0, 12.0, 0.85),
    "SF-ALL":   (6.3, 11.7, 0.58, 45.2, 10.0, 0.15),
    "SF-USA":   (6.3, 12.0, 0.55, 45.6, 10.0, 0.85),
    "MS-USA":   (6.1, 17.8, 0.53, 50.1, 12.0, 0.88),
}

# name: (mean_comments, mean_likes, share_fraction)
_ENGAGEMENT = {
    "baseline": (1.5, 4.0, 0.30),
    "BL-USA":   (1.6, 4.6, 0.34),
    "AL-ALL":   (4.5, 12.0, 0.60),
    "AL-USA":   (2.6, 8.0, 0.50),
    "SF-ALL":   (2.4, 9.0, 0.55),
    "SF-USA":   (2.5, 8.5, 0.52),
    "MS-USA":   (3.0, 10.0, 0.50),
}

# name: (mean likes, n target pages, popular-page affinity, like spread in days, mean posts)
_LIKING = {
    "baseline": (50, 0, 0.60, 730, 25),
    "BL-USA":   (80, 1, 0.95, 540, 60),
    "AL-ALL":   (90, 25, 0.10, 3, 60),
    "AL-USA":   (110, 40, 0.02, 2, 45),
    "SF-ALL":   (90, 20, 0.15, 5, 55),
    "SF-USA":   (90, 20, 0.15, 5, 55),
    "MS-USA":   (100, 20, 0.15, 4, 50),
}

# share of accounts with no English post at all
_NON_ENGLISH_USERS = {"baseline": 0.12, "BL-USA": 0.02, "AL-ALL": 0.02, "AL-USA": 0.02,
                      "SF-ALL": 0.02, "SF-USA": 0.02, "MS-USA": 0.02}

_FARM_KINDS = (0.40, 0.18, 0.12, 0.08, 0.06, 0.16)
_BASE_KINDS = (0.52, 0.10, 0.06, 0.16, 0.04, 0.12)

CAMPAIGNS = ("BL-USA", "AL-ALL", "AL-USA", "SF-ALL", "SF-USA", "MS-USA")
STEALTHY_CAMPAIGN = "BL-USA"
NAIVE_CAMPAIGN = "AL-USA"


def syllables_for_flesch(flesch_score: float, words_per_sentence: float) -> float:
    """Syllables per word that give ``flesch_score`` at the given sentence length."""
    return (206.835 - 1.015 * words_per_sentence - flesch_score) / 84.6


def _profile(name: str, scale: float, target_start: int, vocabulary_size: int | None) -> BehaviorProfile:
    wl, sl, rich, fl, wpp, eng = _LEXICAL_TABLE[name]
    comments, plikes, share = _ENGAGEMENT[name]
    n_likes, n_targets, affinity, spread_days, n_posts = _LIKING[name]
    # posts rarely exceed one sentence when sentences are longer than posts
    realized_sl = min(sl, wpp)
    lx = LexicalGenParams(
        vocabulary_size=vocabulary_size or 1,
        mean_words_per_post=wpp,
        mean_word_length=wl,
        mean_sentence_length=sl,
        english_fraction=eng,
        mean_syllables_per_word=round(syllables_for_flesch(fl, realized_sl), 4),
        english_concentration=4.0 if name == "baseline" else 10.0,
        non_english_users=_NON_ENGLISH_USERS[name],
        target_richness=rich,
    )
    label = BASELINE if name == "baseline" else farm_label(name)
    return BehaviorProfile(
        label=label,
        n_users=max(2, int(round(_PAPER_USERS[name] * scale))),
        likes_per_user=Dist(n_likes, 0.3),
        target_pages=tuple(range(target_start, target_start + n_targets)),
        popular_page_affinity=affinity,
        like_time_spread=spread_days * DAY,
        posts_per_user=Dist(n_posts, 0.25),
        lexical_params=lx,
        engagement_params=EngagementParams(comments, plikes, share, user_spread=0.35),
        user_word_spread=0.2,
        post_kind_weights=_BASE_KINDS if name == "baseline" else _FARM_KINDS,
    )


# Content vocabulary sizes solved by calibrate_vocabulary_size for the
# richness column above; recompute if the timeline parameters change.
_VOCABULARY = {
    "baseline": None, "BL-USA": None, "AL-ALL": None, "AL-USA": None,
    "SF-ALL": None, "SF-USA": None, "MS-USA": None,
}


def default_paper_calibration(scale: float = 0.5, seed: int = 0, n_pages: int = 3000) -> GenConfig:
    """One baseline and six farm profiles mirroring the studied campaigns.

    ``scale`` shrinks every population relative to the original crawl.
    BL-USA is the stealthy profile (popular pages, likes spread over months,
    a single target page); AL-USA is the naive one (near-uniform likes on a
    large shared target block within days).
    """
    profiles = []
    next_target = n_pages - 1
    for name in ("baseline",) + CAMPAIGNS:
        n_targets = _LIKING[name][1]
        start = next_target - n_targets + 1
        next_target = start - 1
        prof = _profile(name, scale, start, None)
        vocab = _VOCABULARY[name] or calibrate_vocabulary_size(prof, prof.lexical_params.target_richness)
        profiles.append(replace(prof, lexical_params=replace(prof.lexical_params, vocabulary_size=vocab)))
    return GenConfig(tuple(profiles), n_pages=n_pages, zipf_exponent=1.0, seed=seed)


def campaign_config(config: GenConfig, campaign: str) -> GenConfig:
    """Keep only the baseline profile and one farm profile."""
    keep = tuple(p for p in config.profiles if p.label in (BASELINE, farm_label(campaign)))
    return replace(config, profiles=keep)
