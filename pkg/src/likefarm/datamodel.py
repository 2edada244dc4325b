"""Entities, label conventions, JSONL ingestion and the user-page like graph."""

from __future__ import annotations

import enum
import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np
from scipy import sparse

BASELINE = "baseline"
UNKNOWN = "unknown"
FARM_PREFIX = "farm:"


class DataError(ValueError):
    """Raised for malformed or inconsistent input data."""


class EmptyGraphError(DataError):
    pass


def farm_label(campaign: str) -> str:
    return FARM_PREFIX + campaign


def is_farm(label: str) -> bool:
    return label.startswith(FARM_PREFIX)


def campaign_of(label: str) -> str | None:
    return label[len(FARM_PREFIX):] if is_farm(label) else None


def normalize_label(raw) -> str:
    """Map a raw label to the canonical form; anything unrecognised is unknown."""
    if not isinstance(raw, str):
        return UNKNOWN
    raw = raw.strip()
    if raw == BASELINE:
        return BASELINE
    if raw.startswith(FARM_PREFIX) and len(raw) > len(FARM_PREFIX):
        return raw
    return UNKNOWN


class PostKind(str, enum.Enum):
    TEXT = "text"
    LINK = "link"
    VIDEO = "video"
    PHOTO = "photo"
    SHARED = "shared"
    OTHER = "other"


@dataclass(frozen=True)
class Account:
    id: str
    label: str = UNKNOWN
    english_ratio_cache: float | None = None


@dataclass(frozen=True)
class Post:
    author: str
    kind: PostKind
    text: str
    n_comments: int
    n_likes: int
    is_shared: bool
    timestamp: int

    def __post_init__(self):
        if self.n_comments < 0:
            raise DataError(f"n_comments must be non-negative, got {self.n_comments}")
        if self.n_likes < 0:
            raise DataError(f"n_likes must be non-negative, got {self.n_likes}")
        if self.kind is PostKind.TEXT and not self.text.strip():
            raise DataError("text post with empty text")

    @property
    def has_text(self) -> bool:
        return bool(self.text.strip())


@dataclass(frozen=True)
class LikeEvent:
    user: str
    page: str
    timestamp: int


@dataclass(frozen=True)
class Page:
    id: str
    popularity: int = 0


@dataclass(frozen=True)
class Dataset:
    accounts: tuple[Account, ...]
    posts: tuple[Post, ...]
    likes: tuple[LikeEvent, ...]
    pages: tuple[Page, ...]
    _by_id: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        by_id = {}
        for a in self.accounts:
            if a.id in by_id:
                raise DataError(f"duplicate account id {a.id!r}")
            by_id[a.id] = a
        object.__setattr__(self, "_by_id", by_id)
        page_ids = {p.id for p in self.pages}
        if len(page_ids) != len(self.pages):
            raise DataError("duplicate page id")
        for p in self.posts:
            if p.author not in by_id:
                raise DataError(f"post author {p.author!r} does not resolve to an account")
        for lk in self.likes:
            if lk.user not in by_id:
                raise DataError(f"like user {lk.user!r} does not resolve to an account")
            if lk.page not in page_ids:
                raise DataError(f"like page {lk.page!r} does not resolve to a page")

    def account(self, account_id: str) -> Account:
        return self._by_id[account_id]

    def labels(self) -> dict[str, str]:
        return {a.id: a.label for a in self.accounts}

    def posts_by_author(self) -> dict[str, list[Post]]:
        out: dict[str, list[Post]] = {a.id: [] for a in self.accounts}
        for p in self.posts:
            out[p.author].append(p)
        return out

    def subset(self, account_ids: Iterable[str]) -> "Dataset":
        """Restrict to the given accounts, keeping only the pages they like."""
        keep = set(account_ids)
        likes = tuple(lk for lk in self.likes if lk.user in keep)
        liked = {lk.page for lk in likes}
        return Dataset(
            accounts=tuple(a for a in self.accounts if a.id in keep),
            posts=tuple(p for p in self.posts if p.author in keep),
            likes=likes,
            pages=tuple(p for p in self.pages if p.id in liked),
        )


# -- JSONL -----------------------------------------------------------------

def _iter_jsonl(path: Path) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise DataError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def _field(obj: dict, key: str, typ, path: Path, lineno: int):
    if key not in obj:
        raise DataError(f"{path}:{lineno}: missing field {key!r}")
    val = obj[key]
    # bool is an int subclass; keep the two apart
    if typ is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise DataError(f"{path}:{lineno}: field {key!r} must be an integer")
    if typ is not int and not isinstance(val, typ):
        raise DataError(f"{path}:{lineno}: field {key!r} must be {typ.__name__}")
    return val


def _parse_post(obj: dict, path: Path, lineno: int) -> Post:
    kind_raw = _field(obj, "kind", str, path, lineno)
    try:
        kind = PostKind(kind_raw)
    except ValueError:
        raise DataError(f"{path}:{lineno}: unknown post kind {kind_raw!r}") from None
    try:
        return Post(
            author=_field(obj, "author", str, path, lineno),
            kind=kind,
            text=_field(obj, "text", str, path, lineno),
            n_comments=_field(obj, "n_comments", int, path, lineno),
            n_likes=_field(obj, "n_likes", int, path, lineno),
            is_shared=_field(obj, "is_shared", bool, path, lineno),
            timestamp=_field(obj, "ts", int, path, lineno),
        )
    except DataError as exc:
        if str(exc).startswith(str(path)):
            raise
        raise DataError(f"{path}:{lineno}: {exc}") from None


def load_dataset(accounts_path, posts_path, likes_path, pages_path=None) -> Dataset:
    """Load the JSONL corpus. Pages absent from ``pages_path`` (or all pages,
    when it is omitted) are created on demand with popularity 0."""
    accounts_path, posts_path, likes_path = map(Path, (accounts_path, posts_path, likes_path))
    accounts = []
    for lineno, obj in _iter_jsonl(accounts_path):
        aid = _field(obj, "id", str, accounts_path, lineno)
        accounts.append(Account(aid, normalize_label(obj.get("label"))))
    posts = [_parse_post(obj, posts_path, lineno) for lineno, obj in _iter_jsonl(posts_path)]
    likes = [
        LikeEvent(
            _field(obj, "user", str, likes_path, lineno),
            _field(obj, "page", str, likes_path, lineno),
            _field(obj, "ts", int, likes_path, lineno),
        )
        for lineno, obj in _iter_jsonl(likes_path)
    ]
    pages: dict[str, Page] = {}
    if pages_path is not None and Path(pages_path).exists():
        pages_path = Path(pages_path)
        for lineno, obj in _iter_jsonl(pages_path):
            pid = _field(obj, "id", str, pages_path, lineno)
            pop = _field(obj, "popularity", int, pages_path, lineno)
            if pop < 0:
                raise DataError(f"{pages_path}:{lineno}: popularity must be non-negative")
            pages[pid] = Page(pid, pop)
    for lk in likes:
        if lk.page not in pages:
            pages[lk.page] = Page(lk.page, 0)
    return Dataset(tuple(accounts), tuple(posts), tuple(likes), tuple(pages.values()))


def load_dir(directory) -> Dataset:
    d = Path(directory)
    return load_dataset(d / "accounts.jsonl", d / "posts.jsonl", d / "likes.jsonl", d / "pages.jsonl")


def _dumps(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def write_dataset(dataset: Dataset, directory) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    with open(d / "accounts.jsonl", "w", encoding="utf-8") as fh:
        for a in dataset.accounts:
            fh.write(_dumps({"id": a.id, "label": a.label}) + "\n")
    with open(d / "posts.jsonl", "w", encoding="utf-8") as fh:
        for p in dataset.posts:
            fh.write(_dumps({
                "author": p.author, "kind": p.kind.value, "text": p.text,
                "n_comments": p.n_comments, "n_likes": p.n_likes,
                "is_shared": p.is_shared, "ts": p.timestamp,
            }) + "\n")
    with open(d / "likes.jsonl", "w", encoding="utf-8") as fh:
        for lk in dataset.likes:
            fh.write(_dumps({"user": lk.user, "page": lk.page, "ts": lk.timestamp}) + "\n")
    with open(d / "pages.jsonl", "w", encoding="utf-8") as fh:
        for p in dataset.pages:
            fh.write(_dumps({"id": p.id, "popularity": p.popularity}) + "\n")


# -- bipartite graph -------------------------------------------------------

@dataclass(frozen=True)
class BipartiteGraph:
    """Binary user x page biadjacency with index -> id maps."""

    biadjacency: sparse.csr_matrix
    row_ids: tuple[str, ...]
    col_ids: tuple[str, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.biadjacency.shape

    @property
    def n_edges(self) -> int:
        return int(self.biadjacency.nnz)

    def edges(self) -> list[tuple[str, str]]:
        coo = self.biadjacency.tocoo()
        return [(self.row_ids[i], self.col_ids[j]) for i, j in zip(coo.row, coo.col)]


def _filter_pairs(pairs: set[tuple[str, str]], min_user: int, min_page: int) -> set[tuple[str, str]]:
    while True:
        udeg: dict[str, int] = defaultdict(int)
        pdeg: dict[str, int] = defaultdict(int)
        for u, p in pairs:
            udeg[u] += 1
            pdeg[p] += 1
        kept = {(u, p) for u, p in pairs if udeg[u] >= min_user and pdeg[p] >= min_page}
        if len(kept) == len(pairs):
            return kept
        pairs = kept


def graph_from_pairs(pairs: Iterable[tuple[str, str]]) -> BipartiteGraph:
    pairs = set(pairs)
    if not pairs:
        raise EmptyGraphError("bipartite graph is empty after filtering")
    users = sorted({u for u, _ in pairs})
    pages = sorted({p for _, p in pairs})
    uidx = {u: i for i, u in enumerate(users)}
    pidx = {p: j for j, p in enumerate(pages)}
    rows = np.fromiter((uidx[u] for u, _ in pairs), dtype=np.int64, count=len(pairs))
    cols = np.fromiter((pidx[p] for _, p in pairs), dtype=np.int64, count=len(pairs))
    mat = sparse.csr_matrix(
        (np.ones(len(pairs)), (rows, cols)), shape=(len(users), len(pages))
    )
    mat.sort_indices()
    return BipartiteGraph(mat, tuple(users), tuple(pages))


def build_bipartite(likes: Iterable, min_user_degree: int = 10, min_page_degree: int = 10) -> BipartiteGraph:
    """Deduplicate likes into a binary graph and prune low-degree users and
    pages until nothing else drops out.

    ``likes`` may hold LikeEvent objects or plain (user, page) pairs.
    """
    if min_user_degree < 0 or min_page_degree < 0:
        raise ValueError("minimum degrees must be non-negative")
    pairs = set()
    for lk in likes:
        if isinstance(lk, LikeEvent):
            pairs.add((lk.user, lk.page))
        else:
            u, p = lk
            pairs.add((u, p))
    return graph_from_pairs(_filter_pairs(pairs, min_user_degree, min_page_degree))
