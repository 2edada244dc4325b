"""Spectral co-clustering of the user-page like graph.

Rows and columns of the degree-normalized biadjacency are embedded with its
leading non-trivial singular vectors and clustered jointly with k-means, so
a cluster holds both users and the pages they like in common.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .datamodel import BASELINE, BipartiteGraph, is_farm


class DegenerateGraphError(ValueError):
    pass


class SvdError(RuntimeError):
    pass


@dataclass(frozen=True)
class CoclusterConfig:
    k: int = 2
    n_singular_vectors: int | None = None
    kmeans_restarts: int = 10
    kmeans_max_iters: int = 300
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.kmeans_restarts < 1:
            raise ValueError("kmeans_restarts must be at least 1")

    @property
    def n_vectors(self) -> int:
        return self.n_singular_vectors or (math.ceil(math.log2(self.k)) + 1)


@dataclass(frozen=True)
class ClusterAssignment:
    user_cluster: dict[str, int]
    page_cluster: dict[str, int]

    def users_in(self, c: int) -> list[str]:
        return [u for u, k in self.user_cluster.items() if k == c]


def _degrees(A) -> tuple[np.ndarray, np.ndarray]:
    return np.asarray(A.sum(axis=1)).ravel(), np.asarray(A.sum(axis=0)).ravel()


def normalize(graph) -> np.ndarray:
    """Dense D1^-1/2 A D2^-1/2 for a graph (or raw biadjacency)."""
    A = graph.biadjacency if isinstance(graph, BipartiteGraph) else graph
    A = A.toarray() if sparse.issparse(A) else np.asarray(A, dtype=float)
    if A.size == 0:
        raise DegenerateGraphError("empty biadjacency")
    r, c = A.sum(axis=1), A.sum(axis=0)
    if (r == 0).any() or (c == 0).any():
        raise DegenerateGraphError("biadjacency has an all-zero row or column")
    return A / np.sqrt(r)[:, None] / np.sqrt(c)[None, :]


def _kmeans_pp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = [X[rng.integers(n)]]
    d2 = ((X - centers[0]) ** 2).sum(1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers.append(X[idx])
        d2 = np.minimum(d2, ((X - X[idx]) ** 2).sum(1))
    return np.array(centers)


def _lloyd(X: np.ndarray, centers: np.ndarray, max_iters: int):
    labels = np.full(X.shape[0], -1)
    for _ in range(max_iters):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(-1)
        new = d2.argmin(1)
        if np.array_equal(new, labels):
            break
        labels = new
        for c in range(len(centers)):
            members = X[labels == c]
            if len(members):
                centers[c] = members.mean(0)
    d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(-1)
    labels = d2.argmin(1)
    inertia = float(d2[np.arange(len(X)), labels].sum())
    return labels, inertia


def kmeans(X: np.ndarray, k: int, restarts: int = 10, max_iters: int = 300, seed: int = 0):
    """Lloyd's algorithm with k-means++ seeding; best of ``restarts`` by inertia.

    Restarts draw from independent child seeds and the first restart wins
    ties, so the result does not depend on evaluation order.
    """
    best = None
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        labels, inertia = _lloyd(X, _kmeans_pp(X, k, rng), max_iters)
        if best is None or inertia < best[1]:
            best = (labels, inertia)
    return best


def spectral_embedding(graph: BipartiteGraph, n_vectors: int):
    """Stacked (user rows, page rows) embedding from singular vectors 2..n_vectors."""
    An = normalize(graph)
    r, c = _degrees(graph.biadjacency)
    # the trivial pair is fixed by the degrees; removing it explicitly keeps the
    # embedding well defined when the leading singular value is repeated
    # (a disconnected graph)
    u0, v0 = np.sqrt(r / r.sum()), np.sqrt(c / c.sum())
    try:
        U, s, Vt = np.linalg.svd(An - np.outer(u0, v0), full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SvdError(f"SVD failed on a {An.shape[0]}x{An.shape[1]} matrix: {exc}") from None
    # fix the sign of every singular pair so the embedding is reproducible
    for j in range(len(s)):
        col = U[:, j]
        piv = np.argmax(np.abs(col))
        if col[piv] < 0:
            U[:, j] *= -1
            Vt[j] *= -1
    U = np.hstack([u0[:, None], U[:, :-1]])
    Vt = np.vstack([v0[None, :], Vt[:-1]])
    s = np.concatenate([[1.0], s[:-1]])
    take = slice(1, max(2, n_vectors))
    Zu = U[:, take] / np.sqrt(r)[:, None]
    Zp = Vt[take].T / np.sqrt(c)[:, None]
    return Zu, Zp, s


def cocluster(graph: BipartiteGraph, config: CoclusterConfig = CoclusterConfig()) -> ClusterAssignment:
    n_users, n_pages = graph.shape
    if n_users < config.k or n_pages < config.k:
        raise DegenerateGraphError(f"graph {n_users}x{n_pages} too small for k={config.k}")
    Zu, Zp, _ = spectral_embedding(graph, config.n_vectors)
    Z = np.vstack([Zu, Zp])
    labels, _ = kmeans(Z, config.k, config.kmeans_restarts, config.kmeans_max_iters, config.seed)
    labels = _canonical(labels, list(graph.row_ids) + list(graph.col_ids))
    return ClusterAssignment(
        dict(zip(graph.row_ids, labels[:n_users].tolist())),
        dict(zip(graph.col_ids, labels[n_users:].tolist())),
    )


def _canonical(labels: np.ndarray, ids: list[str]) -> np.ndarray:
    """Renumber clusters by their smallest member id."""
    first: dict[int, str] = {}
    for lab, i in zip(labels.tolist(), ids):
        if lab not in first or i < first[lab]:
            first[lab] = i
    order = sorted(first, key=first.get)
    remap = {old: new for new, old in enumerate(order)}
    return np.array([remap[x] for x in labels.tolist()])


class UnlabeledClusterError(ValueError):
    pass


def label_clusters(assignment: ClusterAssignment, ground_truth: dict[str, str]) -> dict[int, str]:
    """Majority ground-truth class per cluster; farm wins ties.

    Returns ``"farm"`` or ``"baseline"`` per cluster index. Members whose
    label is unknown are ignored.
    """
    votes: dict[int, list[int]] = {}
    for u, c in assignment.user_cluster.items():
        votes.setdefault(c, [0, 0])
    for u, c in assignment.user_cluster.items():
        lab = ground_truth.get(u)
        if lab is None:
            continue
        if is_farm(lab):
            votes[c][0] += 1
        elif lab == BASELINE:
            votes[c][1] += 1
    out = {}
    for c, (farm, base) in sorted(votes.items()):
        if farm + base == 0:
            raise UnlabeledClusterError(f"cluster {c} has no labeled members")
        out[c] = "farm" if farm >= base else "baseline"
    return out
