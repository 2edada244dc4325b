"""Two-class nu-SVM with an RBF kernel, trained by SMO.

The dual solved here is

    min  1/2 a^T Q a      Q_ij = y_i y_j K(x_i, x_j)
    s.t. 0 <= a_i <= 1/l,  sum_{y_i=+1} a_i = nu/2,  sum_{y_i=-1} a_i = nu/2

Every SMO step moves a pair of coefficients from the same class, which keeps
both equality constraints intact. The working pair is the maximal KKT
violator; ties go to the lowest index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np


class InfeasibleNuError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class SvmHyperParams:
    gamma: float
    nu: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not 0 < self.nu <= 1:
            raise ValueError(f"nu must lie in (0, 1], got {self.nu}")


def rbf_kernel(x, y, gamma: float) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("kernel arguments differ in length")
    d = x - y
    return float(np.exp(-gamma * np.dot(d, d)))


def rbf_matrix(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def nu_upper_bound(y) -> float:
    """Largest feasible nu for labels ``y`` in {+1, -1}."""
    y = np.asarray(y)
    return 2.0 * min((y > 0).sum(), (y < 0).sum()) / len(y)


@numba.njit(cache=True)
def _smo(K, y, nu, ub, tol, max_iter):
    n = K.shape[0]
    alpha = np.zeros(n)
    for cls in (1.0, -1.0):
        left = nu / 2.0
        for i in range(n):
            if y[i] == cls and left > 0.0:
                a = min(ub, left)
                alpha[i] = a
                left -= a
    G = np.zeros(n)
    for j in range(n):
        if alpha[j] > 0.0:
            for i in range(n):
                G[i] += y[i] * y[j] * K[i, j] * alpha[j]

    it = 0
    gap = 0.0
    while it < max_iter:
        best_viol = -1.0
        bi = -1
        bj = -1
        for cls in (1.0, -1.0):
            gmin = np.inf
            gmax = -np.inf
            imin = -1
            jmax = -1
            for k in range(n):
                if y[k] != cls:
                    continue
                if alpha[k] < ub and G[k] < gmin:
                    gmin = G[k]
                    imin = k
                if alpha[k] > 0.0 and G[k] > gmax:
                    gmax = G[k]
                    jmax = k
            if imin >= 0 and jmax >= 0:
                v = gmax - gmin
                if v > best_viol:
                    best_viol = v
                    bi = imin
                    bj = jmax
        gap = best_viol
        if best_viol * n < tol:
            return alpha, G, it, gap, True
        i = bi
        j = bj
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta < 1e-12:
            eta = 1e-12
        t = (G[j] - G[i]) / eta
        room_i = ub - alpha[i]
        if t >= room_i:
            t = room_i
        if t >= alpha[j]:
            t = alpha[j]
        if t == room_i:
            alpha[i] = ub
        else:
            alpha[i] += t
        if t == alpha[j]:
            alpha[j] = 0.0
        else:
            alpha[j] -= t
        s = y[i]
        for k in range(n):
            G[k] += t * y[k] * s * (K[k, i] - K[k, j])
        it += 1
    return alpha, G, it, gap, False


def solve_dual(K: np.ndarray, y: np.ndarray, nu: float, tol: float = 1e-4, max_iter: int | None = None):
    """Run SMO on a precomputed kernel matrix.

    Returns ``(alpha, grad, bias, rho, n_iter)``. The stopping test compares
    the largest same-class gradient gap, multiplied by ``l``, against ``tol``
    (equivalently, the gap of the dual rescaled to the unit box).
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    if not (np.any(y > 0) and np.any(y < 0)):
        raise ValueError("both classes must be present")
    bound = nu_upper_bound(y)
    if nu > bound + 1e-12:
        raise InfeasibleNuError(f"nu={nu:g} infeasible; must be <= {bound:g} for this class balance")
    if max_iter is None:
        max_iter = max(1_000_000, 1000 * n)
    ub = 1.0 / n
    alpha, G, n_iter, gap, ok = _smo(np.ascontiguousarray(K, dtype=float), y, float(nu), ub, tol, max_iter)
    if not ok:
        raise ConvergenceError(
            f"SMO did not converge in {n_iter} iterations; remaining scaled KKT gap {gap * n:.3g} (tol {tol:g})"
        )
    mu = []
    for cls in (1.0, -1.0):
        m = y == cls
        free = m & (alpha > 0) & (alpha < ub)
        if free.any():
            mu.append(G[free].mean())
        else:
            at_ub = m & (alpha >= ub)
            at_zero = m & (alpha <= 0)
            lo = G[at_ub].max() if at_ub.any() else None
            hi = G[at_zero].min() if at_zero.any() else None
            if lo is None:
                mu.append(hi)
            elif hi is None:
                mu.append(lo)
            else:
                mu.append(0.5 * (lo + hi))
    mu_pos, mu_neg = mu
    bias = 0.5 * (mu_neg - mu_pos)
    rho = 0.5 * (mu_pos + mu_neg)
    return alpha, G, bias, rho, n_iter


def dual_objective(alpha: np.ndarray, K: np.ndarray, y: np.ndarray) -> float:
    ay = alpha * y
    return 0.5 * float(ay @ K @ ay)


def kkt_violation(alpha: np.ndarray, K: np.ndarray, y: np.ndarray, nu: float) -> float:
    """Largest violation of the dual optimality conditions on the unit-box
    scale, including primal feasibility of the constraints."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    ub = 1.0 / n
    G = (y[:, None] * y[None, :] * K) @ alpha
    worst = 0.0
    for cls in (1.0, -1.0):
        m = y == cls
        worst = max(worst, abs(alpha[m].sum() - nu / 2) * n)
        up = m & (alpha < ub * (1 - 1e-12))
        down = m & (alpha > ub * 1e-12)
        if up.any() and down.any():
            worst = max(worst, (G[down].max() - G[up].min()) * n)
    worst = max(worst, float(np.max(-alpha)) * n, float(np.max(alpha - ub)) * n)
    return worst


@dataclass(frozen=True)
class NuSvm:
    """A fitted nu-SVM in an already-standardized input space."""

    support_vectors: np.ndarray
    dual_coefficients: np.ndarray   # alpha_i * y_i
    bias: float
    rho: float
    params: SvmHyperParams
    n_iter: int = 0

    def decision_function(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.support_vectors.shape[1]:
            raise ValueError(
                f"dimension mismatch: model has {self.support_vectors.shape[1]} features, got {X.shape[1]}"
            )
        K = rbf_matrix(X, self.support_vectors, self.params.gamma)
        return K @ self.dual_coefficients + self.bias

    def predict(self, X) -> np.ndarray:
        """+1 for the positive class; a decision value of exactly 0 is positive."""
        return np.where(self.decision_function(X) >= 0, 1, -1)


def fit_nu_svm(X, y, params: SvmHyperParams, K: np.ndarray | None = None, tol: float = 1e-4,
               sv_eps: float = 0.0) -> NuSvm:
    """Fit on standardized features ``X`` with labels ``y`` in {+1, -1}."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if K is None:
        K = rbf_matrix(X, X, params.gamma)
    alpha, _, bias, rho, n_iter = solve_dual(K, y, params.nu, tol=tol)
    sv = alpha > sv_eps
    return NuSvm(X[sv].copy(), (alpha * y)[sv], float(bias), float(rho), params, n_iter)
