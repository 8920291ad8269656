"""ICA-LiNGAM on trace profiles and the tree / multiple-parent post-processing."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from enci.dataset import DataError, GroupedDataset, NumericalError
from enci.kernels import KernelConfig
from enci.trace import DEFAULT_ESTIMATOR, normalize_groups, tau_matrix

log = logging.getLogger(__name__)

DEFAULT_PRUNE = 0.05
EXHAUSTIVE_ORDER_MAX_P = 8

TREE_LIKE = "tree_like"
MIPG_LIKE = "mipg_like"
AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class CoefficientMatrix:
    """``entries[n, m]`` is the effect of variable m on variable n."""

    entries: np.ndarray
    variable_order: tuple[int, ...]

    @property
    def p(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class GraphEstimate:
    adjacency: np.ndarray
    coefficients: CoefficientMatrix
    shape_verdict: str
    variables: tuple[str, ...] = ()

    def edges(self) -> list[tuple[int, int]]:
        """(parent, child) index pairs."""
        child, parent = np.nonzero(self.adjacency)
        return sorted(zip(parent.tolist(), child.tolist()))


# --------------------------------------------------------------------------- ICA


def whiten(data):
    """Centre and whiten rows of ``data``.

    Returns ``(Z, V)`` with ``Z = (data - mean) @ V.T`` having identity
    covariance. Eigenvector signs are fixed (largest-magnitude entry positive)
    so that the result does not depend on LAPACK sign conventions.
    """
    X = np.asarray(data, dtype=float)
    if X.ndim != 2:
        raise DataError(f"expected an N x p matrix, got shape {X.shape}")
    Xc = X - X.mean(axis=0)
    cov = Xc.T @ Xc / X.shape[0]
    d, E = np.linalg.eigh(cov)
    if d[0] <= 1e-12 * max(d[-1], 1e-300):
        raise NumericalError("degenerate component: covariance is singular")
    flip = np.sign(E[np.argmax(np.abs(E), axis=0), np.arange(E.shape[1])])
    E = E * flip
    V = (E / np.sqrt(d)).T
    return Xc @ V.T, V


def _gram_schmidt(w, W, k):
    if k:
        w = w - W[:k].T @ (W[:k] @ w)
    return w / np.linalg.norm(w)


def _one_unit(Z, W, k, w, tol, max_iter, step=1.0):
    """One deflation unit. ``step`` < 1 damps the Newton update (stabilized
    FastICA), which helps when the remaining subspace is close to Gaussian."""
    n = Z.shape[0]
    w = _gram_schmidt(w, W, k)
    for it in range(max_iter):
        u = Z @ w
        g = np.tanh(u)
        if step == 1.0:
            w_new = Z.T @ g / n - (1.0 - g * g).mean() * w
        else:
            beta = (u * g).mean()
            denom = (1.0 - g * g).mean() - beta
            w_new = w - step * (Z.T @ g / n - beta * w) / denom
        w_new = _gram_schmidt(w_new, W, k)
        if abs(abs(w_new @ w) - 1.0) < tol:
            return w_new, it + 1
        w = w_new
    return None, max_iter


# E[log cosh(v)] for standard normal v
_GAUSS_LOGCOSH = 0.374567207491438


def _logcosh(u):
    return np.logaddexp(u, -u) - np.log(2.0)


def negentropy(Y) -> float:
    """Summed squared log-cosh negentropy proxy of the columns of ``Y``."""
    return float(np.sum((_logcosh(np.asarray(Y)).mean(axis=0) - _GAUSS_LOGCOSH) ** 2))


def _deflate(Z, rng, tol, max_iter, max_restarts):
    p = Z.shape[1]
    W = np.zeros((p, p))
    for k in range(p):
        for attempt in range(max_restarts + 1):
            w, iters = _one_unit(Z, W, k, rng.standard_normal(p), tol, max_iter, 0.5**attempt)
            if w is not None:
                break
            log.debug("component %d did not converge (attempt %d)", k, attempt)
        else:
            raise NumericalError(
                f"FastICA component {k} did not converge within {max_iter} iterations "
                f"after {max_restarts} restarts (p={p}, N={Z.shape[0]})"
            )
        W[k] = w
    return W


def fastica(data, seed=0, tol: float = 1e-6, max_iter: int = 500, max_restarts: int = 5,
            return_whitening: bool = False, n_init: int = 5):
    """Deflationary FastICA with the log-cosh contrast.

    Returns the orthogonal matrix W acting on whitened rows: the recovered
    components are ``whiten(data)[0] @ W.T``. With ``return_whitening`` the
    whitening matrix V is returned too, so ``W @ V`` unmixes centred data.
    A component that fails to converge is retried from a fresh random start
    up to ``max_restarts`` times, with the update damped by half on each retry.

    Deflation can settle on a spurious fixed point, mostly with skewed
    sources, so ``n_init`` independent starts are run and the one with the
    largest total negentropy is kept.
    """
    X = np.asarray(data, dtype=float)
    if X.ndim != 2:
        raise DataError(f"expected an N x p matrix, got shape {X.shape}")
    Z, V = whiten(X)
    best, best_score, failure = None, -np.inf, None
    for k in range(max(1, n_init)):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), k]))
        try:
            W = _deflate(Z, rng, tol, max_iter, max_restarts)
        except NumericalError as exc:
            failure = exc
            continue
        score = negentropy(Z @ W.T)
        if score > best_score:
            best, best_score = W, score
    if best is None:
        raise failure
    return (best, V) if return_whitening else best


# ------------------------------------------------------------------ LiNGAM steps


def _permute_to_diagonal(W):
    """Row permutation of W making every diagonal entry large (min sum 1/|W_ii|)."""
    with np.errstate(divide="ignore"):
        cost = 1.0 / np.abs(W)
    cost[~np.isfinite(cost)] = 1e300
    rows, cols = linear_sum_assignment(cost)
    out = np.empty_like(W)
    out[cols] = W[rows]
    return out


def _upper_cost_order(B):
    """Causal order minimising the squared mass above the diagonal (exhaustive)."""
    p = B.shape[0]
    B2 = B * B
    perms = np.array(list(itertools.permutations(range(p))))
    sub = B2[perms[:, :, None], perms[:, None, :]]
    cost = np.triu(np.ones((p, p)), 1)
    scores = np.einsum("kij,ij->k", sub, cost)
    return tuple(int(i) for i in perms[int(np.argmin(scores))])


def _zero_row_order(B):
    """Order found by zeroing the smallest entries until B is permutable to
    strictly lower triangular."""
    p = B.shape[0]
    absB = np.abs(B)
    flat = np.argsort(absB, axis=None)
    n_zero = p * (p + 1) // 2
    while n_zero <= p * p:
        mask = np.ones(p * p, dtype=bool)
        mask[flat[:n_zero]] = False
        A = mask.reshape(p, p)
        order = _source_peeling(A)
        if order is not None:
            return order
        n_zero += 1
    raise NumericalError("could not find a causal order")


def _source_peeling(A):
    remaining = list(range(p := A.shape[0]))
    order = []
    while remaining:
        sub = A[np.ix_(remaining, remaining)]
        empty = np.flatnonzero(~sub.any(axis=1))
        if empty.size == 0:
            return None
        k = remaining[empty[0]]
        order.append(k)
        remaining.remove(k)
    return tuple(order)


def causal_order(B) -> tuple[int, ...]:
    B = np.asarray(B, dtype=float)
    if B.shape[0] <= EXHAUSTIVE_ORDER_MAX_P:
        return _upper_cost_order(B)
    return _zero_row_order(B)


def ica_lingam(tau, seed=0, prune_threshold: float = DEFAULT_PRUNE,
               tol: float = 1e-6) -> CoefficientMatrix:
    """Estimate a LiNGAM coefficient matrix from an N x p matrix of observations.

    Columns are scaled to unit variance first; the pruning threshold applies on
    that scale and the returned coefficients are mapped back to the input scale.
    ``tol`` is the FastICA stopping rule; it bounds the unmixing angle error
    at roughly ``sqrt(2 * tol)``.
    """
    X = np.asarray(tau, dtype=float)
    if X.ndim != 2 or X.shape[1] < 1:
        raise DataError(f"expected an N x p matrix, got shape {X.shape}")
    sd = X.std(axis=0)
    if np.any(sd <= 0):
        raise NumericalError("degenerate component: a column has zero variance")
    W, V = fastica(X / sd, seed, tol=tol, return_whitening=True)
    Wp = _permute_to_diagonal(W @ V)
    Wp = Wp / np.diag(Wp)[:, None]
    p = X.shape[1]
    B = np.eye(p) - Wp
    order = causal_order(B)
    pos = np.empty(p, dtype=int)
    pos[list(order)] = np.arange(p)
    # keep only parent -> child entries consistent with the order
    B = np.where(pos[None, :] < pos[:, None], B, 0.0)
    B[np.abs(B) < prune_threshold] = 0.0
    C = B * sd[:, None] / sd[None, :]
    return CoefficientMatrix(C, order)


# -------------------------------------------------------------- graph shape


def _single_nonzero_counts(C):
    nz = C != 0
    return int(np.sum(nz.sum(axis=1) == 1)), int(np.sum(nz.sum(axis=0) == 1))


def _keep_max_per_row(C):
    out = np.zeros_like(C)
    for n, row in enumerate(C):
        nz = np.flatnonzero(row)
        if nz.size == 1:
            out[n, nz[0]] = row[nz[0]]
        elif nz.size > 1:
            m = nz[np.argmax(np.abs(row[nz]))]
            out[n, m] = row[m]
    return out


def enforce_graph_shape(coef: CoefficientMatrix | np.ndarray, variables=()) -> GraphEstimate:
    """Force a tree (one parent per row) or multiple-independent-parent shape
    (one child per column), whichever the matrix already resembles more.
    """
    if not isinstance(coef, CoefficientMatrix):
        C = np.asarray(coef, dtype=float)
        coef = CoefficientMatrix(C, tuple(range(C.shape[0])))
    C = np.array(coef.entries, dtype=float)
    n_row, n_col = _single_nonzero_counts(C)
    if n_row > n_col:
        C, verdict = _keep_max_per_row(C), TREE_LIKE
    elif n_col > n_row:
        C, verdict = _keep_max_per_row(C.T).T, MIPG_LIKE
    else:
        verdict = AMBIGUOUS
    return GraphEstimate(C != 0, CoefficientMatrix(C, coef.variable_order), verdict, tuple(variables))


def infer_graph(data: GroupedDataset, cfg: KernelConfig | None = None, seed=0,
                prune_threshold: float = DEFAULT_PRUNE, jobs: int = 1,
                estimator: str = DEFAULT_ESTIMATOR) -> GraphEstimate:
    """Causal graph over all variables of ``data``."""
    if data.n_vars < 2:
        raise DataError("graph inference needs at least 2 variables")
    data.validate(min_groups=2, min_size=2)
    if data.n_groups < 10 * data.n_vars:
        log.warning("only %d groups for %d variables; at least %d recommended",
                    data.n_groups, data.n_vars, 10 * data.n_vars)
    tau = tau_matrix(normalize_groups(data), cfg or KernelConfig(), jobs, estimator)
    coef = ica_lingam(tau, seed, prune_threshold)
    return enforce_graph_shape(coef, data.variables)
