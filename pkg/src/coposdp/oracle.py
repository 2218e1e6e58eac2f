"""Reference computations that do not use semidefinite programming.

``simplex_minimize`` gives an upper bound on ``min A(x)`` over the simplex
by a grid scan plus projected-gradient polishing. ``simplicial_partition_check``
is the classical bisection test: a subsimplex is discarded once the
transformed tensor has nonnegative entries there.
"""
from __future__ import annotations

import enum
import itertools
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .polyalg import SymmetricTensor, eval_form, gradient


@dataclass
class OracleResult:
    best_value: float
    best_point: np.ndarray
    kkt_residual: float
    evaluations: int


def default_grid_depth(n: int) -> int:
    if n <= 4:
        return 20
    if n <= 6:
        return 12
    return 8


def simplex_grid(n: int, depth: int) -> np.ndarray:
    """All points ``c / depth`` with ``c`` a composition of ``depth`` into ``n`` parts."""
    if n < 1 or depth < 1:
        raise ValueError("need n >= 1 and depth >= 1")
    rows = []
    # stars and bars: choose n-1 bar positions among depth+n-1 slots
    for bars in itertools.combinations(range(depth + n - 1), n - 1):
        prev, parts = -1, []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(depth + n - 2 - prev)
        rows.append(parts)
    return np.asarray(rows, dtype=float) / depth


class _FormEvaluator:
    """Vectorized evaluation of ``A(x)`` at many points."""

    def __init__(self, A: SymmetricTensor):
        f = A.as_polynomial()
        self.exps = np.array(list(f.terms), dtype=int).reshape(-1, A.dim)
        self.coef = np.array(list(f.terms.values()), dtype=float)

    def __call__(self, X: np.ndarray) -> np.ndarray:
        if len(self.coef) == 0:
            return np.zeros(len(X))
        out = np.zeros(len(X))
        for start in range(0, len(X), 4096):
            P = X[start : start + 4096, None, :] ** self.exps[None, :, :]
            out[start : start + 4096] = np.prod(P, axis=2) @ self.coef
        return out


def project_simplex(v) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, sum x = 1}``."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, len(v) + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    x = np.maximum(v - theta, 0.0)
    return x / x.sum()


def kkt_residual(A: SymmetricTensor, x) -> float:
    """Largest violation of the simplex KKT conditions at ``x``.

    With ``lambda = m A(x)`` the sign multipliers are ``mu_i = dA/dx_i - m A(x)``;
    the conditions are ``mu >= 0``, ``x_i mu_i = 0``, ``x >= 0`` and ``e^T x = 1``.
    """
    x = np.asarray(x, dtype=float)
    mu = gradient(A, x) - A.order * eval_form(A, x)
    return float(max(
        np.max(np.maximum(-mu, 0.0)),
        np.max(np.abs(x * mu)),
        np.max(np.maximum(-x, 0.0)),
        abs(x.sum() - 1.0),
    ))


def _polish(A: SymmetricTensor, x0: np.ndarray, max_iter: int = 500, min_step: float = 1e-12):
    x, fx, evals = x0.copy(), eval_form(A, x0), 1
    step = 1.0
    for _ in range(max_iter):
        g = gradient(A, x)
        while step >= min_step:
            xn = project_simplex(x - step * g)
            fn = eval_form(A, xn)
            evals += 1
            if fn < fx - 1e-16 * abs(fx):
                break
            step *= 0.5
        else:
            break
        x, fx = xn, fn
        step = min(1.0, 2.0 * step)
    return x, fx, evals


def simplex_minimize(
    A: SymmetricTensor,
    grid_depth: int | None = None,
    n_starts: int = 5,
    seed: int = 0,
) -> OracleResult:
    """Upper bound on ``min A(x)`` over the standard simplex.

    Parameters
    ----------
    A : SymmetricTensor
    grid_depth : int, optional
        Resolution of the composition grid; default depends on ``A.dim``.
    n_starts : int
        Number of best grid points polished, and of extra random starts.
    seed : int
        Seed for the random starts.

    Returns
    -------
    OracleResult
    """
    n = A.dim
    depth = default_grid_depth(n) if grid_depth is None else int(grid_depth)
    grid = simplex_grid(n, depth)
    vals = _FormEvaluator(A)(grid)
    evals = len(grid)
    order = np.argsort(vals, kind="stable")[: max(1, n_starts)]
    starts = [grid[i] for i in order]
    rng = np.random.default_rng(seed)
    starts += list(rng.dirichlet(np.ones(n), size=n_starts))

    best_x = grid[order[0]].copy()
    best_f = float(vals[order[0]])
    for x0 in starts:
        x, fx, e = _polish(A, x0)
        evals += e
        if fx < best_f:
            best_x, best_f = x, fx
    best_x = best_x / best_x.sum()
    best_f = eval_form(A, best_x)
    return OracleResult(best_f, best_x, kkt_residual(A, best_x), evals)


def verify_refutation(A: SymmetricTensor, u, tol: float = 1e-8) -> bool:
    """Independent check that ``u`` lies in the simplex and ``A(u) < 0``."""
    u = np.asarray(u, dtype=float)
    if u.shape != (A.dim,) or not np.all(np.isfinite(u)):
        return False
    if np.any(u < -tol) or abs(u.sum() - 1.0) > tol:
        return False
    return eval_form(A, u) < 0.0


class PartitionStatus(str, enum.Enum):
    COPOSITIVE = "Copositive"
    NOT_COPOSITIVE = "NotCopositive"
    UNKNOWN = "Unknown"


@dataclass
class PartitionResult:
    status: PartitionStatus
    point: np.ndarray | None
    iterations: int
    open_simplices: int


def _transform(T: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Tensor of ``lambda -> A(V lambda)``: contract every mode with ``V``."""
    for _ in range(T.ndim):
        # contract the leading mode, append the new one at the end
        T = np.tensordot(T, V, axes=([0], [0]))
    return T


def simplicial_partition_check(
    A: SymmetricTensor, max_iter: int = 10000, tol: float | None = None
) -> PartitionResult:
    """Bisection-based simplicial partition test.

    A subsimplex with vertex matrix ``V`` is discarded when every entry of
    ``A x_1 V x_2 V ... x_m V`` is nonnegative, which makes ``A(V lambda) >= 0``
    for all ``lambda >= 0``. A vertex with a negative value refutes
    copositivity. Subsimplices are split at the midpoint of their longest
    edge. Each processed subsimplex counts as one iteration.

    A vertex refutes only when its value is below ``-tol`` (default
    ``1e-12 (1 + max|A|)``), so rounding cannot produce a refutation; the
    discard test uses no tolerance.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    n = A.dim
    tol = 1e-12 * (1.0 + A.max_abs_entry()) if tol is None else float(tol)
    T0 = A.to_dense()
    queue = deque([np.eye(n)])
    it = 0
    diag = (np.arange(n),) * A.order
    while queue and it < max_iter:
        it += 1
        V = queue.popleft()
        B = _transform(T0, V)
        vertex_vals = B[diag]
        j = int(np.argmin(vertex_vals))
        if vertex_vals[j] < -tol:
            v = V[:, j] / V[:, j].sum()
            if eval_form(A, v) < -tol:
                return PartitionResult(PartitionStatus.NOT_COPOSITIVE, v, it, len(queue))
        if B.min() >= 0.0:
            continue
        # longest edge, measured between simplex-normalized vertices
        W = V / V.sum(axis=0)
        d = ((W[:, :, None] - W[:, None, :]) ** 2).sum(axis=0)
        a, b = np.unravel_index(int(np.argmax(d)), d.shape)
        mid = 0.5 * (V[:, a] + V[:, b])
        V1, V2 = V.copy(), V.copy()
        V1[:, a] = mid
        V2[:, b] = mid
        queue.append(V1)
        queue.append(V2)
    if not queue:
        return PartitionResult(PartitionStatus.COPOSITIVE, None, it, 0)
    return PartitionResult(PartitionStatus.UNKNOWN, None, it, len(queue))
