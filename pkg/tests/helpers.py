"""Random instances shared by the unit and acceptance suites."""
from __future__ import annotations

import itertools

import numpy as np
import scipy.sparse as sp

from coposdp.polyalg import SymmetricTensor
from coposdp.sdp import DenseBlock, SdpProblem


def random_integer_tensor(rng, n: int, m: int, low: int = -5, high: int = 5) -> SymmetricTensor:
    """Integer entries, so every derived polynomial coefficient is exact in floating point."""
    entries = {
        idx: int(rng.integers(low, high + 1))
        for idx in itertools.combinations_with_replacement(range(n), m)
    }
    return SymmetricTensor(m, n, entries)


def random_tensor(rng, n: int, m: int, scale: float = 1.0) -> SymmetricTensor:
    entries = {
        idx: scale * rng.uniform(-1.0, 1.0)
        for idx in itertools.combinations_with_replacement(range(n), m)
    }
    return SymmetricTensor(m, n, entries)


def _rand_sym(rng, s: int) -> np.ndarray:
    G = rng.standard_normal((s, s))
    return G + G.T


def _pin_first(n_free: int) -> tuple:
    E = sp.csr_matrix(([1.0], ([0], [0])), shape=(1, n_free + 1))
    return E, np.array([1.0])


def planted_sdp(rng) -> tuple:
    """Random LMI program with a known optimum.

    For each block a strictly complementary pair ``S* X* = 0`` is drawn and
    ``C = S* - sum y*_i A_i``; taking ``c_i = sum_j <A^j_i, X^j*>`` makes
    ``y*`` optimal with value ``c^T y*`` and zero duality gap. Variable 0 is
    pinned to 1 and carries the constant term.

    Returns ``(problem, optimal_value, y_star)``.
    """
    nv = int(rng.integers(2, 8))
    nb = int(rng.integers(1, 3))
    y_star = rng.standard_normal(nv)
    blocks, c = [], np.zeros(nv + 1)
    for _ in range(nb):
        s = int(rng.integers(2, 7))
        r = int(rng.integers(1, s))
        Q = np.linalg.qr(rng.standard_normal((s, s)))[0]
        S = Q[:, :r] @ np.diag(rng.uniform(0.5, 2.0, r)) @ Q[:, :r].T
        X = Q[:, r:] @ np.diag(rng.uniform(0.5, 2.0, s - r)) @ Q[:, r:].T
        As = [_rand_sym(rng, s) for _ in range(nv)]
        C = S - sum(y * A for y, A in zip(y_star, As))
        blocks.append(DenseBlock([C] + As))
        c[1:] += [np.sum(A * X) for A in As]
    E, g = _pin_first(nv)
    return SdpProblem(c, E, g, blocks), float(c[1:] @ y_star), y_star


def infeasible_sdp(rng) -> tuple:
    """Random LMI program made infeasible by a planted positive definite ``X``.

    Every ``A_i`` is orthogonal to ``X`` and ``<C, X> = -1``, so
    ``<F(y), X> = -1`` for all ``y``. The objective is ``A^*(X0)`` for a PSD
    ``X0`` so that the dual side stays feasible.

    Returns ``(problem, X)``.
    """
    nv = int(rng.integers(1, 8))
    s = int(rng.integers(2, 7))
    G = rng.standard_normal((s, s))
    Xh = G @ G.T + 0.1 * np.eye(s)

    def perp(M):
        return M - np.sum(M * Xh) / np.sum(Xh * Xh) * Xh

    As = [perp(_rand_sym(rng, s)) for _ in range(nv)]
    C = perp(_rand_sym(rng, s)) - Xh / np.sum(Xh * Xh)
    H = rng.standard_normal((s, s))
    X0 = H @ H.T
    c = np.concatenate([[0.0], [np.sum(A * X0) for A in As]])
    E, g = _pin_first(nv)
    return SdpProblem(c, E, g, [DenseBlock([C] + As)]), Xh
