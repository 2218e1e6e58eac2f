"""Truncated moment sequences, moment matrices and localizing matrices.

A localizing matrix of ``q`` at order ``k`` is the linear image of the
moment vector ``y`` obtained by replacing every monomial ``x^a`` in
``q(x) [x]_t [x]_t^T`` with ``y_a``. Templates hold the coefficients of that
linear map in coordinate form so that evaluation, Schur-complement
assembly and equality flattening all share one representation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .polyalg import Polynomial, _exponents_up_to, _index_map, num_monomials


@dataclass(frozen=True)
class TruncatedMomentSequence:
    """Vector ``y`` indexed by ``exponents_up_to(n, degree)``."""

    n: int
    degree: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        expected = num_monomials(self.n, self.degree)
        if values.shape != (expected,):
            raise ValueError(
                f"tms of degree {self.degree} in {self.n} variables needs {expected} entries,"
                f" got shape {values.shape}"
            )
        object.__setattr__(self, "values", values)

    def __getitem__(self, alpha) -> float:
        return float(self.values[_index_map(self.n, self.degree)[tuple(alpha)]])

    def first_moments(self) -> np.ndarray:
        """Degree-one entries ``(y_{e_1}, ..., y_{e_n})``."""
        return self.values[1 : self.n + 1].copy()

    def truncate(self, degree: int) -> "TruncatedMomentSequence":
        if degree > self.degree:
            raise ValueError(f"cannot truncate degree {self.degree} tms to {degree}")
        return TruncatedMomentSequence(self.n, degree, self.values[: num_monomials(self.n, degree)])


def tms_of_point(u, d: int) -> TruncatedMomentSequence:
    """Moment vector ``[u]_d`` of the Dirac measure at ``u``."""
    u = np.asarray(u, dtype=float)
    basis = np.array(_exponents_up_to(len(u), d), dtype=int)
    with np.errstate(invalid="ignore"):
        vals = np.prod(np.where(basis == 0, 1.0, u[None, :] ** basis), axis=1)
    return TruncatedMomentSequence(len(u), d, vals)


def pairing(f: Polynomial, y: TruncatedMomentSequence) -> float:
    """``<f, y> = sum_a f_a y_a``."""
    if f.n != y.n:
        raise ValueError(f"polynomial has {f.n} variables, tms has {y.n}")
    if f.degree > y.degree:
        raise ValueError(f"polynomial degree {f.degree} exceeds tms degree {y.degree}")
    idx = _index_map(y.n, y.degree)
    return float(sum(c * y.values[idx[a]] for a, c in f.terms.items()))


def localizing_size(q_degree: int, k: int) -> int:
    """Half-degree ``t`` of the monomial vector in the order-``k`` localizing matrix."""
    return k - math.ceil(q_degree / 2)


@dataclass(frozen=True)
class LocalizingTemplate:
    """Coefficients of ``y -> L_q^(k)[y] = sum_a y_a Q_a``.

    Stored in coordinate form: ``vals[j]`` contributes to entry
    ``(rows[j], cols[j])`` with variable ``var[j]`` (an index into
    ``exponents_up_to(n, 2k)``). Both triangles are stored.
    """

    q: Polynomial
    k: int
    t: int
    n: int
    rows: np.ndarray
    cols: np.ndarray
    var: np.ndarray
    vals: np.ndarray
    label: str = ""
    _mat: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def side(self) -> int:
        return num_monomials(self.n, self.t)

    @property
    def n_vars(self) -> int:
        return num_monomials(self.n, 2 * self.k)

    @property
    def blocks(self) -> dict:
        """Mapping ``alpha -> Q_alpha`` (dense) over the support."""
        basis = _exponents_up_to(self.n, 2 * self.k)
        out = {}
        for a in np.unique(self.var):
            sel = self.var == a
            Q = np.zeros((self.side, self.side))
            np.add.at(Q, (self.rows[sel], self.cols[sel]), self.vals[sel])
            out[basis[a]] = Q
        return out

    def support(self) -> np.ndarray:
        return np.unique(self.var)

    def matrix(self) -> sp.csc_matrix:
        """Sparse ``side^2 x n_vars`` operator with ``vec(L[y]) = A @ y``."""
        if "A" not in self._mat:
            s = self.side
            A = sp.coo_matrix(
                (self.vals, (self.rows * s + self.cols, self.var)), shape=(s * s, self.n_vars)
            ).tocsc()
            A.sum_duplicates()
            self._mat["A"] = A
        return self._mat["A"]

    def rescaled(self, c: float) -> "LocalizingTemplate":
        return LocalizingTemplate(
            self.q * c, self.k, self.t, self.n, self.rows, self.cols, self.var, self.vals * c, self.label
        )

    def __call__(self, y) -> np.ndarray:
        return evaluate_template(self, y)


def localizing_template(q: Polynomial, k: int, n: int | None = None, label: str = "") -> LocalizingTemplate:
    """Template of the ``k``-th localizing matrix of ``q``.

    The monomial vector has degree ``t = k - ceil(deg(q)/2)`` so that every
    entry of ``q [x]_t [x]_t^T`` has degree at most ``2k``.
    """
    n = q.n if n is None else n
    if q.n != n:
        raise ValueError(f"polynomial has {q.n} variables, expected {n}")
    t = localizing_size(q.degree, k)
    if t < 0:
        raise ValueError(f"order k={k} too small for a polynomial of degree {q.degree}")
    basis = _exponents_up_to(n, t)
    index = _index_map(n, 2 * k)
    s = len(basis)
    B = np.array(basis, dtype=int)
    terms = list(q.terms.items())
    rows, cols, var, vals = [], [], [], []
    iu, ju = np.triu_indices(s)
    pair_exp = B[iu] + B[ju]
    for a, c in terms:
        full = pair_exp + np.asarray(a, dtype=int)
        ids = np.fromiter((index[tuple(e)] for e in full), dtype=np.int64, count=len(full))
        rows.append(iu)
        cols.append(ju)
        var.append(ids)
        vals.append(np.full(len(iu), c))
        off = iu != ju
        rows.append(ju[off])
        cols.append(iu[off])
        var.append(ids[off])
        vals.append(np.full(int(off.sum()), c))
    if terms:
        rows, cols, var, vals = (np.concatenate(z) for z in (rows, cols, var, vals))
    else:
        rows = cols = var = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0)
    # merge duplicate (row, col, var) triples
    key = (rows * s + cols) * len(index) + var
    uniq, inv = np.unique(key, return_inverse=True)
    merged = np.zeros(len(uniq))
    np.add.at(merged, inv, vals)
    keep = merged != 0.0
    uniq, merged = uniq[keep], merged[keep]
    var = uniq % len(index)
    rc = uniq // len(index)
    return LocalizingTemplate(q, k, t, n, rc // s, rc % s, var, merged, label)


def moment_template(n: int, k: int) -> LocalizingTemplate:
    """Template of the moment matrix ``M_k[y]``."""
    return localizing_template(Polynomial.constant(n, 1.0), k, n, label="moment")


def evaluate_template(tpl: LocalizingTemplate, y) -> np.ndarray:
    """Dense symmetric matrix ``L_q^(k)[y]``."""
    if isinstance(y, TruncatedMomentSequence):
        if y.n != tpl.n:
            raise ValueError(f"tms has {y.n} variables, template has {tpl.n}")
        if y.degree < 2 * tpl.k:
            raise ValueError(f"tms degree {y.degree} below 2k = {2 * tpl.k}")
        vec = y.values[: tpl.n_vars]
    else:
        vec = np.asarray(y, dtype=float)
        if vec.shape != (tpl.n_vars,):
            raise ValueError(f"expected a vector of length {tpl.n_vars}, got {vec.shape}")
    s = tpl.side
    out = np.zeros((s, s))
    np.add.at(out, (tpl.rows, tpl.cols), tpl.vals * vec[tpl.var])
    return out


def equality_rows(h: Polynomial, k: int, n: int, full: bool = True) -> sp.csr_matrix:
    """Scalar linear equations encoding ``L_h^(k)[y] = 0``.

    With ``full=True`` the rows are ``<h x^a, y> = 0`` for every ``|a| <=
    2k - deg(h)``, which is the span of all entries of the localizing
    matrix plus the top-degree shifts an odd-degree ``h`` leaves out. With
    ``full=False`` only the distinct entries of the localizing matrix are
    used. Duplicate rows are dropped. Returns an empty matrix when ``h``
    does not fit in order ``k``.
    """
    index = _index_map(n, 2 * k)
    m = len(index)
    d = h.degree
    if d > 2 * k:
        return sp.csr_matrix((0, m))
    if full:
        shift_deg = 2 * k - d
    else:
        t = localizing_size(d, k)
        if t < 0:
            return sp.csr_matrix((0, m))
        shift_deg = 2 * t
    rows, cols, vals = [], [], []
    for r, a in enumerate(_exponents_up_to(n, shift_deg)):
        for b, c in h.terms.items():
            rows.append(r)
            cols.append(index[tuple(x + y for x, y in zip(a, b))])
            vals.append(c)
    E = sp.csr_matrix((vals, (rows, cols)), shape=(num_monomials(n, shift_deg), m))
    E.sum_duplicates()
    return E
