"""Exponent combinatorics, sparse polynomials and symmetric tensors.

Monomials are indexed by exponent tuples ``alpha`` of length ``n``. The
canonical ordering of ``[x]_d`` is graded lexicographic with ``x_1`` the
highest variable, e.g. for ``n=2``::

    1, x1, x2, x1^2, x1*x2, x2^2, x1^3, ...
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

Exponent = tuple


@lru_cache(maxsize=None)
def _exponents_of_degree(n: int, d: int) -> tuple:
    if n == 1:
        return ((d,),)
    out = []
    for first in range(d, -1, -1):
        for rest in _exponents_of_degree(n - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _exponents_up_to(n: int, d: int) -> tuple:
    out = []
    for deg in range(d + 1):
        out.extend(_exponents_of_degree(n, deg))
    return tuple(out)


def exponents_up_to(n: int, d: int) -> list:
    """All exponents of total degree at most ``d`` in graded-lex order.

    The list has ``C(n+d, d)`` entries.
    """
    if n < 1 or d < 0:
        raise ValueError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    return list(_exponents_up_to(n, d))


@lru_cache(maxsize=None)
def _index_map(n: int, d: int) -> dict:
    return {a: i for i, a in enumerate(_exponents_up_to(n, d))}


def monomial_index(alpha: Sequence[int], n: int, d: int) -> int:
    """Position of ``alpha`` in ``exponents_up_to(n, d)``."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != n:
        raise ValueError(f"exponent {alpha} has length {len(alpha)}, expected {n}")
    if min(alpha) < 0:
        raise ValueError(f"negative exponent {alpha}")
    if sum(alpha) > d:
        raise IndexError(f"exponent {alpha} has degree {sum(alpha)} > {d}")
    return _index_map(n, d)[alpha]


def num_monomials(n: int, d: int) -> int:
    return math.comb(n + d, d)


def unit(n: int, i: int, power: int = 1) -> tuple:
    e = [0] * n
    e[i] = power
    return tuple(e)


def _add_exp(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


class Polynomial:
    """Sparse real polynomial in ``n`` variables.

    Stored as a mapping from exponent tuples to nonzero coefficients.
    Instances are treated as immutable.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[tuple, float] | None = None):
        self.n = int(n)
        clean = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.n:
                raise ValueError(f"exponent {alpha} does not have length {self.n}")
            if min(alpha, default=0) < 0:
                raise ValueError(f"negative exponent {alpha}")
            c = float(c)
            if c != 0.0:
                clean[alpha] = clean.get(alpha, 0.0) + c
        self.terms = {a: c for a, c in clean.items() if c != 0.0}

    # construction helpers
    @classmethod
    def constant(cls, n: int, c: float) -> "Polynomial":
        return cls(n, {(0,) * n: c})

    @classmethod
    def variable(cls, n: int, i: int) -> "Polynomial":
        return cls(n, {unit(n, i): 1.0})

    @classmethod
    def from_vector(cls, n: int, d: int, coeffs: Sequence[float]) -> "Polynomial":
        """Polynomial ``coeffs^T [x]_d``."""
        basis = _exponents_up_to(n, d)
        if len(coeffs) != len(basis):
            raise ValueError(f"expected {len(basis)} coefficients, got {len(coeffs)}")
        return cls(n, dict(zip(basis, coeffs)))

    @property
    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(a) for a in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def coefficient(self, alpha: Sequence[int]) -> float:
        return self.terms.get(tuple(alpha), 0.0)

    def to_vector(self, d: int) -> np.ndarray:
        if self.degree > d:
            raise ValueError(f"degree {self.degree} exceeds {d}")
        idx = _index_map(self.n, d)
        v = np.zeros(len(idx))
        for a, c in self.terms.items():
            v[idx[a]] = c
        return v

    def _check(self, other: "Polynomial") -> None:
        if other.n != self.n:
            raise ValueError(f"variable count mismatch: {self.n} vs {other.n}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.n, float(other))

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        terms = dict(self.terms)
        for a, c in other.terms.items():
            terms[a] = terms.get(a, 0.0) + c
        return Polynomial(self.n, terms)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.n, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            s = float(other)
            return Polynomial(self.n, {a: s * c for a, c in self.terms.items()})
        self._check(other)
        terms: dict = {}
        for a, c in self.terms.items():
            for b, d in other.terms.items():
                ab = _add_exp(a, b)
                terms[ab] = terms.get(ab, 0.0) + c * d
        return Polynomial(self.n, terms)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> "Polynomial":
        return self * (1.0 / float(s))

    def __pow__(self, p: int) -> "Polynomial":
        out = Polynomial.constant(self.n, 1.0)
        for _ in range(int(p)):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def almost_equal(self, other: "Polynomial", tol: float = 1e-12) -> bool:
        return (self - other).max_abs_coeff() <= tol

    def derivative(self, i: int) -> "Polynomial":
        terms = {}
        for a, c in self.terms.items():
            if a[i] > 0:
                b = list(a)
                b[i] -= 1
                terms[tuple(b)] = c * a[i]
        return Polynomial(self.n, terms)

    def __call__(self, x: Sequence[float]) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"point has shape {x.shape}, expected ({self.n},)")
        total = 0.0
        for a, c in self.terms.items():
            total += c * float(np.prod(x ** np.asarray(a)))
        return total

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for a in sorted(self.terms, key=lambda e: (sum(e), tuple(-v for v in e))):
            mono = "*".join(
                f"x{i + 1}" + (f"^{p}" if p > 1 else "") for i, p in enumerate(a) if p
            )
            c = self.terms[a]
            parts.append(f"{c:g}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def _multiplicity(index: tuple) -> int:
    """Number of distinct orderings of a multi-index."""
    counts = np.bincount(index)
    out = math.factorial(len(index))
    for c in counts:
        out //= math.factorial(int(c))
    return out


def _index_to_exponent(index: tuple, n: int) -> tuple:
    e = [0] * n
    for i in index:
        e[i] += 1
    return tuple(e)


def _exponent_to_index(alpha: tuple) -> tuple:
    return tuple(i for i, a in enumerate(alpha) for _ in range(a))


class SymmetricTensor:
    """Symmetric tensor of order ``m`` and dimension ``n``.

    Only sorted (0-based) index tuples are stored; any permutation of an index
    looks up the same value.
    """

    __slots__ = ("order", "dim", "entries", "_poly")

    def __init__(self, order: int, dim: int, entries: Mapping[tuple, float] | None = None):
        if order < 1 or dim < 1:
            raise ValueError(f"need order >= 1 and dim >= 1, got {order}, {dim}")
        self.order = int(order)
        self.dim = int(dim)
        clean = {}
        for idx, v in (entries or {}).items():
            key = tuple(sorted(int(i) for i in idx))
            if len(key) != self.order or key[0] < 0 or key[-1] >= self.dim:
                raise ValueError(f"index {idx} invalid for order {order}, dim {dim}")
            if float(v) != 0.0:
                clean[key] = float(v)
        self.entries = clean
        self._poly = None

    def __getitem__(self, idx) -> float:
        return self.entries.get(tuple(sorted(idx)), 0.0)

    @classmethod
    def from_polynomial(cls, f: Polynomial) -> "SymmetricTensor":
        """The symmetric tensor whose form is the homogeneous polynomial ``f``."""
        if f.is_zero():
            raise ValueError("cannot infer order from the zero polynomial")
        m = f.degree
        entries = {}
        for a, c in f.terms.items():
            if sum(a) != m:
                raise ValueError("polynomial is not homogeneous")
            idx = _exponent_to_index(a)
            entries[idx] = c / _multiplicity(idx)
        return cls(m, f.n, entries)

    @classmethod
    def from_matrix(cls, a) -> "SymmetricTensor":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if not np.allclose(a, a.T, rtol=0, atol=1e-12):
            raise ValueError("matrix is not symmetric")
        n = a.shape[0]
        return cls(2, n, {(i, j): a[i, j] for i in range(n) for j in range(i, n)})

    @classmethod
    def from_dense(cls, a, atol: float = 1e-12) -> "SymmetricTensor":
        a = np.asarray(a, dtype=float)
        n, m = a.shape[0], a.ndim
        if any(s != n for s in a.shape):
            raise ValueError(f"expected a cubical array, got shape {a.shape}")
        entries = {}
        for idx in itertools.combinations_with_replacement(range(n), m):
            vals = {a[p] for p in set(itertools.permutations(idx))}
            if max(vals) - min(vals) > atol:
                raise ValueError(f"array is not symmetric at index {idx}")
            entries[idx] = a[idx]
        return cls(m, n, entries)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim,) * self.order)
        for idx, v in self.entries.items():
            for p in set(itertools.permutations(idx)):
                out[p] = v
        return out

    def as_polynomial(self) -> Polynomial:
        if self._poly is None:
            terms = {
                _index_to_exponent(idx, self.dim): v * _multiplicity(idx)
                for idx, v in self.entries.items()
            }
            self._poly = Polynomial(self.dim, terms)
        return self._poly

    def max_abs_entry(self) -> float:
        return max((abs(v) for v in self.entries.values()), default=0.0)

    def scaled(self, c: float) -> "SymmetricTensor":
        return SymmetricTensor(self.order, self.dim, {k: c * v for k, v in self.entries.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymmetricTensor):
            return NotImplemented
        return (self.order, self.dim, self.entries) == (other.order, other.dim, other.entries)

    def __repr__(self) -> str:
        return f"SymmetricTensor(order={self.order}, dim={self.dim}, nnz={len(self.entries)})"


def tensor_from_entries(order: int, dim: int, entries: Iterable) -> SymmetricTensor:
    """Build a tensor from ``(index, value)`` pairs with 1-based indices.

    Indices are symmetrized; unspecified entries are zero. Listing the same
    index twice (up to permutation) with different values is an error.
    """
    seen: dict = {}
    for idx, value in entries:
        idx = tuple(int(i) for i in idx)
        if len(idx) != order:
            raise ValueError(f"index {idx} has length {len(idx)}, expected order {order}")
        if any(i < 1 or i > dim for i in idx):
            raise ValueError(f"index {idx} out of range 1..{dim}")
        key = tuple(sorted(i - 1 for i in idx))
        value = float(value)
        if key in seen and seen[key] != value:
            raise ValueError(
                f"conflicting values for index {tuple(i + 1 for i in key)}: {seen[key]} vs {value}"
            )
        seen[key] = value
    return SymmetricTensor(order, dim, seen)


def _as_point(A: SymmetricTensor, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (A.dim,):
        raise ValueError(f"point has shape {x.shape}, tensor dimension is {A.dim}")
    return x


def eval_form(A: SymmetricTensor, x) -> float:
    """Evaluate ``A(x) = sum A_{i1..im} x_i1 ... x_im``."""
    x = _as_point(A, x)
    total = 0.0
    for idx, v in A.entries.items():
        total += v * _multiplicity(idx) * float(np.prod(x[list(idx)]))
    return total


def gradient(A: SymmetricTensor, x) -> np.ndarray:
    x = _as_point(A, x)
    f = A.as_polynomial()
    return np.array([f.derivative(i)(x) for i in range(A.dim)])


class MultiplierSystem:
    """Polynomials ``p0 = m A(x)`` and ``p_i = dA/dx_i - m A(x)``.

    At a minimizer ``u`` of ``A`` on the simplex, ``p0(u)`` and ``p_i(u)``
    are the Lagrange multipliers of ``e^T x = 1`` and ``x_i >= 0``.
    """

    def __init__(self, p0: Polynomial, p: list):
        self.p0 = p0
        self.p = list(p)

    def __iter__(self):
        return iter(self.p)

    def __len__(self):
        return len(self.p)


def multiplier_polynomials(A: SymmetricTensor) -> MultiplierSystem:
    if A.order < 2:
        raise ValueError("multiplier polynomials need order >= 2")
    f = A.as_polynomial()
    mf = f * A.order
    return MultiplierSystem(mf, [f.derivative(i) - mf for i in range(A.dim)])


def simplex_polynomial(n: int) -> Polynomial:
    """``e^T x - 1``."""
    return Polynomial(n, {unit(n, i): 1.0 for i in range(n)}) - 1.0


def ball_polynomial(n: int) -> Polynomial:
    """``1 - ||x||^2``."""
    return Polynomial(n, {unit(n, i, 2): -1.0 for i in range(n)}) + 1.0
