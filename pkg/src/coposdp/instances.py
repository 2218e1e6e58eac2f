"""Named test tensors: classical copositive matrices and forms.

Each builtin carries the reference relaxation values reported for it in
the literature (``expected``: order -> v_k), where such values exist.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .polyalg import Polynomial, SymmetricTensor, tensor_from_entries

HORN = np.array(
    [
        [1, -1, 1, 1, -1],
        [-1, 1, -1, 1, 1],
        [1, -1, 1, -1, 1],
        [1, 1, -1, 1, -1],
        [-1, 1, 1, -1, 1],
    ],
    dtype=float,
)

HOFFMAN_PEREIRA = np.array(
    [
        [1, -1, 1, 0, 0, 1, -1],
        [-1, 1, -1, 1, 0, 0, 1],
        [1, -1, 1, -1, 1, 0, 0],
        [0, 1, -1, 1, -1, 1, 0],
        [0, 0, 1, -1, 1, -1, 1],
        [1, 0, 0, 1, -1, 1, -1],
        [-1, 1, 0, 0, 1, -1, 1],
    ],
    dtype=float,
)

CLIQUE_ADJACENCY = np.array(
    [
        [0, 1, 0, 1, 1, 0, 0, 1],
        [1, 0, 0, 1, 0, 1, 1, 1],
        [0, 0, 0, 0, 0, 0, 0, 0],
        [1, 1, 0, 0, 1, 0, 1, 0],
        [1, 0, 0, 1, 0, 1, 1, 1],
        [0, 1, 0, 0, 1, 0, 0, 1],
        [0, 1, 0, 1, 1, 0, 0, 1],
        [1, 1, 0, 0, 1, 1, 1, 0],
    ],
    dtype=float,
)

# slices A(:, :, k) of the 5x5x5 hypergraph array, k = 1..5 (slices 4 and 5 are
# printed identically in the source and reproduced as printed)
HYPERGRAPH_SLICES = np.array(
    [
        [[1, 1, 0, 1, 1], [1, 1, 0, 0, 1], [0, 0, 0, 0, 0], [1, 0, 0, 0, 0], [1, 1, 0, 0, 1]],
        [[1, 1, 0, 0, 1], [1, 0, 0, 0, 1], [0, 0, 1, 0, 0], [0, 0, 0, 0, 1], [1, 1, 0, 1, 0]],
        [[0, 0, 0, 0, 0], [0, 0, 1, 0, 0], [0, 1, 0, 0, 0], [0, 0, 0, 1, 1], [0, 0, 0, 1, 0]],
        [[1, 0, 0, 0, 0], [0, 0, 0, 0, 1], [0, 0, 0, 1, 1], [0, 0, 1, 0, 0], [0, 1, 1, 0, 0]],
        [[1, 0, 0, 0, 0], [0, 0, 0, 0, 1], [0, 0, 0, 1, 1], [0, 0, 1, 0, 0], [0, 1, 1, 0, 0]],
    ],
    dtype=float,
)

# 1-based sorted indices with value != 1 are listed explicitly; all others are 1
_QUARTIC_NEGATIVE = {(1, 2, 2, 3): -3.0, (1, 2, 3, 4): -3.0, (2, 3, 3, 4): -3.0}


@dataclass
class BuiltinInstance:
    name: str
    tensor: SymmetricTensor
    params: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    copositive: bool | None = None
    note: str = ""


def _poly(n: int, terms: dict) -> Polynomial:
    return Polynomial(n, terms)


def horn() -> SymmetricTensor:
    return SymmetricTensor.from_matrix(HORN)


def horn99() -> SymmetricTensor:
    A = HORN.copy()
    A[4, 4] = 0.99
    return SymmetricTensor.from_matrix(A)


def hoffman_pereira() -> SymmetricTensor:
    return SymmetricTensor.from_matrix(HOFFMAN_PEREIRA)


def hildebrand(psi=None) -> SymmetricTensor:
    """Hildebrand's extreme copositive matrix ``B(psi)``."""
    psi = np.full(5, math.pi / 6) if psi is None else np.asarray(psi, dtype=float)
    if psi.shape != (5,):
        raise ValueError(f"psi must have 5 entries, got {psi.shape}")
    if np.any(psi < 0) or psi.sum() >= math.pi:
        raise ValueError("psi must satisfy psi_i >= 0 and sum(psi) < pi")
    p1, p2, p3, p4, p5 = psi
    c = np.cos
    B = np.array(
        [
            [1, -c(p4), c(p4 + p5), c(p2 + p3), -c(p3)],
            [-c(p4), 1, -c(p5), c(p1 + p5), c(p3 + p4)],
            [c(p4 + p5), -c(p5), 1, -c(p1), c(p1 + p2)],
            [c(p2 + p3), c(p1 + p5), -c(p1), 1, -c(p2)],
            [-c(p3), c(p3 + p4), c(p1 + p2), -c(p2), 1],
        ]
    )
    return SymmetricTensor.from_matrix(B)


def motzkin() -> SymmetricTensor:
    """``x1^2 x2 + x1 x2^2 + x3^3 - 3 x1 x2 x3``."""
    f = _poly(3, {(2, 1, 0): 1, (1, 2, 0): 1, (0, 0, 3): 1, (1, 1, 1): -3})
    return SymmetricTensor.from_polynomial(f)


def robinson() -> SymmetricTensor:
    f = _poly(
        3,
        {
            (3, 0, 0): 1, (0, 3, 0): 1, (0, 0, 3): 1,
            (2, 1, 0): -1, (1, 2, 0): -1, (2, 0, 1): -1,
            (1, 0, 2): -1, (0, 2, 1): -1, (0, 1, 2): -1,
            (1, 1, 1): 3,
        },
    )
    return SymmetricTensor.from_polynomial(f)


def choi_lam() -> SymmetricTensor:
    f = _poly(3, {(2, 1, 0): 1, (0, 2, 1): 1, (1, 0, 2): 1, (1, 1, 1): -3})
    return SymmetricTensor.from_polynomial(f)


def quartic_entries() -> list:
    """The 35 published sorted-index entries of the quartic example, 1-based."""
    out = []
    for i in range(1, 5):
        for j in range(i, 5):
            for k in range(j, 5):
                for l in range(k, 5):
                    out.append(((i, j, k, l), _QUARTIC_NEGATIVE.get((i, j, k, l), 1.0)))
    return out


def quartic_form() -> Polynomial:
    """``(x1+x2+x3+x4)^4 - 16 (x1 x2 + x2 x3 + x3 x4)^2``."""
    x = [Polynomial.variable(4, i) for i in range(4)]
    return (x[0] + x[1] + x[2] + x[3]) ** 4 - 16 * (x[0] * x[1] + x[1] * x[2] + x[2] * x[3]) ** 2


def quartic_ex46() -> SymmetricTensor:
    """Symmetric tensor of :func:`quartic_form`.

    The published sorted-index entry list (:func:`quartic_entries`) is read
    off a non-symmetric array, so its symmetric completion is a different
    form; the builtin follows the closed-form polynomial instead.
    """
    return SymmetricTensor.from_polynomial(quartic_form())


def clique_matrix(lam: float = 3.0, adjacency=None) -> SymmetricTensor:
    """``lam (E - A) - E``; copositive iff ``lam`` is at least the clique number."""
    A = CLIQUE_ADJACENCY if adjacency is None else np.asarray(adjacency, dtype=float)
    E = np.ones_like(A)
    return SymmetricTensor.from_matrix(lam * (E - A) - E)


def hypergraph_form(rho: float) -> Polynomial:
    """``rho (sum x_i^3 + sum_k (x^T A_k x) x_k) - (sum x_i)^3``."""
    n = 5
    terms: dict = {}

    def add(e, c):
        terms[e] = terms.get(e, 0.0) + c

    for i in range(n):
        add(tuple(3 if j == i else 0 for j in range(n)), rho)
    for k in range(n):
        S = HYPERGRAPH_SLICES[k]
        for i in range(n):
            for j in range(n):
                if S[i, j]:
                    e = [0] * n
                    e[i] += 1
                    e[j] += 1
                    e[k] += 1
                    add(tuple(e), rho * S[i, j])
    s = Polynomial(n, {tuple(1 if j == i else 0 for j in range(n)): 1.0 for i in range(n)})
    return Polynomial(n, terms) - s**3


def hypergraph(rho: float = 4.352) -> SymmetricTensor:
    return SymmetricTensor.from_polynomial(hypergraph_form(rho))


# reference relaxation values reported with each example (order -> v_k)
_EXPECTED = {
    "horn": {1: -0.7889, 2: -0.0472, 3: -7.0e-8},
    "hoffman-pereira": {1: -0.4503, 2: -0.0250, 3: -2.2e-7},
    "hildebrand": {1: -0.2218, 2: -0.0153, 3: -1.2e-8},
    "motzkin": {2: -0.0045, 3: -4.3e-8},
    "robinson": {2: -0.0208, 3: -4.9e-8},
    "choi-lam": {2: -0.0129, 3: -2.1e-8},
    "quartic-ex46": {2: -0.3862, 3: -1.4e-7, 4: -3.0e-7, 5: -3.7e-7},
    "clique-ex47": {1: -1.7039, 2: -1.6e-7},
}

HYPERGRAPH_TABLE = {
    4.400: (1.1e-2, True),
    4.353: (3.2e-4, True),
    4.352: (9.8e-5, True),
    4.351: (-1.3e-4, False),
    4.350: (-3.6e-4, False),
    4.300: (-1.1e-2, False),
}

CLASSIC_EXPECTED = {"quartic-ex46": {2: -0.3862, 3: -0.0010, 4: -0.0002, 5: -0.0001}}

_BUILDERS = {
    "horn": (lambda **kw: horn(), True),
    "horn99": (lambda **kw: horn99(), False),
    "hoffman-pereira": (lambda **kw: hoffman_pereira(), True),
    "hildebrand": (lambda psi=None, **kw: hildebrand(psi), True),
    "motzkin": (lambda **kw: motzkin(), True),
    "robinson": (lambda **kw: robinson(), True),
    "choi-lam": (lambda **kw: choi_lam(), True),
    "quartic-ex46": (lambda **kw: quartic_ex46(), True),
    "clique-ex47": (lambda lam=3.0, **kw: clique_matrix(lam), None),
    "hypergraph-ex48": (lambda rho=4.352, **kw: hypergraph(rho), None),
}

PARAMS = {
    "hildebrand": {"psi": "5 angles, psi_i >= 0, sum < pi (default all pi/6)"},
    "clique-ex47": {"lam": "multiplier lambda (default 3 = clique number)"},
    "hypergraph-ex48": {"rho": "diagonal weight rho (default 4.352)"},
}

NAMES = tuple(_BUILDERS)


def builtin_example(name: str, **params) -> BuiltinInstance:
    """Look up a builtin tensor by name."""
    if name not in _BUILDERS:
        raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(NAMES)}")
    build, copositive = _BUILDERS[name]
    allowed = set(PARAMS.get(name, {}))
    extra = set(params) - allowed
    if extra:
        raise ValueError(f"builtin {name!r} does not take parameters {sorted(extra)}")
    tensor = build(**params)
    expected = dict(_EXPECTED.get(name, {}))
    note = ""
    if name == "clique-ex47":
        lam = params.get("lam", 3.0)
        copositive = lam >= 3.0
        if lam != 3.0:
            expected = {}
    elif name == "hypergraph-ex48":
        rho = round(float(params.get("rho", 4.352)), 3)
        if rho in HYPERGRAPH_TABLE:
            v2, copositive = HYPERGRAPH_TABLE[rho]
            expected = {2: v2}
        note = "slices 4 and 5 are identical as printed"
    elif name == "hildebrand" and params.get("psi") is not None:
        expected = {}
    return BuiltinInstance(name, tensor, dict(params), expected, copositive, note)
