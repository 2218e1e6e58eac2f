"""Moment relaxations of ``min A(x)`` over the standard simplex.

Three programs are compiled here, all in the moment vector ``y`` of degree
``2k``:

* ``tight``: the simplex problem augmented with the multiplier
  polynomials ``p_i`` (``x_i p_i = 0`` and ``p_i >= 0``) plus the ball
  constraint ``1 - ||x||^2 >= 0``. Its values ``v_k`` converge finitely.
* ``refutation``: minimize a generic polynomial over the pseudo-moments
  that satisfy ``v_k - A(x) >= 0`` on the simplex; its first moments give a
  candidate point with ``A(u) < 0``.
* ``classic``: the plain moment relaxation of the simplex problem, values
  ``nu_k <= v_k``.
"""
from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .moment import equality_rows, localizing_size, localizing_template, moment_template
from .polyalg import (
    Polynomial,
    SymmetricTensor,
    ball_polynomial,
    multiplier_polynomials,
    num_monomials,
    simplex_polynomial,
)
from .sdp import SdpProblem

log = logging.getLogger(__name__)


def min_order(A: SymmetricTensor) -> int:
    return math.ceil(A.order / 2)


@dataclass
class RelaxationProgram(SdpProblem):
    """A compiled moment relaxation.

    ``eq_polys`` and ``psd_polys`` keep the constraint polynomials the
    templates were built from; the objective polynomial is
    ``objective_poly`` and reported values are ``objective_scale * c^T y``.
    """

    kind: str = "tight"
    order: int = 0
    n: int = 0
    objective_poly: Polynomial | None = None
    eq_polys: list = field(default_factory=list)
    psd_polys: list = field(default_factory=list)
    objective_scale: float = 1.0
    source: str = ""

    def value(self, y) -> float:
        """Objective at ``y`` in the units of the original polynomial."""
        return self.objective_scale * float(np.asarray(self.objective) @ np.asarray(y))

    def first_moments(self, y) -> np.ndarray:
        return np.asarray(y)[1 : self.n + 1].copy()

    @property
    def moment_side(self) -> int:
        return num_monomials(self.n, self.order)

    def dump(self) -> str:
        """Line-oriented text description, for debugging and diffing."""
        return dump_program(self)


def _assemble(
    kind: str,
    k: int,
    n: int,
    objective_poly: Polynomial,
    eq_polys: list,
    psd_polys: list,
    objective_scale: float = 1.0,
    source: str = "",
) -> RelaxationProgram:
    nv = num_monomials(n, 2 * k)
    if objective_poly.degree > 2 * k:
        raise ValueError(f"order k={k} too small for an objective of degree {objective_poly.degree}")
    c = np.zeros(nv)
    c[: num_monomials(n, objective_poly.degree)] = objective_poly.to_vector(objective_poly.degree)

    rows = [sp.csr_matrix(([1.0], ([0], [0])), shape=(1, nv))]
    rhs = [np.ones(1)]
    kept_eq = []
    for label, h in eq_polys:
        if h.is_zero():
            log.warning("dropping zero equality constraint %s", label)
            continue
        E = equality_rows(h, k, n)
        if E.shape[0] == 0:
            log.debug("order %d: equality %s has degree %d > 2k, omitted", k, label, h.degree)
            continue
        kept_eq.append((label, h))
        rows.append(E)
        rhs.append(np.zeros(E.shape[0]))
    E = sp.vstack(rows).tocsr()
    g = np.concatenate(rhs)
    E, g = _dedupe_rows(E, g)

    blocks = [moment_template(n, k)]
    kept_psd = []
    for label, q in psd_polys:
        if q.is_zero():
            log.warning("dropping zero inequality constraint %s", label)
            continue
        if localizing_size(q.degree, k) < 0:
            raise ValueError(f"order k={k} too small for constraint {label} of degree {q.degree}")
        blocks.append(localizing_template(q, k, n, label=label))
        kept_psd.append((label, q))
    return RelaxationProgram(
        objective=c,
        eq_matrix=E,
        eq_rhs=g,
        blocks=blocks,
        kind=kind,
        order=k,
        n=n,
        objective_poly=objective_poly,
        eq_polys=kept_eq,
        psd_polys=kept_psd,
        objective_scale=objective_scale,
        source=source,
    )


def _dedupe_rows(E: sp.csr_matrix, g: np.ndarray):
    """Drop exact duplicate rows (after scaling each row by its max-abs entry)."""
    E = E.tocsr()
    E.sort_indices()
    seen = {}
    keep = []
    for i in range(E.shape[0]):
        lo, hi = E.indptr[i], E.indptr[i + 1]
        idx, val = E.indices[lo:hi], E.data[lo:hi]
        if len(val) == 0:
            if g[i] != 0:
                keep.append(i)
            continue
        s = val[np.argmax(np.abs(val))]
        key = (tuple(idx), tuple(np.round(val / s, 14)), round(g[i] / s, 14))
        if key not in seen:
            seen[key] = i
            keep.append(i)
    return E[keep], g[keep]


def _tensor_label(A: SymmetricTensor) -> str:
    return f"order={A.order},dim={A.dim},nnz={len(A.entries)}"


def normalize_constraints(prog: RelaxationProgram) -> RelaxationProgram:
    """Rescale every constraint polynomial and the objective by their max-abs coefficient.

    Zero constraint polynomials are dropped. Reported values stay in the
    original units through ``objective_scale``.
    """
    eqs = [(label, h / h.max_abs_coeff()) for label, h in prog.eq_polys]
    psds = [(label, q / q.max_abs_coeff()) for label, q in prog.psd_polys]
    f = prog.objective_poly
    s_obj = f.max_abs_coeff() or 1.0
    return _assemble(
        prog.kind, prog.order, prog.n, f / s_obj, eqs, psds,
        prog.objective_scale * s_obj, prog.source,
    )


def _check_order(A: SymmetricTensor, k: int) -> None:
    if k < min_order(A):
        raise ValueError(f"relaxation order {k} below the minimum {min_order(A)} for order-{A.order} tensors")


def _simplex_constraints(n: int):
    eqs = [("e'x-1", simplex_polynomial(n))]
    psds = [("1-|x|^2", ball_polynomial(n))] + [
        (f"x{i + 1}", Polynomial.variable(n, i)) for i in range(n)
    ]
    return eqs, psds


def build_tight(A: SymmetricTensor, k: int, normalize: bool = True) -> RelaxationProgram:
    """Relaxation with multiplier constraints whose optimal value is ``v_k``.

    Complementarity equalities ``x_i p_i = 0`` whose degree exceeds ``2k``
    cannot be represented at order ``k`` and are left out.
    """
    _check_order(A, k)
    n = A.dim
    f = A.as_polynomial()
    eqs, psds = _simplex_constraints(n)
    ms = multiplier_polynomials(A)
    for i, p in enumerate(ms.p):
        eqs.append((f"x{i + 1}*p{i + 1}", Polynomial.variable(n, i) * p))
    for i, p in enumerate(ms.p):
        psds.append((f"p{i + 1}", p))
    prog = _build_raw("tight", A, k, f, eqs, psds)
    return normalize_constraints(prog) if normalize else prog


def build_classic(A: SymmetricTensor, k: int, normalize: bool = True) -> RelaxationProgram:
    """Plain moment relaxation of the simplex problem (value ``nu_k``)."""
    _check_order(A, k)
    eqs, psds = _simplex_constraints(A.dim)
    prog = _build_raw("classic", A, k, A.as_polynomial(), eqs, psds)
    return normalize_constraints(prog) if normalize else prog


def build_refutation(
    A: SymmetricTensor, k: int, v_k: float, xi, normalize: bool = True
) -> RelaxationProgram:
    """Program whose optimizer's first moments should refute copositivity.

    ``xi`` holds the coefficients of the generic objective ``xi^T [x]_m``.
    """
    n, m = A.dim, A.order
    if 2 * k < m:
        raise ValueError(f"order {k} too small for a degree-{m} form")
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (num_monomials(n, m),):
        raise ValueError(f"xi must have length {num_monomials(n, m)}, got {xi.shape}")
    eqs, psds = _simplex_constraints(n)
    psds.append(("v_k-A(x)", float(v_k) - A.as_polynomial()))
    obj = Polynomial.from_vector(n, m, xi)
    prog = _build_raw("refutation", A, k, obj, eqs, psds)
    return normalize_constraints(prog) if normalize else prog


def _build_raw(kind, A, k, f, eqs, psds) -> RelaxationProgram:
    return _assemble(kind, k, A.dim, f, eqs, psds, 1.0, _tensor_label(A))


def dump_program(prog: RelaxationProgram) -> str:
    """Text format::

        program <kind> order <k> nvars <m> scale <s>
        objective <idx>:<coef> ...
        eq <idx>:<coef> ... = <rhs>
        block <label> side <s> poly <q>
    """
    out = io.StringIO()
    out.write(f"program {prog.kind} order {prog.order} nvars {prog.n_vars} scale {prog.objective_scale:.17g}\n")
    nz = np.flatnonzero(prog.objective)
    out.write("objective " + " ".join(f"{i}:{prog.objective[i]:.17g}" for i in nz) + "\n")
    E = prog.eq_matrix.tocsr()
    for i in range(E.shape[0]):
        lo, hi = E.indptr[i], E.indptr[i + 1]
        terms = " ".join(f"{j}:{v:.17g}" for j, v in zip(E.indices[lo:hi], E.data[lo:hi]))
        out.write(f"eq {terms} = {prog.eq_rhs[i]:.17g}\n")
    for blk in prog.blocks:
        out.write(f"block {blk.label or '-'} side {blk.side} poly {blk.q!r}\n")
    return out.getvalue()
