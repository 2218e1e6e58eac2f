"""Complete copositivity detection by the tight moment hierarchy.

At each order ``k`` the loop solves the tight relaxation. A value
``v_k > -tol_sign`` certifies copositivity. Otherwise a refutation program
with a generic objective is solved: if it is infeasible the order is
raised, and if its first moments give a simplex point ``u`` with
``A(u) < -tol_refute`` the tensor is not copositive.
"""
from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .moment import TruncatedMomentSequence
from .polyalg import SymmetricTensor, eval_form, num_monomials
from .relax import build_refutation, build_tight, min_order
from .sdp import Status, solve

log = logging.getLogger(__name__)

#: fresh draws of the generic objective allowed after stagnating refutations
MAX_RESEEDS = 2
#: tolerance on simplex membership of an extracted point
SIMPLEX_TOL = 1e-8
#: y-side residuals under which a non-optimal refutation iterate is still tried
CANDIDATE_TOL = 1e-6


class Verdict(str, enum.Enum):
    COPOSITIVE = "Copositive"
    NOT_COPOSITIVE = "NotCopositive"
    INCONCLUSIVE = "Inconclusive"


class ExtractionError(ValueError):
    """The first moments are too far from the simplex to be used."""


@dataclass
class Refutation:
    u: np.ndarray
    value: float

    def to_dict(self) -> dict:
        return {"u": [float(v) for v in self.u], "value": float(self.value)}


@dataclass
class DetectionReport:
    """Outcome of :func:`detect_copositivity`.

    Attributes
    ----------
    verdict : Verdict
    order_reached : int
        Last relaxation order that was attempted.
    bounds : list of (int, float)
        Lower bounds ``v_k`` from every tight solve that finished.
    refutation : Refutation or None
        Point ``u`` in the simplex with ``A(u) < 0`` for a negative verdict.
    timings : list of dict
        Per-order wall-clock seconds for the tight and refutation solves.
    seed : int
        Seed of the first generic objective.
    seeds_used : list of int
        All seeds drawn, including re-draws after stagnation.
    diagnostics : list of str
        Solver statuses other than optimal, and other events.
    """

    verdict: Verdict
    order_reached: int
    bounds: list = field(default_factory=list)
    refutation: Refutation | None = None
    timings: list = field(default_factory=list)
    seed: int = 0
    seeds_used: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "order_reached": self.order_reached,
            "bounds": [[int(k), float(v)] for k, v in self.bounds],
            "refutation": None if self.refutation is None else self.refutation.to_dict(),
            "timings": self.timings,
            "seed": self.seed,
            "seeds_used": list(self.seeds_used),
            "diagnostics": list(self.diagnostics),
        }


def sign_test(v_k: float, tol_sign: float = 1e-6) -> bool:
    """True when ``v_k > -tol_sign``, i.e. the bound certifies copositivity."""
    if tol_sign <= 0:
        raise ValueError(f"tol_sign must be positive, got {tol_sign}")
    return v_k > -tol_sign


def extract_point(y_hat, n: int | None = None, tol: float = SIMPLEX_TOL) -> np.ndarray:
    """Degree-one moments of ``y_hat``, snapped onto the simplex.

    Parameters
    ----------
    y_hat : TruncatedMomentSequence or array_like
        Moment vector; for a plain vector ``n`` must be given.
    tol : float
        Largest tolerated negative entry and ``|e^T u - 1|``.

    Raises
    ------
    ExtractionError
        If the moments violate simplex membership by more than ``tol``.
    """
    if isinstance(y_hat, TruncatedMomentSequence):
        u = y_hat.first_moments()
    else:
        if n is None:
            raise ValueError("n is required for a plain moment vector")
        u = np.asarray(y_hat, dtype=float)[1 : n + 1].copy()
    if not np.all(np.isfinite(u)):
        raise ExtractionError("non-finite first moments")
    neg = max(0.0, -float(u.min()))
    over = max(0.0, float(u.max()) - 1.0)
    off = abs(float(u.sum()) - 1.0)
    worst = max(neg, over, off)
    if worst > tol:
        raise ExtractionError(f"first moments leave the simplex by {worst:.2e}")
    u = np.clip(u, 0.0, 1.0)
    return u / u.sum()


def draw_generic_objective(n: int, m: int, seed: int | None = 0) -> np.ndarray:
    """Standard normal vector of length ``C(n+m, m)`` from ``numpy.random.default_rng(seed)``."""
    return np.random.default_rng(seed).standard_normal(num_monomials(n, m))


def default_tol_refute(A: SymmetricTensor) -> float:
    return 1e-8 * (1.0 + A.max_abs_entry())


def detect_copositivity(
    A: SymmetricTensor,
    k_max: int | None = None,
    tol_sign: float = 1e-6,
    tol_refute: float | None = None,
    seed: int = 0,
    solver_tol: float = 1e-8,
) -> DetectionReport:
    """Decide copositivity of ``A`` by the tight moment hierarchy.

    Parameters
    ----------
    A : SymmetricTensor
    k_max : int, optional
        Highest order tried; defaults to ``ceil(m/2) + 4``.
    tol_sign : float
        A bound ``v_k > -tol_sign`` is accepted as nonnegative.
    tol_refute : float, optional
        A point refutes copositivity when ``A(u) < -tol_refute``. Defaults to
        ``1e-8 (1 + max|A|)``.
    seed : int
        Seed of the generic objective of the refutation program.

    Returns
    -------
    DetectionReport
    """
    m0 = min_order(A)
    k_max = m0 + 4 if k_max is None else int(k_max)
    if k_max < m0:
        raise ValueError(f"k_max={k_max} below the minimum order {m0}")
    tol_refute = default_tol_refute(A) if tol_refute is None else float(tol_refute)
    sign_test(0.0, tol_sign)  # validates tol_sign

    n, m = A.dim, A.order
    xi = draw_generic_objective(n, m, seed)
    report = DetectionReport(Verdict.INCONCLUSIVE, m0, seed=seed, seeds_used=[seed])

    if not A.entries:
        report.verdict = Verdict.COPOSITIVE
        report.bounds.append((m0, 0.0))
        report.diagnostics.append("zero tensor")
        return report

    last_bound = None
    reseeds = 0
    k = m0
    while k <= k_max:
        report.order_reached = k
        timing = {"k": k}
        report.timings.append(timing)

        # Step 1: tight lower bound
        t0 = time.perf_counter()
        tight = build_tight(A, k)
        sol = solve(tight, tol=solver_tol)
        timing["tight"] = time.perf_counter() - t0
        tight_ok = sol.status is Status.OPTIMAL
        if tight_ok:
            v_k = tight.value(sol.y)
            report.bounds.append((k, v_k))
            log.info("k=%d  v_k=%.6e", k, v_k)
            if sign_test(v_k, tol_sign):
                report.verdict = Verdict.COPOSITIVE
                return report
            bound = v_k
        else:
            report.diagnostics.append(f"k={k}: tight relaxation {sol.status.value}: {sol.message}")
            if last_bound is None:
                report.diagnostics.append(f"k={k}: no valid lower bound for the refutation step")
                k += 1
                continue
            bound = last_bound
        last_bound = bound

        # Steps 2 and 3, repeated with a fresh objective after stagnation
        while True:
            t0 = time.perf_counter()
            ref = build_refutation(A, k, bound, xi)
            rsol = solve(ref, tol=solver_tol)
            timing["refutation"] = timing.get("refutation", 0.0) + time.perf_counter() - t0
            if rsol.status is Status.PRIMAL_INFEASIBLE:
                log.info("k=%d  refutation program infeasible", k)
                break
            if rsol.status is not Status.OPTIMAL:
                msg = f"k={k}: refutation program {rsol.status.value}: {rsol.message}"
                if not tight_ok:
                    msg += " (both solves failed at this order)"
                report.diagnostics.append(msg)
                if not _usable_candidate(rsol):
                    break
                # the candidate is only trusted after the direct check of A(u) below
            try:
                u = extract_point(rsol.y, n)
            except ExtractionError as exc:
                report.diagnostics.append(f"k={k}: {exc}")
                break
            val = eval_form(A, u)
            log.info("k=%d  A(u)=%.6e", k, val)
            if val < -tol_refute:
                report.verdict = Verdict.NOT_COPOSITIVE
                report.refutation = Refutation(u, val)
                return report
            report.diagnostics.append(f"k={k}: extracted point has A(u)={val:.3e}, not a refutation")
            if _stagnating(report.bounds, k) and reseeds < MAX_RESEEDS:
                reseeds += 1
                new_seed = seed + reseeds
                xi = draw_generic_objective(n, m, new_seed)
                report.seeds_used.append(new_seed)
                report.diagnostics.append(f"k={k}: bound stagnates, redrawing objective with seed {new_seed}")
                continue
            break
        k += 1
    return report


def _usable_candidate(sol) -> bool:
    if sol.y is None or sol.status not in (Status.STALLED, Status.ITERATION_LIMIT):
        return False
    r = sol.residuals
    return r.get("primal_eq", math.inf) <= CANDIDATE_TOL and r.get("gap", math.inf) <= CANDIDATE_TOL


def _stagnating(bounds: list, k: int, slack: float = 1e-7) -> bool:
    """Current and previous bounds both exist and agree within ``slack``."""
    vals = dict(bounds)
    if k not in vals or k - 1 not in vals:
        return False
    return math.isclose(vals[k], vals[k - 1], rel_tol=0.0, abs_tol=slack)
