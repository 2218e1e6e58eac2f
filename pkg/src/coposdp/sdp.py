"""Dense primal-dual interior-point solver for small moment SDPs.

Problems have the form::

    minimize    c^T y
    subject to  E y = g
                F_j(y) = sum_a y_a Q^j_a  is PSD  (j = 1..J)

where every ``F_j`` is linear in ``y`` (constants enter through a variable
pinned by an equality, like ``y_0 = 1`` in moment relaxations). Equalities
are eliminated by a nullspace parameterization ``y = y_p + N z``; the
remaining LMI problem is embedded in a homogeneous self-dual model and
solved with Nesterov-Todd scaling and a Mehrotra predictor-corrector, so
that infeasible problems end with a Farkas certificate rather than a
diverging iterate.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

log = logging.getLogger(__name__)


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    #: the program itself has no feasible point (Farkas certificate kept)
    PRIMAL_INFEASIBLE = "primal_infeasible"
    #: improving recession ray found (dual infeasible; unbounded below if feasible)
    DUAL_UNBOUNDED = "dual_unbounded"
    STALLED = "stalled"
    ITERATION_LIMIT = "iteration_limit"


class DenseBlock:
    """An LMI block given by one coefficient matrix per variable."""

    def __init__(self, coeffs, label: str = ""):
        coeffs = [np.asarray(c, dtype=float) for c in coeffs]
        if not coeffs:
            raise ValueError("need at least one coefficient matrix")
        s = coeffs[0].shape[0]
        for c in coeffs:
            if c.shape != (s, s) or not np.allclose(c, c.T):
                raise ValueError("coefficient matrices must be symmetric and equally sized")
        self.side = s
        self.label = label
        self._A = sp.csc_matrix(np.column_stack([c.ravel() for c in coeffs]))

    def matrix(self) -> sp.csc_matrix:
        return self._A


@dataclass
class SdpProblem:
    """``min c^T y  s.t.  E y = g,  F_j(y) PSD``.

    ``blocks`` holds objects with a ``side`` attribute and a ``matrix()``
    method returning the sparse ``side^2 x n_vars`` operator of ``vec F_j``.
    """

    objective: np.ndarray
    eq_matrix: sp.csr_matrix
    eq_rhs: np.ndarray
    blocks: list

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    def block_values(self, y) -> list:
        y = np.asarray(y, dtype=float)
        return [(b.matrix() @ y).reshape(b.side, b.side) for b in self.blocks]


@dataclass
class SdpSolution:
    """Solver outcome.

    For ``STALLED`` and ``ITERATION_LIMIT`` the vector ``y`` is the iterate
    with the smallest y-side residuals (``primal_eq`` and ``gap``), which is
    still useful as a candidate when only the dual fails to converge.
    """

    status: Status
    y: np.ndarray | None
    objective: float
    dual_objective: float
    residuals: dict
    iterations: int
    certificate: object = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status is Status.OPTIMAL


class InconsistentEqualities(ValueError):
    pass


@dataclass
class ReducedProblem:
    """Equality-free form ``y = y_p + N z`` of an :class:`SdpProblem`."""

    y_p: np.ndarray
    N: np.ndarray
    rank: int
    eq_residual: float

    @property
    def dim(self) -> int:
        return self.N.shape[1]

    def recover(self, z) -> np.ndarray:
        return self.y_p + self.N @ np.asarray(z, dtype=float)


def reduce_equalities(prob: SdpProblem, tol: float = 1e-10) -> ReducedProblem:
    """Parameterize the solutions of ``E y = g`` by an orthonormal nullspace basis.

    Raises :class:`InconsistentEqualities` when the system has no solution.
    """
    m = prob.n_vars
    E = prob.eq_matrix
    E = E.toarray() if sp.issparse(E) else np.asarray(E, dtype=float).reshape(-1, m)
    g = np.asarray(prob.eq_rhs, dtype=float)
    if E.shape[0] == 0:
        return ReducedProblem(np.zeros(m), np.eye(m), 0, 0.0)
    scale = np.linalg.norm(E, axis=1)
    keep = scale > 0
    if np.any(~keep & (np.abs(g) > tol)):
        raise InconsistentEqualities("zero row with nonzero right-hand side")
    E, g, scale = E[keep], g[keep], scale[keep]
    E = E / scale[:, None]
    g = g / scale
    Q, R, piv = sla.qr(E.T, pivoting=True, mode="full")
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > tol * max(1.0, diag[0]) * max(E.shape)))
    R11 = R[:rank, :rank]
    w = sla.solve_triangular(R11.T, g[piv[:rank]], lower=True)
    y_p = Q[:, :rank] @ w
    res = float(np.linalg.norm(E @ y_p - g))
    if res > 1e3 * tol * (1.0 + np.linalg.norm(g)):
        raise InconsistentEqualities(f"equality residual {res:.3e} after least squares")
    return ReducedProblem(y_p, np.ascontiguousarray(Q[:, rank:]), rank, res)


# -- internal helpers -------------------------------------------------------


def _sym(a):
    return 0.5 * (a + a.T)


def _inner(A, B) -> float:
    return float(sum(np.vdot(a, b) for a, b in zip(A, B)))


def _max_step(Lam_isqrt, D) -> float:
    """Largest ``a`` with ``Lam + a*D`` PSD, in scaled coordinates."""
    if D.size == 0:
        return math.inf
    T = Lam_isqrt[:, None] * D * Lam_isqrt[None, :]
    lmin = np.linalg.eigvalsh(_sym(T))[0]
    return math.inf if lmin >= 0 else -1.0 / lmin


class _Lmi:
    """Reduced LMI data ``S(z) = C + sum_i z_i A_i`` held in y-space."""

    def __init__(self, prob: SdpProblem, red: ReducedProblem):
        self.ops = [b.matrix().tocsr() for b in prob.blocks]
        self.opsT = [A.T.tocsr() for A in self.ops]
        self.sides = [b.side for b in prob.blocks]
        self.N = red.N
        self.C = [(A @ red.y_p).reshape(s, s) for A, s in zip(self.ops, self.sides)]
        self.C = [_sym(c) for c in self.C]
        # per block: variables that appear, and their coefficient matrices stacked vertically
        self.supports, self.stacks = [], []
        for A, s in zip(self.ops, self.sides):
            Ac = A.tocsc()
            supp = np.flatnonzero(np.diff(Ac.indptr))
            sub = Ac[:, supp].tocoo()
            rows = sub.col * s + sub.row // s
            stack = sp.csr_matrix((sub.data, (rows, sub.row % s)), shape=(len(supp) * s, s))
            self.supports.append(supp)
            self.stacks.append(stack)

    def adj(self, X) -> np.ndarray:
        """``A(X)_i = <A_i, X>`` (length dim z)."""
        ay = np.zeros(self.N.shape[0])
        for AT, Xb in zip(self.opsT, X):
            ay += AT @ Xb.ravel()
        return self.N.T @ ay

    def op(self, z) -> list:
        """``sum_i z_i A_i`` blockwise."""
        y = self.N @ z
        return [_sym((A @ y).reshape(s, s)) for A, s in zip(self.ops, self.sides)]

    def schur(self, W) -> np.ndarray:
        """``N^T [<A_a, W A_b W>]_{ab} N``."""
        m = self.N.shape[0]
        My = np.zeros((m, m))
        for A, Wb, s, supp, stack in zip(self.ops, W, self.sides, self.supports, self.stacks):
            # W Q_a W for all support variables a, batched through one GEMM per chunk
            chunk = max(1, int(4e6 // (s * s)))
            for c0 in range(0, len(supp), chunk):
                cols = supp[c0 : c0 + chunk]
                q = len(cols)
                T = stack[c0 * s : (c0 + q) * s]  # rows (a, i), cols j: Q_a
                Z = (T @ Wb).reshape(q, s, s)  # Q_a W
                Y = np.matmul(Wb, Z).reshape(q, s * s)  # vec(W Q_a W)
                My[cols, :] += Y @ A
        My = _sym(My)
        return _sym(self.N.T @ My @ self.N)


def _all_pd(blocks) -> bool:
    try:
        for b in blocks:
            if b.size:
                np.linalg.cholesky(b)
    except np.linalg.LinAlgError:
        return False
    return True


def _nt_scaling(Xb, Sb):
    """Return ``G, lam`` with ``G^T S G = diag(lam) = G^{-1} X G^{-T}``."""
    L = np.linalg.cholesky(Xb)
    d, V = np.linalg.eigh(_sym(L.T @ Sb @ L))
    if d[0] <= 0:
        raise np.linalg.LinAlgError("non-positive eigenvalue in scaling")
    G = (L @ V) * d ** -0.25
    return G, np.sqrt(d)


def _feasible_point_check(lmi: _Lmi, tol: float):
    """Zero-dimensional reduced problem: feasibility is a PSD check of C."""
    worst, cert = 0.0, None
    for j, Cb in enumerate(lmi.C):
        if Cb.size == 0:
            continue
        w, V = np.linalg.eigh(Cb)
        if w[0] < worst:
            worst = w[0]
            cert = (j, V[:, 0])
    return worst, cert


def solve(
    prob: SdpProblem,
    tol: float = 1e-8,
    max_iter: int = 200,
    step_fraction: float = 0.98,
    infeas_tol: float | None = None,
) -> SdpSolution:
    """Solve ``prob`` and classify the outcome.

    ``Status.OPTIMAL`` is returned only when the relative primal, dual and
    gap residuals are all at most ``tol``. Infeasibility is declared only
    from a certificate whose defect is at most ``infeas_tol`` (default
    ``tol``), which is stored in ``certificate``.
    """
    infeas_tol = tol if infeas_tol is None else infeas_tol
    c = np.asarray(prob.objective, dtype=float)
    try:
        red = reduce_equalities(prob)
    except InconsistentEqualities as exc:
        return SdpSolution(Status.PRIMAL_INFEASIBLE, None, math.inf, math.inf,
                           {}, 0, None, str(exc))
    lmi = _Lmi(prob, red)
    c0 = float(c @ red.y_p)
    bt = red.N.T @ c  # objective in z
    # standard form: max b^T z'  s.t.  C - A^*(z') PSD,  z' = -z,  value = c0 - b^T z'
    b = bt
    sides = lmi.sides
    nu = sum(sides)

    if red.dim == 0:
        worst, cert = _feasible_point_check(lmi, tol)
        if worst < -tol:
            j, v = cert
            X = [np.zeros((s, s)) for s in lmi.sides]
            X[j] = np.outer(v, v) / -worst
            return SdpSolution(Status.PRIMAL_INFEASIBLE, None, math.inf, math.inf,
                               {"min_eig": worst}, 0, _farkas_in_y(prob, X),
                               "fixed point violates a PSD block")
        return SdpSolution(Status.OPTIMAL, red.y_p.copy(), c0, c0,
                           {"primal_eq": red.eq_residual, "dual": 0.0, "gap": 0.0}, 0)

    normC = 1.0 + math.sqrt(_inner(lmi.C, lmi.C))
    normb = 1.0 + float(np.linalg.norm(b))

    X = [np.eye(s) for s in sides]
    S = [np.eye(s) for s in sides]
    z = np.zeros(red.dim)
    tau = kappa = 1.0
    best = best_y = None
    status = Status.ITERATION_LIMIT
    message = ""
    it = 0
    stall = 0
    for it in range(1, max_iter + 1):
        AX = lmi.adj(X)
        Az = lmi.op(z)
        CX = _inner(lmi.C, X)
        bz = float(b @ z)
        rp = b * tau - AX
        Rd = [Cb * tau - Ab - Sb for Cb, Ab, Sb in zip(lmi.C, Az, S)]
        rg = kappa - bz + CX
        mu = (_inner(X, S) + tau * kappa) / (nu + 1)

        pres = float(np.linalg.norm(rp)) / tau / normb
        dres = math.sqrt(_inner(Rd, Rd)) / tau / normC
        pobj, dobj = CX / tau, bz / tau
        gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        res = {"primal_eq": dres, "dual": pres, "gap": gap}
        score = max(pres, dres, gap)
        if best is None or score < best[0]:
            best = (score, z / tau, res, c0 - dobj, c0 - pobj)
        # the y-side alone; its dual may be unattained (no strictly feasible y)
        score_y = max(dres, gap)
        if best_y is None or score_y < best_y[0]:
            best_y = (score_y, z / tau, res, c0 - dobj, c0 - pobj)
        log.debug("it %3d  mu %.2e  tau %.2e  kappa %.2e  p %.2e d %.2e g %.2e  obj %.8f",
                  it, mu, tau, kappa, pres, dres, gap, c0 - dobj)
        if score <= tol:
            status = Status.OPTIMAL
            break
        if mu < 1e-14:
            status = Status.STALLED
            message = "duality measure exhausted before the dual residual converged"
            break
        # Farkas certificate for infeasibility of the LMI problem: X PSD, A(X)=0, <C,X> < 0
        if CX < 0:
            Xh = [Xb / -CX for Xb in X]
            defect = float(np.linalg.norm(lmi.adj(Xh)))
            if defect <= infeas_tol:
                cert = _farkas_in_y(prob, Xh)
                message = f"Farkas certificate with defect {defect:.2e}"
                return SdpSolution(Status.PRIMAL_INFEASIBLE, None, math.inf, math.inf,
                                   {"certificate_defect": defect, "mu": mu}, it, cert, message)
        # recession ray: A^*(z') NSD with b^T z' > 0
        if bz > 0:
            zh = z / bz
            Azh = lmi.op(zh)
            lmax = max((np.linalg.eigvalsh(a)[-1] for a in Azh if a.size), default=0.0)
            if lmax * normC <= infeas_tol:
                status = Status.DUAL_UNBOUNDED
                return SdpSolution(status, None, -math.inf, -math.inf,
                                   {"ray_defect": lmax, "mu": mu}, it,
                                   red.N @ (-zh), "recession direction found")

        try:
            Gs, lams = zip(*(_nt_scaling(Xb, Sb) for Xb, Sb in zip(X, S)))
            W = [G @ G.T for G in Gs]
            M = lmi.schur(W)
            M[np.diag_indices_from(M)] += 1e-14 * max(1.0, np.max(np.abs(np.diag(M))))
            cf = sla.cho_factor(M, lower=True, check_finite=False)
        except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
            status = Status.STALLED
            message = f"numerical breakdown: {exc}"
            break

        WCW = [Wb @ Cb @ Wb for Wb, Cb in zip(W, lmi.C)]
        a = lmi.adj(WCW)
        q = sla.cho_solve(cf, a + b, check_finite=False)
        cwc = _inner(lmi.C, WCW)
        WRdW = [Wb @ R @ Wb for Wb, R in zip(W, Rd)]

        def direction(eta, Rc, rk):
            h1 = eta * rp - lmi.adj([Rcb - eta * w for Rcb, w in zip(Rc, WRdW)])
            p = sla.cho_solve(cf, h1, check_finite=False)
            h2 = eta * rg + _inner(lmi.C, Rc) - eta * _inner(lmi.C, WRdW) + rk / tau
            denom = float((b - a) @ q) + cwc + kappa / tau
            dtau = (h2 - float((b - a) @ p)) / denom
            dz = p + q * dtau
            Adz = lmi.op(dz)
            dS = [Cb * dtau - Ab + eta * R for Cb, Ab, R in zip(lmi.C, Adz, Rd)]
            dX = [_sym(Rcb - Wb @ d @ Wb) for Rcb, Wb, d in zip(Rc, W, dS)]
            dkap = (rk - kappa * dtau) / tau
            return dX, dz, dS, dtau, dkap

        def scaled(dX, dS):
            dXt = [_sym(Gi_ @ d @ Gi_.T) for Gi_, d in zip(Ginvs, dX)]
            dSt = [_sym(G.T @ d @ G) for G, d in zip(Gs, dS)]
            return dXt, dSt

        def step_length(dXt, dSt, dtau, dkap):
            amax = math.inf
            for lam, dx, ds in zip(lams, dXt, dSt):
                li = lam ** -0.5
                amax = min(amax, _max_step(li, dx), _max_step(li, ds))
            if dtau < 0:
                amax = min(amax, -tau / dtau)
            if dkap < 0:
                amax = min(amax, -kappa / dkap)
            return amax

        Ginvs = [np.linalg.inv(G) for G in Gs]

        # predictor
        Rc_aff = [-Xb for Xb in X]
        dX, dz, dS, dtau, dkap = direction(1.0, Rc_aff, -tau * kappa)
        dXt, dSt = scaled(dX, dS)
        a_aff = min(1.0, step_length(dXt, dSt, dtau, dkap))
        mu_aff = (
            _inner([Xb + a_aff * d for Xb, d in zip(X, dX)], [Sb + a_aff * d for Sb, d in zip(S, dS)])
            + (tau + a_aff * dtau) * (kappa + a_aff * dkap)
        ) / (nu + 1)
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3))

        # corrector
        Rc = []
        for G, lam, dx, ds in zip(Gs, lams, dXt, dSt):
            corr = _sym(dx @ ds)
            R = sigma * mu * np.eye(len(lam)) - np.diag(lam ** 2) - corr
            Y = 2.0 * R / (lam[:, None] + lam[None, :])
            Rc.append(_sym(G @ Y @ G.T))
        rk = sigma * mu - tau * kappa - dtau * dkap
        dX, dz, dS, dtau, dkap = direction(1.0 - sigma, Rc, rk)
        dXt, dSt = scaled(dX, dS)
        alpha = min(1.0, step_fraction * step_length(dXt, dSt, dtau, dkap))

        # rounding can leave the new iterate outside the cone; shorten the step until it is not
        for _ in range(30):
            Xn = [_sym(Xb + alpha * d) for Xb, d in zip(X, dX)]
            Sn = [_sym(Sb + alpha * d) for Sb, d in zip(S, dS)]
            if _all_pd(Xn) and _all_pd(Sn):
                break
            alpha *= 0.8
        X, S = Xn, Sn
        z = z + alpha * dz
        tau += alpha * dtau
        kappa += alpha * dkap
        if alpha < 1e-8:
            stall += 1
            if stall >= 3:
                status = Status.STALLED
                message = "step length collapsed"
                break
        else:
            stall = 0

    if status is Status.OPTIMAL:
        score, zb, res, obj, dual = best
        return SdpSolution(status, red.recover(-zb), obj, dual, res, it)
    # otherwise report the iterate whose y is closest to feasible and optimal
    score, zb, res, obj, dual = best_y
    return SdpSolution(status, red.recover(-zb), obj, dual, res, it, None,
                       message or "iteration limit reached")


@dataclass
class FarkasCertificate:
    """Proof of infeasibility: PSD ``X_j`` and multipliers ``lam`` with

    ``sum_j F_j^*(X_j) = E^T lam`` and ``g^T lam < 0``. For any feasible
    ``y`` this would give ``0 <= sum_j <F_j(y), X_j> = lam^T g < 0``.
    """

    X: list
    lam: np.ndarray

    def violation(self, prob: SdpProblem) -> dict:
        """Re-evaluate the certificate against ``prob``."""
        ay = np.zeros(prob.n_vars)
        for blk, Xb in zip(prob.blocks, self.X):
            ay += blk.matrix().T @ Xb.ravel()
        E = prob.eq_matrix
        resid = ay - (E.T @ self.lam if E.shape[0] else 0.0)
        min_eig = min((np.linalg.eigvalsh(Xb)[0] for Xb in self.X if Xb.size), default=0.0)
        return {
            "stationarity": float(np.linalg.norm(resid)),
            "min_eig": float(min_eig),
            "margin": float(-np.asarray(prob.eq_rhs) @ self.lam),
        }


def _farkas_in_y(prob: SdpProblem, X) -> FarkasCertificate:
    ay = np.zeros(prob.n_vars)
    for blk, Xb in zip(prob.blocks, X):
        ay += blk.matrix().T @ Xb.ravel()
    E = prob.eq_matrix
    E = E.toarray() if sp.issparse(E) else np.asarray(E, dtype=float)
    lam = np.linalg.lstsq(E.T, ay, rcond=None)[0] if E.shape[0] else np.zeros(0)
    return FarkasCertificate([x.copy() for x in X], lam)
