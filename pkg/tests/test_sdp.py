import numpy as np
import pytest
import scipy.sparse as sp

from coposdp.instances import horn
from coposdp.relax import build_tight
from coposdp.sdp import (
    DenseBlock,
    InconsistentEqualities,
    SdpProblem,
    Status,
    reduce_equalities,
    solve,
)

from helpers import infeasible_sdp, planted_sdp


def _pinned_problem(c, blocks, n_vars):
    E = sp.csr_matrix(([1.0], ([0], [0])), shape=(1, n_vars))
    return SdpProblem(np.asarray(c, dtype=float), E, np.array([1.0]), blocks)


def _t_problem():
    # variables (y0, t); block [[t, 1], [1, t]]
    one = np.array([[0.0, 1.0], [1.0, 0.0]])
    return _pinned_problem([0.0, 1.0], [DenseBlock([one, np.eye(2)])], 2)


class TestReduceEqualities:
    def test_full_rank_square(self):
        prob = SdpProblem(np.zeros(2), sp.csr_matrix(np.eye(2)), np.array([1.0, 0.0]), [])
        red = reduce_equalities(prob)
        assert red.dim == 0
        np.testing.assert_allclose(red.y_p, [1.0, 0.0])

    def test_single_pin(self):
        prob = _pinned_problem(np.zeros(3), [], 3)
        red = reduce_equalities(prob)
        assert red.dim == 2 and red.rank == 1
        z = np.array([0.3, -1.2])
        assert red.recover(z)[0] == pytest.approx(1.0)

    def test_horn_round_trip(self):
        prog = build_tight(horn(), 1)
        red = reduce_equalities(prog)
        E = prog.eq_matrix.toarray()
        assert red.dim == prog.n_vars - np.linalg.matrix_rank(E)
        z = np.random.default_rng(0).standard_normal(red.dim)
        assert np.max(np.abs(E @ red.recover(z) - prog.eq_rhs)) <= 1e-12

    def test_inconsistent(self):
        E = sp.csr_matrix(np.array([[1.0, 0.0], [1.0, 0.0]]))
        prob = SdpProblem(np.zeros(2), E, np.array([1.0, 2.0]), [])
        with pytest.raises(InconsistentEqualities):
            reduce_equalities(prob)
        assert solve(prob).status is Status.PRIMAL_INFEASIBLE


class TestSolveExamples:
    def test_two_by_two(self):
        sol = solve(_t_problem())
        assert sol.status is Status.OPTIMAL
        assert sol.objective == pytest.approx(1.0, abs=1e-7)
        assert sol.y[1] == pytest.approx(1.0, abs=1e-7)

    def test_fixed_negative_block(self):
        prob = _pinned_problem([0.0], [DenseBlock([np.array([[-1.0]])])], 1)
        sol = solve(prob)
        assert sol.status is Status.PRIMAL_INFEASIBLE
        v = sol.certificate.violation(prob)
        assert v["margin"] > 0 and v["min_eig"] >= 0 and v["stationarity"] <= 1e-10

    def test_horn_first_order(self):
        prog = build_tight(horn(), 1)
        sol = solve(prog)
        assert sol.status is Status.OPTIMAL
        assert prog.value(sol.y) == pytest.approx(-0.7889, abs=5e-4)

    def test_unbounded(self):
        # minimize -t subject to t >= 0 only
        prob = _pinned_problem([0.0, -1.0], [DenseBlock([np.zeros((1, 1)), np.eye(1)])], 2)
        assert solve(prob).status is Status.DUAL_UNBOUNDED


class TestSolveProperties:
    def test_residuals_on_optimal(self):
        prog = build_tight(horn(), 2)
        sol = solve(prog, tol=1e-8)
        assert sol.status is Status.OPTIMAL
        assert max(sol.residuals.values()) <= 1e-8
        # weak duality within the gap tolerance
        assert sol.dual_objective <= sol.objective + 1e-8 * (1 + abs(sol.objective))

    def test_deterministic(self):
        prog = build_tight(horn(), 2)
        a, b = solve(prog), solve(prog)
        assert a.status is b.status and a.iterations == b.iterations
        assert abs(a.objective - b.objective) <= 1e-12
        np.testing.assert_array_equal(a.y, b.y)

    @pytest.mark.parametrize("seed", range(10))
    def test_planted_optimum(self, seed):
        prob, value, _ = planted_sdp(np.random.default_rng(100 + seed))
        sol = solve(prob)
        assert sol.status is Status.OPTIMAL
        assert sol.objective == pytest.approx(value, abs=1e-5 * (1 + abs(value)))
        assert min(np.linalg.eigvalsh(B)[0] for B in prob.block_values(sol.y)) >= -1e-7

    @pytest.mark.parametrize("seed", range(5))
    def test_planted_infeasibility(self, seed):
        prob, _ = infeasible_sdp(np.random.default_rng(200 + seed))
        sol = solve(prob)
        assert sol.status is Status.PRIMAL_INFEASIBLE
        v = sol.certificate.violation(prob)
        assert v["min_eig"] >= -1e-10
        assert v["stationarity"] <= 1e-7 * v["margin"]
        assert v["margin"] > 0

    def test_iteration_cap(self):
        prog = build_tight(horn(), 2)
        sol = solve(prog, max_iter=2)
        assert sol.status is Status.ITERATION_LIMIT
        assert sol.iterations == 2 and sol.y is not None
