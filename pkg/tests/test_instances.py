import math

import numpy as np
import pytest

from coposdp.instances import (
    HYPERGRAPH_SLICES,
    HYPERGRAPH_TABLE,
    NAMES,
    builtin_example,
    clique_matrix,
    hildebrand,
    hypergraph,
)
from coposdp.polyalg import SymmetricTensor, eval_form
from coposdp.relax import build_tight
from coposdp.sdp import Status, solve


class TestCatalogue:
    def test_names(self):
        assert set(NAMES) == {
            "horn", "horn99", "hoffman-pereira", "hildebrand", "motzkin", "robinson",
            "choi-lam", "quartic-ex46", "clique-ex47", "hypergraph-ex48",
        }

    @pytest.mark.parametrize("name", NAMES)
    def test_symmetric_and_shaped(self, name):
        inst = builtin_example(name)
        T = inst.tensor.to_dense()
        for axes in [(1, 0) + tuple(range(2, T.ndim)), tuple(range(T.ndim))[::-1]]:
            np.testing.assert_array_equal(T, np.transpose(T, axes))

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            builtin_example("petersen")

    def test_unexpected_parameter(self):
        with pytest.raises(ValueError):
            builtin_example("horn", rho=1.0)


class TestMatrices:
    def test_horn_first_row(self):
        H = builtin_example("horn").tensor.to_dense()
        np.testing.assert_array_equal(H[0], [1, -1, 1, 1, -1])

    def test_horn99_differs_in_one_entry(self):
        d = builtin_example("horn99").tensor.to_dense() - builtin_example("horn").tensor.to_dense()
        assert np.count_nonzero(d) == 1 and d[4, 4] == pytest.approx(-0.01)

    def test_hildebrand_default_angles(self):
        B = hildebrand().to_dense()
        c = math.cos(math.pi / 6)
        assert B[0, 1] == pytest.approx(-c)
        assert B[0, 2] == pytest.approx(math.cos(math.pi / 3))
        np.testing.assert_allclose(np.diag(B), 1.0)

    @pytest.mark.parametrize("psi", [[-0.1, 0, 0, 0, 0], [1, 1, 1, 0.2, 0], [0.1] * 4])
    def test_hildebrand_invalid_angles(self, psi):
        with pytest.raises(ValueError):
            hildebrand(psi)

    def test_clique_matrix(self):
        B = clique_matrix(3.0).to_dense()
        adj = np.array(builtin_example("clique-ex47").tensor.to_dense() == -1.0, dtype=float)
        np.testing.assert_array_equal(B, 3 * (1 - adj) - 1)
        assert np.all(np.diag(B) == 2.0)

    def test_clique_number_is_three(self):
        # brute force over vertex subsets of the printed graph
        adj = (clique_matrix(3.0).to_dense() == -1.0)
        n = len(adj)
        best = 0
        for mask in range(1, 1 << n):
            S = [i for i in range(n) if mask >> i & 1]
            if all(adj[i, j] for i in S for j in S if i < j):
                best = max(best, len(S))
        assert best == 3


class TestForms:
    def test_motzkin_value(self):
        A = builtin_example("motzkin").tensor
        assert eval_form(A, [1.0, 2.0, 3.0]) == pytest.approx(2 + 4 + 27 - 18)

    def test_robinson_and_choi_lam_vanish_at_centre(self):
        for name in ("robinson", "choi-lam"):
            assert eval_form(builtin_example(name).tensor, np.ones(3)) == pytest.approx(0.0, abs=1e-13)

    def test_quartic_form(self):
        A = builtin_example("quartic-ex46").tensor
        x = np.array([0.1, 0.2, 0.3, 0.4])
        want = x.sum() ** 4 - 16 * (x[0] * x[1] + x[1] * x[2] + x[2] * x[3]) ** 2
        assert eval_form(A, x) == pytest.approx(want)

    def test_hypergraph_slices_as_printed(self):
        np.testing.assert_array_equal(HYPERGRAPH_SLICES[3], HYPERGRAPH_SLICES[4])
        assert "identical" in builtin_example("hypergraph-ex48").note

    def test_hypergraph_form_matches_array(self):
        rho = 4.35
        x = np.array([0.3, 0.1, 0.2, 0.15, 0.25])
        # slices are A(:, :, k), so the array is indexed [i, j, k]
        arr = np.transpose(HYPERGRAPH_SLICES, (1, 2, 0))
        cube = np.einsum("ijk,i,j,k->", arr, x, x, x)
        want = rho * (np.sum(x ** 3) + cube) - x.sum() ** 3
        assert eval_form(hypergraph(rho), x) == pytest.approx(want)

    def test_hypergraph_expected_tables(self):
        for rho, (v2, cop) in HYPERGRAPH_TABLE.items():
            inst = builtin_example("hypergraph-ex48", rho=rho)
            assert inst.expected == {2: v2} and inst.copositive is cop

    def test_hypergraph_default_bound(self):
        prog = build_tight(builtin_example("hypergraph-ex48").tensor, 2)
        sol = solve(prog)
        assert sol.status is Status.OPTIMAL
        assert prog.value(sol.y) == pytest.approx(9.8e-5, abs=5e-5)
