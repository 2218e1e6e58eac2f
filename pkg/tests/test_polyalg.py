import itertools
import math

import numpy as np
import pytest

from coposdp.instances import horn, motzkin, quartic_entries, quartic_form
from coposdp.polyalg import (
    Polynomial,
    SymmetricTensor,
    ball_polynomial,
    eval_form,
    exponents_up_to,
    gradient,
    monomial_index,
    multiplier_polynomials,
    num_monomials,
    simplex_polynomial,
    tensor_from_entries,
)

from helpers import random_integer_tensor, random_tensor


def _var(n, i):
    return Polynomial.variable(n, i)


class TestExponents:
    def test_degree_one_in_two_variables(self):
        assert exponents_up_to(2, 1) == [(0, 0), (1, 0), (0, 1)]

    def test_constant_only(self):
        assert exponents_up_to(1, 0) == [(0,)]

    def test_graded_lex_degree_three(self):
        got = exponents_up_to(2, 3)
        assert got == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)]

    @pytest.mark.parametrize("n,d", [(1, 4), (3, 3), (4, 2), (5, 4)])
    def test_length_and_order(self, n, d):
        got = exponents_up_to(n, d)
        assert len(got) == math.comb(n + d, d) == num_monomials(n, d)
        degrees = [sum(a) for a in got]
        assert degrees == sorted(degrees)
        for deg in range(d + 1):
            block = [a for a in got if sum(a) == deg]
            assert block == sorted(block, reverse=True)

    def test_index_examples(self):
        assert monomial_index((0, 0), 2, 3) == 0
        assert monomial_index((1, 1), 2, 3) == 4
        assert monomial_index((0, 3), 2, 3) == 9

    def test_index_round_trip(self):
        for j, a in enumerate(exponents_up_to(3, 4)):
            assert monomial_index(a, 3, 4) == j

    def test_index_degree_overflow(self):
        with pytest.raises((IndexError, ValueError)):
            monomial_index((2, 2), 2, 3)


class TestPolynomial:
    def test_zero_coefficients_dropped(self):
        p = Polynomial(2, {(1, 0): 1.0, (0, 1): 0.0})
        assert p.terms == {(1, 0): 1.0}
        assert (p - p).is_zero()

    def test_exponent_length_checked(self):
        with pytest.raises(ValueError):
            Polynomial(2, {(1,): 1.0})

    def test_arithmetic_and_evaluation(self):
        x, y = _var(2, 0), _var(2, 1)
        p = (x + 2 * y) ** 2 - 3
        assert p.degree == 2
        assert p.coefficient((1, 1)) == 4.0
        assert p([1.0, 1.0]) == pytest.approx(6.0)

    def test_derivative(self):
        x, y = _var(2, 0), _var(2, 1)
        p = x ** 3 * y + y ** 2
        assert p.derivative(0) == 3 * x ** 2 * y
        assert p.derivative(1) == x ** 3 + 2 * y

    def test_vector_round_trip(self):
        rng = np.random.default_rng(0)
        v = rng.standard_normal(num_monomials(3, 3))
        np.testing.assert_array_equal(Polynomial.from_vector(3, 3, v).to_vector(3), v)


class TestSymmetricTensor:
    def test_permuted_lookup(self):
        A = SymmetricTensor(3, 3, {(2, 0, 1): 4.0})
        for p in itertools.permutations((0, 1, 2)):
            assert A[p] == 4.0
        assert list(A.entries) == [(0, 1, 2)]

    def test_form_is_homogeneous(self):
        rng = np.random.default_rng(1)
        A = random_tensor(rng, 4, 3)
        f = A.as_polynomial()
        assert {sum(a) for a in f.terms} == {3}

    def test_polynomial_round_trip(self):
        f = motzkin().as_polynomial()
        assert SymmetricTensor.from_polynomial(f).as_polynomial().almost_equal(f)

    def test_dense_round_trip(self):
        rng = np.random.default_rng(2)
        A = random_tensor(rng, 3, 4)
        B = SymmetricTensor.from_dense(A.to_dense())
        assert B.entries.keys() == A.entries.keys()
        for k in A.entries:
            assert B.entries[k] == pytest.approx(A.entries[k])

    def test_nonsymmetric_matrix_rejected(self):
        with pytest.raises(ValueError):
            SymmetricTensor.from_matrix([[1.0, 2.0], [0.0, 1.0]])


class TestEvalForm:
    def test_horn_at_unit_vector(self):
        assert eval_form(horn(), np.eye(5)[0]) == 1.0

    def test_motzkin_at_ones(self):
        assert eval_form(motzkin(), np.ones(3)) == pytest.approx(0.0, abs=1e-14)

    def test_horn_at_edge_midpoint(self):
        assert eval_form(horn(), [0.5, 0.5, 0, 0, 0]) == pytest.approx(0.0, abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            eval_form(horn(), np.ones(4))

    def test_matches_dense_contraction(self):
        rng = np.random.default_rng(3)
        for m in (2, 3, 4):
            A = random_tensor(rng, 3, m)
            x = rng.standard_normal(3)
            T = A.to_dense()
            for _ in range(m):
                T = T @ x
            assert eval_form(A, x) == pytest.approx(float(T), rel=1e-12, abs=1e-12)

    def test_homogeneity_and_symmetry(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            n, m = int(rng.integers(1, 6)), int(rng.integers(1, 5))
            A = random_tensor(rng, n, m)
            x = rng.standard_normal(n)
            ax = eval_form(A, x)
            assert eval_form(A, 2 * x) == pytest.approx(2 ** m * ax, rel=1e-10, abs=1e-10)
            perm = rng.permutation(n)
            B = SymmetricTensor(m, n, {tuple(perm[list(k)]): v for k, v in A.entries.items()})
            y = np.empty(n)
            y[perm] = x
            assert eval_form(B, y) == pytest.approx(ax, rel=1e-10, abs=1e-10)


class TestGradient:
    def test_identity(self):
        A = SymmetricTensor.from_matrix(np.eye(2))
        np.testing.assert_allclose(gradient(A, [1.0, 2.0]), [2.0, 4.0])

    def test_motzkin_critical_point(self):
        np.testing.assert_allclose(gradient(motzkin(), np.ones(3)), 0.0, atol=1e-14)

    def test_euler_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            n, m = int(rng.integers(1, 6)), int(rng.integers(1, 5))
            A = random_tensor(rng, n, m)
            x = rng.standard_normal(n)
            ax = eval_form(A, x)
            assert abs(x @ gradient(A, x) - m * ax) <= 1e-10 * (1 + abs(ax))

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(6)
        A = random_tensor(rng, 4, 3)
        x = rng.standard_normal(4)
        h = 1e-6
        fd = [(eval_form(A, x + h * e) - eval_form(A, x - h * e)) / (2 * h) for e in np.eye(4)]
        np.testing.assert_allclose(gradient(A, x), fd, rtol=1e-6, atol=1e-8)


class TestMultipliers:
    def test_identity_matrix(self):
        sysm = multiplier_polynomials(SymmetricTensor.from_matrix(np.eye(2)))
        x1, x2 = _var(2, 0), _var(2, 1)
        assert sysm.p[0] == 2 * x1 - 2 * x1 ** 2 - 2 * x2 ** 2

    def test_horn_p0(self):
        H = horn()
        assert multiplier_polynomials(H).p0 == 2 * H.as_polynomial()

    def test_degrees(self):
        rng = np.random.default_rng(7)
        A = random_integer_tensor(rng, 4, 3)
        sysm = multiplier_polynomials(A)
        assert sysm.p0.degree == 3 and len(sysm) == 4
        assert all(p.degree == 3 for p in sysm)

    def test_weighted_sum_identity_exact(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            n, m = int(rng.integers(1, 5)), int(rng.integers(2, 5))
            A = random_integer_tensor(rng, n, m)
            f = A.as_polynomial()
            sysm = multiplier_polynomials(A)
            lhs = sum((_var(n, i) * p for i, p in enumerate(sysm)), Polynomial(n))
            rhs = f * m * (-simplex_polynomial(n))
            assert (lhs - rhs).is_zero()

    def test_order_one_rejected(self):
        with pytest.raises(ValueError):
            multiplier_polynomials(SymmetricTensor(1, 2, {(0,): 1.0}))


class TestIdentities:
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_ball_identity(self, n):
        x = [_var(n, i) for i in range(n)]
        sq = sum((xi * xi for xi in x), Polynomial(n))
        rhs = -simplex_polynomial(n) * (sq + 1)
        rhs = rhs + sum((xi * (1 - xi) ** 2 for xi in x), Polynomial(n))
        rhs = rhs + sum((x[i] ** 2 * x[j] for i in range(n) for j in range(n) if i != j), Polynomial(n))
        assert (ball_polynomial(n) - rhs).is_zero()


class TestTensorFromEntries:
    def test_identity(self):
        A = tensor_from_entries(2, 2, [((1, 1), 1), ((2, 2), 1)])
        np.testing.assert_array_equal(A.to_dense(), np.eye(2))

    def test_motzkin_coefficients(self):
        third = 1.0 / 3.0
        entries = [((1, 1, 2), third), ((1, 2, 2), third), ((3, 3, 3), 1.0), ((1, 2, 3), -0.5)]
        A = tensor_from_entries(3, 3, entries)
        assert A.as_polynomial().almost_equal(motzkin().as_polynomial(), 1e-14)

    def test_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            tensor_from_entries(2, 2, [((3, 1), 1.0)])

    def test_conflicting_duplicates(self):
        with pytest.raises(ValueError, match="conflicting"):
            tensor_from_entries(2, 2, [((1, 2), 1.0), ((2, 1), 2.0)])

    def test_consistent_duplicates_accepted(self):
        A = tensor_from_entries(2, 2, [((1, 2), 1.0), ((2, 1), 1.0)])
        assert A[(0, 1)] == 1.0

    def test_quartic_closed_form_entries(self):
        # entries of (sum x)^4 - 16 (x1x2 + x2x3 + x3x4)^2 computed by hand
        A = SymmetricTensor.from_polynomial(quartic_form())
        assert A[(0, 0, 0, 0)] == 1.0
        assert A[(0, 0, 1, 1)] == pytest.approx((6 - 16) / 6)
        assert A[(0, 1, 1, 2)] == pytest.approx((12 - 32) / 12)
        assert A[(0, 1, 2, 3)] == pytest.approx((24 - 32) / 24)

    def test_quartic_printed_list_differs_from_closed_form(self):
        # the published sorted-index list does not reproduce the closed form
        printed = tensor_from_entries(4, 4, quartic_entries())
        closed = SymmetricTensor.from_polynomial(quartic_form())
        assert printed[(0, 1, 1, 2)] == -3.0
        assert not printed.as_polynomial().almost_equal(closed.as_polynomial(), 1e-6)
