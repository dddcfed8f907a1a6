import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kreinspec.errors import NotPositiveDefinite, NotPositiveSemidefinite
from kreinspec import linalg as la


def rand_sym(rng, n, scale=1.0):
    m = rng.standard_normal((n, n))
    return scale * 0.5 * (m + m.T)


class TestSymMatrix:
    def test_symmetrizes_and_records_asymmetry(self):
        s = la.SymMatrix([[1.0, 2.0], [2.5, 3.0]])
        np.testing.assert_allclose(s.array, [[1.0, 2.25], [2.25, 3.0]])
        assert s.max_asymmetry == pytest.approx(0.5)

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            la.SymMatrix(np.zeros((2, 3)))


class TestCholesky:
    def test_identity(self):
        np.testing.assert_array_equal(la.cholesky(np.eye(3)), np.eye(3))

    def test_hand_elimination(self):
        L = la.cholesky([[4.0, 2.0], [2.0, 5.0]])
        np.testing.assert_allclose(L, [[2.0, 0.0], [1.0, 2.0]])

    def test_indefinite_raises(self):
        # second pivot 1 - 4 < 0
        with pytest.raises(NotPositiveDefinite):
            la.cholesky([[1.0, 2.0], [2.0, 1.0]])

    def test_reconstruction_bound(self):
        rng = np.random.default_rng(42)
        for n in (5, 20, 60):
            m = rng.standard_normal((n, n))
            s = m @ m.T + n * np.eye(n)
            L = la.cholesky(s)
            err = la.max_norm(L @ L.T - s)
            assert err <= 1e-12 * la.max_norm(s)


class TestSymEigen:
    def test_identity(self):
        np.testing.assert_allclose(la.sym_eigen(np.eye(2)).values, [1.0, 1.0])

    def test_two_by_two(self):
        # characteristic polynomial (2-x)^2 - 1 = 0
        e = la.sym_eigen([[2.0, 1.0], [1.0, 2.0]])
        np.testing.assert_allclose(e.values, [1.0, 3.0], atol=1e-14)

    def test_diagonal(self):
        e = la.sym_eigen(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(e.values, [1.0, 2.0, 3.0])

    @pytest.mark.parametrize("n", [3, 17, 64, 200])
    def test_residual_and_orthonormality_bounds(self, n):
        rng = np.random.default_rng(n)
        s = rand_sym(rng, n)
        e = la.sym_eigen(s)
        assert e.orthonormality_defect() <= 1e-12 * n
        assert e.residual(s) <= 1e-10 * (1.0 + la.max_norm(s)) * n
        np.testing.assert_array_equal(e.values, np.sort(e.values))

    def test_matches_values_only_path(self):
        rng = np.random.default_rng(7)
        s = rand_sym(rng, 40)
        np.testing.assert_array_equal(la.sym_eigen(s).values, la.sym_eigen_values(s))

    def test_deterministic_bitwise(self):
        rng = np.random.default_rng(3)
        s = rand_sym(rng, 30)
        a, b = la.sym_eigen(s), la.sym_eigen(s)
        np.testing.assert_array_equal(a.values, b.values)
        np.testing.assert_array_equal(a.vectors, b.vectors)


class TestGenSymEigen:
    def test_identity_mass_reduces_to_sym_eigen(self):
        rng = np.random.default_rng(11)
        s = rand_sym(rng, 12)
        pencil = la.gen_sym_eigen(s, np.eye(12))
        np.testing.assert_allclose(pencil.values, la.sym_eigen(s).values, rtol=0, atol=1e-12)

    def test_scalar_division(self):
        np.testing.assert_allclose(la.gen_sym_eigen([[5.0]], [[2.0]]).values, [2.5])

    def test_per_coordinate_ratio(self):
        vals = la.gen_sym_eigen(np.diag([2.0, 8.0]), np.diag([1.0, 2.0])).values
        np.testing.assert_allclose(vals, [2.0, 4.0])

    def test_vectors_mass_orthonormal(self):
        rng = np.random.default_rng(5)
        a = rand_sym(rng, 15)
        m = rng.standard_normal((15, 15))
        b = m @ m.T + 15 * np.eye(15)
        pencil = la.gen_sym_eigen(a, b)
        gram = pencil.vectors.T @ b @ pencil.vectors
        assert la.max_norm(gram - np.eye(15)) <= 1e-10
        resid = la.max_norm(a @ pencil.vectors - b @ pencil.vectors * pencil.values)
        assert resid <= 1e-9 * (1.0 + la.max_norm(a) + la.max_norm(b))

    def test_indefinite_mass_raises(self):
        with pytest.raises(NotPositiveDefinite):
            la.gen_sym_eigen(np.eye(2), [[1.0, 2.0], [2.0, 1.0]])

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_congruence_invariance(self, seed):
        # pencil eigenvalues are invariant under (A,B) -> (C^T A C, C^T B C)
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 9))
        a = rand_sym(rng, n)
        m = rng.standard_normal((n, n))
        b = m @ m.T + n * np.eye(n)
        c = rng.standard_normal((n, n)) + 3 * np.eye(n)
        base = la.gen_sym_eigen(a, b).values
        cong = la.gen_sym_eigen(c.T @ a @ c, c.T @ b @ c).values
        scale = np.maximum(np.abs(base), 1.0)
        assert np.max(np.abs(base - cong) / scale) <= 1e-9


class TestSpdSqrt:
    def test_identity(self):
        np.testing.assert_allclose(la.spd_sqrt(np.eye(2)).array, np.eye(2))

    def test_diagonal(self):
        np.testing.assert_allclose(la.spd_sqrt(np.diag([4.0, 9.0])).array, np.diag([2.0, 3.0]))

    def test_eigenbasis_case(self):
        # eigenpairs (1,(1,-1)) and (9,(1,1)), roots 1 and 3
        r = la.spd_sqrt([[5.0, 4.0], [4.0, 5.0]]).array
        np.testing.assert_allclose(r, [[2.0, 1.0], [1.0, 2.0]], atol=1e-14)

    def test_square_reproduces(self):
        rng = np.random.default_rng(9)
        m = rng.standard_normal((30, 30))
        s = m @ m.T
        r = la.spd_sqrt(s).array
        assert la.max_norm(r @ r - s) <= 1e-10 * (1.0 + la.max_norm(s))

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveSemidefinite):
            la.spd_sqrt([[1.0, 0.0], [0.0, -1.0]])

    def test_clamps_tiny_negative(self):
        s = np.diag([1.0, -1e-16])
        r = la.spd_sqrt(s).array
        assert r[1, 1] == 0.0


class TestOrderEquivalence:
    """Resolvent ordering: 0 <= A <= B iff (B+a)^-1 <= (A+a)^-1 for a > 0."""

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10_000))
    def test_resolvent_ordering(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 9))
        m1 = rng.standard_normal((n, n))
        m2 = rng.standard_normal((n, n))
        a = m1 @ m1.T
        b = a + m2 @ m2.T
        for shift in (0.1, 1.0, 10.0):
            ra = la.solve_cholesky(la.cholesky(a + shift * np.eye(n)), np.eye(n))
            rb = la.solve_cholesky(la.cholesky(b + shift * np.eye(n)), np.eye(n))
            diff = 0.5 * ((ra - rb) + (ra - rb).T)
            assert la.sym_eigen_values(diff)[0] >= -1e-10


class TestSturmCount:
    def test_diagonal(self):
        assert la.sturm_count([1.0, 2.0, 3.0], [0.0, 0.0], 2.5) == 2

    def test_two_by_two(self):
        # tridiag(2; 1) has eigenvalues {1, 3}
        assert la.sturm_count([2.0, 2.0], [1.0], 0.99) == 0
        assert la.sturm_count([2.0, 2.0], [1.0], 3.01) == 2

    @pytest.mark.parametrize("n", [10, 100, 500])
    def test_agrees_with_eigensolver(self, n):
        rng = np.random.default_rng(n + 1)
        d = rng.standard_normal(n)
        e = rng.standard_normal(n - 1)
        vals = la.tridiagonal_eigen(d, e)
        for lam in rng.uniform(vals[0] - 1.0, vals[-1] + 1.0, size=20):
            assert la.sturm_count(d, e, lam) == int(np.sum(vals < lam))
