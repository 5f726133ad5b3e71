import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from basicfactor.errors import (
    NotInvolution,
    NotNormal,
    NotScaledInvolution,
    SelectorMismatch,
    TooManyRoots,
    ZeroBranch,
)
from basicfactor.factorization import (
    RootSelector,
    all_nth_roots,
    assemble,
    canonical_equal,
    count_roots,
    factor_from_eigen,
    factor_normal,
    involution_idempotent,
    nth_root,
    power,
    principal_arg,
    product_form,
    pseudo_inverse,
    reconstruct,
    root_selectors,
    scaled_involution_idempotent,
)
from basicfactor.numkit import EigenSystem
from basicfactor.testing import normal_from, random_normal, random_unitary

R2 = 1 / math.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
H = R2 * np.array([[1, 1], [1, -1]])
CNOT = np.eye(4)[[0, 1, 3, 2]].astype(complex)


def rotation(t):
    return np.array([[math.cos(t), math.sin(t)], [-math.sin(t), math.cos(t)]])


def test_principal_arg_range():
    assert principal_arg(1) == 0
    assert principal_arg(-1) == pytest.approx(math.pi)
    assert principal_arg(-1j) == pytest.approx(1.5 * math.pi)
    assert 0 <= principal_arg(complex(1, -1e-300)) < 2 * math.pi


class TestFactorNormal:
    def test_pauli_x(self):
        F = factor_normal(X)
        assert F.eigenvalues == [-1]
        np.testing.assert_allclose(F.factors[0].idempotent.matrix, 0.5 * np.array([[1, -1], [-1, 1]]), atol=1e-15)
        assert F.residual_rank == 1
        np.testing.assert_allclose(reconstruct(F), X, atol=1e-15)

    def test_identity_has_no_factors(self):
        F = factor_normal(np.eye(3))
        assert len(F) == 0 and F.residual_rank == 3

    def test_zero_matrix(self):
        F = factor_normal(np.zeros((2, 2)))
        assert F.eigenvalues == [0] and F.ranks == [2] and F.residual_rank == 0

    def test_hadamard_unnormalized_eigenvalues(self):
        F = factor_normal(np.array([[1, 1], [1, -1]]))
        np.testing.assert_allclose(sorted(a.real for a in F.eigenvalues), [-math.sqrt(2), math.sqrt(2)], atol=1e-14)
        assert F.residual_rank == 0

    def test_rotation_pi3_cubed_is_minus_identity(self):
        F = factor_normal(rotation(math.pi / 3))
        U = rotation(math.pi / 3)
        np.testing.assert_allclose(U @ U @ U, -np.eye(2), atol=1e-14)
        F3 = power(F, 3)
        assert len(F3) == 1 and F3.eigenvalues[0] == pytest.approx(-1)
        assert F3.ranks == [2]
        np.testing.assert_allclose(reconstruct(F3), -np.eye(2), atol=1e-12)

    def test_rejects_jordan(self):
        with pytest.raises(NotNormal):
            factor_normal(np.array([[1, 1], [0, 1]]))

    def test_canonical_order(self):
        F = factor_normal(np.diag([-1, 1j, 2, 0.5, -1j]))
        args = [principal_arg(a) for a in F.eigenvalues]
        assert args == sorted(args)
        # the two positive reals are ordered by modulus
        assert F.eigenvalues[:2] == [0.5, 2]

    def test_product_equals_sum_form(self):
        rng = np.random.default_rng(1)
        A, _, _ = random_normal(rng, 6, zero=True, one=True)
        F = factor_normal(A)
        np.testing.assert_allclose(product_form(F), reconstruct(F), atol=1e-10)
        np.testing.assert_allclose(reconstruct(F), A, atol=1e-10)

    @pytest.mark.parametrize("seed", range(8))
    def test_against_numpy_spectrum(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 12))
        A, _, values = random_normal(rng, n, zero=seed % 2 == 0, one=seed % 3 == 0)
        F = factor_normal(A)
        expanded = [a for f in F.factors for a in [f.eigenvalue] * f.rank] + [1] * F.residual_rank
        np.testing.assert_allclose(np.sort_complex(np.array(expanded)), np.sort_complex(np.linalg.eigvals(A)), atol=1e-8)
        assert np.linalg.norm(reconstruct(F) - A) <= 1e-8 * max(1, np.linalg.norm(A))
        for f in F.factors:
            E = f.idempotent.matrix
            assert np.linalg.norm(A @ E - f.eigenvalue * E) <= 1e-8 * max(1, np.linalg.norm(A))


class TestUniqueness:
    def test_rotated_eigenbasis_gives_same_factorization(self):
        rng = np.random.default_rng(2)
        U = random_unitary(rng, 5)
        values = np.array([2, 2, 2, -1j, -1j], dtype=complex)
        A = normal_from(U, values)
        # mix the basis inside each eigenspace by another unitary
        W = np.eye(5, dtype=complex)
        W[:3, :3] = random_unitary(rng, 3)
        W[3:, 3:] = random_unitary(rng, 2)
        V2 = U @ W
        perm = [4, 0, 3, 2, 1]
        F1 = factor_from_eigen(A, EigenSystem(values, U))
        F2 = factor_from_eigen(A, EigenSystem(values[perm], V2[:, perm]))
        assert canonical_equal(F1, F2)
        assert canonical_equal(F1, factor_normal(A))

    def test_different_matrices_differ(self):
        assert not canonical_equal(factor_normal(X), factor_normal(np.diag([1.0, -1.0])))
        assert not canonical_equal(factor_normal(X), factor_normal(-X))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(2, 10), st.integers(0, 2**32 - 1))
    def test_double_factor(self, n, seed):
        rng = np.random.default_rng(seed)
        A, _, _ = random_normal(rng, n, zero=bool(seed % 2), one=bool(seed % 3))
        F = factor_normal(A)
        assert canonical_equal(F, factor_normal(reconstruct(F)))
        assert sum(F.ranks) + F.residual_rank == n


class TestAssemble:
    def test_joins_equal_and_drops_one(self):
        E1 = np.diag([1.0, 0, 0])
        E2 = np.diag([0, 1.0, 0])
        E3 = np.diag([0, 0, 1.0])
        F = assemble([(2, E1), (2 + 1e-12, E2), (1, E3)], 3)
        assert len(F) == 1 and F.eigenvalues[0] == pytest.approx(2, abs=1e-11)
        assert F.ranks == [2] and F.residual_rank == 1


class TestPower:
    @pytest.mark.parametrize("m", [1, 2, 3, 5])
    def test_matches_matrix_power(self, m):
        rng = np.random.default_rng(m)
        A, _, _ = random_normal(rng, 5)
        got = reconstruct(power(factor_normal(A), m))
        want = np.linalg.matrix_power(A, m)
        assert np.linalg.norm(got - want) <= 1e-8 * max(1, np.linalg.norm(want))

    def test_square_of_x_is_identity(self):
        F = power(factor_normal(X), 2)
        assert len(F) == 0 and F.residual_rank == 2

    def test_rejects_bad_exponent(self):
        with pytest.raises(ValueError):
            power(factor_normal(X), 0)


class TestRoots:
    def test_sqrt_not_principal(self):
        R = nth_root(factor_normal(X), 2)
        want = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
        np.testing.assert_allclose(reconstruct(R), want, atol=1e-12)

    def test_four_square_roots_of_x(self):
        roots = all_nth_roots(factor_normal(X), 2)
        assert len(roots) == 4
        mats = [reconstruct(R) for _, R in roots]
        for M in mats:
            np.testing.assert_allclose(M @ M, X, atol=1e-12)
        for i in range(4):
            for j in range(i + 1, 4):
                assert np.linalg.norm(mats[i] - mats[j]) > 0.5
        # +-I are not among them; +-(sqrt NOT) and +-(sqrt NOT)^3 are
        s = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
        targets = [s, -s, s.conj(), -s.conj()]
        for T in targets:
            assert any(np.linalg.norm(M - T) < 1e-12 for M in mats)

    def test_cnot_has_four_square_roots(self):
        roots = all_nth_roots(factor_normal(CNOT), 2)
        assert len(roots) == 4
        for _, R in roots:
            M = reconstruct(R)
            assert np.linalg.norm(M @ M - CNOT) < 1e-12

    def test_counts(self):
        F = factor_normal(np.diag([2, 3, 1, 1]))
        assert count_roots(F, 3) == 27
        F0 = factor_normal(np.diag([2, 0, 3]))
        assert count_roots(F0, 3) == 9
        assert len(list(root_selectors(F0, 3))) == 9

    def test_selector_errors(self):
        F = factor_normal(np.diag([2, 0, 1]))
        with pytest.raises(SelectorMismatch):
            nth_root(F, 2, RootSelector((0,), 0))
        with pytest.raises(SelectorMismatch):
            nth_root(F, 2, RootSelector((0, 2), 0))
        zero_first = F.eigenvalues.index(0)
        bad = [0, 0]
        bad[zero_first] = 1
        with pytest.raises(ZeroBranch):
            nth_root(F, 2, RootSelector(tuple(bad), 0))
        full = factor_normal(np.diag([2.0, 3.0]))
        with pytest.raises(SelectorMismatch):
            nth_root(full, 2, RootSelector((0, 0), 1))

    def test_residual_branch_becomes_factor(self):
        F = factor_normal(np.diag([4.0, 1.0]))
        R = nth_root(F, 2, RootSelector((0,), 1))
        np.testing.assert_allclose(reconstruct(R), np.diag([2, -1]), atol=1e-15)

    def test_too_many_roots(self):
        F = factor_normal(np.diag(np.arange(2.0, 12.0)))
        with pytest.raises(TooManyRoots) as info:
            all_nth_roots(F, 3, max_roots=100)
        assert info.value.count == 3**10

    @settings(max_examples=20, deadline=None)
    @given(st.integers(2, 6), st.integers(2, 4), st.integers(0, 2**32 - 1))
    def test_every_root_powers_back(self, size, n, seed):
        rng = np.random.default_rng(seed)
        A, _, _ = random_normal(rng, size, zero=bool(seed % 2), one=bool(seed % 3))
        F = factor_normal(A)
        if count_roots(F, n) > 256:
            return
        for _, R in all_nth_roots(F, n):
            M = np.linalg.matrix_power(reconstruct(R), n)
            assert np.linalg.norm(M - A) <= 1e-7 * max(1, np.linalg.norm(A))


class TestPseudoInverse:
    def test_invertible_matches_inverse(self):
        rng = np.random.default_rng(3)
        A, _, _ = random_normal(rng, 4, repeats=False)
        np.testing.assert_allclose(pseudo_inverse(factor_normal(A)), np.linalg.inv(A), atol=1e-9)

    def test_singular_matches_numpy(self):
        rng = np.random.default_rng(4)
        A, _, _ = random_normal(rng, 5, zero=True)
        np.testing.assert_allclose(pseudo_inverse(factor_normal(A)), np.linalg.pinv(A), atol=1e-8)

    def test_half_projector_is_its_own_pinv(self):
        P = 0.5 * np.ones((2, 2))
        np.testing.assert_allclose(pseudo_inverse(factor_normal(P)), P, atol=1e-15)

    def test_zero(self):
        np.testing.assert_array_equal(pseudo_inverse(factor_normal(np.zeros((3, 3)))), np.zeros((3, 3)))


class TestInvolutions:
    def test_hadamard(self):
        E = involution_idempotent(H)
        want = np.array([[0.5 * (1 - R2), -0.5 * R2], [-0.5 * R2, 0.5 * (1 + R2)]])
        np.testing.assert_allclose(E.matrix, want, atol=1e-12)
        np.testing.assert_allclose(np.eye(2) - 2 * E.matrix, H, atol=1e-12)

    def test_rejects_non_involution(self):
        with pytest.raises(NotInvolution):
            involution_idempotent(np.diag([1.0, 2.0]))

    def test_scaled(self):
        c, E = scaled_involution_idempotent(np.array([[1, 1], [1, -1]]))
        assert c == pytest.approx(math.sqrt(2))
        np.testing.assert_allclose(c * (np.eye(2) - 2 * E.matrix), [[1, 1], [1, -1]], atol=1e-14)

    def test_scaled_hadamard4(self):
        H4 = np.array([[1, 1, 1, -1], [1, 1, -1, 1], [1, -1, 1, 1], [-1, 1, 1, 1]])
        c, E = scaled_involution_idempotent(H4)
        assert c == pytest.approx(2)
        assert E.rank == 1

    def test_scaled_rejects(self):
        with pytest.raises(NotScaledInvolution):
            scaled_involution_idempotent(np.diag([1.0, 2.0]))
        with pytest.raises(NotScaledInvolution):
            scaled_involution_idempotent(np.array([[0, 1], [-1, 0]]))
