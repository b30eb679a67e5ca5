"""Exact integer matrix kernel: determinants, Smith/Hermite forms,
cokernels, canonical coset representatives."""

import pytest
import sympy

from conftest import random_matrix
from nilco.errors import InfiniteResultError, ShapeError
from nilco.intmat import (
    IntMatrix,
    cokernel,
    column_hermite,
    coset_representatives,
    determinant,
    determinant_cofactor,
    kernel_basis,
    rank,
    reduce_to_canonical_rep,
    smith_normal_form,
)


def is_unimodular(M):
    return M.is_square and determinant(M) in (1, -1)


class TestMatrixBasics:
    def test_shape_and_equality(self):
        A = IntMatrix([[1, 2], [3, 4]])
        assert (A.rows, A.cols) == (2, 2)
        assert A == IntMatrix([[1, 2], [3, 4]])
        assert A != A.transpose()

    def test_immutability(self):
        A = IntMatrix([[1]])
        with pytest.raises(AttributeError):
            A.rows = 5

    def test_ragged_rejected(self):
        with pytest.raises(ShapeError):
            IntMatrix([[1, 2], [3]])

    def test_non_integer_rejected(self):
        with pytest.raises(ShapeError):
            IntMatrix([[1.5]])
        with pytest.raises(ShapeError):
            IntMatrix([[True]])

    def test_matmul_apply_column(self):
        A = IntMatrix([[1, 2], [3, 4]])
        B = IntMatrix([[0, 1], [1, 0]])
        assert A @ B == IntMatrix([[2, 1], [4, 3]])
        assert A.apply((1, 1)) == (3, 7)
        assert A.column(1) == (2, 4)
        assert IntMatrix.from_columns([(1, 3), (2, 4)], 2) == A

    def test_empty_row_matrix(self):
        Z = IntMatrix([], shape=(0, 3))
        assert (Z.rows, Z.cols) == (0, 3)


class TestDeterminant:
    def test_known_values(self):
        assert determinant(IntMatrix([], shape=(0, 0))) == 1
        assert determinant(IntMatrix([[7]])) == 7
        assert determinant(IntMatrix([[2, 0], [0, 3]])) == 6
        assert determinant(IntMatrix([[1, 2], [2, 4]])) == 0

    def test_against_cofactor_and_sympy(self, rng):
        for _ in range(200):
            n = rng.randint(1, 4)
            A = random_matrix(rng, n, n, lo=-9, hi=9)
            d = determinant(A)
            assert d == determinant_cofactor(A)
            assert d == int(sympy.Matrix([list(r) for r in A.data]).det())

    def test_big_integers_exact(self):
        big = 10**40
        A = IntMatrix([[big, 1], [1, big]])
        assert determinant(A) == big * big - 1

    def test_non_square_rejected(self):
        with pytest.raises(ShapeError):
            determinant(IntMatrix([[1, 2]]))


class TestSmithNormalForm:
    def test_contract_on_random_matrices(self, rng):
        for _ in range(300):
            r = rng.randint(1, 4)
            c = rng.randint(1, 4)
            A = random_matrix(rng, r, c, lo=-7, hi=7)
            snf = smith_normal_form(A)
            assert snf.U @ A @ snf.V == snf.D
            assert is_unimodular(snf.U)
            assert is_unimodular(snf.V)
            diag = [snf.D.data[i][i] for i in range(min(r, c))]
            assert all(d >= 0 for d in diag)
            for i in range(len(diag) - 1):
                if diag[i + 1] != 0:
                    assert diag[i] != 0 and diag[i + 1] % diag[i] == 0
            # off-diagonal must vanish
            for i in range(r):
                for j in range(c):
                    if i != j:
                        assert snf.D.data[i][j] == 0
            assert rank(A) == sympy.Matrix([list(row) for row in A.data]).rank()

    def test_invariant_factor_product_is_det(self, rng):
        from math import prod

        for _ in range(100):
            n = rng.randint(1, 4)
            A = random_matrix(rng, n, n)
            d = determinant(A)
            snf = smith_normal_form(A)
            if d != 0:
                assert prod(snf.invariant_factors) == abs(d)

    def test_known_invariant_factors(self):
        A = IntMatrix([[2, 4, 4], [-6, 6, 12], [10, 4, 16]])
        assert smith_normal_form(A).invariant_factors == (2, 2, 156)


class TestKernel:
    def test_kernel_columns_annihilate(self, rng):
        for _ in range(100):
            A = random_matrix(rng, rng.randint(1, 3), rng.randint(1, 4))
            basis = kernel_basis(A)
            assert len(basis) == A.cols - rank(A)
            for v in basis:
                assert A.apply(v) == (0,) * A.rows


class TestCokernel:
    def test_known_structures(self):
        ck = cokernel(IntMatrix([[2, 0], [0, 3]]))
        assert (ck.free_rank, ck.torsion, ck.order) == (0, (6,), 6)
        ck = cokernel(IntMatrix([[2, 0], [0, 0]]))
        assert ck.free_rank == 1 and ck.order is None and not ck.is_finite
        ck = cokernel(IntMatrix([[1, 0], [0, 1]]))
        assert ck.order == 1 and ck.torsion == ()

    def test_order_is_abs_det_when_nonsingular(self, rng):
        for _ in range(100):
            n = rng.randint(1, 4)
            A = random_matrix(rng, n, n)
            d = determinant(A)
            ck = cokernel(A)
            if d == 0:
                assert ck.order is None
            else:
                assert ck.order == abs(d)


class TestColumnHermite:
    def test_contract(self, rng):
        for _ in range(200):
            A = random_matrix(rng, rng.randint(1, 4), rng.randint(1, 4))
            ch = column_hermite(A)
            assert A @ ch.V == ch.H
            assert is_unimodular(ch.V)
            assert tuple(sorted(ch.pivots)) == ch.pivots
            for i, prow in enumerate(ch.pivots):
                assert ch.H.data[prow][i] > 0
                for r_above in range(prow):
                    assert ch.H.data[r_above][i] == 0


class TestCanonicalReduction:
    def test_diag_example(self):
        A = IntMatrix([[2, 0], [0, 3]])
        rep, z = reduce_to_canonical_rep((1, 1), A)
        assert rep == (1, 1)
        rep5, _ = reduce_to_canonical_rep((5, 5), A)
        assert rep5 == (1, 2)

    def test_witness_idempotence_coset_invariance(self, rng):
        for _ in range(300):
            r = rng.randint(1, 3)
            c = rng.randint(1, 3)
            A = random_matrix(rng, r, c)
            u = tuple(rng.randint(-20, 20) for _ in range(r))
            rep, z = reduce_to_canonical_rep(u, A)
            assert tuple(x - y for x, y in zip(u, rep)) == A.apply(z)
            again, z2 = reduce_to_canonical_rep(rep, A)
            assert again == rep and all(x == 0 for x in z2)
            shift = tuple(rng.randint(-3, 3) for _ in range(c))
            u2 = tuple(x + y for x, y in zip(u, A.apply(shift)))
            rep2, _ = reduce_to_canonical_rep(u2, A)
            assert rep2 == rep

    def test_representatives_enumerate_cosets(self, rng):
        for _ in range(50):
            n = rng.randint(1, 3)
            A = random_matrix(rng, n, n, lo=-4, hi=4)
            if determinant(A) == 0:
                continue
            reps = coset_representatives(A)
            assert len(reps) == abs(determinant(A))
            assert len(set(reps)) == len(reps)
            for v in reps:
                fixed, _ = reduce_to_canonical_rep(v, A)
                assert fixed == v

    def test_infinite_cokernel_has_no_representative_set(self):
        with pytest.raises(InfiniteResultError):
            coset_representatives(IntMatrix([[2, 0], [0, 0]]))
