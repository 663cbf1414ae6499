from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import DimensionError, ParseError, SingularityError
from exact_linalg import (
    Matrix,
    Subspace,
    determinant,
    format_rational,
    image,
    inverse,
    kernel,
    lin_comb,
    parse_rational,
    rank,
    rref,
    solve,
    subspace_contains,
    subspace_intersect,
    subspace_sum,
    unit_vector,
)

small = st.integers(min_value=-4, max_value=4)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def square_matrices(max_n=4):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)
    )


class TestRationals:
    def test_parse_forms(self):
        assert parse_rational("3/6") == Fraction(1, 2)
        assert parse_rational(" -7 ") == -7
        assert parse_rational(Fraction(2, 3)) == Fraction(2, 3)
        assert parse_rational(5) == 5

    @pytest.mark.parametrize("bad", ["1.5", "x", "1/0", "", True, 0.5])
    def test_parse_rejects(self, bad):
        with pytest.raises(ParseError):
            parse_rational(bad)

    def test_format(self):
        assert format_rational(Fraction(-4, 6)) == "-2/3"
        assert format_rational(3) == "3"

    def test_lin_comb(self):
        v = lin_comb([Fraction(1), Fraction(-2)], [(1, 0), (1, 1)], 2)
        assert v == (Fraction(-1), Fraction(-2))


class TestMatrix:
    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            Matrix.from_rows([[1, 2], [3]])
        with pytest.raises(DimensionError):
            Matrix.identity(2).matmul(Matrix.identity(3))

    def test_blocks(self):
        A = Matrix.from_rows([[1, 2], [3, 4]])
        B = Matrix.block_diagonal(A, Matrix.identity(1))
        assert B.shape == (3, 3)
        assert B.entry(2, 2) == 1
        assert B.submatrix(0, 2, 0, 2) == A
        assert B.entry(0, 2) == 0

    def test_commutator_and_trace(self):
        A = Matrix.from_rows([[0, 1], [0, 0]])
        B = Matrix.from_rows([[0, 0], [1, 0]])
        assert A.commutator(B) == Matrix.from_rows([[1, 0], [0, -1]])
        assert A.commutator(B).trace() == 0

    def test_to_lists_from_lists(self):
        A = Matrix.from_rows([[Fraction(1, 2), 0], [-3, 1]])
        assert A.to_lists() == [["1/2", "0"], ["-3", "1"]]
        assert Matrix.from_lists(A.to_lists()) == A

    def test_rref_is_canonical(self):
        A = Matrix.from_rows([[2, 4, 6], [1, 2, 4]])
        R, pivots, r = rref(A)
        assert pivots == [0, 2]
        assert r == 2
        assert R.row(0) == (1, 2, 0)
        assert R.row(1) == (0, 0, 1)

    def test_inverse_singular(self):
        with pytest.raises(SingularityError):
            inverse(Matrix.from_rows([[1, 2], [2, 4]]))

    def test_solve_inconsistent(self):
        A = Matrix.from_rows([[1, 1], [2, 2]])
        assert solve(A, [1, 3]) is None
        x = solve(A, [1, 2])
        assert A.apply(x) == (1, 2)


class TestAgainstSympy:
    @settings(max_examples=60, deadline=None)
    @given(matrices())
    def test_rank(self, rows):
        assert rank(Matrix.from_rows(rows)) == sympy.Matrix(rows).rank()

    @settings(max_examples=60, deadline=None)
    @given(square_matrices())
    def test_determinant(self, rows):
        assert determinant(Matrix.from_rows(rows)) == Fraction(int(sympy.Matrix(rows).det()))

    @settings(max_examples=60, deadline=None)
    @given(matrices())
    def test_kernel(self, rows):
        M = Matrix.from_rows(rows)
        K = kernel(M)
        assert K.dim == len(sympy.Matrix(rows).nullspace())
        assert all(not any(M.apply(v)) for v in K.basis)
        assert K.dim + rank(M) == M.cols

    @settings(max_examples=40, deadline=None)
    @given(square_matrices(3))
    def test_inverse(self, rows):
        M = Matrix.from_rows(rows)
        if sympy.Matrix(rows).det() == 0:
            with pytest.raises(SingularityError):
                inverse(M)
        else:
            assert M.matmul(inverse(M)) == Matrix.identity(M.rows)


class TestSubspace:
    def test_canonical_basis(self):
        A = Subspace.span(3, [(1, 1, 0), (0, 1, 1)])
        B = Subspace.span(3, [(1, 2, 1), (1, 0, -1)])
        assert A == B

    def test_constructor_canonicalizes(self):
        raw = Subspace(3, ((2, 4, 0), (0, 0, 3), (1, 2, 3)))
        assert raw == Subspace.span(3, [(1, 2, 0), (0, 0, 1)])
        assert raw.basis == ((1, 2, 0), (0, 0, 1))
        assert raw.pivots == (0, 2)
        with pytest.raises(DimensionError):
            Subspace(3, ((1, 0),))

    def test_sum_and_intersection(self):
        A = Subspace.span(3, [unit_vector(3, 0), unit_vector(3, 1)])
        B = Subspace.span(3, [unit_vector(3, 1), unit_vector(3, 2)])
        assert subspace_sum(A, B).dim == 3
        meet = subspace_intersect(A, B)
        assert meet.dim == 1
        assert subspace_contains(meet, (0, 5, 0))

    def test_coordinates(self):
        A = Subspace.span(3, [(1, 0, 1), (0, 1, 1)])
        coords = A.coordinates((2, 3, 5))
        assert A.vector(coords) == (2, 3, 5)
        assert A.coordinates((0, 0, 1)) is None

    def test_complement_is_greedy(self):
        A = Subspace.span(3, [(1, 1, 0)])
        assert A.complement_indices() == [0, 2]

    def test_direct(self):
        D = Subspace.direct(Subspace.full(2), Subspace.zero(1))
        assert D.ambient_dim == 3
        assert D.dim == 2
        assert not D.contains(unit_vector(3, 2))

    @settings(max_examples=40, deadline=None)
    @given(matrices(3, 4), matrices(3, 4))
    def test_dimension_formula(self, a, b):
        n = min(len(a[0]), len(b[0]))
        A = Subspace.span(n, [row[:n] for row in a])
        B = Subspace.span(n, [row[:n] for row in b])
        assert A.sum(B).dim + A.intersect(B).dim == A.dim + B.dim

    def test_image(self):
        M = Matrix.from_rows([[1, 2], [2, 4], [0, 0]])
        assert image(M).dim == 1
