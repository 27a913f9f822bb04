from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from crobstruct.errors import DivisionByZero
from crobstruct.exactnum import (
    GQ, I, ONE, ZERO, ExactMatrix, det, format_gq, inverse, matmul, nullspace, parse_gq, rank, rref,
)

rat = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 1000)
gq = st.builds(GQ, rat, rat)
nonzero = gq.filter(lambda z: bool(z))


@given(gq, gq, gq)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + ZERO == a and a * ONE == a
    assert a - a == ZERO


@given(nonzero)
def test_inverse(a):
    assert a * a.inverse() == ONE
    assert (a / a) == ONE


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        ONE / ZERO
    with pytest.raises(ZeroDivisionError):
        GQ(0).inverse()


def test_i_squared():
    assert I * I == -ONE
    assert I.conjugate() == -I


@given(gq)
def test_conjugate_and_abs2(a):
    assert a * a.conjugate() == GQ(a.abs2())
    assert a.conjugate().conjugate() == a


@given(gq)
def test_format_parse_roundtrip(a):
    assert parse_gq(format_gq(a)) == a


@pytest.mark.parametrize("text,value", [
    ("7", GQ(7)), ("-1/2", GQ(Fraction(-1, 2))), ("i", I), ("-i", -I),
    ("3/4+2/5i", GQ(Fraction(3, 4), Fraction(2, 5))), ("1-1i", GQ(1, -1)),
])
def test_parse_examples(text, value):
    assert parse_gq(text) == value


@pytest.mark.parametrize("bad", ["1//2", "", "i i", "1/0", "abc", "1+"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_gq(bad)


def test_mixed_arithmetic_and_hash():
    assert GQ(1, 0) == 1 and GQ(Fraction(1, 2)) == Fraction(1, 2)
    assert hash(GQ(Fraction(1, 2))) == hash(Fraction(1, 2))
    assert 2 * GQ(1, 1) == GQ(2, 2)
    assert GQ(1, 1) ** 2 == GQ(0, 2)


def leibniz_det(rows):
    n = len(rows)
    total = ZERO
    for p in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if p[i] > p[j]:
                    sign = -sign
        term = ONE
        for i in range(n):
            term = term * rows[i][p[i]]
        total = total + (term if sign > 0 else -term)
    return total


def matrices(max_n=4, square=True):
    @st.composite
    def build(draw):
        r = draw(st.integers(1, max_n))
        c = r if square else draw(st.integers(1, max_n + 1))
        small = st.builds(GQ, st.integers(-3, 3), st.integers(-3, 3))
        return [[draw(small) for _ in range(c)] for _ in range(r)]
    return build()


@given(matrices())
def test_det_matches_leibniz(rows):
    assert det(ExactMatrix.from_rows(rows)) == leibniz_det(rows)


@given(matrices(square=False))
def test_nullspace_and_rank(rows):
    M = ExactMatrix.from_rows(rows)
    ns = nullspace(M)
    assert rank(M) + len(ns) == M.cols
    for v in ns:
        assert all(x == ZERO for x in M.matvec(v))
    R, piv = rref(M)
    assert len(piv) == rank(M)


@given(matrices())
def test_inverse_matrix(rows):
    M = ExactMatrix.from_rows(rows)
    if not det(M):
        return
    P = matmul(M, inverse(M))
    assert P == ExactMatrix.identity(M.rows)


def test_known_examples():
    M = ExactMatrix.from_rows([[1, 2], [2, 4]])
    assert rank(M) == 1
    assert nullspace(M) == [[GQ(-2), ONE]]
    assert det(ExactMatrix.from_rows([[1, 2], [3, 4]])) == GQ(-2)
