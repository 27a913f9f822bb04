from itertools import product

import pytest
from hypothesis import given, strategies as st

from crobstruct.errors import (
    BadLinearPart, BlockMismatch, DivisionByZero, NonNilpotentSubstitution, OrderExhausted, SingularJacobian,
)
from crobstruct.exactnum import GQ, ONE
from crobstruct.series import (
    Series, VarBlocks, compose, count_monomials, invert_map, min_order, multiindices, partial_derivative,
    solve_implicit,
)

coef = st.builds(GQ, st.integers(-4, 4), st.integers(-4, 4))


def polys(nvars=2, maxdeg=3, order=None, const=True):
    @st.composite
    def build(draw):
        exps = list(multiindices(nvars, maxdeg, 0 if const else 1))
        chosen = draw(st.lists(st.sampled_from(exps), max_size=6))
        return Series(nvars, {e: draw(coef) for e in chosen}, order)
    return build()


def dense_mul(p, q, order):
    out = {}
    for (a, c), (b, d) in product(p.terms.items(), q.terms.items()):
        e = tuple(x + y for x, y in zip(a, b))
        if order is None or sum(e) <= order:
            out[e] = out.get(e, GQ(0)) + c * d
    return Series(p.nvars, out, order)


@given(polys(), polys(), st.one_of(st.none(), st.integers(0, 6)))
def test_mul_matches_dense(p, q, order):
    assert (p.truncate(order) * q.truncate(order)).agrees(dense_mul(p, q, order), order)


@given(polys(), polys(), polys())
def test_ring_laws(p, q, r):
    assert p * (q + r) == p * q + p * r
    assert (p * q) * r == p * (q * r)
    assert p * q == q * p


@given(polys(order=5))
def test_inverse(p):
    if not p.constant_term():
        with pytest.raises(DivisionByZero):
            p.inverse()
        return
    inv = p.inverse()
    assert (p * inv).agrees(Series.const(2, ONE), 5)


def test_inverse_of_exact_needs_order():
    x = Series.var(1, 0)
    with pytest.raises(OrderExhausted):
        (Series.const(1, 1) + x).inverse()
    assert (Series.const(1, 2)).inverse() == Series.const(1, GQ(1, 0) / 2)


def test_min_order():
    assert min_order(None, 3, 5) == 3
    assert min_order(None, None) is None


@given(polys(nvars=2, maxdeg=3), polys(nvars=2, maxdeg=2, const=False), polys(nvars=2, maxdeg=2, const=False))
def test_compose_is_substitution(p, f, g):
    # p(f, g) evaluated via compose equals the naive expansion
    naive = Series.zero(2)
    for e, c in p.terms.items():
        naive = naive + (f ** e[0]) * (g ** e[1]) * Series.const(2, c)
    assert compose(p, [f, g]) == naive


@given(polys(nvars=1, maxdeg=3), polys(nvars=1, maxdeg=3, const=False), polys(nvars=1, maxdeg=3, const=False))
def test_compose_associative(p, f, g):
    assert compose(compose(p, [f]), [g], order=6).agrees(compose(p, [compose(f, [g])], order=6), 6)


def test_non_nilpotent_substitution():
    p = Series(1, {(1,): 1, (2,): 1}, 3)
    with pytest.raises(NonNilpotentSubstitution):
        compose(p, [Series.const(1, 1) + Series.var(1, 0)])


def test_invert_map_known():
    x = Series.var(1, 0)
    inv = invert_map([x + x * x], order=4)
    assert inv[0] == Series(1, {(1,): 1, (2,): -1, (3,): 2, (4,): -5}, 4)


@given(polys(nvars=2, maxdeg=3, const=False), polys(nvars=2, maxdeg=3, const=False))
def test_invert_map_roundtrip(a, b):
    x, y = Series.var(2, 0), Series.var(2, 1)
    strip = lambda s: Series(2, {e: c for e, c in s.terms.items() if sum(e) >= 2})
    F = [x + strip(a), y + strip(b)]
    G = invert_map(F, order=5)
    comp = [compose(f, G, order=5) for f in F]
    assert comp[0].agrees(x, 5) and comp[1].agrees(y, 5)


def test_invert_map_bad_linear_part():
    x = Series.var(1, 0)
    with pytest.raises(BadLinearPart):
        invert_map([x.scale(2)], order=3)


@given(polys(nvars=2, maxdeg=3, const=False))
def test_solve_implicit(h):
    # solve y + h(x, y) = 0 with h of order >= 2 plus a linear x term
    x, y = Series.var(2, 0), Series.var(2, 1)
    h = Series(2, {e: c for e, c in h.terms.items() if sum(e) >= 2})
    F = y + x.scale(3) + h
    (Y,) = solve_implicit([F], [1], order=5)
    assert Y.degree_in([1]) <= 0
    assert compose(F, [x, Y], order=5).truncate(5).is_zero()


def test_solve_implicit_singular():
    x, y = Series.var(2, 0), Series.var(2, 1)
    with pytest.raises(SingularJacobian):
        solve_implicit([x + y * y], [1], order=3)


def test_partial_derivative_and_blocks():
    b = VarBlocks(1, 1)
    p = Series(b.nvars, {b.exponent(z=(2,), chi=(1,)): 3, b.exponent(w=(1,)): 1})
    assert partial_derivative(p, b, (2,), (0,)) == Series(b.nvars, {b.exponent(chi=(1,)): 6})
    with pytest.raises(BlockMismatch):
        b.exponent(z=(1, 0))


def test_derivative_exhausts_order():
    p = Series(1, {(1,): 1}, 2)
    with pytest.raises(OrderExhausted):
        p.derivative(0, 3)


@given(st.integers(1, 4), st.integers(0, 5))
def test_multiindex_count(n, k):
    assert len(list(multiindices(n, k, k))) == count_monomials(n, k)
