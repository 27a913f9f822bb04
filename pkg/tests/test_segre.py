import random

import pytest
from hypothesis import given, strategies as st

from conftest import rand_gq, rand_map, rand_surface
from crobstruct.errors import (
    ConstantOrLinearTerm, DegenerateBlock, OrderExhausted, PreconditionError, RealityViolation,
    SingularRhoW,
)
from crobstruct.exactnum import GQ, I
from crobstruct.segre import (
    ComplexTerm, MapSpec, RealTerm, affine_fit, check_head_terms, complexify, derivative_table,
    from_complex_terms, graph_restricted, image_residual, jets_as_forms, q_jets_oracle, q_jets_tree,
    quadric, restrict_distinguished, segre_solve, transform_graph_jets, transform_jets, unit, z_jets,
)
from crobstruct.series import Series, multiindices


def quartic(order=8):
    return complexify([RealTerm(1, (1,), (1,), ()), RealTerm(1, (2,), (2,), ())], 1, 1, order, "quartic")


def test_quadric_segre_solution():
    S = quadric(1)
    b = S.blocks
    (Q,) = segre_solve(S)
    assert Q == Series(b.nvars, {b.exponent(tau=(1,)): 1, b.exponent(z=(1,), chi=(1,)): GQ(0, 2)}, Q.order)


def test_quartic_jets():
    S = quartic()
    T = derivative_table(S, 3)
    assert T.exact
    chi = Series.var(1, 0)
    assert q_jets_tree(S, 1, T)[0].coeff((0,)) == chi.scale(2 * I)
    assert q_jets_tree(S, 2, T)[0].coeff((0, 0)) == (chi * chi).scale(4 * I)
    assert q_jets_tree(S, 3, T)[0].is_zero()


def test_k2_three_summands():
    """Q_zz = rho_zz/(-rho_w) + (rho_zw/(-rho_w))(rho_z/(-rho_w)) * 2 + (rho_ww/(-rho_w))(rho_z/(-rho_w))^2."""
    rng = random.Random(3)
    S = rand_surface(1, 1, rng, deg=4, N=7)
    T = derivative_table(S, 2)
    inv = T.neg_rho_w_inverse()
    e = lambda b, g: T.entry(0, (b,), (g,)) * inv
    expect = e(2, 0) + (e(1, 1) * e(1, 0)).scale(2) + e(0, 2) * e(1, 0) * e(1, 0)
    got = q_jets_tree(S, 2, T)[0].coeff((0, 0))
    assert got.agrees(expect, T.working_order())
    assert got.agrees(q_jets_oracle(S, 2)[(2,)][0])


@given(st.integers(0, 10 ** 6), st.sampled_from([(1, 1), (2, 1), (1, 2), (2, 2)]))
def test_tree_formula_matches_segre_solve(seed, nd):
    n, d = nd
    S = rand_surface(n, d, random.Random(seed), deg=4, N=5)
    T = derivative_table(S, 3)
    oracle = q_jets_oracle(S, 3)
    for k in range(1, 4):
        ours = q_jets_tree(S, k, T)
        theirs = jets_as_forms(oracle, k, n, d)
        assert all(a.agrees(b) for a, b in zip(ours, theirs))


@pytest.mark.parametrize("seed", range(3))
def test_head_terms_codim2(seed):
    S = rand_surface(1, 2, random.Random(seed), deg=4, N=6)
    assert all(r.ok for r in check_head_terms(S, 3))


def test_reality_violation():
    with pytest.raises(RealityViolation):
        complexify([RealTerm(1, (1,), (1,), ()), RealTerm(GQ(0, 1), (2,), (1,), ())], 1, 1, 6)


def test_linear_term_rejected():
    with pytest.raises(ConstantOrLinearTerm):
        complexify([RealTerm(1, (1,), (0,), ()), RealTerm(1, (0,), (1,), ())], 1, 1, 6)


def test_singular_rho_w():
    S = from_complex_terms([ComplexTerm(1, (1,), (0,), (1,), (0,))], 1, 1, 6)
    with pytest.raises(SingularRhoW):
        segre_solve(S)


def test_table_needs_enough_order():
    S = complexify([RealTerm(1, (1,), (1,), ()), RealTerm(1, (3,), (3,), ())], 1, 1, 4)
    with pytest.raises(OrderExhausted):
        derivative_table(S, 4)


def test_quartic_image_lies_on_quadric():
    z, w = Series.var(2, 0), Series.var(2, 1)
    H = MapSpec((z,), (z * z, w), 1, 1)
    target = complexify([RealTerm(1, (1, 0), (1, 0), ()), RealTerm(1, (0, 1), (0, 1), ())], 2, 1, 8)
    assert all(r.is_zero() for r in image_residual(H, quartic(), target))
    J = transform_jets(H, quartic(), 3)
    # first G component is z^2 along the graph
    assert J[(2,)][0] == Series.const(1, 2) and J[(3,)][0].is_zero()
    assert J[(2,)][1] == q_jets_oracle(quartic(), 2)[(2,)][0]


def test_restriction_example():
    # Im w = |z1|^2 + |z2|^2 + Re(z1^2 zb2^2): rho_{z1^2} on S_{0,V_{1}} is chi2^2
    S = complexify([RealTerm(1, (1, 0), (1, 0), ()), RealTerm(1, (0, 1), (0, 1), ()),
                    RealTerm(GQ(1) / 2, (2, 0), (0, 2), ()), RealTerm(GQ(1) / 2, (0, 2), (2, 0), ())], 2, 1, 8)
    R = restrict_distinguished(S, [0], 3)
    assert R.entry(0, (2, 0), (0,)) == Series(2, {(0, 2): 1})
    assert R.solution[0].is_zero()
    with pytest.raises(PreconditionError):
        restrict_distinguished(S, [0, 1], 2)


def test_degenerate_block():
    S = complexify([RealTerm(1, (0, 1), (0, 1), ())], 2, 1, 6)
    with pytest.raises(DegenerateBlock):
        restrict_distinguished(S, [0], 2)


def _random_q(n, N, rng):
    t = {}
    for e in multiindices(2 * n, N, 1):
        if sum(e[:n]) >= 1 and rng.random() < 0.5:
            t[e] = rand_gq(rng, 3)
    return Series(2 * n, t, N)


@pytest.mark.parametrize("seed", range(4))
def test_transformation_invariance(seed):
    """Q'_alpha - G_w(0) Q_alpha does not see order >= |alpha| coefficients of Q."""
    rng = random.Random(seed)
    n = 2
    H = rand_map(n, 1, 1, rng)
    Q = _random_q(n, 6, rng)
    J1 = transform_graph_jets(H, [Q], 3)
    jq1 = z_jets([Q], n, 3)
    Gw = H.G_w0()
    for a in [(1, 0), (1, 1), (2, 1)]:
        k = sum(a)
        pert = {e: c for e, c in Q.terms.items() if sum(e[:n]) < k}
        for e in multiindices(2 * n, 6, k):
            if sum(e[:n]) >= k and rng.random() < 0.5:
                pert[e] = rand_gq(rng, 3)
        Q2 = Series(2 * n, pert, 6)
        J2 = transform_graph_jets(H, [Q2], 3)
        jq2 = z_jets([Q2], n, 3)
        for i in range(H.m + 1):
            lhs = J1[a][i] - jq1[a][0].scale(Gw[i][0])
            rhs = J2[a][i] - jq2[a][0].scale(Gw[i][0])
            assert lhs.agrees(rhs)


def _levi_safe_surface(n, rng):
    from crobstruct.segre import RealTerm as RT
    terms = [RT(1, unit(n, j), unit(n, j), ()) for j in range(n)]
    for _ in range(4):
        while True:
            a = tuple(rng.randint(0, 2) for _ in range(n))
            b = tuple(rng.randint(0, 2) for _ in range(n))
            if 3 <= sum(a) + sum(b) <= 4:
                break
        c = rand_gq(rng, 5)
        if a == b:
            terms.append(RT(GQ(c.re), a, b, ()))
        else:
            terms += [RT(c, a, b, ()), RT(c.conjugate(), b, a, ())]
    return complexify(terms, n, 1, 6)


@pytest.mark.parametrize("seed", range(4))
def test_order_two_affine_on_distinguished(seed):
    rng = random.Random(seed)
    n = 2 + seed % 2
    S = _levi_safe_surface(n, rng)
    H = rand_map(n, 1, 1, rng, G_z=False)
    I_list = list(range(n - 1))
    T = restrict_distinguished(S, I_list, 2)
    g = graph_restricted(S, T)
    J = transform_graph_jets(H, g, 2)
    Jq = z_jets(g, n, 2)
    basis = [Jq[unit(n, j)][0] for j in range(n)]
    Gw = H.G_w0()
    for a in multiindices(n, 2, 2):
        if any(x and j not in I_list for j, x in enumerate(a)):
            continue
        for i in range(H.m + 1):
            assert affine_fit(J[a][i] - Jq[a][0].scale(Gw[i][0]), basis) is not None


def test_affine_fit():
    x = Series.var(1, 0)
    assert affine_fit(x.scale(3) + Series.const(1, 2), [x]) == [GQ(2), GQ(3)]
    assert affine_fit(x * x, [x]) is None
