import random

import pytest
from hypothesis import given, strategies as st

from conftest import SURFACES, rand_gq
from crobstruct.errors import (
    EmptyInput, EmptyTargets, FormMismatch, OrderMismatch, PreconditionError, SupportOverlap, SupportViolation,
)
from crobstruct.exactnum import GQ, I, ONE
from crobstruct.obstruction import (
    Caps, Generator, WeightBudget, algdep_scan, certify_nonembeddability, coarse_degree_bound, custom_caps,
    degree_certificate, determinant_criterion, find_relation, invariant_lower_bound, low_order_obstruction,
    monomial_basis, q_relation, rho_relation,
)
from crobstruct.segre import RealTerm, complexify, quadric, unit
from crobstruct.series import Series
from crobstruct.surface_io import load_surface

chi = Series.var(1, 0)


def quartic():
    return load_surface(SURFACES / "quartic.srf")


@pytest.mark.parametrize("k", range(2, 7))
def test_budget_formulas(k):
    for l in range(1, k + 1):
        b = WeightBudget(k, l)
        assert (b.cap_wt_P, b.cap_wt_R) == ((2 * k - 2) * (l - 1), (2 * k - 2) * l + 1)
        assert (b.cap_rhw_P, b.cap_rhw_R) == ((2 * k - 2) * l, (2 * k - 2) * l + 1)


def test_custom_caps():
    assert custom_caps(2, 3, 3) == Caps(0, 3, 2, 3)


def test_monomial_basis_examples():
    gens = [Generator("rz", 1, chi), Generator("rw", 0, Series.const(1, 1) + chi, True)]
    names = [m.name(gens) for m in monomial_basis(gens, 2, 1)]
    assert names == ["1", "rw", "rz", "rz*rw", "rz^2", "rz^2*rw"]
    assert [m.name(gens) for m in monomial_basis(gens, 0, 0)] == ["1"]


def test_monomial_basis_rejects_uncounted_weight_zero():
    with pytest.raises(PreconditionError):
        monomial_basis([Generator("x", 0, chi)], 2, 2)


def test_quadric_trivial_relation():
    c = find_relation([("t", Series.zero(1))], [Generator("g", 1, chi)], WeightBudget(2, 1))
    assert c.found and c.P == [{"1": ONE}] and c.R == {}


def test_quartic_q_relation():
    c = q_relation(quartic(), [(2,)])
    assert c.found and c.exact
    # Q_zz = -i Q_z^2 for rho_w = i/2
    assert c.P == [{"1": ONE}] and c.R == {"Q[z=1]^2": -I}


def test_quartic_mirror_q_relation():
    c = q_relation(load_surface(SURFACES / "quartic-mirror.srf"), [(2,)])
    assert c.found and c.R == {"Q[z=1]^2": I}


def test_m1_k2_none():
    S = load_surface(SURFACES / "m1.srf")
    c = rho_relation(S, [(2,), (3,)], k=2)
    assert not c.found and c.exact and c.order >= 25


def test_order_and_target_errors():
    t = Series(1, {(3,): 1}, 5)
    with pytest.raises(OrderMismatch):
        find_relation([("t", t)], [Generator("g", 1, chi)], WeightBudget(2, 1), N=8)
    with pytest.raises(EmptyTargets):
        find_relation([], [Generator("g", 1, chi)], WeightBudget(2, 1))
    with pytest.raises(EmptyTargets):
        rho_relation(quartic(), [])


def poly1(draw, maxdeg=4):
    terms = {(e,): draw(st.builds(GQ, st.integers(-2, 2), st.integers(-2, 2))) for e in
             draw(st.lists(st.integers(0, maxdeg), max_size=3))}
    return Series(1, terms)


@st.composite
def search_data(draw):
    ntargets = draw(st.integers(1, 2))
    targets = [(f"t{j}", poly1(draw)) for j in range(ntargets)]
    gens = [Generator(f"g{j}", draw(st.integers(1, 3)), poly1(draw, 3)) for j in range(draw(st.integers(1, 2)))]
    gens.append(Generator("w", 0, Series.const(1, 1) + poly1(draw, 1), True))
    caps = Caps(draw(st.integers(0, 3)), draw(st.integers(0, 4)), draw(st.integers(0, 2)), draw(st.integers(0, 2)))
    return targets, gens, caps


@given(search_data())
def test_found_is_sound(data):
    targets, gens, caps = data
    c = find_relation(targets, gens, caps)
    if c.found:
        # rebuild the relation from the printed monomials
        env = {g.name: g.series for g in gens}

        def ev(name):
            out = Series.const(1, 1)
            if name == "1":
                return out
            for part in name.split("*"):
                base, _, e = part.partition("^")
                out = out * env[base] ** (int(e) if e else 1)
            return out
        lhs = Series.zero(1)
        for (_, t), P in zip(targets, c.P):
            for m, v in P.items():
                lhs = lhs + (t * ev(m)).scale(v)
        for m, v in c.R.items():
            lhs = lhs - ev(m).scale(v)
        assert lhs.is_zero()
        assert any(c.P)


@given(search_data(), st.integers(0, 2), st.integers(0, 2))
def test_monotone_in_caps(data, dp, dr):
    targets, gens, caps = data
    small = find_relation(targets, gens, caps)
    big = find_relation(targets, gens, Caps(caps.wt_P + dp, caps.wt_R + dr, caps.rhw_P + dp, caps.rhw_R + dr))
    if small.found:
        assert big.found


@given(search_data(), st.integers(0, 5))
def test_monotone_in_order(data, extra):
    targets, gens, caps = data
    base = find_relation(targets, gens, caps)
    more = find_relation(targets, gens, caps, N=base.order + extra)
    assert base.found == more.found


def test_certify_m1():
    v = certify_nonembeddability(load_surface(SURFACES / "m1.srf"), 1, [(2,), (3,)])
    assert v.verdict == "NotEmbeddable" and v.unconditional
    assert [c.k for c in v.certificates] == [2, 3]
    assert [c.l for c in v.certificates] == [1, 2]


def test_certify_positive_controls():
    v = certify_nonembeddability(quartic(), 1, [(2,), (3,)])
    assert v.verdict == "Inconclusive" and any(c.found for c in v.certificates)
    v = certify_nonembeddability(quadric(1), 2, [(2,), (3,), (4,)])
    assert v.verdict == "Inconclusive" and all(c.found for c in v.certificates)


def test_certify_codim2_naming():
    S = load_surface(SURFACES / "codim2.srf")
    v = certify_nonembeddability(S, 0, [(2,), (2,)])
    assert v.verdict in ("NoRelationUpToCaps", "Inconclusive")
    assert [c.i0 for c in v.certificates] == [0, 1]


def test_certify_precondition():
    with pytest.raises(PreconditionError):
        certify_nonembeddability(quartic(), 2, [(2,)])
    with pytest.raises(PreconditionError):
        certify_nonembeddability(quartic(), 0, [(1,)])


def test_degree_certificates():
    S = load_surface(SURFACES / "factorial4.srf")
    got = [degree_certificate(S, k) for k in (2, 3, 4)]
    assert [c.target_degree for c in got] == [24, 120, 720]
    assert [c.coarse_bound for c in got] == [18, 72, 456]
    assert [c.max_R_degree for c in got] == [3, 72, 385]
    assert all(c.certified for c in got)


def test_coarse_bound_below_factorial():
    from math import factorial
    for k in range(2, 9):
        assert coarse_degree_bound(k) < factorial(k + 2)


def test_degree_certificate_family_checks():
    from crobstruct.errors import FamilyMismatch
    with pytest.raises(FamilyMismatch):
        degree_certificate(quadric(2), 2)
    assert not degree_certificate(quadric(1), 2).certified


def test_invariants():
    assert invariant_lower_bound(quadric(1), 4).total == 0
    assert invariant_lower_bound(quadric(2), 3).per_k == {2: 0, 3: 0}
    assert invariant_lower_bound(quartic(), 2).per_k == {2: 0}
    r = invariant_lower_bound(load_surface(SURFACES / "m1.srf"), 3)
    assert r.per_k == {2: 1, 3: 1} and r.single_chart


def coupled_surface(C, alphas, betas):
    n = 4
    terms = [RealTerm(1, unit(n, j), unit(n, j), ()) for j in range(n)]
    for a, row in zip(alphas, C):
        for b, c in zip(betas, row):
            c = GQ(c) if not isinstance(c, GQ) else c
            if c:
                terms += [RealTerm(c, a, b, ()), RealTerm(c.conjugate(), b, a, ())]
    return complexify(terms, n, 1, 8)


A2 = [(2, 0, 0, 0), (0, 2, 0, 0)]
B2 = [(0, 0, 2, 0), (0, 0, 0, 2)]


def test_low_order_single_alpha():
    a, b = [(2, 0, 0, 0)], [(0, 0, 2, 0)]
    assert not low_order_obstruction(coupled_surface([[1]], a, b), [0, 1], a).found
    c = low_order_obstruction(coupled_surface([[0]], a, b), [0, 1], a)
    assert c.found and c.P == [{"1": ONE}] and c.R == {}


def test_low_order_quadric_and_support():
    assert low_order_obstruction(quadric(3), [0], [(2, 0, 0)]).found
    with pytest.raises(SupportViolation):
        low_order_obstruction(quadric(3), [0], [(1, 1, 0)])


def test_determinant_examples():
    assert determinant_criterion(coupled_surface([[1, 0], [0, 1]], A2, B2), A2, B2) == 1
    assert determinant_criterion(quadric(4), A2, B2) == 0
    assert determinant_criterion(coupled_surface([[1, 2], [2, 4]], A2, B2), A2, B2) == 0
    with pytest.raises(SupportOverlap):
        determinant_criterion(quadric(4), A2, [(2, 0, 0, 0), (0, 0, 0, 2)])
    skew = complexify([RealTerm(1, (1, 0), (1, 0), ()), RealTerm(1, (0, 1), (0, 1), ()),
                       RealTerm(1, (1, 0), (0, 1), ()), RealTerm(1, (0, 1), (1, 0), ())], 2, 1, 6)
    with pytest.raises(FormMismatch):
        determinant_criterion(skew, [(2, 0)], [(0, 2)])


@pytest.mark.parametrize("seed", range(6))
def test_determinant_cross_validates_low_order(seed):
    rng = random.Random(seed)
    C = [[rand_gq(rng, 2) for _ in range(2)] for _ in range(2)]
    if seed == 0:
        C[1] = [2 * x for x in C[0]]
    S = coupled_surface(C, A2, B2)
    A = determinant_criterion(S, A2, B2)
    found = low_order_obstruction(S, [0, 1], A2).found
    assert found == (A == 0)


def test_algdep_examples():
    x = Series.var(1, 0)
    c = algdep_scan([Series(1, {(1,): 2}), Series.const(1, 2)], 1)
    assert c.found and set(c.R) == {"1", "f2"}
    c = algdep_scan([x, x * x], 2)
    assert c.found and c.R == {"f2": ONE, "f1^2": -ONE}
    f1, f2 = Series(1, {(24,): 1}), Series(1, {(120,): 1})
    assert algdep_scan([f1, f2], 5).found
    assert not algdep_scan([f1, f2], 4).found
    with pytest.raises(EmptyInput):
        algdep_scan([], 2)


def test_parallel_certify_matches_serial(monkeypatch):
    S = load_surface(SURFACES / "m1.srf")
    serial = certify_nonembeddability(S, 1, [(2,), (3,)]).to_json()
    monkeypatch.setenv("CROBSTRUCT_THREADS", "2")
    assert certify_nonembeddability(S, 1, [(2,), (3,)]).to_json() == serial
