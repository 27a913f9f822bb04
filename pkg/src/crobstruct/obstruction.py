"""Weight-bounded relation searches and the certificates built on them.

A relation search asks for polynomials ``P_j`` and ``R`` in a list of
generator series, within weight and ``rho_w``-degree caps, such that
``sum_j P_j * target_j - R`` vanishes through total degree ``N`` and not all
``P_j`` vanish.  Unknown coefficients are found by exact linear algebra.
"""
from __future__ import annotations

import hashlib
from fractions import Fraction
from dataclasses import dataclass, field
from itertools import combinations
from math import factorial
from typing import Sequence

from .errors import (
    DimMismatch,
    EmptyInput,
    EmptyTargets,
    FamilyMismatch,
    FormMismatch,
    OrderMismatch,
    PreconditionError,
    SupportOverlap,
    SupportViolation,
)
from .exactnum import GQ, ONE, ZERO, ExactMatrix, det, format_gq, nullspace, pivot_columns
from .parallel import pmap
from .segre import (
    DerivativeTable,
    SurfaceSpec,
    derivative_table,
    q_jets_tree,
    restrict_distinguished,
    unit,
)
from .series import Series, min_order, multiindices


# ----------------------------------------------------------------------------
# budgets and generators
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class Caps:
    wt_P: int
    wt_R: int
    rhw_P: int
    rhw_R: int

    def as_dict(self) -> dict:
        return {"wt_P": self.wt_P, "wt_R": self.wt_R, "rhw_P": self.rhw_P, "rhw_R": self.rhw_R}


@dataclass(frozen=True)
class WeightBudget:
    """Caps for order ``k`` targets when ``l`` of the multiindices have order ``<= k``."""

    k: int
    l: int

    @property
    def cap_wt_P(self) -> int:
        return (2 * self.k - 2) * (self.l - 1)

    @property
    def cap_wt_R(self) -> int:
        return (2 * self.k - 2) * self.l + 1

    @property
    def cap_rhw_P(self) -> int:
        return (2 * self.k - 2) * self.l

    @property
    def cap_rhw_R(self) -> int:
        return (2 * self.k - 2) * self.l + 1

    def caps(self) -> Caps:
        return Caps(self.cap_wt_P, self.cap_wt_R, self.cap_rhw_P, self.cap_rhw_R)


def custom_caps(k: int, wt: int, rhw: int) -> Caps:
    """User caps on ``R``; the ``P`` caps are lowered by the target weight ``2k - 1`` (and ``1``)."""
    return Caps(max(wt - (2 * k - 1), 0), wt, max(rhw - 1, 0), rhw)


def invariant_caps(k: int, previous: int, m: int) -> Caps:
    """Inductive caps for the weighted invariants at order ``k``."""
    return Caps((2 * k - 2) * (previous + m - 1), (2 * k - 2) * (previous + m) + 1, 0, 0)


@dataclass(frozen=True)
class Generator:
    name: str
    weight: int
    series: Series
    counts_rhw: bool = False


@dataclass(frozen=True)
class Monomial:
    exponents: tuple
    weight: int
    rhw: int

    def name(self, gens: Sequence[Generator]) -> str:
        parts = []
        for g, e in zip(gens, self.exponents):
            if e == 1:
                parts.append(g.name)
            elif e > 1:
                parts.append(f"{g.name}^{e}")
        return "*".join(parts) if parts else "1"


def monomial_basis(generators: Sequence[Generator], cap_wt: int, cap_rhw: int) -> list[Monomial]:
    """All monomials with total weight ``<= cap_wt`` and weight-0 degree ``<= cap_rhw``.

    Ordered by weight, then weight-0 degree, then exponent vector.
    """
    gens = list(generators)
    for g in gens:
        if g.weight < 0:
            raise PreconditionError("generator weights must be nonnegative")
        if g.weight == 0 and not g.counts_rhw:
            raise PreconditionError(f"weight-0 generator {g.name} must count towards the rho_w cap")
    out = []

    def rec(i: int, wt: int, rhw: int, exps: list):
        if i == len(gens):
            out.append(Monomial(tuple(exps), wt, rhw))
            return
        g = gens[i]
        e = 0
        while True:
            w2 = wt + e * g.weight
            r2 = rhw + (e if g.counts_rhw else 0)
            if w2 > cap_wt or r2 > cap_rhw:
                break
            exps.append(e)
            rec(i + 1, w2, r2, exps)
            exps.pop()
            e += 1
            if g.weight == 0 and not g.counts_rhw:
                break

    rec(0, 0, 0, [])
    out.sort(key=lambda m: (m.weight, m.rhw, tuple(-x for x in m.exponents[::-1])))
    return out


class _Evaluator:
    def __init__(self, gens: Sequence[Generator], order: int | None, nvars: int):
        self.gens = gens
        self.order = order
        self.nvars = nvars
        self.cache: dict = {(0,) * len(gens): Series.const(nvars, ONE, order)}

    def __call__(self, exps: tuple) -> Series:
        s = self.cache.get(exps)
        if s is not None:
            return s
        i = max(j for j, e in enumerate(exps) if e)
        prev = list(exps)
        prev[i] -= 1
        s = self(tuple(prev)) * self.gens[i].series
        s = s.truncate(self.order)
        self.cache[exps] = s
        return s


def _max_degree(gens: Sequence[Generator], mons: Sequence[Monomial]) -> int:
    degs = [max(g.series.degree(), 0) for g in gens]
    return max((sum(e * dg for e, dg in zip(m.exponents, degs)) for m in mons), default=0)


def _independent(cols: list[Series]) -> list[int]:
    """Indices of a maximal linearly independent prefix-greedy subset of ``cols``."""
    support = sorted({e for c in cols for e in c.terms})
    if not support or not cols:
        return []
    M = ExactMatrix.from_rows([[c.coeff(e) for c in cols] for e in support])
    return pivot_columns(M)


# ----------------------------------------------------------------------------
# certificates
# ----------------------------------------------------------------------------
@dataclass
class RelationCertificate:
    kind: str
    caps: Caps
    order: int | None
    exact: bool
    targets: list
    generators: list
    P: list = field(default_factory=list)
    R: dict = field(default_factory=dict)
    residual_order: int | None = None
    k: int | None = None
    l: int | None = None
    i0: int | None = None
    pruned: list = field(default_factory=list)
    generator_hash: str = ""
    note: str = ""

    @property
    def found(self) -> bool:
        return self.kind == "Found"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "k": self.k,
            "l": self.l,
            "i0": None if self.i0 is None else self.i0 + 1,
            "caps": self.caps.as_dict(),
            "order": self.order,
            "exact": self.exact,
            "targets": list(self.targets),
            "generators": list(self.generators),
            "P": [{m: format_gq(c) for m, c in p.items()} for p in self.P],
            "R": {m: format_gq(c) for m, c in self.R.items()},
            "residual_order": self.residual_order,
            "pruned": list(self.pruned),
            "generator_hash": self.generator_hash,
            "note": self.note,
        }


def _hash_generators(gens: Sequence[Generator]) -> str:
    h = hashlib.sha256()
    for g in gens:
        h.update(g.name.encode())
        h.update(str(g.weight).encode())
        for e, c in g.series.items():
            h.update(repr((e, format_gq(c))).encode())
        h.update(str(g.series.order).encode())
    return h.hexdigest()


def find_relation(targets: Sequence[tuple[str, Series]], generators: Sequence[Generator],
                  budget: WeightBudget | Caps, N: int | None = None, **meta) -> RelationCertificate:
    """Search for ``sum_j P_j target_j = R`` within the caps, exactly through degree ``N``.

    For exact polynomial inputs the default ``N`` is one more than the largest
    degree any budgeted product can reach, so the answer is unconditional.
    Otherwise ``N`` defaults to the smallest input order and may not exceed it.
    """
    if not targets:
        raise EmptyTargets("relation search needs at least one target")
    caps = budget.caps() if isinstance(budget, WeightBudget) else budget
    names = [t[0] for t in targets]
    tser = [t[1] for t in targets]
    nv = tser[0].nvars
    for s in tser + [g.series for g in generators]:
        if s.nvars != nv:
            raise DimMismatch("targets and generators must share one variable block")
    ghash = _hash_generators(generators)
    # zero generators add nothing; constant ones only rescale other monomials
    kept, pruned = [], []
    for g in generators:
        s = g.series
        if s.is_zero():
            pruned.append(f"{g.name}=0")
        elif s.degree() == 0:
            pruned.append(f"{g.name}={format_gq(s.constant_term())}")
        else:
            kept.append(g)
    Pmons = monomial_basis(kept, caps.wt_P, caps.rhw_P)
    Rmons = monomial_basis(kept, caps.wt_R, caps.rhw_R)
    input_order = min_order(*[s.order for s in tser], *[g.series.order for g in kept])
    all_exact = input_order is None
    policy_N = None
    if all_exact:
        maxP = _max_degree(kept, Pmons) + max(max(t.degree(), 0) for t in tser)
        maxR = _max_degree(kept, Rmons)
        policy_N = 1 + max(maxP, maxR)
    if N is None:
        N = policy_N if all_exact else input_order
    elif input_order is not None and N > input_order:
        raise OrderMismatch(f"requested order {N} exceeds the input truncation order {input_order}")
    exact = all_exact and N >= policy_N
    ev = _Evaluator(kept, N, nv)
    Pvals = [ev(m.exponents) for m in Pmons]
    Rvals = [ev(m.exponents) for m in Rmons]
    Pidx = _independent(Pvals)
    Ridx = _independent(Rvals)
    cols = []
    tcut = [t.truncate(N) for t in tser]
    for t in tcut:
        for i in Pidx:
            cols.append((t * Pvals[i]).truncate(N))
    for i in Ridx:
        cols.append(-Rvals[i])
    support = sorted({e for c in cols for e in c.terms})
    nP = len(tcut) * len(Pidx)
    common = dict(caps=caps, order=N, exact=exact, targets=names,
                  generators=[g.name for g in generators], pruned=pruned, generator_hash=ghash, **meta)
    if not support:
        basis = [[ONE if c == 0 else ZERO for c in range(len(cols))]] if cols else []
    else:
        M = ExactMatrix.from_rows([[c.coeff(e) for c in cols] for e in support], len(cols))
        basis = nullspace(M)
    chosen = next((v for v in basis if any(v[:nP])), None)
    if chosen is None:
        return RelationCertificate("NoneUpToCaps", **common)
    lead = next(c for c in chosen[:nP] if c)
    chosen = [c / lead for c in chosen]
    P = []
    for j in range(len(tcut)):
        block = chosen[j * len(Pidx):(j + 1) * len(Pidx)]
        P.append({Pmons[i].name(kept): c for i, c in zip(Pidx, block) if c})
    R = {Rmons[i].name(kept): c for i, c in zip(Ridx, chosen[nP:]) if c}
    # verify the identity through order N
    lhs = Series.zero(nv, N)
    for j, t in enumerate(tcut):
        for i, c in zip(Pidx, chosen[j * len(Pidx):(j + 1) * len(Pidx)]):
            if c:
                lhs = lhs + (t * Pvals[i]).scale(c)
    for i, c in zip(Ridx, chosen[nP:]):
        if c:
            lhs = lhs - Rvals[i].scale(c)
    if not lhs.truncate(N).is_zero():
        raise AssertionError("relation failed verification")
    return RelationCertificate("Found", P=P, R=R, residual_order=N, **common)


# ----------------------------------------------------------------------------
# generator sets
# ----------------------------------------------------------------------------
def _fmt(mi: Sequence[int]) -> str:
    return ",".join(str(x) for x in mi)


def rho_name(i: int, beta: Sequence[int], gamma: Sequence[int], d: int) -> str:
    comp = f"^{i + 1}" if d > 1 else ""
    return f"rho{comp}[z={_fmt(beta)};w={_fmt(gamma)}]"


def q_name(alpha: Sequence[int], i: int = 0, d: int = 1) -> str:
    comp = f"^{i + 1}" if d > 1 else ""
    return f"Q{comp}[z={_fmt(alpha)}]"


def rho_generators(table: DerivativeTable, k: int, i0: int | None = None) -> list[Generator]:
    """``rho^i_{z^beta w^gamma}`` with ``|beta|+|gamma| <= k`` and (``|beta| < k`` or ``i != i0``)."""
    n, d = table.n, table.d
    gens = []
    for tot in range(1, k + 1):
        for bg in multiindices(n + d, tot, tot):
            beta, gamma = bg[:n], bg[n:]
            for i in range(d):
                if sum(beta) == k and (d == 1 or i == i0):
                    continue
                wt = 2 * sum(beta) + sum(gamma) - 1
                gens.append(Generator(rho_name(i, beta, gamma, d), wt, table.entry(i, beta, gamma), wt == 0))
    return gens


def _check_alphas(alphas: Sequence[Sequence[int]], n: int, min_order_: int = 2) -> list[tuple]:
    out = []
    for a in alphas:
        a = tuple(int(x) for x in a)
        if len(a) != n:
            raise DimMismatch(f"multiindex {list(a)} should have length {n}")
        if sum(a) < min_order_:
            raise PreconditionError(f"multiindex {list(a)} has order below {min_order_}")
        out.append(a)
    return out


@dataclass
class Verdict:
    verdict: str
    unconditional: bool
    certificates: list

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "unconditional": self.unconditional,
            "certificates": [c.to_json() for c in self.certificates],
        }


def _rho_search(args):
    table, alphas, k, i0, caps, N = args
    d = table.d
    l = sum(1 for a in alphas if sum(a) <= k)
    K = [a for a in alphas if sum(a) == k]
    comp = 0 if i0 is None else i0
    targets = [(rho_name(comp, a, (0,) * d, d), table.entry(comp, a, (0,) * d)) for a in K]
    gens = rho_generators(table, k, i0)
    budget = WeightBudget(k, l) if caps is None else caps(k, l)
    return find_relation(targets, gens, budget, N, k=k, l=l, i0=i0)


def certify_nonembeddability(S: SurfaceSpec, m: int, alphas: Sequence[Sequence[int]], N: int | None = None,
                             caps=None, table: DerivativeTable | None = None) -> Verdict:
    """Run the relation search for every order ``k`` among the ``alphas`` (and every ``i0``).

    ``NotEmbeddable`` when no search finds a relation within the caps; for
    codimension ``d >= 2`` the same outcome is reported as
    ``NoRelationUpToCaps`` because no caps are known there.
    ``caps`` is an optional callable ``(k, l) -> Caps``.
    """
    alphas = _check_alphas(alphas, S.n)
    if m < 0:
        raise PreconditionError("m must be nonnegative")
    if len(alphas) != m + S.d:
        raise PreconditionError(f"need m + d = {m + S.d} multiindices, got {len(alphas)}")
    ks = sorted({sum(a) for a in alphas})
    if table is None:
        table = derivative_table(S, max(ks), N)
    jobs = []
    for k in ks:
        for i0 in ([None] if S.d == 1 else range(S.d)):
            jobs.append((table, alphas, k, i0, caps, N))
    certs = pmap(_rho_search, jobs)
    none_everywhere = all(not c.found for c in certs)
    unconditional = all(c.exact for c in certs)
    if none_everywhere:
        verdict = "NotEmbeddable" if S.d == 1 else "NoRelationUpToCaps"
    else:
        verdict = "Inconclusive"
    return Verdict(verdict, unconditional and none_everywhere, certs)


def q_generators(jets: dict, k: int, n: int, comp: int = 0, d: int = 1) -> list[Generator]:
    """``Q_{z^beta}`` for ``1 <= |beta| < k`` with weight ``2|beta| - 1``."""
    gens = []
    for beta in multiindices(n, k - 1, 1):
        gens.append(Generator(q_name(beta, comp, d), 2 * sum(beta) - 1, jets[beta][comp]))
    return gens


def q_jet_table(S: SurfaceSpec, kmax: int, table: DerivativeTable | None = None) -> dict:
    """``alpha -> [Q^i_{z^alpha}(0, zeta-bar)]`` computed from the derivative table."""
    if table is None:
        table = derivative_table(S, kmax)
    jets = {}
    for k in range(1, kmax + 1):
        forms = q_jets_tree(S, k, table)
        for alpha in multiindices(S.n, k, k):
            J = tuple(j for j, a in enumerate(alpha) for _ in range(a))
            jets[alpha] = [f.coeff(J) for f in forms]
    return jets


def q_relation(S: SurfaceSpec, alphas: Sequence[Sequence[int]], k: int | None = None, N: int | None = None,
               caps=None, jets: dict | None = None) -> RelationCertificate:
    """Relation among ``Q_{z^alpha}`` (``|alpha| = k``) over lower-order ``Q`` derivatives."""
    if not alphas:
        raise EmptyTargets("relation search needs at least one multiindex")
    alphas = _check_alphas(alphas, S.n)
    if S.d != 1:
        raise DimMismatch("Q-relations are implemented for codimension one")
    k = max(sum(a) for a in alphas) if k is None else k
    if jets is None:
        jets = q_jet_table(S, k)
    l = sum(1 for a in alphas if sum(a) <= k)
    K = [a for a in alphas if sum(a) == k]
    if not K:
        raise EmptyTargets(f"no multiindex of order {k}")
    budget = WeightBudget(k, l) if caps is None else caps(k, l)
    targets = [(q_name(a), jets[a][0]) for a in K]
    return find_relation(targets, q_generators(jets, k, S.n), budget, N, k=k, l=l)


def rho_relation(S: SurfaceSpec, alphas: Sequence[Sequence[int]], k: int | None = None, N: int | None = None,
                 caps=None, i0: int | None = None, table: DerivativeTable | None = None) -> RelationCertificate:
    if not alphas:
        raise EmptyTargets("relation search needs at least one multiindex")
    alphas = _check_alphas(alphas, S.n)
    k = max(sum(a) for a in alphas) if k is None else k
    if table is None:
        table = derivative_table(S, k, N)
    if S.d > 1 and i0 is None:
        i0 = 0
    if not any(sum(a) == k for a in alphas):
        raise EmptyTargets(f"no multiindex of order {k}")
    return _rho_search((table, alphas, k, i0, caps, N))


# ----------------------------------------------------------------------------
# degree growth certificate
# ----------------------------------------------------------------------------
@dataclass
class DegreeCertificate:
    k: int
    target_degree: int | None
    max_R_degree: int
    coarse_bound: Fraction
    certified: bool
    generator_degrees: dict

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "target_degree": self.target_degree,
            "max_R_degree": self.max_R_degree,
            "coarse_bound": str(self.coarse_bound),
            "coarse_bound_below_target": self.target_degree is not None and self.coarse_bound < self.target_degree,
            "certified": self.certified,
            "generator_degrees": dict(self.generator_degrees),
        }


def coarse_degree_bound(k: int) -> Fraction:
    """``(k+1)!/(2k-3) * ((2k-2)(k-1)+1)``."""
    return Fraction(factorial(k + 1), 2 * k - 3) * ((2 * k - 2) * (k - 1) + 1)


def _knapsack_max(items: Sequence[tuple[int, int]], cap: int) -> int:
    """Largest total value with total weight ``<= cap``; items are ``(weight >= 1, value)``, unbounded."""
    best = [0] * (cap + 1)
    for c in range(1, cap + 1):
        b = best[c - 1]
        for w, v in items:
            if w <= c and best[c - w] + v > b:
                b = best[c - w] + v
        best[c] = b
    return best[cap]


def degree_certificate(S: SurfaceSpec, k: int, table: DerivativeTable | None = None) -> DegreeCertificate:
    """Compare ``deg rho_{z^k}(0, zeta-bar)`` with the largest degree an ``R`` within the caps can reach.

    Uses ``l = k - 1`` (one multiindex of each order ``2..k``).
    """
    if S.n != 1 or S.d != 1:
        raise FamilyMismatch("degree certificates need n = d = 1")
    if k < 2:
        raise PreconditionError("k must be at least 2")
    if table is None:
        table = derivative_table(S, k)
    if not table.exact:
        raise FamilyMismatch("degree certificates need exact polynomial derivative data")
    target = table.entry(0, (k,), (0,))
    cap = WeightBudget(k, k - 1).cap_wt_R
    items, degs = [], {}
    for g in rho_generators(table, k):
        s = g.series
        if s.is_zero():
            continue
        degs[g.name] = s.degree()
        if g.weight > 0:
            items.append((g.weight, s.degree()))
        elif s.degree() > 0:
            raise FamilyMismatch("nonconstant weight-0 generator; degree count does not apply")
    mx = _knapsack_max(items, cap)
    if target.is_zero():
        # a zero target satisfies the trivial relation; nothing to certify
        return DegreeCertificate(k, None, mx, coarse_degree_bound(k), False, degs)
    tdeg = target.degree()
    # every P * target has degree >= deg target when P != 0 (one variable)
    return DegreeCertificate(k, tdeg, mx, coarse_degree_bound(k), tdeg > mx, degs)


# ----------------------------------------------------------------------------
# weighted invariants
# ----------------------------------------------------------------------------
@dataclass
class InvariantReport:
    per_k: dict
    witnesses: dict
    certificates: dict
    single_chart: bool = True

    @property
    def total(self) -> int:
        return sum(self.per_k.values())

    def to_json(self) -> dict:
        return {
            "per_k": {str(k): v for k, v in self.per_k.items()},
            "total": self.total,
            "min_hyperquadric_codim_gap": self.total,
            "single_chart": self.single_chart,
            "witnesses": {str(k): [list(a) for a in w] for k, w in self.witnesses.items()},
            "certificates": {str(k): [c.to_json() for c in cs] for k, cs in self.certificates.items()},
        }


def invariant_lower_bound(S: SurfaceSpec, kmax: int, N: int | None = None,
                          jets: dict | None = None) -> InvariantReport:
    """Weighted invariants at the given coordinates, ``k = 2..kmax``.

    For each ``k`` the largest subset of the order-``k`` derivatives
    ``Q_{z^alpha}`` admitting no relation within the inductive caps is
    found by exhaustive search (largest size first, lexicographic subsets).
    """
    if S.d != 1:
        raise DimMismatch("invariants are implemented for codimension one")
    if jets is None:
        jets = q_jet_table(S, kmax)
    per_k, witnesses, certs = {}, {}, {}
    previous = 0
    for k in range(2, kmax + 1):
        alphas = list(multiindices(S.n, k, k))
        best, wit, kc = 0, (), []
        for size in range(len(alphas), 0, -1):
            found_none = False
            for subset in combinations(alphas, size):
                caps = invariant_caps(k, previous, size)
                targets = [(q_name(a), jets[a][0]) for a in subset]
                cert = find_relation(targets, q_generators(jets, k, S.n), caps, N, k=k, l=previous + size)
                if not cert.found:
                    best, wit, kc = size, subset, [cert]
                    found_none = True
                    break
                kc = [cert]
            if found_none:
                break
        per_k[k] = best
        witnesses[k] = wit
        certs[k] = kc
        previous += best
    return InvariantReport(per_k, witnesses, certs)


# ----------------------------------------------------------------------------
# low-order obstructions on distinguished submanifolds
# ----------------------------------------------------------------------------
def low_order_obstruction(S: SurfaceSpec, I_set: Sequence[int], alphas: Sequence[Sequence[int]],
                          N: int | None = None) -> RelationCertificate:
    """Constants ``lambda_j`` (not all zero) and ``R_1`` affine in ``rho_{z_j}, rho_w`` with
    ``sum lambda_j rho_{z^alpha_j} = R_1`` on ``S_{0,V_I}``."""
    if S.d != 1:
        raise DimMismatch("low-order obstructions are implemented for codimension one")
    if not alphas:
        raise EmptyTargets("need at least one multiindex")
    alphas = _check_alphas(alphas, S.n)
    I_list = sorted(set(I_set))
    for a in alphas:
        if sum(a) != 2:
            raise PreconditionError(f"multiindex {list(a)} must have order 2")
        if any(x and j not in I_list for j, x in enumerate(a)):
            raise SupportViolation(f"support of {list(a)} is not inside I = {[j + 1 for j in I_list]}")
    n = S.n
    full = derivative_table(S, 2, N)
    for j in range(n):
        if full.entry(0, unit(n, j), (0,)).constant_term():
            raise PreconditionError("rho_z(0, 0) must vanish")
    table = restrict_distinguished(S, I_list, 2, full)
    targets = [(rho_name(0, a, (0,), 1), table.entry(0, a, (0,))) for a in alphas]
    # affine in every first-order derivative, rho_w included
    gens = [Generator(rho_name(0, unit(n, j), (0,), 1), 1, table.entry(0, unit(n, j), (0,))) for j in range(n)]
    gens.append(Generator(rho_name(0, (0,) * n, (1,), 1), 1, table.entry(0, (), (1,))))
    cert = find_relation(targets, gens, Caps(0, 1, 0, 0), N, k=2, l=len(alphas))
    cert.note = f"restricted to S_0,V_I with I={[j + 1 for j in I_list]}"
    return cert


def _check_form(S: SurfaceSpec):
    """``rho = -Im w + sum_s +-|z_s|^2 + (terms of degree >= 3 with |alpha|, |beta| >= 2 ...)``."""
    if S.d != 1:
        raise FormMismatch("the determinant criterion needs codimension one")
    b = S.blocks
    r = S.rho[0]
    for e, c in r.terms.items():
        deg = sum(e)
        if deg == 1:
            if e == b.exponent(w=(1,)) and c == GQ(0, 1) / 2:
                continue
            if e == b.exponent(tau=(1,)) and c == GQ(0, -1) / 2:
                continue
            raise FormMismatch("linear part is not -Im w")
        if deg == 2:
            zpart, chipart = e[:b.n], e[b.n + 1:2 * b.n + 1]
            if sum(zpart) == 1 and zpart == chipart and c in (ONE, -ONE):
                continue
            raise FormMismatch("quadratic part is not a diagonal form with entries +-1")
    for j in range(b.n):
        e = b.exponent(z=unit(b.n, j), chi=unit(b.n, j))
        if r.coeff(e) not in (ONE, -ONE):
            raise FormMismatch("quadratic part is degenerate")


def determinant_criterion(S: SurfaceSpec, alphas: Sequence[Sequence[int]],
                          betas: Sequence[Sequence[int]]) -> GQ:
    """``A = det(rho_{alpha_j 0 beta_k 0})``: coefficients of ``z^alpha_j zbar^beta_k`` in ``rho``."""
    if len(alphas) != len(betas) or not alphas:
        raise DimMismatch("need the same positive number of alphas and betas")
    alphas = [tuple(int(x) for x in a) for a in alphas]
    betas = [tuple(int(x) for x in b) for b in betas]
    n = S.n
    for a in alphas:
        if len(a) != n or sum(a) != 2:
            raise PreconditionError(f"alpha {list(a)} must have length {n} and order 2")
    for b in betas:
        if len(b) != n or sum(b) < 2:
            raise PreconditionError(f"beta {list(b)} must have length {n} and order >= 2")
    sa = {j for a in alphas for j, x in enumerate(a) if x}
    sb = {j for b in betas for j, x in enumerate(b) if x}
    if sa & sb:
        raise SupportOverlap(f"supports overlap in {sorted(j + 1 for j in sa & sb)}")
    _check_form(S)
    r = S.rho[0]
    rows = [[r.coeff(S.blocks.exponent(z=a, chi=b)) for b in betas] for a in alphas]
    return det(ExactMatrix.from_rows(rows))


# ----------------------------------------------------------------------------
# algebraic dependence
# ----------------------------------------------------------------------------
def algdep_scan(functions: Sequence[tuple[str, Series]] | Sequence[Series], D: int,
                N: int | None = None) -> RelationCertificate:
    """Nonzero polynomial ``P`` of total degree ``<= D`` with ``P(f_1, ..., f_r)`` vanishing through ``N``."""
    if not functions:
        raise EmptyInput("algdep needs at least one function")
    named = [f if isinstance(f, tuple) else (f"f{i + 1}", f) for i, f in enumerate(functions)]
    gens = [Generator(nm, 1, s) for nm, s in named]
    nv = gens[0].series.nvars
    for g in gens:
        if g.series.nvars != nv:
            raise DimMismatch("functions must share one variable block")
    mons = monomial_basis(gens, D, 0)
    input_order = min_order(*[g.series.order for g in gens])
    policy_N = None
    if input_order is None:
        policy_N = 1 + _max_degree(gens, mons)
    if N is None:
        N = policy_N if input_order is None else input_order
    elif input_order is not None and N > input_order:
        raise OrderMismatch(f"requested order {N} exceeds the input truncation order {input_order}")
    exact = input_order is None and N >= policy_N
    ev = _Evaluator(gens, N, nv)
    cols = [ev(m.exponents) for m in mons]
    support = sorted({e for c in cols for e in c.terms})
    caps = Caps(0, D, 0, 0)
    common = dict(caps=caps, order=N, exact=exact, targets=[], generators=[g.name for g in gens],
                  generator_hash=_hash_generators(gens), note=f"total degree <= {D}")
    M = ExactMatrix.from_rows([[c.coeff(e) for c in cols] for e in support], len(cols)) if support else None
    basis = nullspace(M) if M is not None else [[ONE if i == 0 else ZERO for i in range(len(cols))]]
    if not basis:
        cert = RelationCertificate("NoneUpToCaps", **common)
        cert.note += "; bounded degree only, unbounded-degree dependence is not excluded"
        return cert
    v = basis[0]
    lead = next(c for c in v if c)
    v = [c / lead for c in v]
    R = {m.name(gens): c for m, c in zip(mons, v) if c}
    return RelationCertificate("Found", R=R, residual_order=N, **common)
