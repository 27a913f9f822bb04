"""Segre graphs, derivative tables and jet transforms.

A surface is given by ``d`` defining series ``rho(z, w, chi, tau)`` where
``chi, tau`` stand for the conjugated coordinates.  Its Segre varieties are
the graphs ``w = Q(z, chi, tau)``.  Points of the Segre variety ``S_0`` are
parametrized by ``chi'`` (the conjugate of their ``z`` coordinate) with
``tau = Qbar(chi', 0)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import factorial, prod
from typing import Sequence

from .errors import (
    BadLinearPart,
    BlockMismatch,
    ConstantOrLinearTerm,
    DegenerateBlock,
    DimMismatch,
    NonUnitDetRhoW,
    NonUnitRhoW,
    OrderExhausted,
    PreconditionError,
    RealityViolation,
    SingularRhoW,
)
from .exactnum import GQ, I, ONE, ZERO, as_gq
from .multilinear import SymForm, counts, sorted_tuples
from .series import (
    Series,
    VarBlocks,
    compose,
    invert_map,
    min_order,
    multiindices,
    solve_implicit,
)
from .trees import q_jet_from_trees

HALF_I = I / 2  # -1/(2i)


def mfact(alpha: Sequence[int]) -> int:
    return prod(factorial(a) for a in alpha)


def unit(k: int, j: int) -> tuple:
    return tuple(1 if i == j else 0 for i in range(k))


def multiindex_of(J: Sequence[int], n: int) -> tuple:
    return tuple(counts(J, n))


# ----------------------------------------------------------------------------
# surfaces
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class RealTerm:
    """Coefficient of ``z^z zbar^zb (Re w)^u`` in component ``comp`` of ``r``."""

    coeff: GQ
    z: tuple
    zb: tuple
    u: tuple
    comp: int = 0

    @property
    def degree(self) -> int:
        return sum(self.z) + sum(self.zb) + sum(self.u)


@dataclass(frozen=True)
class ComplexTerm:
    """Coefficient of ``z^z w^w chi^chi tau^tau`` in component ``comp`` of ``rho``."""

    coeff: GQ
    z: tuple
    w: tuple
    chi: tuple
    tau: tuple
    comp: int = 0

    @property
    def degree(self) -> int:
        return sum(self.z) + sum(self.w) + sum(self.chi) + sum(self.tau)


@dataclass(frozen=True)
class SurfaceSpec:
    name: str
    blocks: VarBlocks
    rho: tuple
    order: int
    source_form: str = "complex"
    terms: tuple = ()
    exact: bool = True

    @property
    def n(self) -> int:
        return self.blocks.n

    @property
    def d(self) -> int:
        return self.blocks.d

    @property
    def nvars(self) -> int:
        return self.blocks.nvars

    def with_order(self, order: int) -> "SurfaceSpec":
        """Same data with a different truncation order."""
        if self.source_form == "real":
            return complexify(self.terms, self.n, self.d, order, self.name)
        return from_complex_terms(self.terms, self.n, self.d, order, self.name)

    def rho_w_at_origin(self) -> list[list[GQ]]:
        rows = []
        for r in self.rho:
            row = []
            for j in range(self.d):
                e = [0] * self.nvars
                e[self.blocks.w(j)] = 1
                row.append(r.coeff(e))
            rows.append(row)
        return rows


def _pad(v: Sequence[int], k: int, what: str) -> tuple:
    v = tuple(int(x) for x in v)
    if not v:
        return (0,) * k
    if len(v) != k:
        raise DimMismatch(f"{what} multiindex {list(v)} should have length {k}")
    if any(x < 0 for x in v):
        raise DimMismatch(f"{what} multiindex {list(v)} has a negative entry")
    return v


def complexify(real_terms: Sequence[RealTerm], n: int, d: int, order: int, name: str = "surface") -> SurfaceSpec:
    """Build ``rho = -(w - tau)/(2i) + r(z, chi, (w + tau)/2)`` from ``Im w = r``."""
    blocks = VarBlocks(n, d)
    terms = []
    table: dict = {}
    for t in real_terms:
        t = RealTerm(as_gq(t.coeff), _pad(t.z, n, "z"), _pad(t.zb, n, "zb"), _pad(t.u, d, "u"), t.comp)
        if not 0 <= t.comp < d:
            raise DimMismatch(f"component {t.comp + 1} out of range 1..{d}")
        if t.degree <= 1 and t.coeff:
            raise ConstantOrLinearTerm(
                f"r has a term of degree {t.degree} (z={list(t.z)}, zb={list(t.zb)}, u={list(t.u)})"
            )
        terms.append(t)
        key = (t.comp, t.z, t.zb, t.u)
        table[key] = table.get(key, ZERO) + t.coeff
    for (comp, a, b, s), c in table.items():
        if table.get((comp, b, a, s), ZERO) != c.conjugate():
            raise RealityViolation(comp + 1, a, b, s)
    exact = all(t.degree <= order for t in terms)
    series_order = None if exact else order
    nv = blocks.nvars
    rho = []
    for i in range(d):
        acc: dict = {}

        def add(e, c):
            e = tuple(e)
            acc[e] = acc.get(e, ZERO) + c

        add(blocks.exponent(w=unit(d, i)), HALF_I)
        add(blocks.exponent(tau=unit(d, i)), -HALF_I)
        for (comp, a, b, s), c in table.items():
            if comp != i or not c:
                continue
            if series_order is not None and sum(a) + sum(b) + sum(s) > series_order:
                continue
            # expand prod_j ((w_j + tau_j)/2)^{s_j}
            parts = [((), c)]
            for j, sj in enumerate(s):
                new = []
                for k in range(sj + 1):
                    binom = factorial(sj) // (factorial(k) * factorial(sj - k))
                    for ex, cc in parts:
                        new.append((ex + ((j, k, sj - k),), cc * binom / (2 ** sj)))
                parts = new
            for ex, cc in parts:
                w = [0] * d
                tau = [0] * d
                for j, k, rest in ex:
                    w[j] += k
                    tau[j] += rest
                add(blocks.exponent(z=a, w=w, chi=b, tau=tau), cc)
        rho.append(Series(nv, acc, series_order))
    return SurfaceSpec(name, blocks, tuple(rho), order, "real", tuple(terms), exact)


def from_complex_terms(cterms: Sequence[ComplexTerm], n: int, d: int, order: int,
                       name: str = "surface") -> SurfaceSpec:
    """Surface given directly by the coefficients of ``rho``."""
    blocks = VarBlocks(n, d)
    terms = []
    acc = [dict() for _ in range(d)]
    for t in cterms:
        t = ComplexTerm(as_gq(t.coeff), _pad(t.z, n, "z"), _pad(t.w, d, "w"), _pad(t.chi, n, "chi"),
                        _pad(t.tau, d, "tau"), t.comp)
        if not 0 <= t.comp < d:
            raise DimMismatch(f"component {t.comp + 1} out of range 1..{d}")
        if t.degree == 0 and t.coeff:
            raise ConstantOrLinearTerm("rho has a nonzero constant term")
        terms.append(t)
        e = blocks.exponent(t.z, t.w, t.chi, t.tau)
        acc[t.comp][e] = acc[t.comp].get(e, ZERO) + t.coeff
    exact = all(t.degree <= order for t in terms)
    rho = tuple(Series(blocks.nvars, a, None if exact else order) for a in acc)
    return SurfaceSpec(name, blocks, rho, order, "complex", tuple(terms), exact)


def quadric(n: int = 1, signs: Sequence[int] | None = None, order: int = 8) -> SurfaceSpec:
    """``Im w = sum_j +-|z_j|^2``."""
    signs = list(signs) if signs else [1] * n
    terms = [RealTerm(GQ(s), unit(n, j), unit(n, j), ()) for j, s in enumerate(signs)]
    return complexify(terms, n, 1, order, "quadric")


def _check_rho_w(S: SurfaceSpec):
    from .exactnum import ExactMatrix, det
    W = S.rho_w_at_origin()
    if not det(ExactMatrix.from_rows(W)):
        raise SingularRhoW("rho_w(0) is not invertible")


# ----------------------------------------------------------------------------
# implicit solves
# ----------------------------------------------------------------------------
def segre_solve(S: SurfaceSpec, order: int | None = None) -> list[Series]:
    """``Q(z, chi, tau)`` with ``rho(z, Q, chi, tau) = 0``, in the ring of ``S`` (no ``w``)."""
    _check_rho_w(S)
    N = order if order is not None else S.order
    rho = [r.truncate(N) if not S.exact else r for r in S.rho]
    w = list(S.blocks.w_vars)
    return solve_implicit(rho, w, order=N, singular_error=SingularRhoW)


def s0_parametrization(S: SurfaceSpec, order: int | None = None) -> list[Series]:
    """``tau = Qbar(chi', 0)`` as series in the ``n`` parameters ``chi'``."""
    _check_rho_w(S)
    b = S.blocks
    N = order if order is not None else S.order
    conj_vars = list(b.chi_vars) + list(b.tau_vars)
    at0 = [r.set_zero(conj_vars) for r in S.rho]
    ser_order = None if S.exact else N
    if all(r.set_zero(b.w_vars).is_zero() for r in at0):
        # w = 0 already solves rho(z, w, 0, 0) = 0
        return [Series.zero(b.n, ser_order) for _ in range(b.d)]
    Q0 = solve_implicit([r.truncate(N) for r in at0], list(b.w_vars), order=N, singular_error=SingularRhoW)
    out = []
    for q in Q0:
        q = q.conjugate()
        out.append(q.project(list(b.z_vars)))
    return out


def segre_graph_on_s0(S: SurfaceSpec, order: int | None = None) -> list[Series]:
    """``Q(z, chi', Qbar(chi', 0))`` in the ring ``(z_1..z_n, chi'_1..chi'_n)``."""
    b = S.blocks
    N = order if order is not None else S.order
    tau = s0_parametrization(S, N)
    n, d = b.n, b.d
    nv = 2 * n + d  # (z, w, chi')
    images = [Series.var(nv, j) for j in range(n)]
    images += [Series.var(nv, n + j) for j in range(d)]
    images += [Series.var(nv, n + d + j) for j in range(n)]
    images += [t.embed(nv, [n + d + j for j in range(n)]) for t in tau]
    eqs = [compose(r, images, order=N, nvars=nv) for r in S.rho]
    Q = solve_implicit(eqs, [n + j for j in range(d)], order=N, singular_error=SingularRhoW)
    keep = list(range(n)) + [n + d + j for j in range(n)]
    return [q.project(keep) for q in Q]


def z_jets(graph: Sequence[Series], n: int, kmax: int, kmin: int = 1) -> dict:
    """``alpha -> [alpha! * coefficient of z^alpha]`` for series in ``(z, params)``."""
    out = {}
    for alpha in multiindices(n, kmax, kmin):
        comps = []
        for g in graph:
            p = g.nvars - n
            terms = {}
            for e, c in g.terms.items():
                if e[:n] == alpha:
                    terms[e[n:]] = c * mfact(alpha)
            o = None if g.order is None else g.order - sum(alpha)
            if o is not None and o < 0:
                raise OrderExhausted(f"jet of order {sum(alpha)} exceeds truncation order {g.order}")
            comps.append(Series(p, terms, o))
        out[alpha] = comps
    return out


def q_jets_oracle(S: SurfaceSpec, kmax: int, order: int | None = None) -> dict:
    """Jets ``Q_{z^alpha}(0, zeta-bar)`` on ``S_0`` from the fixed-point solve."""
    return z_jets(segre_graph_on_s0(S, order), S.n, kmax)


def jets_as_forms(jets: dict, k: int, n: int, ncomp: int) -> list[SymForm]:
    forms = []
    for i in range(ncomp):
        coeffs = {J: jets[multiindex_of(J, n)][i] for J in sorted_tuples(n, k)}
        nv = next(iter(coeffs.values())).nvars
        forms.append(SymForm(k, n, coeffs, nv))
    return forms


# ----------------------------------------------------------------------------
# derivative tables
# ----------------------------------------------------------------------------
@dataclass
class DerivativeTable:
    """``rho^i_{z^beta w^gamma}(0, 0, chi', tau(chi'))`` for ``|beta| + |gamma| <= kmax``."""

    blocks: VarBlocks
    kmax: int
    order: int
    exact: bool
    entries: dict
    restriction: tuple = ("S0",)
    solution: tuple = ()
    _inv_cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.blocks.n

    @property
    def d(self) -> int:
        return self.blocks.d

    def entry(self, i: int, beta: Sequence[int], gamma: Sequence[int]) -> Series:
        beta = _pad(beta, self.n, "z")
        gamma = _pad(gamma, self.d, "w")
        key = (i, beta, gamma)
        if key not in self.entries:
            if sum(beta) + sum(gamma) > self.kmax:
                raise OrderExhausted(
                    f"table holds derivatives up to order {self.kmax}, asked for {sum(beta) + sum(gamma)}"
                )
            raise KeyError(key)
        return self.entries[key]

    @staticmethod
    def weight(beta: Sequence[int], gamma: Sequence[int]) -> int:
        return 2 * sum(beta) + sum(gamma) - 1

    def keys(self):
        return sorted(self.entries, key=lambda k: (sum(k[1]) + sum(k[2]), k[0], tuple(-x for x in k[1]), k[2]))

    def rho_w(self) -> list[list[Series]]:
        return [[self.entry(i, (), unit(self.d, j)) for j in range(self.d)] for i in range(self.d)]

    def form(self, s: int, l: int, comp: int = 0) -> SymForm:
        """``rho_{z^s w^l}`` as a symmetric ``s``-form (codimension one)."""
        gamma = (l,) if self.d == 1 else None
        if gamma is None:
            raise DimMismatch("form(s, l) is defined for codimension one")
        coeffs = {J: self.entry(comp, multiindex_of(J, self.n), gamma) for J in sorted_tuples(self.n, s)}
        return SymForm(s, self.n, coeffs, self.n)

    def working_order(self) -> int:
        return self.order - 1

    def neg_rho_w_inverse(self) -> Series | None:
        if "inv" not in self._inv_cache:
            rw = self.entry(0, (), (1,))
            if not rw.constant_term():
                self._inv_cache["inv"] = None
            else:
                o = None if rw.degree() <= 0 else (rw.order if rw.order is not None else self.working_order())
                self._inv_cache["inv"] = (-rw).inverse(o)
        return self._inv_cache["inv"]

    def det_rho_w(self) -> Series:
        return det_series(self.rho_w())

    def substitute_params(self, images: Sequence[Series | None], restriction: tuple,
                          solution: tuple = ()) -> "DerivativeTable":
        entries = {k: compose(v, images, nvars=self.n) for k, v in self.entries.items()}
        exact = self.exact and all(v.order is None for v in entries.values())
        return DerivativeTable(self.blocks, self.kmax, self.order, exact, entries, restriction, solution)


def _slice(r: Series, blocks: VarBlocks, beta: tuple, gamma: tuple) -> Series:
    """The derivative at ``z = w = 0`` as a series in ``(chi, tau)``."""
    n, d = blocks.n, blocks.d
    head = beta + gamma
    f = mfact(beta) * mfact(gamma)
    terms = {}
    for e, c in r.terms.items():
        if e[:n + d] == head:
            terms[e[n + d:]] = c * f
    o = None if r.order is None else r.order - sum(head)
    return Series(n + d, terms, o)


def derivative_table(S: SurfaceSpec, kmax: int, order: int | None = None) -> DerivativeTable:
    b = S.blocks
    N = order if order is not None else S.order
    if not S.exact and kmax > N - 1:
        raise OrderExhausted(f"kmax={kmax} needs truncation order at least {kmax + 1}, have {N}")
    rho = S.rho if S.exact else [r.truncate(N) for r in S.rho]
    tau = s0_parametrization(S, N)
    n, d = b.n, b.d
    images = [Series.var(n, j) for j in range(n)] + list(tau)
    entries = {}
    for i in range(d):
        for tot in range(0, kmax + 1):
            for bg in multiindices(n + d, tot, tot):
                beta, gamma = bg[:n], bg[n:]
                if tot == 0:
                    continue
                sl = _slice(rho[i], b, beta, gamma)
                entries[(i, beta, gamma)] = compose(sl, images, nvars=n)
    exact = S.exact and all(v.order is None for v in entries.values())
    return DerivativeTable(b, kmax, N, exact, entries)


def restrict_distinguished(S: SurfaceSpec, I_set: Sequence[int], kmax: int,
                           table: DerivativeTable | None = None, order: int | None = None) -> DerivativeTable:
    """Table on ``S_{0,V_I}``: solve ``Q_{z_j}(0, zeta-bar) = Q_{z_j}(0, 0)`` for ``chi'_j``, ``j in I``.

    The equations are used in the polynomial form
    ``rho_{z_j} + c_j rho_w = 0`` with ``c_j = -rho_{z_j}(0) / rho_w(0)``.
    """
    if S.d != 1:
        raise DimMismatch("distinguished submanifolds are implemented for codimension one")
    n = S.n
    I_list = sorted(set(int(j) for j in I_set))
    if any(not 0 <= j < n for j in I_list):
        raise DimMismatch(f"index set {[j + 1 for j in I_list]} not inside 1..{n}")
    if len(I_list) == n:
        raise PreconditionError("I must be a proper subset of {1..n}")
    if table is None:
        table = derivative_table(S, max(kmax, 1), order)
    if not I_list:
        return DerivativeTable(table.blocks, table.kmax, table.order, table.exact, dict(table.entries),
                               ("S0_VI", ()), ())
    rw = table.entry(0, (), (1,))
    rw0 = rw.constant_term()
    eqs = []
    for j in I_list:
        rz = table.entry(0, unit(n, j), (0,))
        c = -rz.constant_term() / rw0
        eqs.append(rz + rw.scale(c))
    o = min_order(*[e.order for e in eqs])
    if o is None and not all(_affine_const(e, I_list) for e in eqs):
        o = table.working_order()
    sol = solve_implicit(eqs, I_list, order=o, singular_error=DegenerateBlock)
    images: list = [None] * n
    for j, s in zip(I_list, sol):
        images[j] = s
    return table.substitute_params(images, ("S0_VI", tuple(I_list)), tuple(sol))


def _affine_const(e: Series, unknowns: Sequence[int]) -> bool:
    for ex in e.terms:
        ud = sum(ex[i] for i in unknowns)
        if ud > 1 or (ud == 1 and sum(ex) > 1):
            return False
    return True


# ----------------------------------------------------------------------------
# Q jets from rho jets
# ----------------------------------------------------------------------------
def det_series(M: Sequence[Sequence[Series]]) -> Series:
    """Determinant by cofactor expansion (entries in any commutative ring of series)."""
    k = len(M)
    if k == 1:
        return M[0][0]
    total = None
    for j in range(k):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * det_series(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def adjugate(M: Sequence[Sequence[Series]]) -> list[list[Series]]:
    k = len(M)
    if k == 1:
        return [[M[0][0] * 0 + 1]]
    adj = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            minor = [row[:j] + row[j + 1:] for r, row in enumerate(M) if r != i]
            c = det_series(minor)
            adj[j][i] = -c if (i + j) % 2 else c
    return adj


def _zpoly_mul(a: dict, b: dict, maxdeg: int) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        da = sum(ea)
        for eb, cb in b.items():
            if da + sum(eb) > maxdeg:
                continue
            e = tuple(x + y for x, y in zip(ea, eb))
            v = ca * cb
            out[e] = out[e] + v if e in out else v
    return out


def jet_numerators(entry, n: int, d: int, kmax: int):
    """Numerators ``N^i_alpha`` with ``Q^i_{z^alpha} = N^i_alpha / det(rho_w)^(2|alpha|-1)``.

    ``entry(i, beta, gamma)`` returns ring elements (series).  Differentiating
    ``rho(z, Q(z)) = 0`` and clearing ``rho_w^{-1} = adj / det`` gives a
    recursion over ``|alpha|`` whose only division is by ``det``.
    Returns ``(det, adj, {alpha: [N^1_alpha, ..., N^d_alpha]})``.
    """
    W = [[entry(i, (0,) * n, unit(d, j)) for j in range(d)] for i in range(d)]
    D = det_series(W)
    A = adjugate(W)
    zero = D * 0
    Dpow = [zero + 1]
    nums: dict = {}
    q = [dict() for _ in range(d)]  # q[j][alpha'] = N^j_alpha' / alpha'!
    for m in range(1, kmax + 1):
        while len(Dpow) <= 2 * m:
            Dpow.append(Dpow[-1] * D)
        gammas = [g for g in multiindices(d, m) if sum(g) >= 1]
        products = {}
        for g in gammas:
            P = {(0,) * n: zero + 1}
            for j, gj in enumerate(g):
                for _ in range(gj):
                    P = _zpoly_mul(P, q[j], m)
            products[g] = P
        products[(0,) * d] = {(0,) * n: zero + 1}
        new = {}
        for alpha in multiindices(n, m, m):
            bracket = [zero for _ in range(d)]
            for beta in multiindices(n, m):
                if any(b > a for b, a in zip(beta, alpha)):
                    continue
                rest = tuple(a - b for a, b in zip(alpha, beta))
                for g, P in products.items():
                    if sum(beta) == 0 and sum(g) <= 1:
                        continue
                    if sum(beta) + sum(g) > m or (sum(rest) > 0 and sum(g) == 0) or (sum(rest) == 0 and sum(g) > 0):
                        continue
                    coeff = P.get(rest)
                    if coeff is None:
                        continue
                    scale = ONE / (mfact(beta) * mfact(g))
                    lift = Dpow[2 * sum(beta) + sum(g) - 2]
                    for i in range(d):
                        e = entry(i, beta, g)
                        if e.is_zero():
                            continue
                        bracket[i] = bracket[i] + (e * coeff * lift).scale(scale)
            Nalpha = []
            for i in range(d):
                acc = zero
                for j in range(d):
                    acc = acc + A[i][j] * bracket[j]
                Nalpha.append(acc.scale(-mfact(alpha)))
            nums[alpha] = Nalpha
            new[alpha] = Nalpha
        for alpha, Nalpha in new.items():
            for j in range(d):
                q[j][alpha] = Nalpha[j].scale(ONE / mfact(alpha))
    return D, A, nums


def q_jets_recursive(table: DerivativeTable, kmax: int) -> dict:
    """``alpha -> [Q^i_{z^alpha}(0, zeta-bar)]`` from the numerator recursion."""
    D, _, nums = jet_numerators(lambda i, b, g: table.entry(i, b, g), table.n, table.d, kmax)
    if not D.constant_term():
        raise (NonUnitRhoW if table.d == 1 else NonUnitDetRhoW)("det rho_w(0, zeta-bar) has zero constant term")
    o = D.order if D.order is not None else table.working_order()
    Dinv = D.inverse(None if D.degree() <= 0 else o)
    out = {}
    powers = {}
    for alpha, Nalpha in nums.items():
        e = 2 * sum(alpha) - 1
        if e not in powers:
            powers[e] = Dinv ** e
        out[alpha] = [x * powers[e] for x in Nalpha]
    return out


def q_jets_tree(S: SurfaceSpec, k: int, table: DerivativeTable | None = None,
                order: int | None = None) -> list[SymForm]:
    """``Q_{z^k}(0, zeta-bar)`` per component as symmetric ``k``-forms.

    Codimension one uses the marked-tree sum; higher codimension uses the
    recursion with ``det(rho_w)`` denominators.
    """
    if table is None:
        table = derivative_table(S, k, order)
    if table.d == 1:
        if table.neg_rho_w_inverse() is None:
            raise NonUnitRhoW("rho_w(0, zeta-bar) has zero constant term")
        return [q_jet_from_trees(k, table)]
    jets = q_jets_recursive(table, k)
    return jets_as_forms(jets, k, table.n, table.d)


# --- symbolic structure check ----------------------------------------------
@dataclass
class SymbolicTable:
    """Derivative symbols ``rho^i_{z^beta w^gamma}`` as variables of a polynomial ring."""

    n: int
    d: int
    kmax: int

    @cached_property
    def symbols(self) -> list[tuple]:
        out = []
        for i in range(self.d):
            for bg in multiindices(self.n + self.d, self.kmax, 1):
                out.append((i, bg[:self.n], bg[self.n:]))
        return out

    @cached_property
    def index(self) -> dict:
        return {s: k for k, s in enumerate(self.symbols)}

    def entry(self, i, beta, gamma) -> Series:
        key = (i, tuple(beta), tuple(gamma))
        return Series.var(len(self.symbols), self.index[key])


@dataclass
class HeadTermReport:
    alpha: tuple
    exponent: int
    top_symbols_absent: bool
    symbols_within_order: bool
    matches_oracle: bool | None = None

    @property
    def ok(self) -> bool:
        return self.top_symbols_absent and self.symbols_within_order and self.matches_oracle is not False


def head_term_structure(n: int, d: int, k: int) -> tuple[SymbolicTable, Series, list, dict]:
    """Symbolic remainders ``R^i_alpha = N^i_alpha + (adj rho_{z^alpha})_i det^(2k-2)``, ``|alpha| = k``.

    ``Q_alpha + rho_w^{-1} rho_{z^alpha} = R_alpha / det^(2k-1)``.
    """
    T = SymbolicTable(n, d, k)
    D, A, nums = jet_numerators(T.entry, n, d, k)
    Dk = D ** (2 * k - 2)
    rem = {}
    for alpha in multiindices(n, k, k):
        r = []
        for i in range(d):
            head = None
            for j in range(d):
                t = A[i][j] * T.entry(j, alpha, (0,) * d)
                head = t if head is None else head + t
            r.append(nums[alpha][i] + head * Dk)
        rem[alpha] = r
    return T, D, A, rem


def check_head_terms(S: SurfaceSpec, k: int, table: DerivativeTable | None = None,
                     oracle: dict | None = None) -> list[HeadTermReport]:
    """Verify the head-term structure of ``Q_{z^alpha}``, ``|alpha| = k``, on a surface."""
    n, d = S.n, S.d
    if table is None:
        table = derivative_table(S, k)
    if oracle is None:
        oracle = q_jets_oracle(S, k, table.order)
    T, Dsym, _, rem = head_term_structure(n, d, k)
    images = [table.entry(*s) for s in T.symbols]
    D = table.det_rho_w()
    if not D.constant_term():
        raise NonUnitDetRhoW("det rho_w(0, zeta-bar) has zero constant term")
    o = table.working_order()
    Dinv = D.inverse(None if D.degree() <= 0 else (D.order if D.order is not None else o))
    W = table.rho_w()
    Winv = _series_matrix_inverse(W, Dinv)
    reports = []
    for alpha, r in rem.items():
        top = {T.index[(i, alpha, (0,) * d)] for i in range(d)}
        used = set()
        for poly in r:
            for e in poly.terms:
                used.update(v for v, x in enumerate(e) if x)
        top_absent = not (used & top)
        within = all(sum(T.symbols[v][1]) + sum(T.symbols[v][2]) <= k and sum(T.symbols[v][1]) < k
                     for v in used)
        e = 2 * k - 1
        match = True
        for i in range(d):
            val = compose(r[i], images, nvars=n) * Dinv ** e
            head = None
            for j in range(d):
                t = Winv[i][j] * table.entry(j, alpha, (0,) * d)
                head = t if head is None else head + t
            lhs = oracle[alpha][i] + head
            if not lhs.agrees(val):
                match = False
        reports.append(HeadTermReport(alpha, e, top_absent, within, match))
    return reports


def _series_matrix_inverse(W, Dinv: Series):
    adj = adjugate(W)
    return [[a * Dinv for a in row] for row in adj]


# ----------------------------------------------------------------------------
# maps and jet transforms
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class MapSpec:
    """``H = (F, G)`` in the ring ``(z_1..z_n, w_1..w_d)``; ``F`` has ``n`` and ``G`` has ``m + d`` components."""

    F: tuple
    G: tuple
    n: int
    d: int

    @property
    def m(self) -> int:
        return len(self.G) - self.d

    @property
    def nvars(self) -> int:
        return self.n + self.d

    def check(self, require_G_z_zero: bool = False):
        nv = self.nvars
        for f in self.F + self.G:
            if f.nvars != nv:
                raise BlockMismatch("map components must live in the (z, w) ring")
            if f.constant_term():
                raise BadLinearPart("H(0) != 0")
        for i, f in enumerate(self.F):
            for j in range(nv):
                c = f.coeff(unit(nv, j))
                if c != (ONE if j == i else ZERO):
                    raise BadLinearPart("F_z(0) must be the identity and F_w(0) must vanish")
        if require_G_z_zero:
            for g in self.G:
                for j in range(self.n):
                    if g.coeff(unit(nv, j)):
                        raise BadLinearPart("G_z(0) must vanish")

    def G_w0(self) -> list[list[GQ]]:
        nv = self.nvars
        return [[g.coeff(unit(nv, self.n + j)) for j in range(self.d)] for g in self.G]

    @classmethod
    def identity(cls, n: int, d: int) -> "MapSpec":
        nv = n + d
        return cls(tuple(Series.var(nv, j) for j in range(n)), tuple(Series.var(nv, n + j) for j in range(d)), n, d)


def transform_graph_jets(H: MapSpec, Q: Sequence[Series], kmax: int) -> dict:
    """Jets at ``z' = 0`` of the graph ``w' = Q'(z', t)`` of ``H(z, Q(z, t))``.

    ``Q`` lives in the ring ``(z_1..z_n, t_1..t_p)`` and vanishes at ``z = 0``.
    """
    H.check()
    n, d = H.n, H.d
    if len(Q) != d:
        raise DimMismatch("Q must have one component per w variable")
    nv = Q[0].nvars
    Z = [Series.var(nv, j) for j in range(n)]
    for q in Q:
        if any(sum(e[:n]) == 0 for e in q.terms):
            raise PreconditionError("Q(0, t) must vanish")
    Fz = [compose(f, Z + list(Q), nvars=nv) for f in H.F]
    Phi = invert_map(Fz, nmap=n)
    params: list = [None] * (nv - n)
    Qc = [compose(q, list(Phi) + params, nvars=nv) for q in Q]
    Gv = [compose(g, list(Phi) + Qc, nvars=nv) for g in H.G]
    return z_jets(Gv, n, kmax)


def transform_jets(H: MapSpec, S: SurfaceSpec, kmax: int, order: int | None = None,
                   graph: Sequence[Series] | None = None) -> dict:
    """``Q'_{z'^alpha}(0, zeta-bar)`` for the image of the Segre family of ``S``."""
    if H.n != S.n or H.d != S.d:
        raise DimMismatch("map and surface dimensions differ")
    if graph is None:
        graph = segre_graph_on_s0(S, order)
    return transform_graph_jets(H, graph, kmax)


def conjugate_map_component(f: Series, n: int, d: int, nv_target: int, chi_pos: Sequence[int],
                            tau_pos: Sequence[int]) -> Series:
    """``fbar(chi, tau)``: conjugate coefficients and move ``(z, w)`` onto ``(chi, tau)``."""
    return f.conjugate().embed(nv_target, list(chi_pos) + list(tau_pos))


def image_residual(H: MapSpec, S: SurfaceSpec, target: SurfaceSpec, order: int | None = None) -> list[Series]:
    """``rho'(H(z, Q), Hbar(chi, tau))`` on the complexified Segre family of ``S``.

    The target coordinates are the concatenation ``(F, G)``, read as the
    target's ``(z'', w'')`` blocks.  Vanishing means ``H(M)`` lies in the target.
    """
    H.check()
    b = S.blocks
    tb = target.blocks
    if tb.n + tb.d != H.n + H.m + H.d:
        raise DimMismatch("target dimension does not match the map")
    N = order if order is not None else S.order
    Q = segre_solve(S, N)
    nv = b.nvars
    Z = [Series.var(nv, b.z(j)) for j in range(b.n)]
    HZ = [compose(h, Z + list(Q), nvars=nv) for h in H.F + H.G]
    Hbar = [conjugate_map_component(h, b.n, b.d, nv, list(b.chi_vars), list(b.tau_vars)) for h in H.F + H.G]
    images = HZ + Hbar
    res = []
    for r in target.rho:
        val = compose(r, images, order=N, nvars=nv)
        res.append(val.truncate(N))
    return res


def graph_restricted(S: SurfaceSpec, table: DerivativeTable, graph: Sequence[Series] | None = None) -> list[Series]:
    """Segre graph over ``S_{0,V_I}`` by substituting the solved parameters."""
    if graph is None:
        graph = segre_graph_on_s0(S, table.order)
    n = S.n
    I_list = table.restriction[1] if len(table.restriction) > 1 else ()
    if not I_list:
        return list(graph)
    nv = 2 * n
    images: list = [None] * nv
    for j, s in zip(I_list, table.solution):
        images[n + j] = s.embed(nv, [n + t for t in range(n)])
    return [compose(g, images, nvars=nv) for g in graph]


def affine_fit(target: Series, basis: Sequence[Series], upto: int | None = None):
    """Constants ``c_0, c_1, ...`` with ``target = c_0 + sum c_j basis_j`` through degree ``upto``.

    Returns the coefficient list, or ``None`` when no exact fit exists.
    """
    from .exactnum import ExactMatrix, nullspace
    nv = target.nvars
    funcs = [Series.const(nv, ONE)] + list(basis)
    if upto is None:
        upto = min_order(target.order, *[f.order for f in funcs])
    funcs = [f.truncate(upto) for f in funcs]
    tgt = target.truncate(upto)
    support = set(tgt.terms)
    for f in funcs:
        support |= set(f.terms)
    support = sorted(support)
    rows = [[f.coeff(e) for f in funcs] + [-tgt.coeff(e)] for e in support]
    if not rows:
        return [ZERO] * len(funcs)
    M = ExactMatrix.from_rows(rows)
    for v in nullspace(M):
        if v[-1]:
            return [x / v[-1] for x in v[:-1]]
    return None
