"""Symmetric multilinear forms with series coefficients.

A symmetric ``d``-linear form on ``C^n`` is stored by its values on sorted
tuples of basis indices (0-based).  Coefficients are :class:`Series` in a
fixed ring of ``nvars`` variables; ``nvars = 0`` gives plain numbers.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from math import comb, factorial
from typing import Iterator, Mapping, Sequence

from .errors import DimMismatch, PreconditionError, TooManyMaps
from .exactnum import ONE, as_gq
from .series import Series, min_order


def sorted_tuples(dim: int, degree: int) -> Iterator[tuple]:
    """All sorted index tuples ``j_1 <= ... <= j_d`` over ``range(dim)``."""
    return combinations_with_replacement(range(dim), degree)


def counts(J: Sequence[int], dim: int) -> list[int]:
    m = [0] * dim
    for j in J:
        m[j] += 1
    return m


def multinomial(total_counts: Sequence[int], parts: Sequence[Sequence[int]]) -> int:
    """Number of ways to split labelled slots with the given per-index counts."""
    out = 1
    for i, t in enumerate(total_counts):
        num = factorial(t)
        for p in parts:
            num //= factorial(p[i])
        out *= num
    return out


def _from_counts(m: Sequence[int]) -> tuple:
    return tuple(j for j, c in enumerate(m) for _ in range(c))


def sub_multisets(m: Sequence[int], size: int) -> Iterator[tuple[list[int], list[int]]]:
    """Pairs (chosen counts, remaining counts) with ``sum(chosen) == size``."""
    n = len(m)

    def rec(i: int, left: int, chosen: list[int]):
        if i == n:
            if left == 0:
                yield list(chosen), [a - b for a, b in zip(m, chosen)]
            return
        for c in range(min(m[i], left), -1, -1):
            chosen.append(c)
            yield from rec(i + 1, left - c, chosen)
            chosen.pop()

    yield from rec(0, size, [])


@dataclass(frozen=True)
class SymForm:
    degree: int
    dim: int
    coeffs: Mapping[tuple, Series] = field(default_factory=dict)
    nvars: int = 0

    def __post_init__(self):
        clean = {}
        for J, c in self.coeffs.items():
            J = tuple(sorted(J))
            if len(J) != self.degree or any(not 0 <= j < self.dim for j in J):
                raise DimMismatch(f"index tuple {J} invalid for a {self.degree}-form on C^{self.dim}")
            if not isinstance(c, Series):
                c = Series.const(self.nvars, c)
            if c.nvars != self.nvars:
                raise DimMismatch("coefficient ring mismatch")
            if J in clean:
                c = clean[J] + c
            clean[J] = c
        object.__setattr__(self, "coeffs", {J: c for J, c in clean.items() if not c.is_zero()})
        object.__setattr__(self, "_orders", tuple(c.order for c in clean.values()))

    @classmethod
    def scalar(cls, c, dim: int, nvars: int = 0) -> "SymForm":
        if not isinstance(c, Series):
            c = Series.const(nvars, c)
        return cls(0, dim, {(): c}, c.nvars)

    @classmethod
    def from_function(cls, degree: int, dim: int, f, nvars: int = 0) -> "SymForm":
        return cls(degree, dim, {J: f(J) for J in sorted_tuples(dim, degree)}, nvars)

    @property
    def order(self) -> int | None:
        """Smallest truncation order among all coefficients, zero ones included."""
        return min_order(*self._orders)

    def coeff(self, J: Sequence[int]) -> Series:
        J = tuple(sorted(J))
        c = self.coeffs.get(J)
        if c is None:
            return Series.zero(self.nvars, self.order)
        return c

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "SymForm") -> "SymForm":
        _compatible(self, other)
        if self.degree != other.degree:
            raise DimMismatch("cannot add forms of different degree")
        out = dict(self.coeffs)
        for J, c in other.coeffs.items():
            out[J] = out[J] + c if J in out else c
        order = min_order(self.order, other.order)
        return SymForm(self.degree, self.dim, {J: c.truncate(order) for J, c in out.items()}, self.nvars)

    def __neg__(self) -> "SymForm":
        return SymForm(self.degree, self.dim, {J: -c for J, c in self.coeffs.items()}, self.nvars)

    def __sub__(self, other: "SymForm") -> "SymForm":
        return self + (-other)

    def scale(self, s) -> "SymForm":
        """Multiply every coefficient by a number or a series of the coefficient ring."""
        if isinstance(s, Series):
            return SymForm(self.degree, self.dim, {J: c * s for J, c in self.coeffs.items()}, self.nvars)
        s = as_gq(s)
        return SymForm(self.degree, self.dim, {J: c.scale(s) for J, c in self.coeffs.items()}, self.nvars)

    def truncate(self, order: int | None) -> "SymForm":
        return SymForm(self.degree, self.dim, {J: c.truncate(order) for J, c in self.coeffs.items()}, self.nvars)

    def agrees(self, other: "SymForm", upto: int | None = None) -> bool:
        _compatible(self, other)
        if self.degree != other.degree:
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self.coeff(J).agrees(other.coeff(J), upto) for J in keys)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymForm):
            return NotImplemented
        return (self.degree, self.dim, self.nvars) == (other.degree, other.dim, other.nvars) and \
            {J: c.terms for J, c in self.coeffs.items()} == {J: c.terms for J, c in other.coeffs.items()}

    def __hash__(self):
        return hash((self.degree, self.dim, self.nvars, frozenset(self.coeffs)))

    def evaluate(self, vectors: Sequence[Sequence]) -> Series:
        """``p(v_1, ..., v_d)`` by full multilinear expansion (brute force)."""
        if len(vectors) != self.degree:
            raise DimMismatch(f"{self.degree}-form needs {self.degree} arguments")
        vecs = [[as_gq(x) if not isinstance(x, Series) else x for x in v] for v in vectors]
        total = Series.zero(self.nvars, self.order)
        for idx in product(range(self.dim), repeat=self.degree):
            c = self.coeffs.get(tuple(sorted(idx)))
            if c is None:
                continue
            term = c
            for v, j in zip(vecs, idx):
                x = v[j]
                term = term * x if isinstance(x, Series) else term.scale(x)
                if term.is_zero():
                    break
            total = total + term
        return total

    def is_symmetric_under(self, perm_check: int = 0) -> bool:
        """Stored coefficients are keyed by sorted tuples, so symmetry holds by construction."""
        return all(tuple(sorted(J)) == J for J in self.coeffs)


def _compatible(p: SymForm, q: SymForm):
    if p.dim != q.dim:
        raise DimMismatch(f"forms on C^{p.dim} and C^{q.dim}")
    if p.nvars != q.nvars:
        raise DimMismatch("forms have coefficients in different rings")


def partition_product(p1: SymForm, p2: SymForm) -> SymForm:
    """The product summing over all splits of the argument slots into two groups."""
    _compatible(p1, p2)
    n = p1.dim
    order = min_order(p1.order, p2.order)
    out: dict = {}
    for A, ca in p1.coeffs.items():
        ma = counts(A, n)
        for B, cb in p2.coeffs.items():
            mb = counts(B, n)
            mult = 1
            for a, b in zip(ma, mb):
                if a and b:
                    mult *= comb(a + b, a)
            J = tuple(sorted(A + B))
            term = ca * cb
            if mult != 1:
                term = term.scale(mult)
            out[J] = out[J] + term if J in out else term
    return SymForm(p1.degree + p2.degree, n, {J: c.truncate(order) for J, c in out.items()}, p1.nvars)


def product_all(forms: Sequence[SymForm], dim: int, nvars: int = 0) -> SymForm:
    result = SymForm.scalar(ONE, dim, nvars)
    for f in forms:
        result = partition_product(result, f)
    return result


@dataclass(frozen=True)
class MultiMap:
    """Symmetric ``degree``-linear map ``V^degree -> V`` given by its components."""

    degree: int
    dim: int
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) != self.dim:
            raise DimMismatch("a map into C^n needs n components")
        for c in comps:
            if c.degree != self.degree or c.dim != self.dim:
                raise DimMismatch("component form has the wrong degree or dimension")
        nv = {c.nvars for c in comps}
        if len(nv) > 1:
            raise DimMismatch("components have coefficients in different rings")
        object.__setattr__(self, "components", comps)

    @property
    def nvars(self) -> int:
        return self.components[0].nvars

    @classmethod
    def identity(cls, dim: int, nvars: int = 0) -> "MultiMap":
        return cls(1, dim, tuple(SymForm(1, dim, {(k,): Series.const(nvars, ONE)}, nvars) for k in range(dim)))

    @classmethod
    def constant(cls, vector: Sequence, nvars: int = 0) -> "MultiMap":
        dim = len(vector)
        return cls(0, dim, tuple(SymForm.scalar(x, dim, nvars) for x in vector))

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence], nvars: int = 0) -> "MultiMap":
        dim = len(rows)
        return cls(1, dim, tuple(
            SymForm(1, dim, {(j,): Series.const(nvars, as_gq(rows[k][j])) for j in range(dim)}, nvars)
            for k in range(dim)))

    def then(self, maps: Sequence["MultiMap"]) -> "MultiMap":
        """``A o (B_1, ..., B_l)`` componentwise."""
        comps = tuple(substitute_forms(c, maps) for c in self.components)
        deg = comps[0].degree if comps else self.degree - len(maps) + sum(b.degree for b in maps)
        return MultiMap(deg, self.dim, comps)


def substitute_forms(p: SymForm, maps: Sequence[MultiMap]) -> SymForm:
    """``p o (A_1, ..., A_m)`` summing over all labelled splits of the arguments."""
    m = len(maps)
    if m == 0:
        return p
    if m > p.degree:
        raise TooManyMaps(f"{m} maps substituted into a {p.degree}-form")
    n = p.dim
    for A in maps:
        if A.dim != n:
            raise DimMismatch("map dimension does not match the form")
        if A.nvars != p.nvars:
            raise DimMismatch("map coefficients live in a different ring")
    nus = [A.degree for A in maps]
    free = p.degree - m
    out_deg = free + sum(nus)
    order = min_order(p.order, *[c.order for A in maps for c in A.components])
    out = {}
    for J in sorted_tuples(n, out_deg):
        mJ = counts(J, n)
        total = Series.zero(p.nvars, order)

        def splits(j: int, remaining: list[int], parts: list):
            if j == m:
                yield list(parts), remaining
                return
            for chosen, rest in sub_multisets(remaining, nus[j]):
                parts.append(chosen)
                yield from splits(j + 1, rest, parts)
                parts.pop()

        for parts, rest in splits(0, mJ, []):
            weight = multinomial(mJ, parts + [rest])
            Bidx = _from_counts(rest)
            Ks = [_from_counts(c) for c in parts]
            # expand p(A_1(e_K1), ..., A_m(e_Km), e_B) multilinearly
            for ks in product(range(n), repeat=m):
                pc = p.coeffs.get(tuple(sorted(ks + Bidx)))
                if pc is None:
                    continue
                term = pc
                for A, k, K in zip(maps, ks, Ks):
                    a = A.components[k].coeffs.get(K)
                    if a is None:
                        term = None
                        break
                    term = term * a
                if term is None or term.is_zero():
                    continue
                total = total + (term.scale(weight) if weight != 1 else term)
        if not total.is_zero():
            out[J] = total
    return SymForm(out_deg, n, out, p.nvars)


@dataclass(frozen=True)
class ExpansionTerm:
    """One summand ``p o (C_1, ..., C_r)`` of a repeated substitution."""

    maps: tuple
    degrees: tuple

    @property
    def degree_sum(self) -> int:
        return sum(self.degrees)


def expansion_terms(p: SymForm, maps: Sequence[MultiMap], then: Sequence[MultiMap]) -> list[ExpansionTerm]:
    """Rewrite ``(p o A) o B`` as a list of single substitutions ``p o C``.

    Each ``B_s`` either feeds an argument slot of some ``A_j`` or one of the
    ``d - m`` untouched slots of ``p``; every such assignment (respecting slot
    capacities) contributes ``p o (A_j o B_{assigned to j}, ..., free B's)``.
    """
    m = len(maps)
    if m > p.degree:
        raise TooManyMaps(f"{m} maps substituted into a {p.degree}-form")
    d_prime = p.degree - m + sum(A.degree for A in maps)
    if len(then) > d_prime:
        raise TooManyMaps(f"{len(then)} maps substituted into a {d_prime}-form")
    caps = [A.degree for A in maps] + [p.degree - m]
    terms = []
    for assign in product(range(m + 1), repeat=len(then)):
        load = Counter(assign)
        if any(load[g] > caps[g] for g in range(m + 1)):
            continue
        Cs = []
        for j, A in enumerate(maps):
            Bs = [then[s] for s in range(len(then)) if assign[s] == j]
            Cs.append(A.then(Bs) if Bs else A)
        Cs += [then[s] for s in range(len(then)) if assign[s] == m]
        terms.append(ExpansionTerm(tuple(Cs), tuple(C.degree for C in Cs)))
    return terms


def compose_expand(p: SymForm, maps: Sequence[MultiMap], then: Sequence[MultiMap]) -> SymForm:
    """``(p o A) o B`` computed as the finite sum of single substitutions."""
    terms = expansion_terms(p, maps, then)
    out_deg = p.degree - len(maps) + sum(A.degree for A in maps) - len(then) + sum(B.degree for B in then)
    total = SymForm(out_deg, p.dim, {}, p.nvars)
    for t in terms:
        total = total + substitute_forms(p, list(t.maps))
    return total


def diagonal(p: SymForm) -> Series:
    """``p(x, ..., x)`` as a polynomial in ``x_1..x_n`` (the first ``n`` variables)
    with the coefficient ring's variables appended."""
    n, nv = p.dim, p.nvars
    d = p.degree
    out = {}
    order = p.order
    for J, c in p.coeffs.items():
        mJ = counts(J, n)
        mult = factorial(d)
        for a in mJ:
            mult //= factorial(a)
        for e, v in c.terms.items():
            key = tuple(mJ) + e
            val = v * mult
            out[key] = out[key] + val if key in out else val
    return Series(n + nv, out, None if order is None else order + d)


def from_diagonal(poly: Series, degree: int, dim: int) -> SymForm:
    """Inverse of :func:`diagonal` (polarization) for a homogeneous polynomial."""
    nv = poly.nvars - dim
    coeffs: dict = {}
    for e, v in poly.terms.items():
        mJ = e[:dim]
        if sum(mJ) != degree:
            raise PreconditionError("polynomial is not homogeneous of the given degree")
        J = _from_counts(mJ)
        mult = factorial(degree)
        for a in mJ:
            mult //= factorial(a)
        coeffs.setdefault(J, {})[e[dim:]] = v / mult
    order = None if poly.order is None else poly.order - degree
    return SymForm(degree, dim, {J: Series(nv, t, order) for J, t in coeffs.items()}, nv)
