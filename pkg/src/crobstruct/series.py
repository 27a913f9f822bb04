"""Sparse multivariate polynomials and truncated power series over Q(i).

A :class:`Series` is a map from exponent tuples to Gaussian rationals
together with a truncation order.  ``order=None`` marks an exact polynomial;
an integer ``N`` means every coefficient of total degree ``<= N`` is exact
and nothing is known above.
"""
from __future__ import annotations

import operator
from dataclasses import dataclass
from math import comb
from typing import Iterable, Mapping, Sequence

from .errors import (
    BadLinearPart,
    BlockMismatch,
    DivisionByZero,
    NonNilpotentSubstitution,
    OrderExhausted,
    PreconditionError,
    SingularJacobian,
)
from .exactnum import GQ, ONE, ZERO, ExactMatrix, as_gq, inverse as mat_inverse

_add = operator.add


def min_order(*orders: int | None) -> int | None:
    finite = [o for o in orders if o is not None]
    return min(finite) if finite else None


@dataclass(frozen=True)
class VarBlocks:
    """Variable layout ``(z_1..z_n, w_1..w_d, chi_1..chi_n, tau_1..tau_d)``."""

    n: int
    d: int

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise PreconditionError("need n >= 1 and d >= 1")

    @property
    def nvars(self) -> int:
        return 2 * (self.n + self.d)

    def z(self, j: int) -> int:
        return j

    def w(self, j: int) -> int:
        return self.n + j

    def chi(self, j: int) -> int:
        return self.n + self.d + j

    def tau(self, j: int) -> int:
        return 2 * self.n + self.d + j

    @property
    def z_vars(self) -> range:
        return range(0, self.n)

    @property
    def w_vars(self) -> range:
        return range(self.n, self.n + self.d)

    @property
    def chi_vars(self) -> range:
        return range(self.n + self.d, 2 * self.n + self.d)

    @property
    def tau_vars(self) -> range:
        return range(2 * self.n + self.d, self.nvars)

    def exponent(self, z=(), w=(), chi=(), tau=()) -> tuple:
        def pad(v, k):
            v = tuple(int(x) for x in v)
            if not v:
                return (0,) * k
            if len(v) != k:
                raise BlockMismatch(f"multiindex {v} should have length {k}")
            return v
        return pad(z, self.n) + pad(w, self.d) + pad(chi, self.n) + pad(tau, self.d)


class Series:
    """Immutable sparse series in ``nvars`` variables."""

    __slots__ = ("nvars", "terms", "order", "_sorted")

    def __init__(self, nvars: int, terms: Mapping[tuple, GQ] | None = None,
                 order: int | None = None, *, _clean: bool = False):
        self.nvars = nvars
        self.order = order
        self._sorted = None
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = terms
        else:
            out = {}
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nvars:
                    raise BlockMismatch(f"exponent {e} has wrong length for {nvars} variables")
                c = as_gq(c)
                if not c:
                    continue
                if order is not None and sum(e) > order:
                    continue
                out[e] = out[e] + c if e in out else c
            self.terms = {e: c for e, c in out.items() if c}

    # --- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, nvars: int, order: int | None = None) -> "Series":
        return cls(nvars, {}, order, _clean=True)

    @classmethod
    def const(cls, nvars: int, c, order: int | None = None) -> "Series":
        c = as_gq(c)
        return cls(nvars, {(0,) * nvars: c} if c else {}, order, _clean=True)

    @classmethod
    def var(cls, nvars: int, i: int, order: int | None = None, coeff=ONE) -> "Series":
        e = [0] * nvars
        e[i] = 1
        coeff = as_gq(coeff)
        if order is not None and order < 1:
            return cls(nvars, {}, order, _clean=True)
        return cls(nvars, {tuple(e): coeff} if coeff else {}, order, _clean=True)

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff=ONE, order: int | None = None) -> "Series":
        return cls(len(exponent), {tuple(exponent): coeff}, order)

    # --- inspection ------------------------------------------------------
    def _by_degree(self) -> list:
        if self._sorted is None:
            self._sorted = sorted(((sum(e), e, c) for e, c in self.terms.items()),
                                  key=lambda t: (t[0], t[1]))
        return self._sorted

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coeff(self, e: Sequence[int]) -> GQ:
        return self.terms.get(tuple(e), ZERO)

    def constant_term(self) -> GQ:
        return self.terms.get((0,) * self.nvars, ZERO)

    def degree(self) -> int:
        """Largest total degree of a stored term (-1 for zero)."""
        return max((sum(e) for e in self.terms), default=-1)

    def valuation(self) -> int | None:
        """Smallest total degree of a stored term (None for zero)."""
        return min((sum(e) for e in self.terms), default=None)

    def degree_in(self, vars: Iterable[int]) -> int:
        vars = list(vars)
        return max((sum(e[i] for i in vars) for e in self.terms), default=-1)

    @property
    def exact(self) -> bool:
        return self.order is None

    def items(self):
        """Terms in canonical (degree, then lexicographic) order."""
        return [(e, c) for _, e, c in self._by_degree()]

    def __repr__(self) -> str:
        if not self.terms:
            body = "0"
        else:
            body = " + ".join(f"({c})*{list(e)}" for e, c in self.items()[:8])
            if len(self.terms) > 8:
                body += f" + ... ({len(self.terms)} terms)"
        return f"Series[{self.nvars}]({body}; order={self.order})"

    def __eq__(self, other) -> bool:
        if isinstance(other, Series):
            return self.nvars == other.nvars and self.order == other.order and self.terms == other.terms
        if isinstance(other, (int, GQ)):
            c = as_gq(other)
            if not c:
                return not self.terms
            return self.terms == {(0,) * self.nvars: c}
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, self.order, frozenset(self.terms.items())))

    def agrees(self, other: "Series", upto: int | None = None) -> bool:
        """Coefficientwise equality through total degree ``upto``.

        ``upto`` defaults to the smaller of the two orders.
        """
        _check(self, other)
        if upto is None:
            upto = min_order(self.order, other.order)
        a = self.truncate(upto).terms if upto is not None else self.terms
        b = other.truncate(upto).terms if upto is not None else other.terms
        return a == b

    # --- arithmetic ------------------------------------------------------
    def _coerce(self, other) -> "Series":
        if isinstance(other, Series):
            _check(self, other)
            return other
        return Series.const(self.nvars, other)

    def __add__(self, other):
        if not isinstance(other, Series):
            try:
                other = Series.const(self.nvars, other)
            except TypeError:
                return NotImplemented
        _check(self, other)
        order = min_order(self.order, other.order)
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                s = out[e] + c
                if s:
                    out[e] = s
                else:
                    del out[e]
            else:
                out[e] = c
        if order is not None:
            if (self.order is not None and self.order > order) or (other.order is not None and other.order > order):
                out = {e: c for e, c in out.items() if sum(e) <= order}
        return Series(self.nvars, out, order, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.nvars, {e: -c for e, c in self.terms.items()}, self.order, _clean=True)

    def __sub__(self, other):
        if not isinstance(other, Series):
            try:
                other = Series.const(self.nvars, other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Series":
        c = as_gq(c)
        if not c:
            return Series(self.nvars, {}, self.order, _clean=True)
        return Series(self.nvars, {e: c * v for e, v in self.terms.items()}, self.order, _clean=True)

    def __mul__(self, other):
        if not isinstance(other, Series):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        _check(self, other)
        return mul(self, other, min_order(self.order, other.order))

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = Series.const(self.nvars, ONE, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def truncate(self, order: int | None) -> "Series":
        if order is None:
            return self
        if self.order is not None and self.order <= order:
            return self
        return Series(self.nvars, {e: c for e, c in self.terms.items() if sum(e) <= order},
                      order, _clean=True)

    def as_polynomial(self) -> "Series":
        """The stored terms regarded as an exact polynomial."""
        return Series(self.nvars, self.terms, None, _clean=True)

    def with_order(self, order: int | None) -> "Series":
        """Same terms, relabelled truncation order (no terms are dropped below it)."""
        return Series(self.nvars, self.terms, None, _clean=True).truncate(order)

    def conjugate(self) -> "Series":
        """Conjugate every coefficient (the series written ``p-bar``)."""
        return Series(self.nvars, {e: c.conjugate() for e, c in self.terms.items()},
                      self.order, _clean=True)

    def inverse(self, order: int | None = None) -> "Series":
        """Multiplicative inverse of a series with nonzero constant term."""
        c0 = self.constant_term()
        if not c0:
            raise DivisionByZero("series with zero constant term is not invertible")
        order = min_order(self.order, order)
        rest = self - Series.const(self.nvars, c0)
        inv0 = c0.inverse()
        if rest.is_zero():
            return Series.const(self.nvars, inv0, order)
        if order is None:
            raise OrderExhausted("inverse of a nonconstant polynomial needs a truncation order")
        h = rest.scale(inv0).truncate(order)
        # 1/(1+h) = sum (-h)^j; h has valuation >= 1
        result = Series.const(self.nvars, ONE, order)
        power = Series.const(self.nvars, ONE, order)
        neg_h = -h
        for _ in range(order):
            power = mul(power, neg_h, order)
            if power.is_zero():
                break
            result = result + power
        return result.scale(inv0)

    def set_zero(self, vars: Iterable[int]) -> "Series":
        vars = list(vars)
        return Series(self.nvars, {e: c for e, c in self.terms.items() if not any(e[i] for i in vars)},
                      self.order, _clean=True)

    def project(self, keep: Sequence[int]) -> "Series":
        """Drop the variables not in ``keep``; they must not occur."""
        keep = list(keep)
        dropped = [i for i in range(self.nvars) if i not in set(keep)]
        out = {}
        for e, c in self.terms.items():
            if any(e[i] for i in dropped):
                raise PreconditionError("projection would drop a variable that occurs")
            out[tuple(e[i] for i in keep)] = c
        return Series(len(keep), out, self.order, _clean=True)

    def embed(self, nvars: int, positions: Sequence[int]) -> "Series":
        """Rename variable ``i`` to ``positions[i]`` in a ring with ``nvars`` variables."""
        out = {}
        for e, c in self.terms.items():
            f = [0] * nvars
            for i, x in enumerate(e):
                f[positions[i]] += x
            f = tuple(f)
            out[f] = out[f] + c if f in out else c
        return Series(nvars, {e: c for e, c in out.items() if c}, self.order, _clean=True)

    def derivative(self, var: int, times: int = 1) -> "Series":
        if times == 0:
            return self
        if self.order is not None and times > self.order:
            raise OrderExhausted(
                f"derivative of order {times} exceeds truncation order {self.order}"
            )
        out = {}
        for e, c in self.terms.items():
            a = e[var]
            if a < times:
                continue
            f = 1
            for j in range(times):
                f *= a - j
            ne = e[:var] + (a - times,) + e[var + 1:]
            out[ne] = c * f
        order = None if self.order is None else self.order - times
        return Series(self.nvars, out, order, _clean=True)

    def diff(self, exps: Sequence[int]) -> "Series":
        """Mixed partial derivative with multiindex ``exps`` over all variables."""
        total = sum(exps)
        if self.order is not None and total > self.order:
            raise OrderExhausted(
                f"derivative of order {total} exceeds truncation order {self.order}"
            )
        p = self
        for i, t in enumerate(exps):
            if t:
                p = p.derivative(i, t)
        return p


def _check(p: Series, q: Series):
    if p.nvars != q.nvars:
        raise BlockMismatch(f"series in {p.nvars} and {q.nvars} variables cannot be combined")


def mul(p: Series, q: Series, order: int | None) -> Series:
    """Product of ``p`` and ``q`` keeping total degree ``<= order``."""
    if not p.terms or not q.terms:
        return Series(p.nvars, {}, order, _clean=True)
    if len(p.terms) > len(q.terms):
        p, q = q, p
    a = p._by_degree()
    b = q._by_degree()
    out: dict = {}
    get = out.get
    bmin = b[0][0]
    for da, ea, ca in a:
        if order is not None:
            lim = order - da
            if lim < bmin:
                break
        else:
            lim = None
        for db, eb, cb in b:
            if lim is not None and db > lim:
                break
            e = tuple(map(_add, ea, eb))
            prev = get(e)
            out[e] = ca * cb if prev is None else prev + ca * cb
    return Series(p.nvars, {e: c for e, c in out.items() if c}, order, _clean=True)


def partial_derivative(p: Series, blocks: VarBlocks, beta: Sequence[int] = (),
                       gamma: Sequence[int] = ()) -> Series:
    """``d^{|beta|+|gamma|} p / dz^beta dw^gamma`` in the block layout."""
    beta = tuple(beta) or (0,) * blocks.n
    gamma = tuple(gamma) or (0,) * blocks.d
    if len(beta) != blocks.n or len(gamma) != blocks.d:
        raise BlockMismatch("multiindex length does not match the variable blocks")
    exps = [0] * p.nvars
    for j, b in enumerate(beta):
        exps[blocks.z(j)] = b
    for j, g in enumerate(gamma):
        exps[blocks.w(j)] = g
    return p.diff(exps)


# ----------------------------------------------------------------------------
# composition
# ----------------------------------------------------------------------------
class _PowerCache:
    def __init__(self, base: Series, order: int | None):
        self.base = base
        self.order = order
        self.powers = [Series.const(base.nvars, ONE, order)]

    def get(self, k: int) -> Series:
        while len(self.powers) <= k:
            self.powers.append(mul(self.powers[-1], self.base, self.order))
        return self.powers[k]


def compose(p: Series, images: Sequence[Series | None], order: int | None = None,
            nvars: int | None = None) -> Series:
    """``p(images)``: variable ``i`` of ``p`` is replaced by ``images[i]``.

    ``images[i] = None`` keeps variable ``i`` (only allowed when the target ring
    is the ring of ``p``).  The result carries the minimum of ``order``, the
    order of ``p`` and the orders of the images that actually occur.
    """
    if len(images) != p.nvars:
        raise BlockMismatch(f"{len(images)} images for {p.nvars} variables")
    if nvars is None:
        nvars = next((im.nvars for im in images if im is not None), p.nvars)
    imgs = []
    for i, im in enumerate(images):
        if im is None:
            if nvars != p.nvars:
                raise BlockMismatch("identity image requires the same ring")
            im = Series.var(nvars, i)
        elif im.nvars != nvars:
            raise BlockMismatch("images live in different rings")
        imgs.append(im)
    used = [any(e[i] for e in p.terms) for i in range(p.nvars)]
    out_order = min_order(order, p.order, *[im.order for i, im in enumerate(imgs) if used[i]])
    if p.order is not None:
        for i, im in enumerate(imgs):
            if used[i] and im.constant_term():
                raise NonNilpotentSubstitution(
                    f"image of variable {i} has a nonzero constant term and the series is truncated"
                )
    if not p.terms:
        return Series(nvars, {}, out_order, _clean=True)
    caches = [_PowerCache(im.truncate(out_order), out_order) if used[i] else None
              for i, im in enumerate(imgs)]
    # evaluate term by term, sharing prefix products across terms
    acc: dict = {}
    prefix_cache: dict = {(): Series.const(nvars, ONE, out_order)}

    def prefix(key: tuple) -> Series:
        s = prefix_cache.get(key)
        if s is None:
            head = prefix(key[:-1])
            i, k = key[-1]
            s = mul(head, caches[i].get(k), out_order)
            prefix_cache[key] = s
        return s

    for e, c in p.items():
        key = tuple((i, k) for i, k in enumerate(e) if k)
        val = prefix(key)
        for f, v in val.terms.items():
            prev = acc.get(f)
            acc[f] = c * v if prev is None else prev + c * v
    return Series(nvars, {f: v for f, v in acc.items() if v}, out_order, _clean=True)


def substitute(p: Series, assignments: Mapping[int, Series], order: int | None = None) -> Series:
    """Replace the variables in ``assignments`` (same ring) and keep the others."""
    images = [assignments.get(i) for i in range(p.nvars)]
    if not assignments:
        return p.truncate(order)
    return compose(p, images, order=order, nvars=p.nvars)


# ----------------------------------------------------------------------------
# implicit equations and inversion
# ----------------------------------------------------------------------------
def _split_linear(F: Sequence[Series], unknowns: Sequence[int]):
    """Split each equation into constant-coefficient linear part in the unknowns,
    unknown-free part and remainder."""
    U = list(unknowns)
    uset = set(U)
    nv = F[0].nvars
    J = [[ZERO] * len(U) for _ in F]
    free, rest = [], []
    for r, f in enumerate(F):
        fr, rs = {}, {}
        for e, c in f.terms.items():
            udeg = sum(e[i] for i in U)
            if udeg == 0:
                fr[e] = c
            elif udeg == 1 and sum(e) == 1:
                j = next(i for i in U if e[i])
                J[r][U.index(j)] = c
            else:
                rs[e] = c
        free.append(Series(nv, fr, f.order, _clean=True))
        rest.append(Series(nv, rs, f.order, _clean=True))
    return J, free, rest, uset


def solve_implicit(F: Sequence[Series], unknowns: Sequence[int], order: int | None = None,
                   singular_error=SingularJacobian) -> list[Series]:
    """Solve ``F(x, y) = 0`` for ``y = Y(x)`` with ``Y(0) = 0``.

    ``unknowns`` lists the variable indices of ``y``; the solutions live in the
    same ring and do not involve those variables.  The iteration
    ``Y <- -J^{-1} (f(x) + H(x, Y))`` gains one degree per step, so it is run
    with progressively larger truncation orders.
    """
    if len(F) != len(unknowns):
        raise BlockMismatch("need as many equations as unknowns")
    if not F:
        return []
    nv = F[0].nvars
    order = min_order(order, *[f.order for f in F])
    J, free, rest, uset = _split_linear(F, unknowns)
    for f in free:
        if f.constant_term():
            raise PreconditionError("equations do not vanish at the origin")
    try:
        Jinv = mat_inverse(ExactMatrix.from_rows(J))
    except DivisionByZero:
        raise singular_error("Jacobian in the unknowns is singular at the origin") from None
    Jinv_rows = Jinv.to_rows()
    m = len(unknowns)

    def apply(vec: list[Series], o) -> list[Series]:
        out = []
        for r in range(m):
            acc = Series.zero(nv, o)
            for c in range(m):
                if Jinv_rows[r][c]:
                    acc = acc + vec[c].scale(-Jinv_rows[r][c])
            out.append(acc.truncate(o))
        return out

    if all(h.is_zero() for h in rest):
        return apply([f.truncate(order) for f in free], order)
    if order is None:
        raise OrderExhausted("nonlinear implicit equation needs a truncation order")

    Y = [Series.zero(nv, order) for _ in range(m)]
    for t in range(1, order + 1):
        images = [None] * nv
        for j, u in enumerate(unknowns):
            images[u] = Y[j].as_polynomial()
        vals = []
        for f, h in zip(free, rest):
            hv = compose(h, images, order=t, nvars=nv) if h.terms else Series.zero(nv, t)
            vals.append(f.truncate(t) + hv)
        Y = apply(vals, t)
    return [y.with_order(order) for y in Y]


def invert_map(F: Sequence[Series], nmap: int | None = None, order: int | None = None) -> list[Series]:
    """Inverse of ``x -> F(x, t)`` in the first ``nmap`` variables.

    Remaining variables ``t`` are passive parameters.  ``F`` must vanish at the
    origin and its part linear in ``x`` with constant coefficients must be the
    identity; terms in ``t`` alone are not allowed.
    """
    if not F:
        return []
    nv = F[0].nvars
    n = len(F) if nmap is None else nmap
    if len(F) != n:
        raise BlockMismatch("map must have one component per mapped variable")
    order = min_order(order, *[f.order for f in F])
    for i, f in enumerate(F):
        for e, c in f.terms.items():
            xdeg = sum(e[:n])
            if xdeg == 0:
                raise BadLinearPart(f"component {i} has a term without mapped variables")
            if sum(e) == 1:
                j = next(k for k in range(n) if e[k])
                if j != i or c != ONE:
                    raise BadLinearPart("linear part is not the identity")
        lin = [0] * nv
        lin[i] = 1
        if f.coeff(lin) != ONE:
            raise BadLinearPart("linear part is not the identity")
    N = []
    for i, f in enumerate(F):
        lin = [0] * nv
        lin[i] = 1
        N.append(Series(nv, {e: c for e, c in f.terms.items() if e != tuple(lin)}, f.order, _clean=True))
    X = [Series.var(nv, i) for i in range(n)]
    if all(h.is_zero() for h in N):
        return [x.truncate(order) for x in X]
    if order is None:
        raise OrderExhausted("inverting a nonlinear polynomial map needs a truncation order")
    G = [x.truncate(1) for x in X]
    for t in range(2, order + 1):
        images = [g.as_polynomial() for g in G] + [None] * (nv - n)
        G = [(X[i] - compose(N[i], images, order=t, nvars=nv)).truncate(t) for i in range(n)]
    return [g.with_order(order) for g in G]


def jacobian_at_zero(F: Sequence[Series], vars: Sequence[int]) -> list[list[GQ]]:
    rows = []
    for f in F:
        row = []
        for v in vars:
            e = [0] * f.nvars
            e[v] = 1
            row.append(f.coeff(e))
        rows.append(row)
    return rows


def multinomial_sizes(total: int, nparts: int):
    """All tuples of ``nparts`` nonnegative integers summing to ``total``."""
    if nparts == 0:
        if total == 0:
            yield ()
        return
    if nparts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in multinomial_sizes(total - first, nparts - 1):
            yield (first,) + rest


def multiindices(nvars: int, max_total: int, min_total: int = 0):
    """Multiindices with ``min_total <= |a| <= max_total``, by degree then descending lex."""
    for t in range(min_total, max_total + 1):
        yield from multinomial_sizes(t, nvars)


def count_monomials(nvars: int, degree: int) -> int:
    return comb(degree + nvars - 1, nvars - 1) if nvars else int(degree == 0)
