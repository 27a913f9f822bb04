"""Exact arithmetic in Q(i) and dense exact linear algebra.

Gaussian rationals are stored as a pair of ``gmpy2.mpq`` (always in lowest
terms with positive denominator).  Linear algebra clears denominators row by
row and runs fraction-free (Bareiss) elimination over the Gaussian integers;
only the final back substitution works with fractions.
"""
from __future__ import annotations

import re as _re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq

from .errors import DivisionByZero, PreconditionError

_MPQ = type(mpq(0))
_ZERO = mpq(0)
_ONE = mpq(1)


def _to_mpq(x) -> "mpq":
    if isinstance(x, _MPQ):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, (int, str)) or type(x).__name__ == "mpz":
        return mpq(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def _new(re, im) -> "GQ":
    z = object.__new__(GQ)
    z.re = re
    z.im = im
    return z


class GQ:
    """An element ``re + im*i`` of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GQ):
            if im:
                raise TypeError("GQ(GQ, im) is ambiguous")
            self.re, self.im = re.re, re.im
            return
        self.re = _to_mpq(re)
        self.im = _to_mpq(im)

    # --- representation -------------------------------------------------
    @property
    def re_num(self) -> int:
        return int(self.re.numerator)

    @property
    def re_den(self) -> int:
        return int(self.re.denominator)

    @property
    def im_num(self) -> int:
        return int(self.im.numerator)

    @property
    def im_den(self) -> int:
        return int(self.im.denominator)

    def __str__(self) -> str:
        return format_gq(self)

    def __repr__(self) -> str:
        return f"GQ('{format_gq(self)}')"

    def __hash__(self) -> int:
        if not self.im:
            return hash(Fraction(int(self.re.numerator), int(self.re.denominator)))
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        if isinstance(other, GQ):
            return self.re == other.re and self.im == other.im
        try:
            o = _to_mpq(other)
        except TypeError:
            return NotImplemented
        return self.im == 0 and self.re == o

    # --- field operations -----------------------------------------------
    @staticmethod
    def _coerce(other) -> "GQ":
        if isinstance(other, GQ):
            return other
        return _new(_to_mpq(other), _ZERO)

    def __add__(self, other):
        if not isinstance(other, GQ):
            try:
                other = GQ._coerce(other)
            except TypeError:
                return NotImplemented
        return _new(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GQ):
            try:
                other = GQ._coerce(other)
            except TypeError:
                return NotImplemented
        return _new(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        try:
            other = GQ._coerce(other)
        except TypeError:
            return NotImplemented
        return other - self

    def __neg__(self):
        return _new(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, GQ):
            try:
                o = _to_mpq(other)
            except TypeError:
                return NotImplemented
            return _new(self.re * o, self.im * o)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return _new(a * c, _ZERO)
        return _new(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def abs2(self):
        """Squared modulus, an exact rational."""
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "GQ":
        return _new(self.re, -self.im)

    def inverse(self) -> "GQ":
        n = self.abs2()
        if not n:
            raise DivisionByZero("division by zero in Q(i)")
        return _new(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if not isinstance(other, GQ):
            try:
                o = _to_mpq(other)
            except TypeError:
                return NotImplemented
            if not o:
                raise DivisionByZero("division by zero in Q(i)")
            return _new(self.re / o, self.im / o)
        return self * other.inverse()

    def __rtruediv__(self, other):
        try:
            other = GQ._coerce(other)
        except TypeError:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result, base = ONE, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __reduce__(self):
        return (GQ, (str(self.re), str(self.im)))


ZERO = _new(_ZERO, _ZERO)
ONE = _new(_ONE, _ZERO)
I = _new(_ZERO, _ONE)


def gq_arith(a: GQ, b: GQ, op: str) -> GQ:
    """Apply ``op`` in {'add', 'sub', 'mul', 'div'} to two Gaussian rationals."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# ----------------------------------------------------------------------------
# literal grammar
#   <rat> := <int>["/"<posint>]
#   <gq>  := <rat> | [<rat>] ("+"|"-") <rat> "i" | <rat> "i" | "i" | "-i"
# ----------------------------------------------------------------------------
_RAT = r"[+-]?\d+(?:/\d+)?"
_URAT = r"\d+(?:/\d+)?"
_GQ_RE = _re.compile(
    rf"^(?:(?P<real>{_RAT})"
    rf"|(?P<re2>{_RAT})?(?P<sign>[+-])(?P<im2>{_URAT})?i"
    rf"|(?P<im1>{_RAT})i"
    rf"|i)$"
)


def _parse_rat(s: str):
    if "/" in s:
        num, den = s.split("/")
        if int(den) == 0:
            raise ValueError("zero denominator")
        return mpq(int(num), int(den))
    return mpq(int(s))


def parse_gq(text: str) -> GQ:
    """Parse a Gaussian-rational literal such as ``-1/2i`` or ``3/4+2/5i``."""
    s = text.strip()
    m = _GQ_RE.match(s)
    if not m:
        raise ValueError(f"malformed Gaussian rational literal {text!r}")
    if m.group("real") is not None:
        return _new(_parse_rat(m.group("real")), _ZERO)
    if m.group("im1") is not None:
        return _new(_ZERO, _parse_rat(m.group("im1")))
    if m.group("sign") is not None:
        re_part = _parse_rat(m.group("re2")) if m.group("re2") else _ZERO
        im_part = _parse_rat(m.group("im2")) if m.group("im2") else _ONE
        if m.group("sign") == "-":
            im_part = -im_part
        return _new(re_part, im_part)
    return I


def _format_rat(q) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_gq(z: GQ) -> str:
    """Canonical literal; ``parse_gq(format_gq(z)) == z``."""
    if not z.im:
        return _format_rat(z.re)
    if not z.re:
        if z.im == 1:
            return "i"
        if z.im == -1:
            return "-i"
        return _format_rat(z.im) + "i"
    sign = "+" if z.im > 0 else "-"
    return f"{_format_rat(z.re)}{sign}{_format_rat(abs(z.im))}i"


def as_gq(x) -> GQ:
    if isinstance(x, GQ):
        return x
    if isinstance(x, str):
        return parse_gq(x)
    if isinstance(x, complex):
        raise TypeError("floating-point complex numbers are not exact")
    return GQ(x)


# ----------------------------------------------------------------------------
# matrices
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class ExactMatrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise PreconditionError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, "
                f"got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise PreconditionError("ragged matrix rows")
        return cls(len(rows), cols, tuple(as_gq(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(rows, cols, (ZERO,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(n, n, tuple(ONE if i == j else ZERO for i in range(n) for j in range(n)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def to_rows(self) -> list[list[GQ]]:
        return [self.row(i) for i in range(self.rows)]

    def matvec(self, v: Sequence) -> list[GQ]:
        out = []
        for i in range(self.rows):
            acc = ZERO
            for j, x in enumerate(self.row(i)):
                if x and v[j]:
                    acc = acc + x * v[j]
            out.append(acc)
        return out

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            self.cols, self.rows,
            tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)),
        )


def _lcm_den(row: Iterable[GQ]) -> int:
    den = 1
    for x in row:
        if x.re:
            den = gmpy2.lcm(den, x.re.denominator)
        if x.im:
            den = gmpy2.lcm(den, x.im.denominator)
    return int(den)


def _gaussian_integer_rows(rows: Sequence[Sequence[GQ]]):
    out, scales = [], []
    for r in rows:
        L = _lcm_den(r)
        out.append([(int(x.re * L), int(x.im * L)) for x in r])
        scales.append(L)
    return out, scales


def _bareiss(A: list[list[tuple[int, int]]], ncols: int):
    """In-place fraction-free row echelon form over Z[i].

    Pivot rule: for each column in order, the first row at or below the
    current one with a nonzero entry.  Returns (pivot columns, row
    permutation sign).
    """
    nrows = len(A)
    pivots: list[int] = []
    prev_r, prev_i = 1, 0
    r = 0
    sign = 1
    for c in range(ncols):
        if r == nrows:
            break
        p = r
        while p < nrows and A[p][c] == (0, 0):
            p += 1
        if p == nrows:
            continue
        if p != r:
            A[p], A[r] = A[r], A[p]
            sign = -sign
        pr, pi = A[r][c]
        prow = A[r]
        norm = prev_r * prev_r + prev_i * prev_i
        for i in range(r + 1, nrows):
            row = A[i]
            xr, xi = row[c]
            new = row[:c] + [(0, 0)]
            for j in range(c + 1, ncols):
                ar, ai = row[j]
                br, bi = prow[j]
                # piv*a - x*b
                nr = pr * ar - pi * ai - (xr * br - xi * bi)
                ni = pr * ai + pi * ar - (xr * bi + xi * br)
                if norm != 1:
                    # exact division by prev in Z[i]: multiply by conj(prev) / |prev|^2
                    tr = nr * prev_r + ni * prev_i
                    ti = ni * prev_r - nr * prev_i
                    nr, ni = tr // norm, ti // norm
                elif prev_r == -1:
                    nr, ni = -nr, -ni
                elif prev_i == 1:
                    nr, ni = ni, -nr
                elif prev_i == -1:
                    nr, ni = -ni, nr
                new.append((nr, ni))
            A[i] = new
        prev_r, prev_i = pr, pi
        pivots.append(c)
        r += 1
    return pivots, sign


def _echelon(M: ExactMatrix):
    A, scales = _gaussian_integer_rows(M.to_rows())
    pivots, sign = _bareiss(A, M.cols)
    return A, pivots, scales, sign


def rank(M: ExactMatrix) -> int:
    """Rank over Q(i)."""
    if M.rows == 0 or M.cols == 0:
        return 0
    _, pivots, _, _ = _echelon(M)
    return len(pivots)


def pivot_columns(M: ExactMatrix) -> list[int]:
    """Indices of the columns selected as pivots (a basis of the column space)."""
    if M.rows == 0 or M.cols == 0:
        return []
    _, pivots, _, _ = _echelon(M)
    return pivots


def rref(M: ExactMatrix) -> tuple[list[list[GQ]], list[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    if M.rows == 0 or M.cols == 0:
        return [], []
    A, pivots, _, _ = _echelon(M)
    R = [[_new(mpq(a), mpq(b)) for a, b in A[i]] for i in range(len(pivots))]
    for i in range(len(pivots) - 1, -1, -1):
        p = pivots[i]
        inv = R[i][p].inverse()
        R[i] = [x * inv if x else ZERO for x in R[i]]
        row_i = R[i]
        nz = [j for j in range(p + 1, M.cols) if row_i[j]]
        for h in range(i):
            f = R[h][p]
            if not f:
                continue
            rh = R[h]
            rh[p] = ZERO
            for j in nz:
                rh[j] = rh[j] - f * row_i[j]
    return R, pivots


def nullspace(M: ExactMatrix) -> list[list[GQ]]:
    """Basis of {v : Mv = 0}, one vector per free column, from the RREF.

    The vector for free column f has a 1 in position f and zeros in all
    other free positions, so the basis is canonical.
    """
    if M.cols == 0:
        return []
    R, pivots = rref(M)
    pivset = set(pivots)
    basis = []
    for f in range(M.cols):
        if f in pivset:
            continue
        v = [ZERO] * M.cols
        v[f] = ONE
        for i, p in enumerate(pivots):
            if R[i][f]:
                v[p] = -R[i][f]
        basis.append(v)
    return basis


def det(M: ExactMatrix) -> GQ:
    if M.rows != M.cols:
        raise PreconditionError("determinant of a non-square matrix")
    n = M.rows
    if n == 0:
        return ONE
    A, pivots, scales, sign = _echelon(M)
    if len(pivots) < n:
        return ZERO
    # after Bareiss the last pivot is the determinant of the scaled matrix
    dr, di = A[n - 1][n - 1]
    value = _new(mpq(dr), mpq(di))
    total_scale = 1
    for s in scales:
        total_scale *= s
    return value * sign / total_scale


def inverse(M: ExactMatrix) -> ExactMatrix:
    n = M.rows
    if n != M.cols:
        raise PreconditionError("inverse of a non-square matrix")
    aug = ExactMatrix.from_rows(
        [M.row(i) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    )
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n or pivots[n - 1] != n - 1:
        raise DivisionByZero("matrix is singular")
    return ExactMatrix.from_rows([R[i][n:] for i in range(n)])


def matmul(A: ExactMatrix, B: ExactMatrix) -> ExactMatrix:
    if A.cols != B.rows:
        raise PreconditionError("shape mismatch in matrix product")
    rows = []
    for i in range(A.rows):
        ai = A.row(i)
        row = []
        for j in range(B.cols):
            acc = ZERO
            for t in range(A.cols):
                if ai[t]:
                    b = B[t, j]
                    if b:
                        acc = acc + ai[t] * b
            row.append(acc)
        rows.append(row)
    return ExactMatrix.from_rows(rows, B.cols)
