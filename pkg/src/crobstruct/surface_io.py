"""Line-oriented ``.srf`` surface files.

    # comments run to end of line
    surface quartic
    n 1
    codim 1
    form real
    trunc 8
    term 1 z=[1] zb=[1] u=[]
    term 1 z=[2] zb=[2] u=[]

Real-form ``term`` lines give coefficients of ``z^a zbar^b (Re w)^c`` in
``r`` for ``Im w = r``; complex-form ``cterm`` lines give coefficients of
``z^a w^b chi^c tau^e`` in ``rho`` directly.  ``comp=<i>`` (1-based) picks
the component when ``codim > 1``.
"""
from __future__ import annotations

import re
from pathlib import Path

from .errors import MissingHeader, SurfaceSyntaxError
from .exactnum import format_gq, parse_gq
from .segre import ComplexTerm, RealTerm, SurfaceSpec, complexify, from_complex_terms

_HEADERS = ("surface", "n", "codim", "form", "trunc")
_REQUIRED = ("n", "form", "trunc")
_REAL_KEYS = ("z", "zb", "u")
_COMPLEX_KEYS = ("z", "w", "chi", "tau")
_ARRAY = re.compile(r"^\[\s*(-?\d+(\s*,\s*-?\d+)*)?\s*\]$")


def _int(value: str, line: int, what: str, minimum: int = 0) -> int:
    try:
        v = int(value)
    except ValueError:
        raise SurfaceSyntaxError(line, f"{what} must be an integer, got {value!r}") from None
    if v < minimum:
        raise SurfaceSyntaxError(line, f"{what} must be at least {minimum}")
    return v


def _array(value: str, line: int, key: str) -> tuple:
    if not _ARRAY.match(value):
        raise SurfaceSyntaxError(line, f"{key}= expects an integer array like [1,0], got {value!r}")
    inner = value.strip()[1:-1].strip()
    out = tuple(int(x) for x in inner.split(",")) if inner else ()
    if any(x < 0 for x in out):
        raise SurfaceSyntaxError(line, f"{key}= exponents must be nonnegative")
    return out


def _term(tokens: list[str], line: int, keys: tuple, n: int, d: int) -> tuple:
    if len(tokens) < 2:
        raise SurfaceSyntaxError(line, "term line needs a coefficient")
    try:
        coeff = parse_gq(tokens[1])
    except ValueError:
        raise SurfaceSyntaxError(line, f"bad coefficient {tokens[1]!r}") from None
    fields: dict = {}
    comp = 1
    for tok in tokens[2:]:
        if "=" not in tok:
            raise SurfaceSyntaxError(line, f"expected key=value, got {tok!r}")
        key, value = tok.split("=", 1)
        if key in fields:
            raise SurfaceSyntaxError(line, f"duplicate key {key!r}")
        if key == "comp":
            comp = _int(value, line, "comp", 1)
            if comp > d:
                raise SurfaceSyntaxError(line, f"comp={comp} exceeds codim {d}")
            fields["comp"] = comp
        elif key in keys:
            fields[key] = _array(value, line, key)
        else:
            raise SurfaceSyntaxError(line, f"unknown key {key!r}")
    fields.pop("comp", None)
    sizes = {"z": n, "zb": n, "chi": n, "u": d, "w": d, "tau": d}
    arrays = []
    for key in keys:
        v = fields.get(key, ())
        if v and len(v) != sizes[key]:
            raise SurfaceSyntaxError(line, f"{key}= should have {sizes[key]} entries, got {len(v)}")
        arrays.append(v if v else (0,) * sizes[key])
    return coeff, arrays, comp - 1


def parse_surface(text: str, order: int | None = None) -> SurfaceSpec:
    """Parse ``.srf`` text; ``order`` overrides the ``trunc`` header."""
    header: dict = {}
    term_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head in _HEADERS:
            if len(tokens) != 2:
                raise SurfaceSyntaxError(lineno, f"{head} takes exactly one value")
            if head in header:
                raise SurfaceSyntaxError(lineno, f"duplicate header {head!r}")
            header[head] = (tokens[1], lineno)
        elif head in ("term", "cterm"):
            term_lines.append((lineno, tokens))
        else:
            raise SurfaceSyntaxError(lineno, f"unknown directive {head!r}")
    for h in _REQUIRED:
        if h not in header:
            raise MissingHeader(0, f"missing header {h!r}")
    name = header.get("surface", ("surface", 0))[0]
    n = _int(header["n"][0], header["n"][1], "n", 1)
    d = _int(header["codim"][0], header["codim"][1], "codim", 1) if "codim" in header else 1
    form, form_line = header["form"]
    if form not in ("real", "complex"):
        raise SurfaceSyntaxError(form_line, f"form must be real or complex, got {form!r}")
    trunc = _int(header["trunc"][0], header["trunc"][1], "trunc", 1)
    want = "term" if form == "real" else "cterm"
    terms = []
    for lineno, tokens in term_lines:
        if tokens[0] != want:
            raise SurfaceSyntaxError(lineno, f"{tokens[0]} lines are not allowed in form {form}")
        if form == "real":
            c, (a, b, u), comp = _term(tokens, lineno, _REAL_KEYS, n, d)
            terms.append(RealTerm(c, a, b, u, comp))
        else:
            c, (a, w, chi, tau), comp = _term(tokens, lineno, _COMPLEX_KEYS, n, d)
            terms.append(ComplexTerm(c, a, w, chi, tau, comp))
    N = trunc if order is None else order
    if form == "real":
        return complexify(terms, n, d, N, name)
    return from_complex_terms(terms, n, d, N, name)


def load_surface(path: str | Path, order: int | None = None) -> SurfaceSpec:
    return parse_surface(Path(path).read_text(), order)


def _arr(v) -> str:
    return "[" + ",".join(str(x) for x in v) + "]"


def serialize_surface(S: SurfaceSpec) -> str:
    lines = [f"surface {S.name}", f"n {S.n}", f"codim {S.d}", f"form {S.source_form}", f"trunc {S.order}"]
    for t in S.terms:
        comp = f" comp={t.comp + 1}" if S.d > 1 else ""
        if S.source_form == "real":
            lines.append(f"term {format_gq(t.coeff)} z={_arr(t.z)} zb={_arr(t.zb)} u={_arr(t.u)}{comp}")
        else:
            lines.append(f"cterm {format_gq(t.coeff)} z={_arr(t.z)} w={_arr(t.w)} chi={_arr(t.chi)} "
                         f"tau={_arr(t.tau)}{comp}")
    return "\n".join(lines) + "\n"
