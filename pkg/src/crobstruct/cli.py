"""Command line entry point.

Exit codes: 0 when the command ran (whatever the verdict), 2 for parse
errors, 3 for precondition violations.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import obstruction as ob
from .errors import EmptyInput, PreconditionError, SurfaceSyntaxError
from .exactnum import format_gq
from .report import format_series, make_report, to_json, to_text, variable_names
from .segre import derivative_table, q_jets_oracle, q_jets_tree, restrict_distinguished
from .series import multiindices
from .surface_io import parse_surface
from .trees import automorphism_count, enumerate_marked_trees, max_tree_size


class ArgError(Exception):
    pass


def parse_multiindices(text: str, n: int) -> list[tuple]:
    """``"2,3"`` for ``n = 1``; otherwise ``"2,0;1,1"`` (``;`` between multiindices)."""
    text = text.strip().replace("[", "").replace("]", "")
    if not text:
        return []
    chunks = text.split(";") if (";" in text or n > 1) else text.split(",")
    out = []
    for ch in chunks:
        try:
            mi = tuple(int(x) for x in ch.split(","))
        except ValueError:
            raise ArgError(f"bad multiindex {ch!r}") from None
        if len(mi) != n or any(x < 0 for x in mi):
            raise ArgError(f"multiindex {ch!r} needs {n} nonnegative entries")
        out.append(mi)
    return out


def parse_index_set(text: str, n: int) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        idx = [int(x) for x in text.split(",")]
    except ValueError:
        raise ArgError(f"bad index set {text!r}") from None
    if any(not 1 <= j <= n for j in idx):
        raise ArgError(f"indices must lie in 1..{n}")
    return [j - 1 for j in idx]


# the builtin budget answers to either name
_DEFAULT_CAPS = ("default", "paper")


def parse_caps(text: str | None):
    if text is None or text in _DEFAULT_CAPS:
        return None
    try:
        parts = dict(p.split("=", 1) for p in text.split(","))
        wt, rhw = int(parts["wt"]), int(parts["rhw"])
    except (ValueError, KeyError):
        raise ArgError(f"--caps expects 'default' or 'wt=<w>,rhw=<r>', got {text!r}") from None
    if wt < 0 or rhw < 0:
        raise ArgError("caps must be nonnegative")
    return lambda k, l: ob.custom_caps(k, wt, rhw)


def _load(args):
    data = Path(args.surface).read_bytes()
    return parse_surface(data.decode(), args.order), data


def _mi(v) -> list:
    return [int(x) for x in v]


# ---------------------------------------------------------------------------
def cmd_solve_q(args):
    S, data = _load(args)
    table = derivative_table(S, args.kmax)
    names = variable_names(S.n)
    out = []
    for k in range(1, args.kmax + 1):
        forms = q_jets_tree(S, k, table)
        for alpha in multiindices(S.n, k, k):
            J = tuple(j for j, a in enumerate(alpha) for _ in range(a))
            for i, f in enumerate(forms):
                out.append({"alpha": _mi(alpha), "comp": i + 1, "value": format_series(f.coeff(J), names)})
    result = {"surface": S.name, "n": S.n, "d": S.d, "exact": table.exact, "jets": out}
    if args.check:
        oracle = q_jets_oracle(S, args.kmax)
        ok = True
        for k in range(1, args.kmax + 1):
            forms = q_jets_tree(S, k, table)
            for alpha in multiindices(S.n, k, k):
                J = tuple(j for j, a in enumerate(alpha) for _ in range(a))
                ok &= all(f.coeff(J).agrees(oracle[alpha][i]) for i, f in enumerate(forms))
        result["oracle_agrees"] = ok
    return result, data


def cmd_derivs(args):
    S, data = _load(args)
    table = derivative_table(S, args.kmax)
    if args.restrict is not None:
        table = restrict_distinguished(S, parse_index_set(args.restrict, S.n), args.kmax, table)
    names = variable_names(S.n)
    entries = [
        {"comp": i + 1, "beta": _mi(b), "gamma": _mi(g), "weight": table.weight(b, g),
         "value": format_series(table.entries[(i, b, g)], names)}
        for (i, b, g) in table.keys()
    ]
    restriction = {"kind": table.restriction[0]}
    if len(table.restriction) > 1:
        restriction["I"] = [j + 1 for j in table.restriction[1]]
    return {"surface": S.name, "exact": table.exact, "restriction": restriction, "entries": entries}, data


def cmd_trees(args):
    if args.k < 1:
        raise PreconditionError("k must be positive")
    trees = enumerate_marked_trees(args.k)
    return {
        "k": args.k,
        "count": len(trees),
        "max_size": max_tree_size(args.k),
        "trees": [{"tree": t.serialize(), "size": t.size, "automorphisms": automorphism_count(t)} for t in trees],
    }, None


def cmd_relation(args):
    S, data = _load(args)
    alphas = parse_multiindices(args.alphas, S.n)
    caps = parse_caps(args.caps)
    if args.target == "Q":
        cert = ob.q_relation(S, alphas, args.k, args.N, caps)
    else:
        i0 = None if args.i0 is None else args.i0 - 1
        cert = ob.rho_relation(S, alphas, args.k, args.N, caps, i0)
    return {"certificate": cert.to_json()}, data


def cmd_certify(args):
    S, data = _load(args)
    alphas = parse_multiindices(args.alphas, S.n)
    v = ob.certify_nonembeddability(S, args.m, alphas, args.N, parse_caps(args.caps))
    return v.to_json(), data


def cmd_degree_cert(args):
    S, data = _load(args)
    ks = [int(x) for x in str(args.k).split(",")]
    table = derivative_table(S, max(ks))
    return {"certificates": [ob.degree_certificate(S, k, table).to_json() for k in ks]}, data


def cmd_invariants(args):
    S, data = _load(args)
    return ob.invariant_lower_bound(S, args.kmax, args.N).to_json(), data


def cmd_distinguished(args):
    S, data = _load(args)
    I_list = parse_index_set(args.I, S.n)
    alphas = parse_multiindices(args.alphas, S.n)
    return {"certificate": ob.low_order_obstruction(S, I_list, alphas, args.N).to_json()}, data


def cmd_detcrit(args):
    S, data = _load(args)
    A = ob.determinant_criterion(S, parse_multiindices(args.alphas, S.n), parse_multiindices(args.betas, S.n))
    return {"A": format_gq(A), "nonzero": bool(A)}, data


def cmd_algdep(args):
    S, data = _load(args)
    if args.kind == "Q":
        mis = parse_multiindices(args.derivs, S.n)
        if not mis:
            raise EmptyInput("algdep needs at least one function")
        jets = ob.q_jet_table(S, max(sum(a) for a in mis))
        funcs = [(ob.q_name(a), jets[a][0]) for a in mis]
    else:
        mis = parse_multiindices(args.derivs, S.n + S.d)
        if not mis:
            raise EmptyInput("algdep needs at least one function")
        table = derivative_table(S, max(sum(a) for a in mis))
        funcs = []
        for a in mis:
            b, g = a[:S.n], a[S.n:]
            funcs.append((ob.rho_name(0, b, g, S.d), table.entry(0, b, g)))
    return {"certificate": ob.algdep_scan(funcs, args.D, args.N).to_json()}, data


COMMANDS = {
    "solve-q": cmd_solve_q,
    "derivs": cmd_derivs,
    "trees": cmd_trees,
    "relation": cmd_relation,
    "certify": cmd_certify,
    "degree-cert": cmd_degree_cert,
    "invariants": cmd_invariants,
    "distinguished": cmd_distinguished,
    "detcrit": cmd_detcrit,
    "algdep": cmd_algdep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("json", "text"), default="text")
    common.add_argument("--timing", action="store_true", help="record wall-clock time in the report")
    surf = argparse.ArgumentParser(add_help=False)
    surf.add_argument("--surface", required=True, help=".srf file")
    surf.add_argument("--order", type=int, default=None, help="override the truncation order")
    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--N", type=int, default=None, help="order through which relations are enforced")
    search.add_argument("--caps", default="default", help="'default' or 'wt=<w>,rhw=<r>'")

    p = argparse.ArgumentParser(prog="crobstruct", description="Jet computations and embeddability obstructions")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve-q", parents=[common, surf], help="Q_{z^alpha}(0, chi') jets")
    s.add_argument("--kmax", type=int, default=3)
    s.add_argument("--check", action="store_true", help="compare with the direct Segre solve")
    s = sub.add_parser("derivs", parents=[common, surf], help="derivative table on S_0")
    s.add_argument("--kmax", type=int, default=3)
    s.add_argument("--restrict", default=None, help="index set I (1-based) for S_0,V_I")
    s = sub.add_parser("trees", parents=[common], help="marked trees of total mark k")
    s.add_argument("--k", type=int, required=True)
    s = sub.add_parser("relation", parents=[common, surf, search], help="single relation search")
    s.add_argument("--alphas", required=True)
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--target", choices=("rho", "Q"), default="rho")
    s.add_argument("--i0", type=int, default=None, help="component excluded at top order (1-based)")
    s = sub.add_parser("certify", parents=[common, surf, search], help="nonembeddability certificate")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--alphas", required=True)
    s = sub.add_parser("degree-cert", parents=[common, surf], help="degree growth certificate (n = d = 1)")
    s.add_argument("--k", required=True, help="order or comma separated orders")
    s = sub.add_parser("invariants", parents=[common, surf], help="weighted invariant lower bounds")
    s.add_argument("--kmax", type=int, default=3)
    s.add_argument("--N", type=int, default=None)
    s = sub.add_parser("distinguished", parents=[common, surf], help="low-order obstruction on S_0,V_I")
    s.add_argument("--I", required=True)
    s.add_argument("--alphas", required=True)
    s.add_argument("--N", type=int, default=None)
    s = sub.add_parser("detcrit", parents=[common, surf], help="determinant criterion")
    s.add_argument("--alphas", required=True)
    s.add_argument("--betas", required=True)
    s = sub.add_parser("algdep", parents=[common, surf], help="bounded-degree algebraic dependence")
    s.add_argument("--derivs", required=True, help="rho: (beta,gamma) multiindices; Q: alpha multiindices")
    s.add_argument("--kind", choices=("rho", "Q"), default="rho")
    s.add_argument("--D", type=int, required=True)
    s.add_argument("--N", type=int, default=None)
    return p


def run(argv: list[str]) -> tuple[int, dict | None, str]:
    """Run a command; returns ``(exit code, report or None, rendered output)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return (e.code if isinstance(e.code, int) else 2), None, ""
    t0 = time.perf_counter()
    try:
        result, data = COMMANDS[args.command](args)
    except (SurfaceSyntaxError, ArgError) as e:
        return 2, None, f"error: {e}"
    except PreconditionError as e:
        return 3, None, f"error: {type(e).__name__}: {e}"
    except OSError as e:
        return 2, None, f"error: {e}"
    timing = time.perf_counter() - t0 if args.timing else None
    echo = {k: v for k, v in vars(args).items() if k not in ("command", "output", "timing")}
    report = make_report(args.command, echo, data, result, timing)
    text = to_json(report) if args.output == "json" else to_text(report)
    return 0, report, text


def main(argv: list[str] | None = None) -> int:
    code, _, text = run(sys.argv[1:] if argv is None else argv)
    if text:
        print(text, file=sys.stdout if code == 0 else sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
