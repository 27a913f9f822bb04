"""Degree growth and relation-search certificates for Im w = |z|^2 + sum_k Re(z^k zbar^((k+2)!))."""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from crobstruct.obstruction import certify_nonembeddability, degree_certificate, invariant_lower_bound
from crobstruct.segre import RealTerm, complexify


@dataclass
class FamilyConfig:
    kmax: int = 4
    invariants: bool = True


def factorial_surface(kmax: int):
    terms = [RealTerm(1, (1,), (1,), ())]
    for k in range(2, kmax + 1):
        D = factorial(k + 2)
        terms += [RealTerm(Fraction(1, 2), (k,), (D,), ()), RealTerm(Fraction(1, 2), (D,), (k,), ())]
    return complexify(terms, 1, 1, factorial(kmax + 2) + kmax + 1, f"factorial{kmax}")


def main(cfg: FamilyConfig):
    S = factorial_surface(cfg.kmax)
    print(f"{'k':>2} {'deg target':>10} {'max deg R':>9} {'coarse':>8} certified")
    for k in range(2, cfg.kmax + 1):
        c = degree_certificate(S, k)
        print(f"{k:>2} {c.target_degree:>10} {c.max_R_degree:>9} {str(c.coarse_bound):>8} {c.certified}")
    t0 = time.perf_counter()
    alphas = [(k,) for k in range(2, cfg.kmax + 1)]
    v = certify_nonembeddability(S, len(alphas) - 1, alphas)
    print(f"relation search, m={len(alphas) - 1}: {v.verdict} (unconditional={v.unconditional}, "
          f"{time.perf_counter() - t0:.2f}s)")
    if cfg.invariants:
        r = invariant_lower_bound(S, cfg.kmax)
        print(f"weighted invariants {r.per_k}: total {r.total} (single chart)")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--kmax", type=int, default=FamilyConfig.kmax)
    p.add_argument("--no-invariants", action="store_true")
    a = p.parse_args()
    main(FamilyConfig(a.kmax, not a.no_invariants))
