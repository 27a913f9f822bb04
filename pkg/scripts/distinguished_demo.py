"""Determinant criterion versus the low-order relation search on coupled n = 4 surfaces.

Surfaces are Im w = sum |z_s|^2 + 2 Re sum_jk C_jk z^alpha_j zbar^beta_k with
alpha = (2,0,0,0), (0,2,0,0) and beta = (0,0,2,0), (0,0,0,2).
"""
from __future__ import annotations

import argparse
import random
from dataclasses import dataclass

from crobstruct.exactnum import GQ, format_gq
from crobstruct.obstruction import determinant_criterion, low_order_obstruction
from crobstruct.segre import RealTerm, complexify, unit

ALPHAS = [(2, 0, 0, 0), (0, 2, 0, 0)]
BETAS = [(0, 0, 2, 0), (0, 0, 0, 2)]


@dataclass
class DemoConfig:
    trials: int = 12
    height: int = 2
    seed: int = 1


def coupled(C):
    terms = [RealTerm(1, unit(4, j), unit(4, j), ()) for j in range(4)]
    for a, row in zip(ALPHAS, C):
        for b, c in zip(BETAS, row):
            if c:
                terms += [RealTerm(c, a, b, ()), RealTerm(c.conjugate(), b, a, ())]
    return complexify(terms, 4, 1, 8)


def main(cfg: DemoConfig):
    rng = random.Random(cfg.seed)
    h = cfg.height
    disagreements = 0
    for t in range(cfg.trials):
        C = [[GQ(rng.randint(-h, h), rng.randint(-h, h)) for _ in range(2)] for _ in range(2)]
        if t % 3 == 0:
            C[1] = [x * 2 for x in C[0]]  # force a singular matrix now and then
        S = coupled(C)
        A = determinant_criterion(S, ALPHAS, BETAS)
        cert = low_order_obstruction(S, [0, 1], ALPHAS)
        agree = cert.found == (A == 0)
        disagreements += not agree
        print(f"A = {format_gq(A):>8}  low-order: {cert.kind:<13} {'consistent' if agree else 'INCONSISTENT'}")
    return disagreements


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    for f, v in DemoConfig().__dict__.items():
        p.add_argument(f"--{f}", type=int, default=v)
    raise SystemExit(1 if main(DemoConfig(**vars(p.parse_args()))) else 0)
