"""Compare the tree/recursion jets of Q with a direct solve of the Segre equation on random surfaces."""
from __future__ import annotations

import argparse
import random
import time
from dataclasses import dataclass

from crobstruct.exactnum import GQ
from crobstruct.segre import RealTerm, complexify, derivative_table, jets_as_forms, q_jets_oracle, q_jets_tree, unit


@dataclass
class OracleConfig:
    surfaces: int = 20
    kmax: int = 4
    height: int = 10
    degree: int = 4
    seed: int = 0


def random_surface(n: int, d: int, rng: random.Random, cfg: OracleConfig):
    terms = [RealTerm(1, unit(n, j), unit(n, j), (), i) for i in range(d) for j in range(n)]
    for _ in range(5):
        comp = rng.randrange(d)
        while True:
            a = tuple(rng.randint(0, 2) for _ in range(n))
            b = tuple(rng.randint(0, 2) for _ in range(n))
            s = tuple(rng.randint(0, 1) for _ in range(d))
            if 2 <= sum(a) + sum(b) + sum(s) <= cfg.degree:
                break
        c = GQ(rng.randint(-cfg.height, cfg.height), rng.randint(-cfg.height, cfg.height))
        if a == b:
            terms.append(RealTerm(GQ(c.re), a, b, s, comp))
        else:
            terms += [RealTerm(c, a, b, s, comp), RealTerm(c.conjugate(), b, a, s, comp)]
    return complexify(terms, n, d, cfg.kmax + 2)


def main(cfg: OracleConfig):
    rng = random.Random(cfg.seed)
    bad = 0
    t0 = time.perf_counter()
    for i in range(cfg.surfaces):
        n, d = rng.choice([(1, 1), (2, 1), (1, 2), (2, 2)])
        S = random_surface(n, d, rng, cfg)
        T = derivative_table(S, cfg.kmax)
        oracle = q_jets_oracle(S, cfg.kmax)
        ok = all(a.agrees(b) for k in range(1, cfg.kmax + 1)
                 for a, b in zip(q_jets_tree(S, k, T), jets_as_forms(oracle, k, n, d)))
        bad += not ok
        print(f"surface {i:3d} n={n} d={d}: {'agree' if ok else 'MISMATCH'}")
    print(f"{cfg.surfaces - bad}/{cfg.surfaces} agree, {time.perf_counter() - t0:.1f}s")
    return bad


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    for f, v in OracleConfig().__dict__.items():
        p.add_argument(f"--{f}", type=int, default=v)
    raise SystemExit(1 if main(OracleConfig(**vars(p.parse_args()))) else 0)
