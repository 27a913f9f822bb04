import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from crobstruct.exactnum import GQ
from crobstruct.segre import MapSpec, RealTerm, complexify, unit
from crobstruct.series import Series, multiindices

settings.register_profile(
    "repo", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

SURFACES = Path(__file__).resolve().parent.parent / "surfaces"


def rand_gq(rng: random.Random, h: int = 10) -> GQ:
    return GQ(rng.randint(-h, h), rng.randint(-h, h))


def rand_surface(n: int, d: int, rng: random.Random, deg: int = 4, N: int = 6, nterms: int = 5,
                 height: int = 10):
    """Random real polynomial surface Im w = sum |z_j|^2 (in comp 1) + random hermitian terms."""
    terms = []
    for _ in range(nterms):
        comp = rng.randrange(d)
        while True:
            a = tuple(rng.randint(0, 2) for _ in range(n))
            b = tuple(rng.randint(0, 2) for _ in range(n))
            s = tuple(rng.randint(0, 1) for _ in range(d))
            if 2 <= sum(a) + sum(b) + sum(s) <= deg:
                break
        c = rand_gq(rng, height)
        if a == b:
            terms.append(RealTerm(GQ(c.re), a, b, s, comp))
        else:
            terms.append(RealTerm(c, a, b, s, comp))
            terms.append(RealTerm(c.conjugate(), b, a, s, comp))
    for i in range(d):
        for j in range(n):
            terms.append(RealTerm(1, unit(n, j), unit(n, j), (), i))
    return complexify(terms, n, d, N)


def rand_map(n: int, d: int, m: int, rng: random.Random, G_z: bool = True) -> MapSpec:
    """Normalized polynomial map: F = z + O(2), G = G_w w (+ G_z z) + O(2)."""
    nv = n + d

    def poly(linear):
        t = {}
        for e in multiindices(nv, 3, 2):
            if rng.random() < 0.4:
                t[e] = rand_gq(rng, 3)
        t.update(linear)
        return Series(nv, t)

    F = tuple(poly({unit(nv, i): GQ(1)}) for i in range(n))
    G = []
    for _ in range(m + d):
        lin = {unit(nv, n + j): GQ(rng.randint(-3, 3) or 1) for j in range(d)}
        if G_z:
            lin.update({unit(nv, j): GQ(rng.randint(-2, 2)) for j in range(n)})
        G.append(poly(lin))
    return MapSpec(F, tuple(G), n, d)


@pytest.fixture
def rng():
    return random.Random(20261015)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
