"""Marked rooted trees indexing the terms of the Q-from-rho jet formula.

A marked tree is a root mark ``s`` and a sorted tuple of child subtrees.
Every vertex satisfies ``2 s(a) + l(a) >= 2`` where ``l(a)`` is its number of
children, so leaves carry mark >= 1 and unmarked vertices branch at least
twice.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Protocol

from .errors import NonUnitRhoW
from .exactnum import ONE
from .multilinear import SymForm, partition_product
from .series import Series


@dataclass(frozen=True, order=False)
class MarkedTree:
    mark: int
    children: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(sorted(self.children, key=MarkedTree.sort_key)))

    @property
    def total(self) -> int:
        return self.mark + sum(c.total for c in self.children)

    @property
    def size(self) -> int:
        return 1 + sum(c.size for c in self.children)

    @property
    def arity(self) -> int:
        return len(self.children)

    def serialize(self) -> str:
        if not self.children:
            return str(self.mark)
        return f"{self.mark}(" + ",".join(c.serialize() for c in self.children) + ")"

    def sort_key(self):
        return (self.total, self.serialize())

    def vertices(self):
        """Pre-order list of ``(mark, number of children)`` pairs."""
        out = [(self.mark, self.arity)]
        for c in self.children:
            out.extend(c.vertices())
        return out

    def satisfies_conditions(self) -> bool:
        return all(2 * s + l >= 2 for s, l in self.vertices())

    def __str__(self) -> str:
        return self.serialize()


def parse_tree(text: str) -> MarkedTree:
    """Inverse of :meth:`MarkedTree.serialize`."""
    pos = 0

    def node() -> MarkedTree:
        nonlocal pos
        start = pos
        while pos < len(text) and text[pos].isdigit():
            pos += 1
        mark = int(text[start:pos])
        kids = []
        if pos < len(text) and text[pos] == "(":
            pos += 1
            while True:
                kids.append(node())
                if text[pos] == ",":
                    pos += 1
                    continue
                if text[pos] == ")":
                    pos += 1
                    break
        return MarkedTree(mark, tuple(kids))

    t = node()
    if pos != len(text):
        raise ValueError(f"trailing characters in tree {text!r}")
    return t


def _multisets(pool: list[MarkedTree], start: int, budget: int, count_needed_min: int):
    """Multisets (non-decreasing index sequences) from ``pool[start:]`` with totals summing to ``budget``."""
    if budget == 0:
        if count_needed_min <= 0:
            yield ()
        return
    for i in range(start, len(pool)):
        t = pool[i].total
        if t > budget:
            continue
        for rest in _multisets(pool, i, budget - t, count_needed_min - 1):
            yield (pool[i],) + rest


@lru_cache(maxsize=None)
def enumerate_marked_trees(k: int) -> tuple[MarkedTree, ...]:
    """All marked trees of total mark ``k``, canonical and duplicate free."""
    if k < 1:
        raise ValueError("k must be positive")
    pool: list[MarkedTree] = []
    for j in range(1, k):
        pool.extend(enumerate_marked_trees(j))
    out = []
    for r in range(k, -1, -1):
        min_children = max(0, 2 - 2 * r)
        for kids in _multisets(pool, 0, k - r, min_children):
            if 2 * r + len(kids) < 2:
                continue
            out.append(MarkedTree(r, kids))
    out.sort(key=MarkedTree.sort_key)
    return tuple(out)


def automorphism_count(T: MarkedTree) -> int:
    """Number of mark-preserving automorphisms of the rooted tree."""
    result = 1
    for child, mult in Counter(T.children).items():
        result *= factorial(mult) * automorphism_count(child) ** mult
    return result


def max_tree_size(k: int) -> int:
    return max(T.size for T in enumerate_marked_trees(k))


class RhoJets(Protocol):
    """What :func:`tree_term` needs from a derivative table (codimension one)."""

    def form(self, s: int, l: int) -> SymForm: ...

    def neg_rho_w_inverse(self) -> Series: ...


def _check_unit(table: RhoJets) -> Series:
    inv = table.neg_rho_w_inverse()
    if inv is None:
        raise NonUnitRhoW("rho_w(0, zeta-bar) has zero constant term")
    return inv


def _vertex_factor(table: RhoJets, s: int, l: int, inv: Series) -> SymForm:
    return table.form(s, l).scale(inv)


def tree_term(T: MarkedTree, table: RhoJets, _cache: dict | None = None) -> SymForm:
    """Partition product over the vertices of ``rho_{z^s w^l} / (-rho_w)``."""
    inv = _check_unit(table)
    cache = {} if _cache is None else _cache

    def value(t: MarkedTree) -> SymForm:
        v = cache.get(t)
        if v is None:
            v = _vertex_factor(table, t.mark, t.arity, inv)
            for c in t.children:
                v = partition_product(v, value(c))
            cache[t] = v
        return v

    return value(T)


def q_jet_from_trees(k: int, table: RhoJets) -> SymForm:
    """``Q_{z^k}(0, zeta-bar)`` as the automorphism-weighted sum of tree terms.

    The partition product counts each ordering of identical child subtrees
    separately, so every tree is divided by its automorphism count.
    """
    cache: dict = {}
    total = None
    for T in enumerate_marked_trees(k):
        term = tree_term(T, table, cache)
        aut = automorphism_count(T)
        if aut != 1:
            term = term.scale(ONE / aut)
        total = term if total is None else total + term
    return total
