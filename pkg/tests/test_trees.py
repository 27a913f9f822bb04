from itertools import product

import pytest
from hypothesis import given, strategies as st

from crobstruct.series import multinomial_sizes
from crobstruct.trees import (
    MarkedTree, automorphism_count, enumerate_marked_trees, max_tree_size, parse_tree,
)


def build(parents, marks):
    kids = {i: [] for i in range(len(marks))}
    for child, par in enumerate(parents, start=1):
        kids[par].append(child)

    def node(i):
        return MarkedTree(marks[i], tuple(node(c) for c in kids[i]))
    return node(0)


def brute_force_trees(k):
    """Canonical forms of all marked trees from parent arrays and mark vectors."""
    seen = set()
    for v in range(1, 2 * k):
        for parents in product(*[range(i) for i in range(1, v)]):
            for marks in multinomial_sizes(k, v):
                T = build(parents, marks)
                if T.satisfies_conditions():
                    seen.add(T.serialize())
    return seen


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_enumeration_matches_brute_force(k):
    assert {t.serialize() for t in enumerate_marked_trees(k)} == brute_force_trees(k)


def test_counts():
    assert [len(enumerate_marked_trees(k)) for k in range(1, 7)] == [1, 3, 10, 40, 170, 785]


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_max_size(k):
    assert max_tree_size(k) == 2 * k - 1


def test_k2_trees():
    assert [t.serialize() for t in enumerate_marked_trees(2)] == ["0(1,1)", "1(1)", "2"]


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_serialize_roundtrip_and_uniqueness(k):
    trees = enumerate_marked_trees(k)
    assert len({t.serialize() for t in trees}) == len(trees)
    for t in trees:
        assert parse_tree(t.serialize()) == t
        assert t.total == k and t.satisfies_conditions()


def test_automorphisms():
    assert automorphism_count(parse_tree("0(1,1)")) == 2
    assert automorphism_count(parse_tree("0(1,1,1)")) == 6
    assert automorphism_count(parse_tree("0(0(1,1),0(1,1))")) == 8
    assert automorphism_count(parse_tree("0(1,2)")) == 1


@given(st.integers(1, 5), st.data())
def test_children_order_is_canonical(k, data):
    t = data.draw(st.sampled_from(enumerate_marked_trees(k)))
    shuffled = MarkedTree(t.mark, tuple(reversed(t.children)))
    assert shuffled == t


def test_parse_rejects_trailing():
    with pytest.raises(ValueError):
        parse_tree("1(1))")
