import itertools
import random
from fractions import Fraction

import pytest

from opbar.errors import BadIndex, BadLevel, ExternalEdge
from opbar.trees import LeveledTree, PreStableTree, WeightedTree


def two_vertex_tree():
    # corolla(2) grafted into slot 1 of corolla(2): inputs 1,2 feed the inner
    # vertex, whose output joins input 3 at the root
    return PreStableTree.corolla(2).compose(1, PreStableTree.corolla(2))


def test_collapse_middle_edge_gives_corolla():
    t = two_vertex_tree()
    assert t.n_inputs == 3
    (edge,) = t.internal_edges()
    assert t.collapse_edge(edge) == PreStableTree.corolla(3)


def test_collapse_all_edges_gives_corolla():
    rng = random.Random(4)
    for _ in range(10):
        t = random_tree(rng, max_inputs=5)
        c = t.collapse_all()
        assert c == PreStableTree.corolla(t.n_inputs)


def test_collapse_external_edge_rejected():
    t = two_vertex_tree()
    with pytest.raises(ExternalEdge):
        t.collapse_edge(())


def test_valency_bookkeeping():
    rng = random.Random(5)
    for _ in range(20):
        t = random_tree(rng, max_inputs=5)
        edges = t.internal_edges()
        if not edges:
            continue
        e = rng.choice(edges)
        parent = e[:-1]
        v_minus = t.valency(e)
        v_plus = t.valency(parent)
        merged = t.collapse_edge(e)
        # the merged vertex sits where the parent was
        assert merged.valency(parent) == v_minus + v_plus - 2


def random_tree(rng, max_inputs=4):
    n = rng.randint(1, max_inputs)
    t = PreStableTree.corolla(n)
    for _ in range(rng.randint(0, 2)):
        m = rng.randint(1, 3)
        slot = rng.randint(1, t.n_inputs)
        t = PreStableTree.corolla(m).compose(slot, t)
    return t


def test_compose_basic():
    t = two_vertex_tree()
    assert len(t.vertices()) == 2
    assert t.n_inputs == 3


def test_compose_associativity_structural():
    rng = random.Random(6)
    for _ in range(30):
        t1 = random_tree(rng, 3)
        t2 = random_tree(rng, 3)
        t3 = random_tree(rng, 3)
        i = rng.randint(1, t2.n_inputs)
        # sequential: (t1 -> slot i of t2) -> slot j of t3
        j = rng.randint(1, t3.n_inputs)
        lhs = t1.compose(i, t2).compose(j, t3)
        rhs = t1.compose(i + j - 1, t2.compose(j, t3))
        assert lhs == rhs


def test_compose_disjoint_slots_commute():
    rng = random.Random(7)
    for _ in range(30):
        t3 = random_tree(rng, 4)
        if t3.n_inputs < 2:
            continue
        i1, i2 = sorted(rng.sample(range(1, t3.n_inputs + 1), 2))
        t1 = random_tree(rng, 3)
        t2 = random_tree(rng, 3)
        lhs = t1.compose(i1, t2.compose(i2, t3))
        rhs = t2.compose(i2 + t1.n_inputs - 1, t1.compose(i1, t3))
        assert lhs == rhs


# -- weighted trees -----------------------------------------------------------


def test_weighted_corolla_validates():
    w = WeightedTree.corolla([Fraction(1, 2), Fraction(1, 2)])
    assert w.weights[("out",)] == 1


def test_weight_bound_rejects():
    # bound for 2 inputs: each input weight must be >= w_out / 3
    with pytest.raises(BadIndex):
        WeightedTree.corolla([Fraction(1, 10), Fraction(9, 10)])


def test_weighted_compose_example():
    inner = WeightedTree.corolla([Fraction(1, 2), Fraction(1, 2)])
    outer = WeightedTree.corolla([Fraction(1, 3), Fraction(2, 3)])
    w = inner.compose(1, outer)
    w2 = inner.compose(2, outer)
    assert w.weights[("out",)] == 1
    assert w2.weights[("out",)] == 1
    # all five constraints hold: WeightedTree validates on construction


def test_weighted_compose_random_preserves_invariants():
    rng = random.Random(8)
    for _ in range(40):
        n = rng.randint(1, 3)
        m = rng.randint(1, 3)
        wi = random_weights(rng, n)
        wo = random_weights(rng, m)
        inner = WeightedTree.corolla(wi)
        outer = WeightedTree.corolla(wo)
        i = rng.randint(1, m)
        inner.compose(i, outer)  # validates internally


def random_weights(rng, n):
    # near-equal weights keep every ratio well above the bound 1/(2^n - 1)
    return [1 + Fraction(rng.randint(0, 2), 16) for _ in range(n)]


# -- leveled trees -------------------------------------------------------------


def test_collapse_height_one():
    t = LeveledTree([1, 1, 3], [(0,), (0, 0, 0)])
    c = t.collapse_level(1)
    assert c.sizes == [1, 1]
    assert c.height == 0


def test_collapse_composes_surjections():
    # height 2: root <- {a,b} <- {c,d} <- 3 leaves
    t = LeveledTree([1, 2, 2, 3], [(0, 0), (0, 1), (0, 0, 1)])
    c = t.collapse_level(1)
    assert c.sizes == [1, 2, 3]
    assert c.maps == [(0, 0), (0, 0, 1)]
    assert c.n_leaves == t.n_leaves


def test_insert_then_collapse_identity():
    rng = random.Random(9)
    for _ in range(30):
        t = random_leveled(rng)
        for i in range(0, t.height + 1):
            s = t.insert_level(i)
            assert s.height == t.height + 1
            assert s.collapse_level(i) == t
            assert s.collapse_level(i + 1) == t


def random_leveled(rng, max_height=3, max_width=4):
    n = rng.randint(0, max_height)
    sizes = [1]
    maps = []
    for _ in range(n + 1):
        prev = sizes[-1]
        nxt = rng.randint(prev, max_width + prev - 1)
        # surjection: first `prev` vertices hit each target once, rest random
        m = list(range(prev)) + [rng.randrange(prev) for _ in range(nxt - prev)]
        rng.shuffle(m)
        sizes.append(nxt)
        maps.append(tuple(m))
    return LeveledTree(sizes, maps)


def test_simplicial_identities_on_random_trees():
    rng = random.Random(10)
    for _ in range(25):
        t = random_leveled(rng)
        n = t.height
        # d_i d_j = d_{j-1} d_i  (i < j)
        for i, j in itertools.combinations(range(n + 1), 2):
            assert t.collapse_level(j).collapse_level(i) == \
                t.collapse_level(i).collapse_level(j - 1)
        # s_i s_j = s_{j+1} s_i  (i <= j)
        for i in range(n + 1):
            for j in range(i, n + 1):
                assert t.insert_level(j).insert_level(i) == \
                    t.insert_level(i).insert_level(j + 1)
        # d_i s_j relations
        for i in range(n + 2):
            for j in range(n + 1):
                s = t.insert_level(j)
                if i == j or i == j + 1:
                    assert s.collapse_level(i) == t
                elif i < j:
                    assert s.collapse_level(i) == t.collapse_level(i).insert_level(j - 1)
                else:
                    assert s.collapse_level(i) == t.collapse_level(i - 1).insert_level(j)


def test_bad_level_rejected():
    t = LeveledTree([1, 2], [(0, 0)])
    with pytest.raises(BadLevel):
        t.collapse_level(5)
    with pytest.raises(BadLevel):
        LeveledTree([2, 2], [(0, 1)])
    with pytest.raises(BadLevel):
        LeveledTree([1, 2], [(0, 0, 0)])
