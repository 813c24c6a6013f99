import random
from fractions import Fraction

import pytest

from opbar.barcat import (
    BarBimoduleComplex,
    cat_left_kan,
    complete_tower,
    cyclic_group_homology_oracle,
    group_bar_complex,
    hv_pushout_check,
    reduce_complex,
    telescope_vs_hocolim,
    two_sided_bar,
)
from opbar.coeff import Ring
from opbar.complexes import ChainComplex, ChainMap, homology, is_quasi_iso
from opbar.dgcat import (
    DgCategory,
    DgFunctor,
    group_ring_category,
    poset_category,
    pullback_right_module,
    table_category,
    trivial_left_module,
    trivial_right_module,
    under_functor_left_module,
    functor_right_module,
)
from opbar.errors import NonCommutingSquare
from opbar.linalg import Mat
from opbar.symgrp import Perm

from .genutil import random_complex, random_two_term

Z = Ring.Z()
Q = Ring.Q()


def test_dg_category_builders_validate():
    assert group_ring_category(Z, 2, [Perm((2, 1))]).validate() is None
    assert poset_category(Z, 2).validate() is None


def test_bar_levels_and_identities():
    bar = group_bar_complex(Z, 2, [Perm((2, 1))], 3)
    # levels have rank 2^n (unreduced bar of Z[Z/2] between trivial modules)
    for n in range(0, 4):
        assert bar.simplicial.level(n).dim(n * 0) == 2 ** n


def test_group_homology_z2():
    bar = group_bar_complex(Z, 2, [Perm((2, 1))], 5)
    want = {0: "Z", 1: "Z/2", 2: "0", 3: "Z/2"}
    for deg, expect in want.items():
        assert deg in bar.realized.reliable_degrees
        got = homology(bar.complex, deg)
        assert got.format() == expect
        rank, torsion = cyclic_group_homology_oracle(2, deg)
        oracle = ("Z" if rank == "Z" else "") or ""
        # oracle cross-check
        if deg == 0:
            assert got.free_rank == 1 and not got.invariant_factors
        elif deg % 2 == 1:
            assert got.free_rank == 0 and got.invariant_factors == [2]
        else:
            assert got.is_zero()


def test_group_homology_z3():
    gens = [Perm((2, 3, 1))]
    bar = group_bar_complex(Z, 3, gens, 3)
    assert homology(bar.complex, 1).invariant_factors == [3]
    rank, torsion = cyclic_group_homology_oracle(3, 1)
    assert torsion == [3]


def test_group_homology_rational_vanishes():
    bar = group_bar_complex(Q, 2, [Perm((2, 1))], 5)
    assert homology(bar.complex, 0).format() == "k^1"
    for deg in (1, 2, 3):
        assert homology(bar.complex, deg).is_zero()


def test_bar_acyclicity_onto_module():
    # B(M, A, A) -> M is a quasi-isomorphism (extra degeneracy)
    C = group_ring_category(Z, 2, [Perm((2, 1))])
    Mr = trivial_right_module(C)
    # left module A = the category acting on itself: hom complexes
    from opbar.dgcat import corepresented_right_module
    star = C.objects[0]
    # regular left module: L(a) = C(a, *) with action by precomposition
    idf = DgFunctor.identity(C)
    L = under_functor_left_module(idf, star)
    bar = two_sided_bar(Mr, C, L, 4)
    p, f, q, tensor, const = bar.augmentation_maps()
    assert q.compose(f).eq(p)
    window = [d for d in bar.realized.reliable_degrees if d >= 0]
    assert is_quasi_iso(p, window).ok


def test_augmentation_triangle_on_group_bar():
    bar = group_bar_complex(Z, 2, [Perm((2, 1))], 3)
    p, f, q, tensor, const = bar.augmentation_maps()
    assert q.compose(f).eq(p)
    assert tensor.dim(0) == 1  # Z (x)_{Z[G]} Z = Z


# -- cat_left_kan ---------------------------------------------------------------

def test_cat_left_kan_identity_functor():
    C = poset_category(Z, 1)
    idf = DgFunctor.identity(C)
    R = trivial_right_module(C)
    kan = cat_left_kan(idf, R, 3)
    for c in C.objects:
        bar = kan.bars[c]
        window = [d for d in bar.realized.reliable_degrees if d >= 0]
        # B(R, C, C(-, c)) ~ R(c): homology = Z in degree 0
        assert homology(bar.complex, 0).format() == "Z"
        for d in window:
            if d > 0:
                assert homology(bar.complex, d).is_zero()


def test_cat_left_kan_poset_to_point():
    # p: {0 -> 1} -> point, R given by kappa: C0 -> C1
    A = poset_category(Q, 1)
    P = poset_category(Q, 0)
    p = DgFunctor(A, P, {0: 0, 1: 0},
                  lambda F, k: {(0, 0, 0, "u0_0"): Q.one})
    assert p.validate() is None
    C0 = random_two_term(random.Random(3), Q, tag="c0")
    C1 = random_two_term(random.Random(4), Q, tag="c1")
    # kappa: a quasi-iso built as identity-like on a shared shape
    C1 = C0.relabel(lambda l: ("c1", l))
    kappa = ChainMap.from_label_fn(C0, C1, 0, lambda l: [(("c1", l), 1)])
    R = functor_right_module(
        A, {0: C0, 1: C1},
        {(0, 0, "u0_0"): ChainMap.identity(C0),
         (1, 1, "u1_1"): ChainMap.identity(C1),
         (0, 1, "u0_1"): kappa})
    assert R.validate() is None
    kan = cat_left_kan(p, R, 4)
    bar = kan.bars[0]
    window = [d for d in bar.realized.reliable_degrees
              if min(C0.degrees()) <= d <= 1]
    # quasi-isomorphic to C1 when kappa is a quasi-iso
    inc = ChainMap.from_label_fn(
        C1, bar.complex, 0,
        lambda l: [(("lv", 0, ("bar", (1, C1.degree_of(l), l), (),
                               (1, 0, "u0_0"))), 1)])
    assert is_quasi_iso(inc, window).ok


def test_cat_left_kan_evaluation_functoriality():
    C = poset_category(Z, 2)
    idf = DgFunctor.identity(C)
    R = trivial_right_module(C)
    kan = cat_left_kan(idf, R, 2)
    u01 = (0, 1, 0, "u0_1")
    u12 = (1, 2, 0, "u1_2")
    u02 = (0, 2, 0, "u0_2")
    act01 = kan.action(u01)
    act12 = kan.action(u12)
    act02 = kan.action(u02)
    assert act12.compose(act01).eq(act02)


# -- telescope vs hocolim ----------------------------------------------------------

def test_telescope_constant_sequence():
    c = ChainComplex.single(Z, "a", 0)
    ids = [ChainMap.identity(c), ChainMap.identity(c)]
    rep = telescope_vs_hocolim([c, c, c], ids, 4)
    assert rep.verdict.ok
    assert homology(rep.telescope, 0).format() == "Z"


def test_telescope_times_two_sequence():
    c = ChainComplex.single(Z, "a", 0)
    tw = ChainMap(c, c, 0, {0: Mat.from_rows(Z, [[2]])})
    rep = telescope_vs_hocolim([c, c, c], [tw, tw], 4)
    assert rep.verdict.ok
    assert homology(rep.telescope, 0).format() == "Z"
    assert homology(rep.hocolim.complex, 0).format() == "Z"


def test_telescope_random_sequences():
    rng = random.Random(21)
    for _ in range(6):
        length = rng.randint(1, 3)
        cs = [random_two_term(rng, Z, tag=f"s{t}_") for t in range(length + 1)]
        maps = []
        ok = True
        for t in range(length):
            # random map: compose through a common retract shape; use zero or
            # identity-like maps to guarantee chain-map property
            if cs[t].basis == cs[t + 1].basis and rng.random() < 0.5:
                maps.append(ChainMap.identity(cs[t]))
            else:
                maps.append(ChainMap.zero(cs[t], cs[t + 1]))
        rep = telescope_vs_hocolim(cs, maps, 4)
        assert rep.verdict.ok


# -- Hollender-Vogt ------------------------------------------------------------------

def _point_cat(ring):
    return poset_category(ring, 0)


def test_hv_identity_square():
    C = poset_category(Z, 1)
    idf = DgFunctor.identity(C)
    X = trivial_right_module(C)
    rep = hv_pushout_check(idf, idf, idf, idf, X, 3)
    assert rep.verdict1 and rep.verdict2
    assert rep.implication_holds


def test_hv_point_square():
    # A = b = {*}, C = D: pushout reduces to bar acyclicity
    P = _point_cat(Z)
    C = poset_category(Z, 1)
    inc = DgFunctor(P, C, {0: 0}, lambda F, k: {(0, 0, 0, "u0_0"): Z.one})
    idp = DgFunctor.identity(P)
    idc = DgFunctor.identity(C)
    X = trivial_right_module(P)
    rep = hv_pushout_check(idp, inc, idc, inc, X, 3)
    assert rep.verdict1 and rep.verdict2


def test_hv_planted_failure():
    # D has an extra endomorphism not hit by the pushout
    ring = Z
    P = _point_cat(Z)
    idp = DgFunctor.identity(P)
    Dhom = ChainComplex.free(ring, {0: ["e", "tau"]}, {})
    comp = {("e", "e"): [(1, "e")], ("e", "tau"): [(1, "tau")],
            ("tau", "e"): [(1, "tau")], ("tau", "tau"): [(0, "e")]}
    D = table_category(ring, ["*"], {("*", "*"): {0: ["e", "tau"]}}, {},
                       comp, {"*": "e"}, name="D_extra")
    assert D.validate() is None
    to_d = DgFunctor(P, D, {0: "*"}, lambda F, k: {("*", "*", 0, "e"): ring.one})
    assert to_d.validate() is None
    X = trivial_right_module(P)
    rep = hv_pushout_check(idp, idp, to_d, to_d, X, 3)
    assert not rep.verdict1
    assert rep.implication_holds


def test_hv_square_must_commute():
    P = _point_cat(Z)
    C = poset_category(Z, 1)
    inc0 = DgFunctor(P, C, {0: 0}, lambda F, k: {(0, 0, 0, "u0_0"): Z.one})
    inc1 = DgFunctor(P, C, {0: 1}, lambda F, k: {(1, 1, 0, "u1_1"): Z.one})
    idc = DgFunctor.identity(C)
    X = trivial_right_module(P)
    with pytest.raises(NonCommutingSquare):
        hv_pushout_check(idp := DgFunctor.identity(P), inc0, idc, inc1, X, 2)


# -- completion towers ----------------------------------------------------------------

def test_completion_tower_identity():
    nov = Ring.novikov(Q, 2, 2)
    c = ChainComplex.free(nov, {0: ["y"], 1: ["x"]},
                          {(1, "x", "y"): nov.one})
    idm = ChainMap.identity(c)
    rep = complete_tower(idm, [Fraction(1, 2), 1, 2], range(0, 2))
    assert rep.all_quasi_iso
    assert not rep.flags


def test_completion_tower_unit_deformation():
    nov = Ring.novikov(Q, 2, 1)
    c = ChainComplex.free(nov, {0: ["y"], 1: ["x"]},
                          {(1, "x", "y"): nov.one})
    one_plus_t = nov.add(nov.one, nov.monomial(1, 1))
    f = ChainMap(c, c, 0, {0: Mat(nov, 1, 1, {(0, 0): one_plus_t}),
                           1: Mat(nov, 1, 1, {(0, 0): one_plus_t})})
    rep = complete_tower(f, [1, 2], range(0, 2))
    assert rep.all_quasi_iso


def test_completion_tower_flags_torsion():
    nov = Ring.novikov(Q, 2, 1)
    dx = nov.monomial(1, 1)  # d = T: homology Lambda/T at each level
    c = ChainComplex.free(nov, {0: ["y"], 1: ["x"]}, {(1, "x", "y"): dx})
    idm = ChainMap.identity(c)
    rep = complete_tower(idm, [1, 2], range(0, 2))
    assert rep.flags  # zero-divisor differential entries are flagged
    assert rep.all_quasi_iso  # the identity is still a quasi-iso levelwise


def test_reduce_complex_cutoff():
    nov = Ring.novikov(Q, 2, 1)
    dx = nov.add(nov.one, nov.monomial(1, 1))
    c = ChainComplex.free(nov, {0: ["y"], 1: ["x"]}, {(1, "x", "y"): dx})
    red = reduce_complex(c, 1)
    assert red.ring.cutoff == 1
    assert red.d_mat(1).get(0, 0) == red.ring.one
