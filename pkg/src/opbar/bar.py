"""The operadic bar construction core: free algebras, the simplicial Kan
object of a multifunctor, realization with its operad action, untangling,
and the comparison map between the categorical and operadic extensions.

Elements of iterated free algebras are decorated leveled trees, stored as
nested labels:

    leaf:  ("lf", object, degree, carrier_label)
    word:  ("wd", mkey, (child, ..., child))     mkey a multimorphism key
    root:  ("rt", okey, (word, ..., word))       okey an operad key

Tensor factors are ordered children-first, decoration last (the root complex
is C_{v_1} (x) ... (x) C_{v_k} (x) O(k)).  Symmetric-group coinvariants at
every node are realized by canonical orbit representatives: a node label is
the minimum of its signed orbit, and orbits carrying a sign conflict die.
All structure maps canonicalize, and the simplicial identities plus d^2 = 0
are asserted exactly on every construction.
"""

from __future__ import annotations

import itertools

from .barcat import BarBimoduleComplex, _free_quotient
from .complexes import ChainComplex, ChainMap, homology, is_quasi_iso
from .dgcat import DgCategory, DgFunctor, LeftModule, RightModule, \
    under_functor_left_module
from .errors import ArityOverflow, EngineError, NonPermutationAction, \
    UnorderedSequence
from .lincomb import add_into, bilinear, combine, eq as lc_eq, linear, \
    scaled, scaled_int
from .linalg import Mat
from .multicat import MultiAlgebra, MultiCat, MultiFunctor, PropData, \
    perm_morphism, prop_of
from .simplicial import RealizedComplex, SimplicialComplexObj, realize, shuffles
from .symgrp import GroupRingModule, Perm, koszul_sign, tensor_over_group_ring


def _reorder_sign_int(degrees_src, order):
    sign = 1
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            if order[a] > order[b] and degrees_src[order[a]] % 2 \
                    and degrees_src[order[b]] % 2:
                sign = -sign
    return sign


def _ev_sign(fdeg, args_deg):
    """Sign of the evaluation pairing in the order (arguments, operation)."""
    return -1 if (fdeg % 2 and args_deg % 2) else 1


class WordCalculus:
    """Label-level operations for decorated leveled trees over (pi, A)."""

    def __init__(self, pi: MultiFunctor, A: MultiAlgebra):
        self.pi = pi
        self.M = pi.source
        self.O = pi.target
        self.A = A
        self.ring = self.M.ring
        self._deg = {}
        self._canon = {}

    # -- label structure ----------------------------------------------------

    def deg(self, label) -> int:
        d = self._deg.get(label)
        if d is None:
            kind = label[0]
            if kind == "lf":
                d = label[2]
            else:
                d = label[1][2] + sum(self.deg(c) for c in label[2])
            self._deg[label] = d
        return d

    def obj(self, label):
        if label[0] == "lf":
            return label[1]
        return label[1][1]

    def leaf_keys(self, x):
        c = self.A.carrier(x)
        return [("lf", x, d, l) for d in c.degrees() for l in c.labels(d)]

    # -- canonical orbit representatives ----------------------------------

    def _orbit(self, structure, key, children):
        """All signed orbit elements of a node; None when the orbit dies."""
        k = len(children)
        ring = self.ring
        seen = {}
        for images in itertools.permutations(range(1, k + 1)):
            sigma = Perm(images)
            hit = structure.act(sigma, key)
            if len(hit) != 1:
                raise NonPermutationAction(
                    "node canonicalization needs signed permutation actions")
            ((nk, coeff),) = hit.items()
            if ring.eq(coeff, ring.one):
                s = 1
            elif ring.eq(coeff, ring.from_int(-1)):
                s = -1
            else:
                raise NonPermutationAction("non-unit symmetry coefficient")
            nc = tuple(children[sigma(t) - 1] for t in range(1, k + 1))
            s *= koszul_sign(sigma, [self.deg(c) for c in children])
            cand = (nk, nc)
            if cand in seen and seen[cand] != s:
                return None
            seen.setdefault(cand, s)
        return seen

    def make_node(self, kind, structure, key, children) -> dict:
        """Canonical class of a node, as a linear combination (at most one term)."""
        children = tuple(children)
        ck = (kind, key, children)
        cached = self._canon.get(ck)
        if cached is None:
            orbit = self._orbit(structure, key, children)
            if orbit is None:
                cached = {}
            else:
                rep = min(orbit, key=repr)
                s = orbit[(key, children)] * orbit[rep]
                cached = {(kind, rep[0], rep[1]): self.ring.from_int(s)}
            self._canon[ck] = cached
        return cached

    def make_word(self, mkey, children) -> dict:
        return self.make_node("wd", self.M, mkey, children)

    def make_root(self, okey, children) -> dict:
        return self.make_node("rt", self.O, okey, children)

    def node_lc(self, kind, structure, key_lc, child_lcs) -> dict:
        """Multilinear node constructor."""
        ring = self.ring
        acc = {(): ring.one}
        for lc in child_lcs:
            new = {}
            for combo, cv in acc.items():
                for l, v in lc.items():
                    add_into(ring, new, combo + (l,), ring.mul(cv, v))
            acc = new
        out = {}
        for key, kv in key_lc.items():
            for combo, cv in acc.items():
                for l, v in self.make_node(kind, structure, key, combo).items():
                    add_into(ring, out, l, ring.mul(kv, ring.mul(cv, v)))
        return out

    # -- differential -------------------------------------------------------

    def diff_label(self, label) -> dict:
        ring = self.ring
        kind = label[0]
        if kind == "lf":
            _, x, d, l = label
            return {("lf", x, dd, ll): v
                    for (dd, ll), v in self.A.diff_carrier(x, (d, l)).items()}
        structure = self.M if kind == "wd" else self.O
        key, children = label[1], label[2]
        out = {}
        pre = 0
        for t, c in enumerate(children):
            s = -1 if pre % 2 else 1
            for cl, v in self.diff_label(c).items():
                hit = self.make_node(kind, structure, key,
                                     children[:t] + (cl,) + children[t + 1:])
                for l2, v2 in hit.items():
                    add_into(ring, out, l2,
                             ring.mul(ring.from_int(s), ring.mul(v, v2)))
            pre += self.deg(c)
        s = -1 if pre % 2 else 1
        for k2, v in structure.diff_key(key).items():
            for l2, v2 in self.make_node(kind, structure, k2, children).items():
                add_into(ring, out, l2,
                         ring.mul(ring.from_int(s), ring.mul(v, v2)))
        return out

    # -- level enumeration ----------------------------------------------------

    def words_by_depth(self, depth):
        """{object: [canonical word labels]} for uniform-depth words."""
        levels = [{x: self.leaf_keys(x) for x in self.M.objects}]
        for _ in range(depth):
            prev = levels[-1]
            cur = {x: [] for x in self.M.objects}
            seen = set()
            for mkey in self.M.all_keys():
                pools = [prev[x] for x in mkey[0]]
                for combo in itertools.product(*pools):
                    for l in self.make_word(mkey, combo):
                        if l not in seen:
                            seen.add(l)
                            cur[self.obj(l)].append(l)
            levels.append(cur)
        return levels[-1]

    def level_basis(self, n):
        """Canonical root labels over depth-n words."""
        words = self.words_by_depth(n)
        pool = []
        for x in self.M.objects:
            pool.extend(words[x])
        star = self.O.objects[0]
        out = []
        seen = set()
        for k in range(1, self.O.arity_max + 1):
            okeys = self.O.basis_keys((star,) * k, star)
            if not okeys:
                continue
            for combo in itertools.product(pool, repeat=k):
                for okey in okeys:
                    for l in self.make_root(okey, combo):
                        if l not in seen:
                            seen.add(l)
                            out.append(l)
        return out

    def level_complex(self, n) -> ChainComplex:
        ring = self.ring
        basis = {}
        for l in self.level_basis(n):
            basis.setdefault(self.deg(l), []).append(l)
        cpx = ChainComplex(ring, "Z", basis, {}, validate=False)
        diff = {}
        for d in cpx.degrees():
            pd = cpx.pred(d)
            m = Mat.zeros(ring, cpx.dim(pd), cpx.dim(d))
            for j, l in enumerate(cpx.labels(d)):
                for l2, v in self.diff_label(l).items():
                    m.add_to(cpx.index(pd, l2), j, v)
            if not m.is_zero():
                diff[d] = m
        cpx.diff = diff
        cpx.validate()
        return cpx

    # -- faces and degeneracies --------------------------------------------------

    def face_root_collapse(self, label) -> dict:
        """d_0: project depth-1 decorations along pi and compose at the root."""
        ring = self.ring
        okey, words = label[1], label[2]
        degs = []
        src_order = []
        pieces = []  # (children, mkey) per word
        for w in words:
            if w[0] != "wd":
                raise EngineError("root collapse needs depth >= 1")
            pieces.append((w[2], w[1]))
        # tensor order: (c_1, m_1, c_2, m_2, ..., theta); target:
        # (c_1, ..., c_k, m_1, ..., m_k, theta)
        degs = []
        flat = []
        for t, (cs, mk) in enumerate(pieces):
            for ci, c in enumerate(cs):
                flat.append(("c", t, ci))
                degs.append(self.deg(c))
            flat.append(("m", t))
            degs.append(mk[2])
        order = [flat.index(("c", t, ci))
                 for t, (cs, _) in enumerate(pieces) for ci in range(len(cs))]
        order += [flat.index(("m", t)) for t in range(len(pieces))]
        sign = _reorder_sign_int(degs, order)
        # gamma in O over the projected decorations
        pi_parts = [self.pi.on_key(mk) for _, mk in pieces]
        gam = self.O.gamma(okey, pi_parts)
        all_children = tuple(c for cs, _ in pieces for c in cs)
        out = {}
        for gk, gv in gam.items():
            for l2, v2 in self.make_root(gk, all_children).items():
                add_into(ring, out, l2,
                         ring.mul(ring.from_int(sign), ring.mul(gv, v2)))
        return out

    def collapse_word_once(self, label) -> dict:
        """Compose a word's children (depth-1 collapse inside M)."""
        ring = self.ring
        mkey, children = label[1], label[2]
        degs = []
        flat = []
        pieces = []
        for t, c in enumerate(children):
            if c[0] != "wd":
                raise EngineError("inner collapse needs word children")
            pieces.append((c[2], c[1]))
        for t, (cs, mk) in enumerate(pieces):
            for ci, c in enumerate(cs):
                flat.append(("c", t, ci))
                degs.append(self.deg(c))
            flat.append(("m", t))
            degs.append(mk[2])
        order = [flat.index(("c", t, ci))
                 for t, (cs, _) in enumerate(pieces) for ci in range(len(cs))]
        order += [flat.index(("m", t)) for t in range(len(pieces))]
        sign = _reorder_sign_int(degs, order)
        total_arity = sum(len(cs) for cs, _ in pieces)
        if total_arity > self.M.arity_max:
            # zero truncation: the composite multimorphism space vanishes
            gam = {}
        else:
            gam = self.M.gamma(mkey, [{mk: ring.one} for _, mk in pieces])
        all_children = tuple(c for cs, _ in pieces for c in cs)
        out = {}
        for gk, gv in gam.items():
            for l2, v2 in self.make_word(gk, all_children).items():
                add_into(ring, out, l2,
                         ring.mul(ring.from_int(sign), ring.mul(gv, v2)))
        return out

    def evaluate_word(self, label) -> dict:
        """Apply the algebra action to a depth-1 word (leaf children)."""
        ring = self.ring
        mkey, children = label[1], label[2]
        args = tuple((c[2], c[3]) for c in children)
        s = _ev_sign(mkey[2], sum(self.deg(c) for c in children))
        y = mkey[1]
        out = {}
        for (dd, ll), v in self.A.apply_key(mkey, args).items():
            add_into(ring, out, ("lf", y, dd, ll),
                     ring.mul(ring.from_int(s), v))
        return out

    def _map_children(self, label, fn) -> dict:
        """Apply a degree-0 label map to every child of a node, multilinearly."""
        kind = label[0]
        structure = self.M if kind == "wd" else self.O
        key, children = label[1], label[2]
        return self.node_lc(kind, structure, {key: self.ring.one},
                            [fn(c) for c in children])

    def face(self, n, i, label) -> dict:
        """The i-th face on a level-n root label."""
        if i == 0:
            return self.face_root_collapse(label)

        def descend(depth):
            if depth == 1:
                if i == n:
                    return self.evaluate_word
                return self.collapse_word_once
            inner = descend(depth - 1)
            return lambda l: self._map_children(l, inner)

        fn = descend(i if i < n else n)
        return self._map_children(label, fn)

    def degen(self, n, i, label) -> dict:
        """The i-th degeneracy: insert a unit level at depth i + 1."""
        def wrap(l) -> dict:
            return self.make_word(self.M.unit_key(self.obj(l)), (l,))

        def descend(depth):
            if depth == 0:
                return wrap
            inner = descend(depth - 1)
            return lambda l: self._map_children(l, inner)

        fn = descend(i)
        return self._map_children(label, fn)


# ---------------------------------------------------------------------------
# Free algebra
# ---------------------------------------------------------------------------


class FreeAlgebraResult:
    def __init__(self, complexes, inclusions, ordered, iso):
        self.complexes = complexes
        self.inclusions = inclusions
        self.ordered = ordered
        self.iso = iso


def free_algebra(M: MultiCat, carriers: dict, arity_max=None,
                 pi=None) -> FreeAlgebraResult:
    """The free M-algebra on a family of complexes, with inclusions and the
    ordered form (tensor over the group rings of sequence stabilizers).

    The canonical isomorphism with the ordered form is verified on the nose:
    both composites are identity matrices.
    """
    if arity_max is not None and arity_max != M.arity_max:
        raise ArityOverflow("free algebra truncation must match the bound")
    ring = M.ring
    dummy_pi = pi or _dummy_pi(M)
    A = MultiAlgebra(M, carriers, lambda alg, f, args: {}, name="carrier")
    calc = WordCalculus(dummy_pi, A)
    words = calc.words_by_depth(1)
    complexes = {}
    inclusions = {}
    ordered = {}
    iso = {}
    for y in M.objects:
        basis = {}
        for l in words[y]:
            basis.setdefault(calc.deg(l), []).append(l)
        cpx = ChainComplex(ring, "Z", basis, {}, validate=False)
        diff = {}
        for d in cpx.degrees():
            pd = cpx.pred(d)
            m = Mat.zeros(ring, cpx.dim(pd), cpx.dim(d))
            for j, l in enumerate(cpx.labels(d)):
                for l2, v in calc.diff_label(l).items():
                    m.add_to(cpx.index(pd, l2), j, v)
            if not m.is_zero():
                diff[d] = m
        cpx.diff = diff
        cpx.validate()
        complexes[y] = cpx

        def inc_fn(dl, l, y=y, cpx=cpx):
            _d, _l = dl, l
            hit = calc.make_word(M.unit_key(y), (("lf", y, _d, _l),))
            return [(k, v) for k, v in hit.items()]

        c = carriers[y]
        inclusions[y] = ChainMap.from_label_fn2(
            c, cpx, 0, lambda d, l, y=y: [
                (k, v) for k, v in
                calc.make_word(M.unit_key(y), (("lf", y, d, l),)).items()])
        ocpx, fwd, bwd = _ordered_form(M, calc, carriers, y, cpx)
        ordered[y] = ocpx
        iso[y] = (fwd, bwd)
        if not fwd.compose(bwd).eq(ChainMap.identity(ocpx)) or \
                not bwd.compose(fwd).eq(ChainMap.identity(cpx)):
            raise EngineError("ordered-form comparison is not an isomorphism")
    return FreeAlgebraResult(complexes, inclusions, ordered, iso)


def _dummy_pi(M: MultiCat):
    from .fixtures import unit_operad
    O = unit_operad(M.ring, M.arity_max)

    def key_fn(F, key):
        raise EngineError("projection not available in this context")

    return MultiFunctor(M, O, {x: O.objects[0] for x in M.objects}, key_fn,
                        name="none")


def _ordered_form(M, calc, carriers, y, cpx):
    """(+)_{xs nondecreasing} M(xs; y) (x)_{R[Aut(xs)]} (C_{x_1} (x) ... )."""
    ring = M.ring
    order = {x: i for i, x in enumerate(M.objects)}
    pieces = []
    for n in range(1, M.arity_max + 1):
        for xs in itertools.combinations_with_replacement(M.objects, n):
            xs = tuple(sorted(xs, key=lambda x: order[x]))
            hom = M.complex(xs, y)
            if hom is None:
                continue
            homc = ChainComplex(ring, "Z",
                                {d: [(xs, y, d, l) for l in hom.labels(d)]
                                 for d in hom.degrees()},
                                {d: m for d, m in hom.diff.items()},
                                validate=False)
            leafc = ChainComplex.tensor_many(
                ring, [carriers[x] for x in xs], tag="x")
            auts = [p for p in itertools.permutations(range(1, n + 1))
                    if tuple(xs[i - 1] for i in p) == xs]
            gens = _gens_of(auts, n)
            right = GroupRingModule(
                "right", n, gens, homc,
                [_act_hom_map(M, homc, g) for g in gens], check=True)
            left = GroupRingModule(
                "left", n, gens, leafc,
                [_act_leaf_map(ring, leafc, carriers, xs, g) for g in gens],
                check=True)
            quot, proj = tensor_over_group_ring(right, left)
            pieces.append((xs, quot, proj, homc, leafc))
    basis = {}
    for xs, quot, proj, _, _ in pieces:
        for d in quot.degrees():
            for l in quot.labels(d):
                basis.setdefault(d, []).append(("of", xs, l))
    ocpx = ChainComplex(ring, "Z", basis, {}, validate=False)
    diff = {}
    for d in ocpx.degrees():
        pd = ocpx.pred(d)
        m = Mat.zeros(ring, ocpx.dim(pd), ocpx.dim(d))
        for j, (_, xs, l) in enumerate(ocpx.labels(d)):
            quot = next(q for (x2, q, _, _, _) in pieces if x2 == xs)
            col = quot.d_mat(d).column(quot.index(d, l))
            for i2, v in col.items():
                m.add_to(ocpx.index(pd, ("of", xs, quot.labels(pd)[i2])), j, v)
        if not m.is_zero():
            diff[d] = m
    ocpx.diff = diff
    ocpx.validate()

    proj_of = {xs: (quot, proj) for xs, quot, proj, _, _ in pieces}

    def fwd_fn(d, label):
        # free-word representative -> ordered class
        _, mkey, children = label
        xs_raw = mkey[0]
        n = len(xs_raw)
        sorted_idx = sorted(range(n), key=lambda t: (order[xs_raw[t]], t))
        sigma = Perm([t + 1 for t in sorted_idx])
        xs_sorted = tuple(xs_raw[t] for t in sorted_idx)
        quot, proj = proj_of[xs_sorted]
        hit = M.act(sigma, mkey)
        child_degs = [calc.deg(c) for c in children]
        ks = koszul_sign(sigma, child_degs)
        new_children = tuple(children[sigma(t) - 1] for t in range(1, n + 1))
        leaf_label = ("x", tuple(c[3] for c in new_children))
        out = []
        for mk2, v in hit.items():
            big = ("t", mk2, leaf_label)
            d0 = calc.deg(label)
            for tl, c in proj.apply_label(d0, big).items():
                out.append((("of", xs_sorted, tl),
                            ring.mul(ring.from_int(ks), ring.mul(v, c))))
        return out

    def bwd_fn(d, label):
        _, xs, l = label
        _, mk2, leaf_label = l
        leaves = tuple(("lf", xs[t], carriers[xs[t]].degree_of(ll), ll)
                       for t, ll in enumerate(leaf_label[1]))
        return list(calc.make_word(mk2, leaves).items())

    fwd = ChainMap.from_label_fn2(cpx, ocpx, 0, fwd_fn)
    bwd = ChainMap.from_label_fn2(ocpx, cpx, 0, bwd_fn)
    return ocpx, fwd, bwd


def _gens_of(auts, n):
    from .multicat import _group_gens
    return _group_gens([Perm(p) for p in auts])


def _act_hom_map(M, homc, g):
    ring = M.ring

    def fn(d, key):
        hit = M.act(g, key)
        return list(hit.items())

    return ChainMap.from_label_fn2(homc, homc, 0, fn, validate=False)


def _act_leaf_map(ring, leafc, carriers, xs, g):
    # right action on the leaf tensor: permute factors by g with Koszul signs
    def fn(d, label):
        _, ls = label
        degs = [carriers[xs[t]].degree_of(ls[t]) for t in range(len(ls))]
        ks = koszul_sign(g, degs)
        new = tuple(ls[g(t + 1) - 1] for t in range(len(ls)))
        return [(("x", new), ks)]

    return ChainMap.from_label_fn2(leafc, leafc, 0, fn, validate=False)


# ---------------------------------------------------------------------------
# The simplicial Kan object and its realization
# ---------------------------------------------------------------------------


def simplicial_kan(pi: MultiFunctor, A: MultiAlgebra, n_max, arity_max=None,
                   check=True):
    """The simplicial object whose realization models the operadic extension.

    Levels are root-coinvariant decorated leveled trees; faces project to the
    operad (d_0), compose inside the multicategory (0 < i < n), or apply the
    algebra (d_n); degeneracies insert unit levels.
    """
    if len(pi.target.objects) != 1:
        raise EngineError("the target of pi must be an operad (one object)")
    if arity_max is not None and arity_max != pi.source.arity_max:
        raise ArityOverflow("arity bound must match the multicategory")
    calc = WordCalculus(pi, A)
    levels = {n: calc.level_complex(n) for n in range(0, n_max + 1)}
    faces = {}
    degens = {}
    for n in range(1, n_max + 1):
        for i in range(0, n + 1):
            faces[(n, i)] = ChainMap.from_label_fn(
                levels[n], levels[n - 1], 0,
                lambda l, n=n, i=i: list(calc.face(n, i, l).items()))
    for n in range(0, n_max):
        for i in range(0, n + 1):
            degens[(n, i)] = ChainMap.from_label_fn(
                levels[n], levels[n + 1], 0,
                lambda l, n=n, i=i: list(calc.degen(n, i, l).items()))
    simp = SimplicialComplexObj(n_max, levels, faces, degens, validate=check)
    simp.calc = calc
    return simp


def operadic_kan(pi: MultiFunctor, A: MultiAlgebra, n_max, arity_max=None,
                 check=True):
    """Realize the Kan object and attach the operad structure maps.

    Returns (realized, structure) where structure.mu(k) is the chain map
    (realized)^(x k) (x) O(k) -> realized assembled through the
    Eilenberg-Zilber shuffles, checked to be a chain map and equivariant
    within the truncation window.
    """
    simp = simplicial_kan(pi, A, n_max, arity_max, check=check)
    real = realize(simp)
    structure = KanAlgebraStructure(simp, real)
    if check:
        for k in range(2, min(pi.target.arity_max, 2) + 1):
            structure.check_chain_map(k)
            structure.check_equivariance(k)
    return real, structure


class KanAlgebraStructure:
    def __init__(self, simp, real: RealizedComplex):
        self.simp = simp
        self.real = real
        self.calc = simp.calc
        self.O = self.calc.O
        self.ring = self.calc.ring

    def _apply_degen_word(self, n, word, label) -> dict:
        """Apply s_{w[0]}, s_{w[1]}, ... (0-based indices) to a level-n label."""
        cur = {label: self.ring.one}
        lvl = n
        for i in word:
            cur = linear(self.ring,
                         lambda l, lv=lvl, ii=i: self.calc.degen(lv, ii, l), cur)
            lvl += 1
        return cur

    def product_levelwise(self, okey, labels) -> dict:
        """Root-graft of same-level elements z_1, ..., z_k along okey."""
        ring = self.ring
        pieces = [(l[2], l[1]) for l in labels]
        degs = []
        flat = []
        for t, (ws, ok) in enumerate(pieces):
            for wi, w in enumerate(ws):
                flat.append(("w", t, wi))
                degs.append(self.calc.deg(w))
            flat.append(("o", t))
            degs.append(ok[2])
        order = [flat.index(("w", t, wi))
                 for t, (ws, _) in enumerate(pieces) for wi in range(len(ws))]
        order += [flat.index(("o", t)) for t in range(len(pieces))]
        sign = _reorder_sign_int(degs, order)
        gam = self.O.gamma(okey, [{ok: ring.one} for _, ok in pieces])
        children = tuple(w for ws, _ in pieces for w in ws)
        out = {}
        for gk, gv in gam.items():
            for l2, v2 in self.calc.make_root(gk, children).items():
                add_into(ring, out, l2,
                         ring.mul(ring.from_int(sign), ring.mul(gv, v2)))
        return out

    def mu(self, k) -> ChainMap:
        """The structure map (realized)^(x k) (x) O(k) -> realized.

        Built from iterated binary Eilenberg-Zilber shuffles (associativity
        of the shuffle map makes the iteration order immaterial) followed by
        the levelwise root graft.
        """
        ring = self.ring
        star = self.O.objects[0]
        ocpx_raw = self.O.complex((star,) * k, star)
        if ocpx_raw is None:
            raise EngineError(f"the operad has no arity-{k} operations")
        ocpx = ChainComplex(
            ring, "Z",
            {d: [((star,) * k, star, d, l) for l in ocpx_raw.labels(d)]
             for d in ocpx_raw.degrees()},
            dict(ocpx_raw.diff), validate=False)
        domain = ChainComplex.tensor_many(
            ring, [self.real.complex] * k + [ocpx], tag="mu")

        def fn(d, label):
            _, parts = label
            return list(self.mu_on_labels(list(parts[:k]), parts[k]).items())

        return ChainMap.from_label_fn2(domain, self.real.complex, 0, fn,
                                       validate=False)

    def mu_on_labels(self, zs, okey) -> dict:
        ring = self.ring
        levels = [z[1] for z in zs]
        total = sum(levels)
        if total > self.simp.n_max:
            return {}
        out = {}
        for sign, words in _multi_shuffle_words(levels):
            factor_lcs = []
            for z, word in zip(zs, words):
                factor_lcs.append(self._apply_degen_word(z[1], word, z[2]))
            combos = [(sign, [])]
            for lc in factor_lcs:
                combos = [(s * _unit_sign(ring, v), labs + [l])
                          for (s, labs) in combos for l, v in lc.items()]
            for s, labs in combos:
                for l3, v3 in self.product_levelwise(okey, labs).items():
                    add_into(ring, out, ("lv", total, l3),
                             ring.mul(ring.from_int(s), v3))
        return out

    def mu2_on_labels(self, la, lb, okey) -> dict:
        return self.mu_on_labels([la, lb], okey)

    def check_chain_map(self, k):
        mu = self.mu(k)
        src = mu.source
        ok_cols = set()
        for d in src.degrees():
            for l in src.labels(d):
                _, parts = l
                if sum(p[1] for p in parts[:k]) <= self.simp.n_max - 1:
                    ok_cols.add(l)
        dmu = _compose_on_subdomain(mu, ok_cols, after_diff=False)
        mud = _compose_on_subdomain(mu, ok_cols, after_diff=True)
        if not dmu.eq(mud):
            raise EngineError("operad structure map is not a chain map")

    def check_equivariance(self, k):
        if k != 2:
            return
        ring = self.ring
        star = self.O.objects[0]
        sigma = Perm((2, 1))
        okeys = self.O.basis_keys((star, star), star)
        for d in self.real.complex.degrees():
            for la in self.real.complex.labels(d):
                for d2 in self.real.complex.degrees():
                    for lb in self.real.complex.labels(d2):
                        if la[1] + lb[1] > self.simp.n_max:
                            continue
                        for okey in okeys:
                            lhs = {}
                            for ok2, v in self.O.act(sigma, okey).items():
                                for l3, v3 in self.mu_on_labels(
                                        [lb, la], ok2).items():
                                    add_into(ring, lhs, l3, ring.mul(v, v3))
                            ks = -1 if (d % 2 and d2 % 2) else 1
                            rhs = scaled_int(
                                ring, self.mu_on_labels([la, lb], okey), ks)
                            if not lc_eq(ring, lhs, rhs):
                                raise EngineError(
                                    "structure map is not equivariant")


def _unit_sign(ring, v):
    if ring.eq(v, ring.one):
        return 1
    if ring.eq(v, ring.from_int(-1)):
        return -1
    raise EngineError("degeneracy fold produced a non-unit coefficient")


def _multi_shuffle_words(levels):
    """Degeneracy words shuffling levels (p_1..p_k) to their sum.

    Returns a list of (sign, [word_1, ..., word_k]); word_t lists 0-based
    degeneracy indices applied first-to-last to factor t.  Built by iterating
    the binary shuffle: at each step the existing partial product receives
    word_a on every already-merged factor and the new factor receives word_b.
    """
    if not levels:
        return [(1, [])]
    states = [(1, [[]], levels[0])]
    for q in levels[1:]:
        new_states = []
        for sign, words, P in states:
            for s2, word_a, word_b in shuffles(P, q):
                new_words = [w + list(word_a) for w in words]
                new_words.append(list(word_b))
                new_states.append((sign * s2, new_words, P + q))
        states = new_states
    return [(s, ws) for s, ws, _ in states]


def _compose_on_subdomain(mu: ChainMap, ok_cols, after_diff):
    """d o mu or mu o d restricted to selected source columns."""
    src = mu.source
    tgt = mu.target
    ring = src.ring
    mats = {}
    from .complexes import differential_as_map
    d_src = differential_as_map(src)
    d_tgt = differential_as_map(tgt)
    full = d_tgt.compose(mu) if not after_diff else mu.compose(d_src)
    for d in src.degrees():
        m = full.mat(d)
        keep = Mat.zeros(ring, m.nrows, m.ncols)
        for (i, j), v in m.d.items():
            if src.labels(d)[j] in ok_cols:
                keep.set(i, j, v)
        mats[d] = keep
    return ChainMap(src, tgt, -1, mats, validate=False)
