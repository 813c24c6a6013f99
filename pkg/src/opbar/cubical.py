"""Finitely presented symmetric cubical sets.

A presentation lists the nondegenerate cubes per dimension together with
tables for the faces d^+/-_{n,i}, the transpositions p_{n,i}, and implicitly
all degeneracies.  A general element is stored in the normal form

    (word, core)  with word = (j_1 < j_2 < ... < j_m)

meaning s_{j_m} o ... o s_{j_1} applied to the nondegenerate cube `core`
(s_{j_1} first).  All structure maps normalize through the standard cubical
relations, so degenerate cubes are never materialized.

The dimension-lowering/raising identities used here, with the face index
written for the map's source dimension:

    d_i s_j = s_{j-1} d_i (i<j),  id (i=j),  s_j d_{i-1} (i>j)
    s_i s_j = s_{j+1} s_i (i<=j)
    d_j p_i = p_{i-1} d_j (j<i),  d_{i+1} (j=i),  d_i (j=i+1),  p_i d_j (j>i+1)
    p_i s_j = s_j p_{i-1} (j<i),  s_{i+1} (j=i),  s_i (j=i+1),  s_j p_i (j>i+1)
"""

from __future__ import annotations

import itertools

from .complexes import ChainComplex, ChainMap
from .errors import EngineError
from .linalg import Mat
from .symgrp import Perm


def word_insert(word, i):
    """Normal form of s_i applied after the degeneracy word `word`."""
    w = list(word)
    pos = len(w)
    while pos > 0 and w[pos - 1] >= i:
        w[pos - 1] += 1
        pos -= 1
    w.insert(pos, i)
    return tuple(w)


def dummy_coordinates(word):
    """Coordinates marked degenerate by the word, in the final dimension."""
    dummies = set()
    for j in word:
        dummies = {d + 1 if d >= j else d for d in dummies}
        dummies.add(j)
    return dummies


class SymCubSet:
    """A truncated symmetric cubical set presented by tables."""

    def __init__(self, n_max, cubes, faces, transpositions, name="K",
                 validate_tables=True):
        self.n_max = n_max
        self.cubes = {d: list(ls) for d, ls in cubes.items() if ls}
        self.dim_of = {}
        for d, ls in self.cubes.items():
            for c in ls:
                if c in self.dim_of:
                    raise EngineError(f"duplicate cube name {c!r}")
                self.dim_of[c] = d
        self.faces = dict(faces)
        self.transp = dict(transpositions)
        self.name = name
        if validate_tables:
            self._check_tables()

    def _check_tables(self):
        for d, ls in self.cubes.items():
            for c in ls:
                for i in range(1, d + 1):
                    for sign in ("+", "-"):
                        if (c, i, sign) not in self.faces:
                            raise EngineError(f"missing face ({c}, {i}, {sign})")
                for i in range(1, d):
                    if (c, i) not in self.transp:
                        raise EngineError(f"missing transposition ({c}, {i})")
        for (c, i, sign), val in self.faces.items():
            self._check_elem(val, self.dim_of[c] - 1)
        for (c, i), val in self.transp.items():
            if self.dim_of.get(val) != self.dim_of[c]:
                raise EngineError(f"transposition table maps {c} off its dimension")

    def _check_elem(self, elem, want_dim):
        word, core = elem
        if core not in self.dim_of:
            raise EngineError(f"unknown cube {core!r}")
        if self.dim_of[core] + len(word) != want_dim:
            raise EngineError(f"element {elem!r} has wrong dimension")

    # -- elements -----------------------------------------------------------

    @staticmethod
    def nd(core):
        return ((), core)

    def elem_dim(self, elem):
        word, core = elem
        return self.dim_of[core] + len(word)

    def elements(self, dim):
        """All normal-form elements of a dimension (degenerate ones included)."""
        out = []
        for core_dim in range(0, dim + 1):
            for core in self.cubes.get(core_dim, ()):  # noqa: B007
                m = dim - core_dim
                for word in _words(core_dim, m):
                    out.append((word, core))
        return out

    # -- structure maps -------------------------------------------------------

    def s(self, elem, i):
        word, core = elem
        return (word_insert(word, i), core)

    def p(self, elem, i):
        word, core = elem
        if not word:
            return ((), self.transp[(core, i)])
        *rest, j = word  # j is applied last
        inner = (tuple(rest), core)
        if j < i:
            w, c = self.p(inner, i - 1)
            return (word_insert(w, j), c)
        if j == i:
            return (word_insert(tuple(rest), i + 1), core)
        if j == i + 1:
            return (word_insert(tuple(rest), i), core)
        w, c = self.p(inner, i)
        return (word_insert(w, j), c)

    def d(self, elem, sign, i):
        word, core = elem
        if not word:
            w, c = self.faces[(core, i, sign)]
            return (w, c)
        *rest, j = word
        inner = (tuple(rest), core)
        if i < j:
            w, c = self.d(inner, sign, i)
            return (word_insert(w, j - 1), c)
        if i == j:
            return inner
        w, c = self.d(inner, sign, i - 1)
        return (word_insert(w, j), c)

    def act(self, perm: Perm, elem):
        """Action of a permutation through its adjacent-transposition word."""
        for i in _transposition_word(perm):
            elem = self.p(elem, i)
        return elem

    # -- validation -------------------------------------------------------------

    def validate(self):
        """Exhaustively check every axiom instance below n_max; None if valid."""
        for n in range(0, self.n_max + 1):
            elems = self.elements(n)
            for x in elems:
                w = self._validate_on(x, n)
                if w is not None:
                    return w
        return None

    def _validate_on(self, x, n):
        def wit(axiom, **kw):
            return {"axiom": axiom, "cube": x, "dim": n, **kw}

        for i, j in itertools.combinations(range(1, n + 1), 2):
            for mu in "+-":
                for nu in "+-":
                    if self.d(self.d(x, nu, j), mu, i) != \
                            self.d(self.d(x, mu, i), nu, j - 1):
                        return wit("eqCubSet1", i=i, j=j, mu=mu, nu=nu)
        if n + 2 <= self.n_max:
            for j in range(1, n + 2):
                for i in range(1, j + 1):
                    if self.s(self.s(x, j), i) != self.s(self.s(x, i), j + 1):
                        return wit("eqCubSet2", i=i, j=j)
        if n + 1 <= self.n_max:
            for j in range(1, n + 2):
                for i in range(1, n + 2):
                    for mu in "+-":
                        lhs = self.d(self.s(x, j), mu, i)
                        if i < j:
                            rhs = self.s(self.d(x, mu, i), j - 1)
                        elif i == j:
                            rhs = x
                        else:
                            rhs = self.s(self.d(x, mu, i - 1), j)
                        if lhs != rhs:
                            return wit("eqCubSet3", i=i, j=j, mu=mu)
        for i in range(1, n):
            if self.p(self.p(x, i), i) != x:
                return wit("eqCubSet4", i=i, kind="involution")
        for i in range(1, n - 1):
            y = x
            for _ in range(3):
                y = self.p(self.p(y, i + 1), i)
            if y != x:
                return wit("eqCubSet4", i=i, kind="braid")
        for i in range(1, n):
            for j in range(i + 2, n):
                if self.p(self.p(x, j), i) != self.p(self.p(x, i), j):
                    return wit("eqCubSet5", i=i, j=j)
        for i in range(1, n):
            for j in range(1, n + 1):
                for mu in "+-":
                    lhs = self.d(self.p(x, i), mu, j)
                    if j < i:
                        rhs = self.p(self.d(x, mu, j), i - 1)
                    elif j == i:
                        rhs = self.d(x, mu, i + 1)
                    elif j == i + 1:
                        rhs = self.d(x, mu, i)
                    else:
                        rhs = self.p(self.d(x, mu, j), i)
                    if lhs != rhs:
                        return wit("eqCubSet-dp", i=i, j=j, mu=mu)
        if n + 1 <= self.n_max:
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    lhs = self.p(self.s(x, j), i)
                    if j < i:
                        rhs = self.s(self.p(x, i - 1), j)
                    elif j == i:
                        rhs = self.s(x, i + 1)
                    elif j == i + 1:
                        rhs = self.s(x, i)
                    else:
                        rhs = self.s(self.p(x, i), j)
                    if lhs != rhs:
                        return wit("eqCubSet6", i=i, j=j)
        return None


def _words(core_dim, m):
    """All degeneracy words of length m on a core of dimension core_dim."""
    if m == 0:
        yield ()
        return
    # valid words j_1 < ... < j_m with j_t <= core_dim + t
    def rec(prefix, t):
        lo = prefix[-1] + 1 if prefix else 1
        hi = core_dim + t
        if t == m + 1:
            yield tuple(prefix)
            return
        for j in range(lo, hi + 1):
            yield from rec(prefix + [j], t + 1)

    yield from rec([], 1)


def _transposition_word(perm: Perm):
    """A word of adjacent transpositions realizing perm (bubble sort).

    The parity of the word equals sign(perm); orbit enumerations only rely
    on that, not on a left/right composition convention.
    """
    arr = list(perm.images)
    n = len(arr)
    swaps = []
    while True:
        done = True
        for i in range(n - 1):
            if arr[i] > arr[i + 1]:
                arr[i], arr[i + 1] = arr[i + 1], arr[i]
                swaps.append(i + 1)
                done = False
        if done:
            break
    return list(reversed(swaps))


def point() -> SymCubSet:
    return SymCubSet(3, {0: ["pt"]}, {}, {}, name="point")


def interval(n_max=3) -> SymCubSet:
    faces = {("e", 1, "-"): ((), "x0"), ("e", 1, "+"): ((), "x1")}
    return SymCubSet(n_max, {0: ["x0", "x1"], 1: ["e"]}, faces, {}, name="interval")


def circle(n_max=3) -> SymCubSet:
    faces = {("e", 1, "-"): ((), "v"), ("e", 1, "+"): ((), "v")}
    return SymCubSet(n_max, {0: ["v"], 1: ["e"]}, faces, {}, name="circle")


# ---------------------------------------------------------------------------
# Tensor product
# ---------------------------------------------------------------------------


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            self.parent[x] = p = self.find(p)
        return p

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if repr(rb) < repr(ra):
                ra, rb = rb, ra
            self.parent[rb] = ra


def _zeta(u: Perm) -> Perm:
    """Remove source letter u^{-1}(1) and target value 1."""
    i = u.inverse()(1)
    img = []
    for j in range(1, u.n + 1):
        if j == i:
            continue
        img.append(u(j) - 1)
    return Perm(img)


def _eta(u: Perm) -> Perm:
    """id x u inside S_{n+1}."""
    return Perm([1] + [u(j) + 1 for j in range(1, u.n + 1)])


def cubical_tensor(K1: SymCubSet, K2: SymCubSet, n_max=None, global_bound=3):
    """The monoidal product, materialized dimension by dimension.

    Raw elements are triples (u, x, y) with u in S_n and x, y normal forms in
    the factors; the gluing relations are the coset relation
    (u o (sigma x tau), x, y) ~ (u, sigma.x, tau.y) and the degeneracy splice
    (u, s_top x, y) ~ (u, x, s_1 y).  Classes are computed by union-find, and
    the nondegenerate cubes of the quotient are the classes missed by every
    degeneracy.  Returns (SymCubSet, classify) where classify(u, x, y) gives
    the normal form of a raw triple in the quotient.
    """
    if n_max is None:
        n_max = min(K1.n_max + K2.n_max, global_bound)
    uf = _UnionFind()
    raw_by_dim = {}
    for n in range(0, n_max + 1):
        raws = []
        for n1 in range(0, n + 1):
            n2 = n - n1
            for x in K1.elements(n1):
                for y in K2.elements(n2):
                    for u in _all_perms(n):
                        raws.append((u.images, n1, x, y))
        raw_by_dim[n] = raws
        for (ui, n1, x, y) in raws:
            u = Perm(ui)
            n2 = n - n1
            # coset relations against adjacent transpositions of each block
            for i in range(1, n1):
                sig = Perm.transposition(n1, i, i + 1)
                blk = _block_embed(sig, n1, n2, left=True)
                uf.union((u.compose(blk).images, n1, x, y),
                         ((ui), n1, K1.p(x, i), y))
            for i in range(1, n2):
                tau = Perm.transposition(n2, i, i + 1)
                blk = _block_embed(tau, n1, n2, left=False)
                uf.union((u.compose(blk).images, n1, x, y),
                         ((ui), n1, x, K2.p(y, i)))
        # degeneracy splice: (u, s_{n1} x', y) ~ (u, x', s_1 y)
        for n1 in range(1, n + 1):
            n2 = n - n1
            for xp in K1.elements(n1 - 1):
                for y in K2.elements(n2):
                    for u in _all_perms(n):
                        lhs = (u.images, n1, K1.s(xp, n1), y)
                        rhs = (u.images, n1 - 1, xp, K2.s(y, 1))
                        uf.union(lhs, rhs)

    # structure maps on raw triples
    def raw_p(raw, i):
        ui, n1, x, y = raw
        u = Perm(ui)
        t = Perm.transposition(u.n, i, i + 1)
        return (t.compose(u).images, n1, x, y)

    def raw_s1(raw):
        ui, n1, x, y = raw
        u = Perm(ui)
        return (_eta(u).images, n1 + 1, K1.s(x, 1), y)

    def raw_s(raw, i):
        # s_i = p_{i-1} o s_{i-1} = (p-word) o s_1
        out = raw_s1(raw)
        for k in range(2, i + 1):
            out = raw_p(out, k - 1)
        return out

    def raw_d(raw, sign, i):
        # d_{i} = d_{i-1} o p_{i-1} iterated down to d_1
        cur = raw
        for k in range(i, 1, -1):
            cur = raw_p(cur, k - 1)
        ui, n1, x, y = cur
        u = Perm(ui)
        pos = u.inverse()(1)
        n2 = u.n - n1
        if pos <= n1:
            return (_zeta(u).images, n1 - 1, K1.d(x, sign, pos), y)
        return (_zeta(u).images, n1, x, K2.d(y, sign, pos - n1))

    # canonical class representatives
    rep_of = {}
    for n, raws in raw_by_dim.items():
        for r in raws:
            root = uf.find(r)
            rep_of[r] = root

    # mark degenerate classes and assign normal forms by BFS from below
    normal = {}
    names = {}
    cubes = {}
    for n in range(0, n_max + 1):
        classes = sorted({rep_of[r] for r in raw_by_dim[n]}, key=repr)
        degenerate = {}
        if n >= 1:
            for r in raw_by_dim[n - 1]:
                base = normal[rep_of[r]]
                for i in range(1, n + 1):
                    img = rep_of_raw(uf, raw_s(r, i))
                    nf = (word_insert(base[0], i), base[1])
                    if img in degenerate and degenerate[img] != nf:
                        raise EngineError("inconsistent degeneracy normal forms")
                    degenerate[img] = nf
        idx = 0
        for cls in classes:
            if cls in degenerate:
                normal[cls] = degenerate[cls]
            else:
                name = f"c{n}_{idx}"
                idx += 1
                names[cls] = name
                normal[cls] = ((), name)
                cubes.setdefault(n, []).append(name)
        # remember a raw representative per nondegenerate class
    # face / transposition tables on nondegenerate classes
    raw_rep = {}
    for n, raws in raw_by_dim.items():
        for r in raws:
            cls = rep_of[r]
            if cls in names and cls not in raw_rep:
                raw_rep[cls] = r
    faces = {}
    transp = {}
    for cls, name in names.items():
        r = raw_rep[cls]
        n = len(r[0])
        for i in range(1, n + 1):
            for sign in "+-":
                img = rep_of_raw(uf, raw_d(r, sign, i))
                faces[(name, i, sign)] = normal[img]
        for i in range(1, n):
            img = rep_of_raw(uf, raw_p(r, i))
            w, c = normal[img]
            if w:
                raise EngineError("transposition image is degenerate")
            transp[(name, i)] = c

    out = SymCubSet(n_max, cubes, faces, transp,
                    name=f"({K1.name}(x){K2.name})")

    def classify(u, x, y):
        """Normal form in the tensor of a raw triple (u in S_n, x, y)."""
        n1 = K1.elem_dim(x)
        key = (u.images if isinstance(u, Perm) else tuple(u), n1, x, y)
        return normal[rep_of[key]]

    return out, classify


def rep_of_raw(uf, raw):
    return uf.find(raw)


def _all_perms(n):
    return [Perm(p) for p in itertools.permutations(range(1, n + 1))]


def _block_embed(p: Perm, n1, n2, left: bool) -> Perm:
    if left:
        return Perm(list(p.images) + list(range(n1 + 1, n1 + n2 + 1)))
    return Perm(list(range(1, n1 + 1)) + [n1 + p(j) for j in range(1, n2 + 1)])


# ---------------------------------------------------------------------------
# Maps, homotopies, chains
# ---------------------------------------------------------------------------


class CubicalMap:
    """A degree-0 map of symmetric cubical sets, given on nondegenerate cubes."""

    def __init__(self, source: SymCubSet, target: SymCubSet, table, check=True):
        self.source = source
        self.target = target
        self.table = dict(table)
        if check:
            w = self.validate()
            if w is not None:
                raise EngineError(f"not a cubical map: {w}")

    def __call__(self, elem):
        word, core = elem
        w, c = self.table[core]
        out = (w, c)
        for j in word:
            out = self.target.s(out, j)
        return out

    def validate(self):
        K1, K2 = self.source, self.target
        for n in range(0, K1.n_max + 1):
            if n > K2.n_max:
                break
            for x in K1.elements(n):
                for i in range(1, n + 1):
                    for mu in "+-":
                        if self(K1.d(x, mu, i)) != K2.d(self(x), mu, i):
                            return {"axiom": "map-face", "cube": x, "i": i, "mu": mu}
                for i in range(1, n):
                    if self(K1.p(x, i)) != K2.p(self(x), i):
                        return {"axiom": "map-transposition", "cube": x, "i": i}
                if n + 1 <= K1.n_max and n + 1 <= K2.n_max:
                    for i in range(1, n + 2):
                        if self(K1.s(x, i)) != K2.s(self(x), i):
                            return {"axiom": "map-degeneracy", "cube": x, "i": i}
        return None


class CubicalHomotopy:
    """H: K1_n -> K2_{n+1} subject to the shifted-index compatibility."""

    def __init__(self, source, target, table):
        self.source = source
        self.target = target
        self.table = dict(table)

    def __call__(self, elem):
        word, core = elem
        out = self.table[core]
        for j in word:
            out = self.target.s(out, j + 1)
        return out


def is_homotopy(H: CubicalHomotopy, f: CubicalMap, g: CubicalMap) -> bool:
    """Check H is a cubical homotopy from f to g (d^- H = f, d^+ H = g)."""
    K1, K2 = f.source, f.target
    top = min(K1.n_max, K2.n_max - 1)
    for n in range(0, top + 1):
        for x in K1.elements(n):
            hx = H(x)
            if K2.elem_dim(hx) != n + 1:
                return False
            if K2.d(hx, "-", 1) != f(x) or K2.d(hx, "+", 1) != g(x):
                return False
            for i in range(1, n + 1):
                for mu in "+-":
                    if H(K1.d(x, mu, i)) != K2.d(hx, mu, i + 1):
                        return False
            for i in range(1, n):
                if H(K1.p(x, i)) != K2.p(hx, i + 1):
                    return False
            if n + 1 <= top:
                for i in range(1, n + 2):
                    if H(K1.s(x, i)) != K2.s(hx, i + 1):
                        return False
    return True


def degenerate_homotopy(f: CubicalMap) -> CubicalHomotopy:
    """H = s_1 o f, the constant homotopy from f to f."""
    table = {}
    for d, ls in f.source.cubes.items():
        for c in ls:
            table[c] = f.target.s(f.table[c], 1)
    return CubicalHomotopy(f.source, f.target, table)


# -- normalized chains ---------------------------------------------------------


def _chains_basis(K: SymCubSet, dim):
    """Orbit representatives with signs under the transposition action.

    Returns (reps, cls) where cls maps a nondegenerate cube name to
    (rep, sign) or None when the orbit dies of a sign conflict.
    """
    names = K.cubes.get(dim, [])
    perms = _all_perms(dim) if dim >= 2 else [Perm.identity(dim)]
    cls = {}
    reps = []
    seen = set()
    for name in names:
        if name in seen:
            continue
        orbit = {}
        dead = False
        for u in perms:
            img = K.act(u, ((), name))
            s = u.sign()
            c = img[1]
            if c in orbit and orbit[c] != s:
                dead = True
            orbit.setdefault(c, s)
        seen |= set(orbit)
        rep = min(orbit)
        rs = orbit[rep]
        for c, s in orbit.items():
            cls[c] = None if dead else (rep, s * rs)
        if not dead:
            reps.append(rep)
    return sorted(reps), cls


def normalized_chains(K: SymCubSet, ring, up_to_degree) -> ChainComplex:
    """Free complex on nondegenerate cubes modulo degeneracies and signed
    transpositions, with d = sum_i (-1)^i (d+_i - d-_i)."""
    if up_to_degree > K.n_max:
        raise EngineError("chains beyond the truncation dimension")
    reps = {}
    cls = {}
    for n in range(0, up_to_degree + 1):
        reps[n], cls[n] = _chains_basis(K, n)
    basis = {n: [("cb", r) for r in reps[n]] for n in reps if reps[n]}
    C = ChainComplex(ring, "Z", basis, {}, validate=False)
    diff = {}
    for n in range(1, up_to_degree + 1):
        if n not in basis:
            continue
        m = Mat.zeros(ring, C.dim(n - 1), C.dim(n))
        for j, (_, r) in enumerate(basis[n]):
            for i in range(1, n + 1):
                for sign, sgn_val in (("+", 1), ("-", -1)):
                    w, c = K.d(((), r), sign, i)
                    if w:
                        continue  # degenerate face dies
                    hit = cls[n - 1].get(c)
                    if hit is None:
                        continue
                    rep, s = hit
                    coeff = ring.from_int(sgn_val * s * (-1) ** i)
                    m.add_to(C.index(n - 1, ("cb", rep)), j, coeff)
        if not m.is_zero():
            diff[n] = m
    C.diff = diff
    C.validate()
    return C


def chains_functor_map(fcub: CubicalMap, Csrc: ChainComplex, Ctgt: ChainComplex,
                       K2: SymCubSet) -> ChainMap:
    """The induced map on normalized chains."""
    up = max(Csrc.degrees()) if Csrc.degrees() else 0
    cls_tgt = {n: _chains_basis(K2, n)[1] for n in range(0, up + 1)}

    def fn(d, label):
        _, rep = label
        w, c = fcub(((), rep))
        if w:
            return None
        hit = cls_tgt[d].get(c)
        if hit is None:
            return None
        r, s = hit
        return [(("cb", r), s)]

    return ChainMap.from_label_fn2(Csrc, Ctgt, 0, fn)


def chain_homotopy_from_cubical(H: CubicalHomotopy, Csrc: ChainComplex,
                                Ctgt: ChainComplex, K2: SymCubSet) -> ChainMap:
    """Degree +1 chain map h with d h + h d = C(g) - C(f)."""
    up = max(Csrc.degrees()) if Csrc.degrees() else 0
    cls_tgt = {n: _chains_basis(K2, n)[1] for n in range(0, up + 2)}

    def fn(d, label):
        _, rep = label
        w, c = H(((), rep))
        if w:
            return None
        hit = cls_tgt[d + 1].get(c)
        if hit is None:
            return None
        r, s = hit
        return [(("cb", r), -s)]

    return ChainMap.from_label_fn2(Csrc, Ctgt, 1, fn, validate=False)


def chains_monoidal_map(K1, K2, ring, up_to_degree, tensor=None):
    """C(K1) (x) C(K2) -> C(K1 (x) K2), a (x) b |-> [id.(a (x) b)]."""
    if tensor is None:
        tensor = cubical_tensor(K1, K2, n_max=up_to_degree)
    KT, classify = tensor
    C1 = normalized_chains(K1, ring, min(up_to_degree, K1.n_max))
    C2 = normalized_chains(K2, ring, min(up_to_degree, K2.n_max))
    CT = normalized_chains(KT, ring, up_to_degree)
    T = C1.tensor(C2)
    cls_t = {n: _chains_basis(KT, n)[1] for n in range(0, up_to_degree + 1)}

    def fn(d, label):
        if d > up_to_degree:
            return None
        _, la, lb = label
        _, ra = la
        _, rb = lb
        n1 = K1.dim_of[ra]
        n2 = K2.dim_of[rb]
        w, c = classify(Perm.identity(n1 + n2), ((), ra), ((), rb))
        if w:
            return None
        hit = cls_t[d].get(c)
        if hit is None:
            return None
        r, s = hit
        return [(("cb", r), s)]

    trimmed = _truncate_complex(T, up_to_degree)
    mu = ChainMap.from_label_fn2(trimmed, CT, 0, fn)
    return mu, trimmed, CT


def _truncate_complex(C: ChainComplex, top) -> ChainComplex:
    basis = {d: ls for d, ls in C.basis.items() if d <= top}
    diff = {d: m for d, m in C.diff.items() if d <= top}
    return ChainComplex(C.ring, C.grading, basis, diff, validate=False)
