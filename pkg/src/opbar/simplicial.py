"""Truncated simplicial objects in chain complexes and their realizations.

The realization is semisimplicial: the direct sum of the n-th level shifted
by n, with total differential

    d  =  (-1)^n d_int  +  sum_{i=0..n} (-1)^i d_i      (on the level-n part)

(the internal twist makes the cross terms cancel; d^2 = 0 is asserted).  A
normalized variant quotients by the degeneracy images, which in this engine
are always basis labels, so the quotient stays free and exact over any ring.

Homology of a truncated realization is only meaningful in low degrees: the
degree-d differential sees levels <= d + 1 only, so with internal degrees
bounded below by d_min, degrees d <= n_max + d_min - 2 are reliable.
"""

from __future__ import annotations

from .complexes import ChainComplex, ChainMap
from .errors import EngineError, TruncationTooSmall
from .linalg import Mat
from .symgrp import Perm


class SimplicialComplexObj:
    """Levels (chain complexes) with faces d_i and degeneracies s_i."""

    def __init__(self, n_max, levels, faces, degens, validate=True):
        if n_max < 1:
            raise TruncationTooSmall("need at least one simplicial level")
        self.n_max = n_max
        self.levels = dict(levels)
        self.faces = dict(faces)
        self.degens = dict(degens)
        if validate:
            w = self.check_identities()
            if w is not None:
                raise EngineError(f"simplicial identities fail: {w}")

    def level(self, n) -> ChainComplex:
        return self.levels[n]

    def face(self, n, i) -> ChainMap:
        return self.faces[(n, i)]

    def degen(self, n, i) -> ChainMap:
        return self.degens[(n, i)]

    def check_identities(self):
        """Exhaustive simplicial identities among all stored maps."""
        for n in range(2, self.n_max + 1):
            for j in range(0, n + 1):
                for i in range(0, j):
                    lhs = self.face(n - 1, i).compose(self.face(n, j))
                    rhs = self.face(n - 1, j - 1).compose(self.face(n, i))
                    if not lhs.eq(rhs):
                        return {"identity": "dd", "n": n, "i": i, "j": j}
        for n in range(0, self.n_max):
            for j in range(0, n + 1):
                if (n, j) not in self.degens:
                    continue
                s = self.degen(n, j)
                for i in range(0, n + 2):
                    lhs = self.face(n + 1, i).compose(s)
                    if i == j or i == j + 1:
                        if not lhs.eq(ChainMap.identity(self.level(n))):
                            return {"identity": "ds=id", "n": n, "i": i, "j": j}
                    elif i < j:
                        rhs = self.degen(n - 1, j - 1).compose(self.face(n, i))
                        if not lhs.eq(rhs):
                            return {"identity": "ds", "n": n, "i": i, "j": j}
                    else:
                        rhs = self.degen(n - 1, j).compose(self.face(n, i - 1))
                        if not lhs.eq(rhs):
                            return {"identity": "ds", "n": n, "i": i, "j": j}
                if n + 2 <= self.n_max:
                    for i in range(0, j + 1):
                        if (n + 1, i) not in self.degens or (n, i) not in self.degens:
                            continue
                        lhs = self.degen(n + 1, i).compose(self.degen(n, j))
                        rhs = self.degen(n + 1, j + 1).compose(self.degen(n, i))
                        if not lhs.eq(rhs):
                            return {"identity": "ss", "n": n, "i": i, "j": j}
        return None


class RealizedComplex:
    """The realization, with provenance back to (level, label)."""

    def __init__(self, simplicial: SimplicialComplexObj):
        self.simplicial = simplicial
        ring = simplicial.level(0).ring
        grading = simplicial.level(0).grading
        basis = {}
        for n in range(0, simplicial.n_max + 1):
            lv = simplicial.level(n)
            for d in lv.degrees():
                basis.setdefault(d + n, []).extend(
                    ("lv", n, l) for l in lv.labels(d))
        self.complex = ChainComplex(ring, grading, basis, {}, validate=False)
        diff = {}
        for deg in self.complex.degrees():
            pd = deg - 1
            m = Mat.zeros(ring, len(self.complex.basis.get(pd, [])),
                          len(self.complex.basis.get(deg, [])))
            for j, (_, n, l) in enumerate(self.complex.labels(deg)):
                lv = simplicial.level(n)
                ld = deg - n
                col = lv.d_mat(ld).column(lv.index(ld, l))
                sgn = ring.from_int(-1 if n % 2 else 1)
                for i2, v in col.items():
                    tl = ("lv", n, lv.labels(ld - 1)[i2])
                    m.add_to(self.complex.index(pd, tl), j, ring.mul(sgn, v))
                for i in range(0, n + 1) if n >= 1 else ():
                    fm = simplicial.face(n, i)
                    s = ring.from_int(-1 if i % 2 else 1)
                    for tl2, v in fm.apply_label(ld, l).items():
                        tl = ("lv", n - 1, tl2)
                        m.add_to(self.complex.index(pd, tl), j, ring.mul(s, v))
            if not m.is_zero():
                diff[deg] = m
        self.complex.diff = diff
        self.complex.validate()  # d^2 = 0, exactly
        dmins = [min(simplicial.level(n).degrees(), default=0)
                 for n in range(0, simplicial.n_max + 1)]
        self.d_min = min(dmins) if dmins else 0

    @property
    def reliable_degrees(self):
        top = self.simplicial.n_max + self.d_min - 2
        lo = self.d_min - 1
        return list(range(lo, top + 1))

    def level_inclusion(self, n) -> ChainMap:
        lv = self.simplicial.level(n)
        shifted = lv.shift(n)
        return ChainMap.from_label_fn(shifted, self.complex, 0,
                                      lambda l: [(("lv", n, l), 1)],
                                      validate=False)

    def homology(self, degree):
        from .complexes import homology
        return homology(self.complex, degree)


def realize(simplicial: SimplicialComplexObj) -> RealizedComplex:
    return RealizedComplex(simplicial)


def normalized_realization(simplicial: SimplicialComplexObj):
    """Quotient by degeneracy images; returns (complex, projection from the
    semisimplicial realization).

    Requires every degeneracy to send basis labels to basis labels (true for
    all constructions in this engine); the quotient is then free on the
    non-degenerate labels.
    """
    real = realize(simplicial)
    ring = real.complex.ring
    degenerate = set()
    for (n, i), s in simplicial.degens.items():
        lv = simplicial.level(n)
        for d in lv.degrees():
            for l in lv.labels(d):
                img = s.apply_label(d, l)
                if len(img) != 1:
                    raise EngineError("degeneracy is not label-to-label")
                ((tl, c),) = img.items()
                if not ring.eq(c, ring.one):
                    raise EngineError("degeneracy has a non-unit coefficient")
                degenerate.add(("lv", n + 1, tl))
    basis = {d: [l for l in real.complex.labels(d) if l not in degenerate]
             for d in real.complex.degrees()}
    quot = ChainComplex(ring, real.complex.grading, basis, {}, validate=False)
    diff = {}
    for d in quot.degrees():
        pd = quot.pred(d)
        m = Mat.zeros(ring, quot.dim(pd), quot.dim(d))
        for j, l in enumerate(quot.labels(d)):
            col = real.complex.d_mat(d).column(real.complex.index(d, l))
            for i2, v in col.items():
                tl = real.complex.labels(pd)[i2]
                if tl in degenerate:
                    continue
                m.add_to(quot.index(pd, tl), j, v)
        if not m.is_zero():
            diff[d] = m
    quot.diff = diff
    quot.validate()
    proj = ChainMap.from_label_fn(
        real.complex, quot, 0,
        lambda l: None if l in degenerate else [(l, 1)])
    return quot, proj


# ---------------------------------------------------------------------------
# Eilenberg-Zilber shuffles
# ---------------------------------------------------------------------------


def shuffles(p, q):
    """(p,q)-shuffles as (sign, x_degeneracy_word, y_degeneracy_word).

    The words list simplicial degeneracy indices in increasing order (applied
    first-to-last); x receives the complementary positions of y and vice
    versa, following the standard shuffle formula for the EZ map
    X_p (x) Y_q -> (X x Y)_{p+q}.
    """
    import itertools as it
    out = []
    total = p + q
    for mu in it.combinations(range(total), p):
        nu = tuple(k for k in range(total) if k not in mu)
        # sign: parity of the shuffle permutation (mu, nu)
        seq = list(mu) + list(nu)
        inv = sum(1 for a in range(total) for b in range(a + 1, total)
                  if seq[a] > seq[b])
        sign = -1 if inv % 2 else 1
        out.append((sign, nu, mu))
    return out


def constant_simplicial(C: ChainComplex, n_max) -> SimplicialComplexObj:
    """The constant simplicial object on C (all faces/degeneracies identity)."""
    levels = {n: C for n in range(0, n_max + 1)}
    faces = {}
    degens = {}
    for n in range(1, n_max + 1):
        for i in range(0, n + 1):
            faces[(n, i)] = ChainMap.identity(C)
    for n in range(0, n_max):
        for i in range(0, n + 1):
            degens[(n, i)] = ChainMap.identity(C)
    return SimplicialComplexObj(n_max, levels, faces, degens, validate=False)
