"""Symmetric groups, group actions on complexes, coinvariants, and freeness.

Group elements are permutations of {1..n}.  Actions on complexes are given by
chain maps for a generating set and extended by closure; the extension is
checked for consistency, so relations of the subgroup hold on the nose.

The engine-wide Koszul convention: permuting graded tensor factors picks up
(-1)^{|a_i||a_j|} for every inverted pair of odd factors.
"""

from __future__ import annotations

import re

from .complexes import ChainComplex, ChainMap
from .errors import GroupMismatch, GroupTooLarge, NonPermutationAction
from .linalg import Mat

GROUP_DEGREE_BOUND = 8


class Perm:
    """A permutation of {1..n}, stored by its tuple of images."""

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a bijection of 1..{len(images)}: {images}")
        self.images = images

    @property
    def n(self):
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    @staticmethod
    def identity(n: int) -> "Perm":
        return Perm(range(1, n + 1))

    @staticmethod
    def transposition(n: int, i: int, j: int) -> "Perm":
        img = list(range(1, n + 1))
        img[i - 1], img[j - 1] = j, i
        return Perm(img)

    def compose(self, other: "Perm") -> "Perm":
        """self o other: first apply other, then self."""
        if self.n != other.n:
            raise GroupMismatch("composing permutations of different degrees")
        return Perm(self.images[other.images[i] - 1] for i in range(self.n))

    def inverse(self) -> "Perm":
        img = [0] * self.n
        for i, v in enumerate(self.images):
            img[v - 1] = i + 1
        return Perm(img)

    def sign(self) -> int:
        inv = 0
        im = self.images
        for a in range(self.n):
            for b in range(a + 1, self.n):
                if im[a] > im[b]:
                    inv += 1
        return -1 if inv % 2 else 1

    def is_identity(self) -> bool:
        return all(self.images[i] == i + 1 for i in range(self.n))

    def __eq__(self, other):
        return isinstance(other, Perm) and self.images == other.images

    def __lt__(self, other):
        return self.images < other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return cycle_notation(self)


def koszul_sign(perm: Perm, degrees) -> int:
    """Sign of reordering (a_1..a_n) to (a_{perm(1)}..a_{perm(n)})."""
    sign = 1
    n = perm.n
    for k in range(1, n + 1):
        for l in range(k + 1, n + 1):
            if perm(k) > perm(l) and degrees[perm(k) - 1] % 2 and degrees[perm(l) - 1] % 2:
                sign = -sign
    return sign


def block_perm(sizes, perm: Perm) -> Perm:
    """The permutation of sum(sizes) letters moving blocks by perm.

    Block j of the source (of size sizes[j-1]) lands where perm sends it:
    the result reorders blocks to (B_{perm(1)}, ..., B_{perm(m)}).
    """
    m = len(sizes)
    starts = [0]
    for s in sizes:
        starts.append(starts[-1] + s)
    images = []
    # target position runs over blocks perm(1), perm(2), ...: target slot t
    # holds source letter from block perm(k)
    out_of = [0] * m
    img = []
    for k in range(1, m + 1):
        b = perm(k)
        img.extend(range(starts[b - 1] + 1, starts[b] + 1))
    # img lists source letters in target order; we need images of source letters
    res = [0] * len(img)
    for tpos, src in enumerate(img, start=1):
        res[src - 1] = tpos
    return Perm(res)


def cycle_notation(p: Perm) -> str:
    seen = set()
    out = []
    for i in range(1, p.n + 1):
        if i in seen:
            continue
        cyc = [i]
        seen.add(i)
        j = p(i)
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = p(j)
        if len(cyc) > 1:
            out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) if out else "id"


def parse_cycles(text: str, n: int) -> Perm:
    """Parse cycle notation like "(1 2)(3 4)" into a permutation of 1..n."""
    img = list(range(1, n + 1))
    text = text.strip()
    if text in ("id", "", "()"):
        return Perm(img)
    for grp in re.findall(r"\(([^()]*)\)", text):
        nums = [int(t) for t in re.split(r"[,\s]+", grp.strip()) if t]
        if len(nums) <= 1:
            continue
        for a, b in zip(nums, nums[1:] + nums[:1]):
            img[a - 1] = b
    return Perm(img)


def enumerate_group(generators, n: int, bound: int = GROUP_DEGREE_BOUND):
    """Full element list of the subgroup generated inside S_n, by closure."""
    if n > bound:
        raise GroupTooLarge(f"degree {n} exceeds the bound {bound}")
    gens = [g if isinstance(g, Perm) else Perm(g) for g in generators]
    for g in gens:
        if g.n != n:
            raise GroupMismatch(f"generator {g!r} not in S_{n}")
    seen = {Perm.identity(n)}
    frontier = [Perm.identity(n)]
    while frontier:
        cur = frontier.pop()
        for g in gens:
            nxt = g.compose(cur)
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return sorted(seen, key=lambda p: p.images)


class GroupAction:
    """A left action of a subgroup of S_n on a chain complex by chain maps."""

    def __init__(self, n, generators, complex: ChainComplex, gen_maps,
                 check: bool = True):
        self.n = n
        self.gens = [g if isinstance(g, Perm) else Perm(g) for g in generators]
        self.complex = complex
        self.elements = enumerate_group(self.gens, n)
        self._maps = {Perm.identity(n): ChainMap.identity(complex)}
        for g, m in zip(self.gens, gen_maps):
            if m.source is not complex or m.target is not complex or m.degree != 0:
                raise NonPermutationAction("action maps must be degree-0 self-maps")
            self._maps[g] = m
        self._close()
        if check:
            self.check_consistency()

    def _close(self):
        # BFS assignment: map(g o cur) = map(g) o map(cur)
        frontier = [Perm.identity(self.n)]
        while frontier:
            cur = frontier.pop()
            for g in self.gens:
                nxt = g.compose(cur)
                if nxt not in self._maps:
                    self._maps[nxt] = self._maps[g].compose(self._maps[cur])
                    frontier.append(nxt)

    def check_consistency(self):
        """Relations hold on the nose: map(g o h) == map(g) o map(h) for all pairs."""
        for g in self.gens:
            for h in self.elements:
                lhs = self._maps[g.compose(h)]
                rhs = self._maps[g].compose(self._maps[h])
                if not lhs.eq(rhs):
                    raise NonPermutationAction(
                        f"action violates the group relations at {g!r} o {h!r}"
                    )
        return self

    def map_of(self, g: Perm) -> ChainMap:
        return self._maps[g]

    def signed_perm_tables(self):
        """Per degree: {g: {col_index: (row_index, sign)}}; None if not signed-perm."""
        tables = {}
        ring = self.complex.ring
        one, neg = ring.one, ring.from_int(-1)
        for d in self.complex.degrees():
            per_g = {}
            for g in self.elements:
                m = self.map_of(g).mat(d)
                cols = {}
                for (i, j), v in m.d.items():
                    if j in cols:
                        return None
                    if v == one:
                        cols[j] = (i, 1)
                    elif v == neg:
                        cols[j] = (i, -1)
                    else:
                        return None
                if len(cols) != self.complex.dim(d):
                    return None
                per_g[g] = cols
            tables[d] = per_g
        return tables


def coinvariants(action: GroupAction):
    """Quotient by the span of {x - g.x}; returns (quotient, projection).

    For signed permutation actions the quotient basis is the set of orbit
    representatives (minimal index), and an orbit with a sign-conflicting
    stabilizer is killed; this is the engine-wide free-quotient convention.
    Otherwise falls back to exact column reduction over a field.
    """
    C = action.complex
    tables = action.signed_perm_tables()
    if tables is not None:
        return _orbit_coinvariants(action, tables)
    if not C.ring.is_field:
        raise NonPermutationAction(
            "general (non signed-permutation) coinvariants need field coefficients"
        )
    spans = {}
    for d in C.degrees():
        vecs = []
        for g in action.gens:
            m = action.map_of(g).mat(d)
            for j in range(C.dim(d)):
                col = m.column(j)
                vec = dict(col)
                vec[j] = C.ring.sub(vec.get(j, C.ring.zero), C.ring.one)
                vec = {i: C.ring.neg(v) for i, v in vec.items() if not C.ring.is_zero(v)}
                if vec:
                    vecs.append(vec)
        spans[d] = vecs
    return quotient_by_span(C, spans)


def _orbit_coinvariants(action: GroupAction, tables):
    C = action.complex
    ring = C.ring
    reps = {}
    classes = {}  # (d, index) -> (rep_index, sign) or None if killed
    for d in C.degrees():
        per_g = tables[d]
        n = C.dim(d)
        assigned = {}
        order = []
        for j0 in range(n):
            if j0 in assigned:
                continue
            orbit = {}
            dead = False
            for g, cols in per_g.items():
                i, s = cols[j0]
                if i in orbit and orbit[i] != s:
                    dead = True
                orbit.setdefault(i, s)
            rep = min(orbit)
            rep_sign = orbit[rep]
            for i, s in orbit.items():
                # [i] = (s / rep_sign) [rep]
                assigned[i] = None if dead else (rep, s * rep_sign)
            if not dead:
                order.append(rep)
        reps[d] = sorted(order)
        for i in range(n):
            classes[(d, i)] = assigned[i]
    basis = {d: [C.labels(d)[i] for i in reps[d]] for d in C.degrees() if reps[d]}
    quot = ChainComplex(ring, C.grading, basis, {}, validate=False)
    rep_pos = {d: {i: k for k, i in enumerate(reps[d])} for d in reps}

    def project_vec(d, vec):
        if d not in rep_pos:
            return {}
        out = {}
        for i, v in vec.items():
            cls = classes.get((d, i))
            if cls is None:
                continue
            rep, s = cls
            k = rep_pos[d][rep]
            acc = ring.add(out.get(k, ring.zero), ring.mul(ring.from_int(s), v))
            if ring.is_zero(acc):
                out.pop(k, None)
            else:
                out[k] = acc
        return out

    diff = {}
    for d in quot.degrees():
        pd = quot.pred(d)
        m = Mat.zeros(ring, quot.dim(pd), quot.dim(d))
        for k, i in enumerate(reps[d]):
            col = C.d_mat(d).column(i)
            for kk, v in project_vec(C.pred(d), col).items():
                m.add_to(kk, k, v)
        if not m.is_zero():
            diff[d] = m
    quot.diff = diff
    quot.validate()
    proj_mats = {}
    for d in C.degrees():
        m = Mat.zeros(ring, quot.dim(d), C.dim(d))
        for j in range(C.dim(d)):
            for k, v in project_vec(d, {j: ring.one}).items():
                m.set(k, j, v)
        proj_mats[d] = m
    proj = ChainMap(C, quot, 0, proj_mats)
    return quot, proj


def quotient_by_span(C: ChainComplex, spans: dict):
    """Quotient of C by per-degree relation spans (field coefficients).

    Returns (quotient complex, projection).  The quotient basis is the set of
    non-pivot basis labels after reducing the span to echelon form.
    """
    from . import linalg
    ring = C.ring
    pivots_by_deg = {}
    for d in C.degrees():
        pivots = {}
        for vec in spans.get(d, ()):  # insert each relation vector
            linalg._rref_insert(ring, dict(vec), pivots)
        pivots_by_deg[d] = pivots
    keep = {d: [j for j in range(C.dim(d)) if j not in pivots_by_deg[d]]
            for d in C.degrees()}
    basis = {d: [C.labels(d)[j] for j in keep[d]] for d in C.degrees() if keep[d]}
    quot = ChainComplex(ring, C.grading, basis, {}, validate=False)
    pos = {d: {j: k for k, j in enumerate(keep[d])} for d in keep}

    def project_vec(d, vec):
        if d not in pos:
            return {}
        vec = dict(vec)
        pivots = pivots_by_deg.get(d, {})
        for j in [j for j in vec if j in pivots]:
            c = vec.pop(j)
            if ring.is_zero(c):
                continue
            for kk, vv in pivots[j].items():
                if kk == j:
                    continue
                acc = ring.sub(vec.get(kk, ring.zero), ring.mul(c, vv))
                if ring.is_zero(acc):
                    vec.pop(kk, None)
                else:
                    vec[kk] = acc
        return {pos[d][j]: v for j, v in vec.items() if not ring.is_zero(v)}

    diff = {}
    for d in quot.degrees():
        pd = quot.pred(d)
        m = Mat.zeros(ring, quot.dim(pd), quot.dim(d))
        for k, j in enumerate(keep[d]):
            for kk, v in project_vec(C.pred(d), C.d_mat(d).column(j)).items():
                m.add_to(kk, k, v)
        if not m.is_zero():
            diff[d] = m
    quot.diff = diff
    quot.validate()
    proj_mats = {}
    for d in C.degrees():
        m = Mat.zeros(ring, quot.dim(d), C.dim(d))
        for j in range(C.dim(d)):
            for k, v in project_vec(d, {j: ring.one}).items():
                m.set(k, j, v)
        proj_mats[d] = m
    return quot, ChainMap(C, quot, 0, proj_mats)


class GroupRingModule:
    """A chain complex with a one-sided action of a subgroup G of S_n.

    `side` is "left" or "right"; composition conventions are
    left: (gh).m = g.(h.m),  right: m.(gh) = (m.g).h.
    """

    def __init__(self, side, n, generators, complex, gen_maps, check=True):
        if side not in ("left", "right"):
            raise ValueError("side must be left or right")
        self.side = side
        self.n = n
        self.gens = [g if isinstance(g, Perm) else Perm(g) for g in generators]
        self.complex = complex
        self.elements = enumerate_group(self.gens, n)
        self._maps = {Perm.identity(n): ChainMap.identity(complex)}
        for g, m in zip(self.gens, gen_maps):
            self._maps[g] = m
        frontier = [Perm.identity(n)]
        while frontier:
            cur = frontier.pop()
            for g in self.gens:
                nxt = g.compose(cur)
                if nxt not in self._maps:
                    if side == "left":
                        self._maps[nxt] = self._maps[g].compose(self._maps[cur])
                    else:
                        # operator of m.(g o cur): first g, then cur acts
                        self._maps[nxt] = self._maps[cur].compose(self._maps[g])
                    frontier.append(nxt)
        if check:
            for g in self.gens:
                for h in self.elements:
                    gh = g.compose(h)
                    if self.side == "left":
                        rhs = self._maps[g].compose(self._maps[h])
                    else:
                        rhs = self._maps[h].compose(self._maps[g])
                    if not self._maps[gh].eq(rhs):
                        raise NonPermutationAction(
                            f"{side} action violates relations at {g!r}, {h!r}")

    def map_of(self, g: Perm) -> ChainMap:
        return self._maps[g]

    def as_left_action(self) -> GroupAction:
        """The associated left action (right modules act through inverses)."""
        if self.side == "left":
            maps = [self._maps[g] for g in self.gens]
        else:
            maps = [self._maps[g.inverse()] for g in self.gens]
        return GroupAction(self.n, self.gens, self.complex, maps, check=False)


def tensor_over_group_ring(Mr: GroupRingModule, Ml: GroupRingModule):
    """(Mr tensor Ml) / (m.g (x) m' - m (x) g.m'); returns (complex, projection).

    The quotient is computed as coinvariants of the diagonal-type action
    g . (x (x) y) = (x.g) (x) (g^{-1}.y) on the plain tensor product.
    """
    if Mr.side != "right" or Ml.side != "left":
        raise GroupMismatch("need a right module and a left module")
    if Mr.n != Ml.n or sorted(Mr.elements) != sorted(Ml.elements):
        raise GroupMismatch("modules over different groups")
    if Mr.complex.ring != Ml.complex.ring:
        raise GroupMismatch("modules over different rings")
    T = Mr.complex.tensor(Ml.complex)
    gens = Mr.gens if Mr.gens else Ml.gens
    gen_maps = []
    for g in gens:
        rg = Mr.map_of(g)
        lg = Ml.map_of(g.inverse())
        gen_maps.append(_tensor_chain_map(T, T, rg, lg))
    action = GroupAction(Mr.n, gens, T, gen_maps, check=True)
    return coinvariants(action)


def _tensor_chain_map(TS, TT, f: ChainMap, g: ChainMap) -> ChainMap:
    """f (x) g on tensor complexes built by ChainComplex.tensor (degree 0 only)."""
    A, B = f.source, g.source

    def fn(label):
        _, la, lb = label
        da = A.degree_of(la)
        db = B.degree_of(lb)
        out = []
        for ta, ca in f.apply_label(da, la).items():
            for tb, cb in g.apply_label(db, lb).items():
                out.append((("t", ta, tb), TS.ring.mul(ca, cb)))
        return out

    return ChainMap.from_label_fn(TS, TT, 0, fn, validate=False)


class FreeModuleReport:
    __slots__ = ("free", "orbit_reps", "reason")

    def __init__(self, free, orbit_reps, reason=""):
        self.free = free
        self.orbit_reps = orbit_reps
        self.reason = reason

    def __bool__(self):
        return self.free

    def __repr__(self):
        return f"FreeModuleReport(free={self.free}, reps={len(self.orbit_reps)})"


def is_free_module(M: GroupRingModule) -> FreeModuleReport:
    """Freeness of a signed-permutation module: every orbit is a regular orbit."""
    action = M.as_left_action()
    tables = action.signed_perm_tables()
    if tables is None:
        raise NonPermutationAction(
            "freeness is only decided for signed permutation actions")
    order = len(M.elements)
    reps = []
    for d in sorted(tables):
        per_g = tables[d]
        seen = set()
        for j in range(M.complex.dim(d)):
            if j in seen:
                continue
            orbit = {}
            for g, cols in per_g.items():
                i, s = cols[j]
                if i in orbit and orbit[i] != s:
                    return FreeModuleReport(
                        False, [], f"sign-stabilized orbit at degree {d}, index {j}")
                orbit.setdefault(i, s)
            seen |= set(orbit)
            if len(orbit) != order:
                return FreeModuleReport(
                    False, [],
                    f"orbit of size {len(orbit)} < {order} at degree {d}, index {j}")
            reps.append((d, M.complex.labels(d)[min(orbit)]))
    return FreeModuleReport(True, reps)


def descend_to_coinvariants(action_src: GroupAction, action_tgt: GroupAction,
                            f: ChainMap):
    """Descend an equivariant chain map to the coinvariant quotients."""
    for g in action_src.gens:
        lhs = f.compose(action_src.map_of(g))
        rhs = action_tgt.map_of(g).compose(f)
        if not lhs.eq(rhs):
            raise GroupMismatch(f"map is not equivariant at {g!r}")
    qs, ps = coinvariants(action_src)
    qt, pt = coinvariants(action_tgt)
    # solve: descended o ps = pt o f, degreewise; ps is surjective with a
    # canonical section (representatives), so read the matrix off sections.
    mats = {}
    ring = f.source.ring
    for d in qs.degrees():
        m = Mat.zeros(ring, qt.dim(d), qs.dim(d))
        for k, label in enumerate(qs.labels(d)):
            j = action_src.complex.index(d, label)
            vec = pt.mat(d).mul(f.mat(d)).column(j)
            for i, v in vec.items():
                m.set(i, k, v)
        mats[d] = m
    descended = ChainMap(qs, qt, 0, mats)
    return descended, (qs, ps), (qt, pt)
