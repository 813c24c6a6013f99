"""Finitely presented dg multicategories, algebras over them, and the PROP.

A multicategory is presented by chain complexes M(xs; y) for input tuples xs
of length <= arity_max, composition tables for the partial compositions
(f plugged into slot i of g), tables for the adjacent-transposition actions,
and a unit basis element per object.  Arities beyond arity_max carry the zero
complex ("zero truncation"), which keeps every presented multicategory an
honest one: composites that would overflow the bound vanish.

Conventions (enforced exhaustively by the validator):

* compose(f, i, g): f lands in slot i of g; the result lives on the input
  sequence of g with slot i replaced by f's inputs.
* sequential associativity:
      compose(compose(f,i,g), j, h) = compose(f, i+j-1, compose(g,j,h))
* parallel compositions into disjoint slots i1 < i2 of h commute up to the
  Koszul sign (-1)^{|f||g|}; the second slot shifts by arity(f) - 1.
* act(sigma, f) moves M(xs; y) to M(xs o sigma; y) and is a right action:
  act(tau, act(sigma, f)) = act(sigma o tau, f).
"""

from __future__ import annotations

import itertools

from .complexes import ChainComplex, ChainMap
from .dgcat import DgCategory
from .errors import ArityOverflow, EngineError
from .lincomb import add_into, bilinear, combine, eq as lc_eq, linear, scaled_int
from .symgrp import GroupRingModule, Perm, block_perm, enumerate_group, \
    is_free_module, koszul_sign


def perm_word(perm: Perm):
    """Adjacent transpositions with perm = t_{w[0]} o t_{w[1]} o ... o t_{w[-1]}.

    Feeding the word in list order through a right action realizes act(perm):
    the last factor of the composition acts first.
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


class MultiCat:
    """A dg multicategory with finitely many objects and bounded arity."""

    def __init__(self, ring, objects, arity_max, complexes, compose_fn, sym_fn,
                 units, name="M"):
        self.ring = ring
        self.objects = list(objects)
        self.arity_max = arity_max
        self.complexes = {}
        for (xs, y), c in complexes.items():
            if c is None or c.total_dim() == 0:
                continue
            self.complexes[(tuple(xs), y)] = c
        self._compose_fn = compose_fn
        self._sym_fn = sym_fn
        self.units = dict(units)
        self.name = name
        self._compose_cache = {}
        self._sym_cache = {}

    # -- signatures and elements -------------------------------------------

    def complex(self, xs, y) -> ChainComplex | None:
        return self.complexes.get((tuple(xs), y))

    def signatures(self):
        return sorted(self.complexes, key=repr)

    def basis_keys(self, xs, y):
        c = self.complex(xs, y)
        if c is None:
            return []
        xs = tuple(xs)
        return [(xs, y, d, l) for d in c.degrees() for l in c.labels(d)]

    def all_keys(self):
        out = []
        for xs, y in self.signatures():
            out.extend(self.basis_keys(xs, y))
        return out

    def key_degree(self, key):
        return key[2]

    def arity(self, key):
        return len(key[0])

    def unit_key(self, x):
        return ((x,), x, 0, self.units[x])

    def diff_key(self, key) -> dict:
        xs, y, d, l = key
        c = self.complex(xs, y)
        col = c.d_mat(d).column(c.index(d, l))
        pd = c.pred(d)
        return {(xs, y, pd, c.labels(pd)[i]): v for i, v in col.items()}

    def restrict_to(self, objects, name=None) -> "MultiCat":
        """The full sub-multicategory on a subset of the objects."""
        objects = [x for x in self.objects if x in set(objects)]
        keep = set(objects)
        complexes = {sig: c for sig, c in self.complexes.items()
                     if set(sig[0]) <= keep and sig[1] in keep}
        return MultiCat(self.ring, objects, self.arity_max, complexes,
                        self._compose_fn, self._sym_fn,
                        {x: u for x, u in self.units.items() if x in keep},
                        name=name or f"{self.name}|")

    # -- composition ----------------------------------------------------------

    def compose_keys(self, fkey, i, gkey) -> dict:
        """f into slot i of g, as a linear combination of basis keys."""
        fxs, fy, fd, _ = fkey
        gxs, gy, gd, _ = gkey
        if not (1 <= i <= len(gxs)):
            raise EngineError(f"slot {i} out of range for arity {len(gxs)}")
        if gxs[i - 1] != fy:
            raise EngineError(f"slot {i} of {gkey} expects {gxs[i-1]}, got {fy}")
        if len(gxs) + len(fxs) - 1 > self.arity_max:
            return {}
        cached = self._compose_cache.get((fkey, i, gkey))
        if cached is None:
            cached = self._compose_fn(self, fkey, i, gkey)
            tgt_xs = gxs[:i - 1] + fxs + gxs[i:]
            for k in cached:
                if k[0] != tgt_xs or k[1] != gy or k[2] != fd + gd:
                    raise EngineError(f"composition table lands off-signature: {k}")
            self._compose_cache[(fkey, i, gkey)] = cached
        return cached

    def compose(self, f: dict, i, g: dict) -> dict:
        return bilinear(self.ring, lambda a, b: self.compose_keys(a, i, b), f, g)

    def gamma(self, g, fs) -> dict:
        """Simultaneous composition of f_1..f_k into all slots of g.

        Slots are filled in descending order, which makes gamma the chain map
        associated with the tensor order (f_1, ..., f_k, g).
        """
        gdict = g if isinstance(g, dict) else {g: self.ring.one}
        arity = {len(k[0]) for k in gdict}
        if len(arity) != 1 or arity != {len(fs)}:
            raise EngineError("gamma needs one argument per slot")
        acc = gdict
        for slot in range(len(fs), 0, -1):
            f = fs[slot - 1]
            fdict = f if isinstance(f, dict) else {f: self.ring.one}
            acc = bilinear(self.ring,
                           lambda a, b, s=slot: self.compose_keys(a, s, b),
                           fdict, acc)
        return acc

    # -- symmetric action ---------------------------------------------------------

    def act_transposition(self, i, fkey) -> dict:
        """Action of the adjacent transposition (i, i+1) on the inputs."""
        n = self.arity(fkey)
        if not (1 <= i <= n - 1):
            raise EngineError(f"transposition index {i} out of range")
        cached = self._sym_cache.get((i, fkey))
        if cached is None:
            cached = self._sym_fn(self, i, fkey)
            xs = fkey[0]
            want = xs[:i - 1] + (xs[i], xs[i - 1]) + xs[i + 1:]
            for k in cached:
                if k[0] != want or k[1] != fkey[1] or k[2] != fkey[2]:
                    raise EngineError(f"symmetry table lands off-signature: {k}")
            self._sym_cache[(i, fkey)] = cached
        return cached

    def act(self, sigma: Perm, f) -> dict:
        """Right action: act(sigma, f) lives on xs o sigma."""
        if isinstance(f, dict):
            return linear(self.ring, lambda k: self.act(sigma, k), f)
        acc = {f: self.ring.one}
        for i in perm_word(sigma):
            acc = linear(self.ring, lambda k, t=i: self.act_transposition(t, k), acc)
        return acc

    def is_signed_perm_symmetry(self) -> bool:
        for f in self.all_keys():
            for i in range(1, self.arity(f)):
                hit = self.act_transposition(i, f)
                if len(hit) != 1:
                    return False
                ((_, c),) = hit.items()
                if not (self.ring.eq(c, self.ring.one)
                        or self.ring.eq(c, self.ring.from_int(-1))):
                    return False
        return True

    # -- validation ------------------------------------------------------------

    def validate(self):
        """Exhaustive check; returns None, or a witness naming the failure."""
        ring = self.ring
        keys = self.all_keys()
        for x in self.objects:
            uk = self.unit_key(x)
            c = self.complex((x,), x)
            if c is None or not c.has_label(0, uk[3]):
                return {"axiom": "unit-missing", "object": x}
            if self.diff_key(uk):
                return {"axiom": "unit-not-closed", "object": x}
        for g in keys:
            for i in range(1, self.arity(g) + 1):
                u = self.unit_key(g[0][i - 1])
                if not lc_eq(ring, self.compose_keys(u, i, g), {g: ring.one}):
                    return {"axiom": "eqMultComp3", "side": "unit-into", "g": g,
                            "i": i}
            u = self.unit_key(g[1])
            if not lc_eq(ring, self.compose_keys(g, 1, u), {g: ring.one}):
                return {"axiom": "eqMultComp3", "side": "into-unit", "g": g}
        for f in keys:
            for g in keys:
                for i in self._slots(f, g):
                    lhs = self._diff_lc(self.compose_keys(f, i, g))
                    rhs = combine(
                        ring,
                        self.compose(self.diff_key(f), i, {g: ring.one}),
                        scaled_int(ring,
                                   self.compose({f: ring.one}, i,
                                                self.diff_key(g)),
                                   -1 if self.key_degree(f) % 2 else 1),
                    )
                    if not lc_eq(ring, lhs, rhs):
                        return {"axiom": "leibniz", "f": f, "g": g, "i": i}
        w = self._validate_assoc(keys)
        if w is not None:
            return w
        return self._validate_equivariance(keys)

    def _slots(self, f, g):
        return [i for i in range(1, self.arity(g) + 1) if g[0][i - 1] == f[1]]

    def _diff_lc(self, lc: dict) -> dict:
        return linear(self.ring, self.diff_key, lc)

    def _validate_assoc(self, keys):
        ring = self.ring
        for h in keys:
            for g in keys:
                for j in self._slots(g, h):
                    inner = self.compose_keys(g, j, h)
                    for f in keys:
                        for i in self._slots(f, g):
                            lhs = self.compose(self.compose_keys(f, i, g), j,
                                               {h: ring.one})
                            rhs = self.compose({f: ring.one}, i + j - 1, inner)
                            if not lc_eq(ring, lhs, rhs):
                                return {"axiom": "eqMultComp1", "f": f, "g": g,
                                        "h": h, "i": i, "j": j}
                        for i1 in self._slots(f, h):
                            if i1 >= j:
                                continue
                            lhs = self.compose({f: ring.one}, i1, inner)
                            other = self.compose_keys(f, i1, h)
                            rhs = self.compose({g: ring.one},
                                               j + self.arity(f) - 1, other)
                            sign = -1 if (self.key_degree(f) % 2
                                          and self.key_degree(g) % 2) else 1
                            rhs = scaled_int(ring, rhs, sign)
                            if not lc_eq(ring, lhs, rhs):
                                return {"axiom": "eqMultComp2", "f": f, "g": g,
                                        "h": h, "i1": i1, "i2": j}
        return None

    def _validate_equivariance(self, keys):
        ring = self.ring
        for f in keys:
            n = self.arity(f)
            for i in range(1, n):
                tf = self.act_transposition(i, f)
                lhs = self._diff_lc(tf)
                rhs = linear(ring, lambda k, t=i: self.act_transposition(t, k),
                             self.diff_key(f))
                if not lc_eq(ring, lhs, rhs):
                    return {"axiom": "sym-chain-map", "f": f, "i": i}
                back = linear(ring, lambda k, t=i: self.act_transposition(t, k), tf)
                if not lc_eq(ring, back, {f: ring.one}):
                    return {"axiom": "sym-involution", "f": f, "i": i}
            for i in range(1, n - 1):
                a = Perm.transposition(n, i, i + 1)
                b = Perm.transposition(n, i + 1, i + 2)
                lhs = self.act(a.compose(b).compose(a), f)
                rhs = self.act(b.compose(a).compose(b), f)
                if not lc_eq(ring, lhs, rhs):
                    return {"axiom": "sym-braid", "f": f, "i": i}
            for i in range(1, n):
                for j in range(i + 2, n):
                    a = Perm.transposition(n, i, i + 1)
                    b = Perm.transposition(n, j, j + 1)
                    if not lc_eq(ring, self.act(a.compose(b), f),
                                 self.act(b.compose(a), f)):
                        return {"axiom": "sym-commute", "f": f, "i": i, "j": j}
        for f in keys:
            nf = self.arity(f)
            for g in keys:
                for i in self._slots(f, g):
                    base = self.compose_keys(f, i, g)
                    for t in range(1, nf):
                        sigma = Perm.transposition(nf, t, t + 1)
                        lhs = self.compose(self.act(sigma, f), i, {g: ring.one})
                        zeta = _embed_at(sigma, i, self.arity(g))
                        rhs = self.act(zeta, base)
                        if not lc_eq(ring, lhs, rhs):
                            return {"axiom": "eqSymAc2", "f": f, "g": g,
                                    "i": i, "t": t}
        for g in keys:
            ng = self.arity(g)
            for t in range(1, ng):
                sigma = Perm.transposition(ng, t, t + 1)
                ag = self.act(sigma, g)
                for f in keys:
                    for i in self._slots(f, g):
                        base = self.compose_keys(f, i, g)
                        ip = sigma.inverse()(i)
                        lhs = self.compose({f: ring.one}, ip, ag)
                        sizes = [1] * ng
                        sizes[i - 1] = self.arity(f)
                        eta = block_perm(sizes, sigma).inverse()
                        rhs = self.act(eta, base)
                        if not lc_eq(ring, lhs, rhs):
                            return {"axiom": "eqSymAc1", "f": f, "g": g,
                                    "i": i, "t": t}
        return None

    def __repr__(self):
        return f"MultiCat({self.name}, {len(self.objects)} objects, " \
               f"arity<={self.arity_max})"


def _embed_at(sigma: Perm, i, outer_arity):
    """zeta_i: sigma acting on the length-|sigma| block starting at slot i."""
    k = sigma.n
    n = outer_arity + k - 1
    img = []
    for t in range(1, n + 1):
        if i <= t <= i + k - 1:
            img.append(i - 1 + sigma(t - i + 1))
        else:
            img.append(t)
    return Perm(img)


def validate_multicategory(M: MultiCat):
    return M.validate()


# ---------------------------------------------------------------------------
# Algebras
# ---------------------------------------------------------------------------


class MultiAlgebra:
    """Carrier complexes plus multilinear action tables.

    action_fn(alg, fkey, args) takes args = tuple of (degree, label) per slot
    and returns {(degree, label): coeff} on the output carrier.
    """

    def __init__(self, M: MultiCat, carriers, action_fn, name="A"):
        self.M = M
        self.ring = M.ring
        self.carriers = dict(carriers)
        self._action_fn = action_fn
        self._cache = {}
        self.name = name

    def carrier(self, x) -> ChainComplex:
        return self.carriers[x]

    def restrict_to(self, sub: MultiCat) -> "MultiAlgebra":
        return MultiAlgebra(sub, {x: self.carriers[x] for x in sub.objects},
                            self._action_fn, name=self.name)

    def arg_tuples(self, xs):
        pools = []
        for x in xs:
            c = self.carrier(x)
            pools.append([(d, l) for d in c.degrees() for l in c.labels(d)])
        return itertools.product(*pools)

    def apply_key(self, fkey, args) -> dict:
        args = tuple(args)
        cached = self._cache.get((fkey, args))
        if cached is None:
            cached = {k: v for k, v in self._action_fn(self, fkey, args).items()
                      if not self.ring.is_zero(v)}
            self._cache[(fkey, args)] = cached
        return cached

    def diff_carrier(self, x, arg) -> dict:
        d, l = arg
        c = self.carrier(x)
        col = c.d_mat(d).column(c.index(d, l))
        pd = c.pred(d)
        return {(pd, c.labels(pd)[i]): v for i, v in col.items()}

    def validate(self):
        ring = self.ring
        M = self.M
        for x in M.objects:
            uk = M.unit_key(x)
            c = self.carrier(x)
            for d in c.degrees():
                for l in c.labels(d):
                    got = self.apply_key(uk, ((d, l),))
                    if not lc_eq(ring, got, {(d, l): ring.one}):
                        return {"axiom": "algebra-unit", "object": x, "label": l}
        for fkey in M.all_keys():
            xs, y, fd, _ = fkey
            for args in self.arg_tuples(xs):
                lhs = self._diff_out(y, self.apply_key(fkey, args))
                rhs = {}
                for k, v in M.diff_key(fkey).items():
                    for kk, vv in self.apply_key(k, args).items():
                        add_into(ring, rhs, kk, ring.mul(v, vv))
                pre = 0
                for t in range(len(args)):
                    s = (-1 if fd % 2 else 1) * (-1 if pre % 2 else 1)
                    for (dd, ll), v in self.diff_carrier(xs[t], args[t]).items():
                        new_args = args[:t] + ((dd, ll),) + args[t + 1:]
                        for kk, vv in self.apply_key(fkey, new_args).items():
                            add_into(ring, rhs, kk,
                                     ring.mul(ring.from_int(s), ring.mul(v, vv)))
                    pre += args[t][0]
                if not lc_eq(ring, lhs, rhs):
                    return {"axiom": "algebra-chain-map", "f": fkey, "args": args}
        w = self._validate_composition()
        if w is not None:
            return w
        return self._validate_symmetry()

    def _diff_out(self, y, lc) -> dict:
        ring = self.ring
        out = {}
        for (d, l), v in lc.items():
            for kk, vv in self.diff_carrier(y, (d, l)).items():
                add_into(ring, out, kk, ring.mul(v, vv))
        return out

    def _validate_composition(self):
        ring = self.ring
        M = self.M
        for f in M.all_keys():
            for g in M.all_keys():
                if M.arity(f) + M.arity(g) - 1 > M.arity_max:
                    continue  # composite lies beyond the truncation bound
                for i in M._slots(f, g):
                    comp = M.compose_keys(f, i, g)
                    fxs, gxs = f[0], g[0]
                    new_xs = gxs[:i - 1] + fxs + gxs[i:]
                    for args in self.arg_tuples(new_xs):
                        lhs = {}
                        for k, v in comp.items():
                            for kk, vv in self.apply_key(k, args).items():
                                add_into(ring, lhs, kk, ring.mul(v, vv))
                        before = args[:i - 1]
                        mid = args[i - 1:i - 1 + len(fxs)]
                        after = args[i - 1 + len(fxs):]
                        pre_deg = sum(d for d, _ in before)
                        sign = -1 if (f[2] * (g[2] + pre_deg)) % 2 else 1
                        rhs = {}
                        for (dd, ll), v in self.apply_key(f, mid).items():
                            outer = before + ((dd, ll),) + after
                            for kk, vv in self.apply_key(g, outer).items():
                                add_into(ring, rhs, kk,
                                         ring.mul(ring.from_int(sign),
                                                  ring.mul(v, vv)))
                        if not lc_eq(ring, lhs, rhs):
                            return {"axiom": "algebra-composition", "f": f,
                                    "g": g, "i": i, "args": args}
        return None

    def _validate_symmetry(self):
        ring = self.ring
        M = self.M
        for f in M.all_keys():
            n = M.arity(f)
            xs = f[0]
            for t in range(1, n):
                sigma = Perm.transposition(n, t, t + 1)
                af = M.act(sigma, f)
                new_xs = tuple(xs[sigma(k) - 1] for k in range(1, n + 1))
                for args in self.arg_tuples(new_xs):
                    lhs = {}
                    for k, v in af.items():
                        for kk, vv in self.apply_key(k, args).items():
                            add_into(ring, lhs, kk, ring.mul(v, vv))
                    inv = sigma.inverse()
                    back = tuple(args[inv(j) - 1] for j in range(1, n + 1))
                    ks = koszul_sign(sigma, [d for d, _ in args])
                    rhs = scaled_int(ring, self.apply_key(f, back), ks)
                    if not lc_eq(ring, lhs, rhs):
                        return {"axiom": "eqSymAc-algebra", "f": f, "t": t,
                                "args": args}
        return None


def validate_algebra(M: MultiCat, A: MultiAlgebra):
    if A.M is not M:
        raise EngineError("algebra belongs to a different multicategory")
    return A.validate()


# ---------------------------------------------------------------------------
# Multifunctors
# ---------------------------------------------------------------------------


class MultiFunctor:
    """A strict map of multicategories: object map + key-level linear maps."""

    def __init__(self, source: MultiCat, target: MultiCat, obj_map, key_fn,
                 name="pi"):
        self.source = source
        self.target = target
        self.obj_map = dict(obj_map)
        self._key_fn = key_fn
        self._cache = {}
        self.name = name

    def on_obj(self, x):
        return self.obj_map[x]

    def on_key(self, key) -> dict:
        cached = self._cache.get(key)
        if cached is None:
            cached = self._key_fn(self, key)
            want_xs = tuple(self.on_obj(x) for x in key[0])
            want_y = self.on_obj(key[1])
            for k in cached:
                if k[0] != want_xs or k[1] != want_y or k[2] != key[2]:
                    raise EngineError(f"functor lands off-signature at {key}")
            self._cache[key] = cached
        return cached

    def on_lc(self, lc: dict) -> dict:
        return linear(self.source.ring, self.on_key, lc)

    def restrict_to(self, sub: MultiCat) -> "MultiFunctor":
        return MultiFunctor(sub, self.target,
                            {x: self.obj_map[x] for x in sub.objects},
                            self._key_fn, name=self.name)

    def validate(self):
        ring = self.source.ring
        S, T = self.source, self.target
        for x in S.objects:
            if not lc_eq(ring, self.on_key(S.unit_key(x)),
                         {T.unit_key(self.on_obj(x)): ring.one}):
                return {"axiom": "functor-unit", "object": x}
        for f in S.all_keys():
            if not lc_eq(ring, self.on_lc(S.diff_key(f)),
                         linear(ring, T.diff_key, self.on_key(f))):
                return {"axiom": "functor-chain-map", "f": f}
            for t in range(1, S.arity(f)):
                lhs = self.on_lc(S.act_transposition(t, f))
                rhs = linear(ring, lambda k, tt=t: T.act_transposition(tt, k),
                             self.on_key(f))
                if not lc_eq(ring, lhs, rhs):
                    return {"axiom": "functor-symmetry", "f": f, "t": t}
        for f in S.all_keys():
            for g in S.all_keys():
                for i in S._slots(f, g):
                    lhs = self.on_lc(S.compose_keys(f, i, g))
                    rhs = bilinear(ring,
                                   lambda a, b, s=i: T.compose_keys(a, s, b),
                                   self.on_key(f), self.on_key(g))
                    if not lc_eq(ring, lhs, rhs):
                        return {"axiom": "functor-composition", "f": f,
                                "g": g, "i": i}
        return None


# ---------------------------------------------------------------------------
# The endomorphism multicategory (authoritative generator of valid fixtures)
# ---------------------------------------------------------------------------


def _hom_basis(sources, target):
    """Elementary maps: one basis tuple of the sources to one target label."""
    pools = []
    for c in sources:
        pools.append([(d, l) for d in c.degrees() for l in c.labels(d)])
    out = []
    for args in itertools.product(*pools):
        for od in target.degrees():
            for ol in target.labels(od):
                deg = od - sum(d for d, _ in args)
                out.append((deg, ("h", tuple(args), (od, ol))))
    return out


def endomorphism_multicat(ring, carriers: dict, arity_max: int, name="End"):
    """The endomorphism multicategory of a family of complexes, with a formal
    unit adjoined per object; returns (M, tautological MultiAlgebra).

    M(xs; y) has basis the elementary maps (args -> out) in
    Hom(C_{x_1} (x) ... (x) C_{x_n}, C_y); composition is composition of
    multilinear maps with Koszul signs, transpositions act by permuting the
    arguments.
    """
    objects = sorted(carriers, key=repr)
    complexes = {}
    for n in range(1, arity_max + 1):
        for xs in itertools.product(objects, repeat=n):
            for y in objects:
                basis = {}
                for deg, label in _hom_basis([carriers[x] for x in xs],
                                             carriers[y]):
                    basis.setdefault(deg, []).append(label)
                if n == 1 and xs[0] == y:
                    basis.setdefault(0, []).insert(0, ("u",))
                cx = ChainComplex(ring, "Z", basis, {}, validate=False)
                diff = _hom_diff(ring, cx, [carriers[x] for x in xs], carriers[y])
                cx.diff = diff
                cx.validate()
                complexes[(xs, y)] = cx

    def compose_fn(M, fkey, i, gkey):
        return _endo_compose(ring, fkey, i, gkey)

    def sym_fn(M, i, fkey):
        return _endo_transpose(ring, i, fkey)

    units = {x: ("u",) for x in objects}
    M = MultiCat(ring, objects, arity_max, complexes, compose_fn, sym_fn, units,
                 name=name)

    def action_fn(alg, fkey, args):
        label = fkey[3]
        if label == ("u",):
            return {args[0]: ring.one}
        _, fargs, out = label
        if tuple(args) == fargs:
            return {out: ring.one}
        return {}

    A = MultiAlgebra(M, carriers, action_fn, name=f"taut({name})")
    return M, A


def _hom_diff(ring, cx, sources, target):
    from .linalg import Mat
    diff = {}
    for d in cx.degrees():
        pd = cx.pred(d)
        m = Mat.zeros(ring, cx.dim(pd), cx.dim(d))
        for j, label in enumerate(cx.labels(d)):
            if label == ("u",):
                continue
            _, args, (od, ol) = label
            # d_target o F
            tc = target
            for i2, v in tc.d_mat(od).column(tc.index(od, ol)).items():
                tl = ("h", args, (od - 1, tc.labels(od - 1)[i2]))
                if cx.has_label(pd, tl):
                    m.add_to(cx.index(pd, tl), j, v)
            # -(-1)^{|F|} F o d_tensor: F only sees tuples whose differential
            # hits `args`; equivalently raise one slot of args.
            sgn_f = -1 if d % 2 else 1
            pre = 0
            for t, (ad, al) in enumerate(args):
                src = sources[t]
                up = src.succ(ad)
                for jj, lab in enumerate(src.labels(up)):
                    coeff = src.d_mat(up).get(src.index(ad, al), jj) \
                        if src.dim(ad) else ring.zero
                    if ring.is_zero(coeff):
                        continue
                    new_args = args[:t] + ((up, lab),) + args[t + 1:]
                    tl = ("h", new_args, (od, ol))
                    s = sgn_f * (-1 if pre % 2 else 1)
                    m.add_to(cx.index(pd, tl), j, ring.mul(ring.from_int(-s), coeff))
                pre += ad
        if not m.is_zero():
            diff[d] = m
    return diff


def _endo_compose(ring, fkey, i, gkey):
    # the composition map in the tensor order (f, g) carries the Koszul factor
    # (-1)^{|f||g|} relative to plain function composition g o (1 x f x 1)
    fl, gl = fkey[3], gkey[3]
    if fl == ("u",):
        return {gkey: ring.one}
    if gl == ("u",):
        return {fkey: ring.one}
    _, fargs, fout = fl
    _, gargs, gout = gl
    if gargs[i - 1] != fout:
        return {}
    pre_deg = sum(d for d, _ in gargs[:i - 1])
    exp = fkey[2] * gkey[2] + fkey[2] * pre_deg
    sign = -1 if exp % 2 else 1
    new_args = gargs[:i - 1] + fargs + gargs[i:]
    xs = gkey[0][:i - 1] + fkey[0] + gkey[0][i:]
    key = (xs, gkey[1], fkey[2] + gkey[2], ("h", new_args, gout))
    return {key: ring.from_int(sign)}


def _endo_transpose(ring, i, fkey):
    xs, y, d, label = fkey
    _, args, out = label
    sign = -1 if (args[i - 1][0] % 2 and args[i][0] % 2) else 1
    new_args = args[:i - 1] + (args[i], args[i - 1]) + args[i + 1:]
    new_xs = xs[:i - 1] + (xs[i], xs[i - 1]) + xs[i + 1:]
    return {(new_xs, y, d, ("h", new_args, out)): ring.from_int(sign)}


# ---------------------------------------------------------------------------
# Table-driven multicategories (for presentation files and small fixtures)
# ---------------------------------------------------------------------------


def table_multicat(ring, objects, arity_max, sig_bases, diff_entries,
                   comp_entries, sym_entries, units, name="M") -> MultiCat:
    """Build from explicit tables keyed by globally unique morphism labels.

    sig_bases: {(xs, y): {degree: [labels]}}
    diff_entries: {label: [(coeff, label')]}
    comp_entries: {(f_label, i, g_label): [(coeff, label')]}
    sym_entries: {(i, f_label): [(coeff, label')]}
    units: {object: label}
    """
    owner = {}
    complexes = {}
    for (xs, y), basis in sig_bases.items():
        xs = tuple(xs)
        entries = {}
        for d, ls in basis.items():
            for l in ls:
                if l in owner:
                    raise EngineError(f"duplicate label {l!r}")
                owner[l] = (xs, y, d)
        for d, ls in basis.items():
            for l in ls:
                for coeff, l2 in diff_entries.get(l, ()):
                    entries[(d, l, l2)] = coeff
        complexes[(xs, y)] = ChainComplex.free(ring, basis, entries)

    def lookup(label):
        xs, y, d = owner[label]
        return (xs, y, d, label)

    def compose_fn(M, fkey, i, gkey):
        hits = comp_entries.get((fkey[3], i, gkey[3]))
        if hits is None:
            if fkey[3] == units.get(fkey[1]):
                return {gkey: ring.one}
            if gkey[3] == units.get(gkey[1]) and M.arity(gkey) == 1:
                return {fkey: ring.one}
            raise ArityOverflow(
                f"no composition entry for ({fkey[3]}, {i}, {gkey[3]})")
        out = {}
        for coeff, l2 in hits:
            add_into(ring, out, lookup(l2), ring.canon(coeff))
        return out

    def sym_fn(M, i, fkey):
        hits = sym_entries.get((i, fkey[3]))
        if hits is None:
            raise ArityOverflow(f"no symmetry entry for ({i}, {fkey[3]})")
        out = {}
        for coeff, l2 in hits:
            add_into(ring, out, lookup(l2), ring.canon(coeff))
        return out

    return MultiCat(ring, objects, arity_max, complexes, compose_fn, sym_fn,
                    units, name=name)


# ---------------------------------------------------------------------------
# The PROP category
# ---------------------------------------------------------------------------


def _surjections(n, m):
    if m > n:
        return
    for f in itertools.product(range(1, m + 1), repeat=n):
        if len(set(f)) == m:
            yield f


def _reorder_sign(ring, degrees_src, order):
    """Koszul sign of rearranging factors of the given source degrees into
    the order listed by source indices."""
    sign = 1
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            if order[a] > order[b] and degrees_src[order[a]] % 2 \
                    and degrees_src[order[b]] % 2:
                sign = -sign
    return ring.from_int(sign)


class PropData:
    """The PROP category of a multicategory, plus its permutation morphisms."""

    def __init__(self, M, cat, seq_len_max, identity_flags):
        self.M = M
        self.cat = cat
        self.seq_len_max = seq_len_max
        self.identity_flags = identity_flags

    def aut_group(self, seq):
        n = len(seq)
        return [Perm(p) for p in itertools.permutations(range(1, n + 1))
                if tuple(seq[i - 1] for i in p) == tuple(seq)]

    def perm_morphism_key(self, seq, perm: Perm):
        label = ("p", perm.images, tuple(self.M.unit_key(x)[3] for x in seq))
        return (tuple(seq), tuple(seq), 0, label)


def prop_of(M: MultiCat, seq_len_max: int) -> PropData:
    """May's PROP category on nondecreasing object sequences.

    Morphism complexes are direct sums over surjections f: [n] -> [m] of
    tensor products of multimorphism complexes; composition composes fiberwise
    and then applies the unique block shuffle aligning the domains, with
    Koszul signs throughout.
    """
    ring = M.ring
    order = {x: i for i, x in enumerate(M.objects)}
    seqs = []
    for n in range(1, seq_len_max + 1):
        for xs in itertools.combinations_with_replacement(M.objects, n):
            seqs.append(tuple(sorted(xs, key=lambda x: order[x])))
    homs = {}
    for a in seqs:
        for b in seqs:
            basis = {}
            for f in _surjections(len(a), len(b)):
                fibers = [tuple(t + 1 for t in range(len(a)) if f[t] == j + 1)
                          for j in range(len(b))]
                pools = []
                dead = False
                for j, fib in enumerate(fibers):
                    xs = tuple(a[t - 1] for t in fib)
                    keys = M.basis_keys(xs, b[j])
                    if not keys:
                        dead = True
                        break
                    pools.append(keys)
                if dead:
                    continue
                for combo in itertools.product(*pools):
                    deg = sum(k[2] for k in combo)
                    basis.setdefault(deg, []).append(("s", f, combo))
            if basis:
                cpx = ChainComplex(ring, "Z", basis, {}, validate=False)
                cpx.diff = _prop_diff(ring, M, cpx)
                cpx.validate()
                homs[(a, b)] = cpx

    def compose_fn(C, ukey, vkey):
        return _prop_compose(ring, M, C, ukey, vkey)

    units = {}
    for a in seqs:
        f = tuple(range(1, len(a) + 1))
        units[a] = ("s", f, tuple(M.unit_key(x) for x in a))
    cat = DgCategory(ring, seqs, homs, compose_fn, units, name=f"P({M.name})")

    identity_flags = {}
    for a in seqs:
        identity_flags[a] = _identity_flag(M, cat, a)
    return PropData(M, cat, seq_len_max, identity_flags)


def _prop_diff(ring, M, cpx):
    from .linalg import Mat
    diff = {}
    for d in cpx.degrees():
        pd = cpx.pred(d)
        m = Mat.zeros(ring, cpx.dim(pd), cpx.dim(d))
        for j, (_, f, combo) in enumerate(cpx.labels(d)):
            pre = 0
            for t, key in enumerate(combo):
                s = -1 if pre % 2 else 1
                for k2, v in M.diff_key(key).items():
                    tl = ("s", f, combo[:t] + (k2,) + combo[t + 1:])
                    m.add_to(cpx.index(pd, tl), j,
                             ring.mul(ring.from_int(s), v))
                pre += key[2]
        if not m.is_zero():
            diff[d] = m
    return diff


def _prop_compose(ring, M, C, ukey, vkey):
    a, b = ukey[0], ukey[1]
    c = vkey[1]
    _, f, phis = ukey[3]
    _, g, psis = vkey[3]
    m, p = len(b), len(c)
    # Koszul: rearrange (phi_1..phi_m, psi_1..psi_p) into
    # (phis of g^{-1}(1), psi_1, phis of g^{-1}(2), psi_2, ...)
    degs = [k[2] for k in phis] + [k[2] for k in psis]
    order = []
    fibers_g = [sorted(t + 1 for t in range(m) if g[t] == k + 1)
                for k in range(p)]
    for k in range(p):
        order.extend(t - 1 for t in fibers_g[k])
        order.append(m + k)
    sign0 = _reorder_sign(ring, degs, order)
    chi_parts = []
    for k in range(p):
        fib = fibers_g[k]
        gam = M.gamma(psis[k], [phis[t - 1] for t in fib])
        # aligning shuffle: concatenated f-fibers vs sorted union
        concat = []
        for t in fib:
            concat.extend(sorted(s + 1 for s in range(len(a)) if f[s] == t))
        srt = sorted(concat)
        rank = {v: i + 1 for i, v in enumerate(srt)}
        sigma = Perm([rank[v] for v in concat])
        gam = M.act(sigma.inverse(), gam)
        chi_parts.append(gam)
    # expand the tensor of the chi parts multilinearly
    gf = tuple(g[f[s] - 1] for s in range(len(a)))
    acc = {(): sign0}
    for part in chi_parts:
        new = {}
        for combo, cval in acc.items():
            for kk, vv in part.items():
                new[combo + (kk,)] = ring.mul(cval, vv)
        acc = new
    out = {}
    target = C.hom(a, c)
    for combo, cval in acc.items():
        if ring.is_zero(cval):
            continue
        deg = sum(k[2] for k in combo)
        label = ("s", gf, combo)
        if target is None or not target.has_label(deg, label):
            raise EngineError(f"composite label missing: {label}")
        add_into(ring, out, (a, c, deg, label), cval)
    return out


def _identity_flag(M, cat, a) -> bool:
    """Does P(a, a) equal the group ring of Aut(a) on permutation morphisms?"""
    ring = M.ring
    n = len(a)
    auts = [Perm(p) for p in itertools.permutations(range(1, n + 1))
            if tuple(a[i - 1] for i in p) == tuple(a)]
    hom = cat.hom(a, a)
    if hom is None or hom.degrees() != [0] or hom.dim(0) != len(auts):
        return False
    units = tuple(M.unit_key(x) for x in a)
    for g in auts:
        label = ("s", g.images, units)
        if not hom.has_label(0, label):
            return False
    return True


def perm_morphism(P: PropData, seq, perm: Perm):
    units = tuple(P.M.unit_key(x) for x in seq)
    return (tuple(seq), tuple(seq), 0, ("s", perm.images, units))


# ---------------------------------------------------------------------------
# Freeness report
# ---------------------------------------------------------------------------


class FreenessReport:
    def __init__(self, identity, freeness1, freeness2, details):
        self.identity = identity
        self.freeness1 = freeness1
        self.freeness2 = freeness2
        self.details = details

    @property
    def all_ok(self):
        return self.identity and self.freeness1 and self.freeness2

    def as_dict(self):
        return {"identity": self.identity, "freeness1": self.freeness1,
                "freeness2": self.freeness2, "details": self.details}

    def __repr__(self):
        return (f"FreenessReport(identity={self.identity}, "
                f"freeness1={self.freeness1}, freeness2={self.freeness2})")


def check_freeness(M: MultiCat, pi: MultiFunctor, seq_len_max=2,
                   prop: PropData | None = None) -> FreenessReport:
    """The three conditions of the freeness hypothesis, within bounds.

    pi maps M to a one-object multicategory O; Freeness 2 concerns the right
    symmetric-group action on O(n) for n <= O.arity_max.
    """
    ring = M.ring
    O = pi.target
    if len(O.objects) != 1:
        raise EngineError("the target of pi must have one object")
    if prop is None:
        prop = prop_of(M, seq_len_max)
    details = {}
    identity = all(prop.identity_flags.values())
    details["identity"] = {repr(k): v for k, v in prop.identity_flags.items()}

    freeness1 = True
    f1 = {}
    for a in prop.cat.objects:
        auts = prop.aut_group(a)
        gens = _group_gens(auts)
        for b in prop.cat.objects:
            hom = prop.cat.hom(a, b)
            if hom is None:
                continue
            gen_maps = []
            for g in gens:
                key = perm_morphism(prop, a, g)

                def fn(d, label, key=key, a=a, b=b):
                    u = (a, b, d, label)
                    out = prop.cat.compose_keys(key, u)
                    return [((kk[3]), v) for kk, v in out.items()]

                gen_maps.append(ChainMap.from_label_fn2(hom, hom, 0, fn,
                                                        validate=False))
            mod = GroupRingModule("right", len(a), gens, hom, gen_maps)
            rep = is_free_module(mod)
            f1[f"{a}->{b}"] = bool(rep)
            if not rep:
                freeness1 = False
    details["freeness1"] = f1

    freeness2 = True
    f2 = {}
    star = O.objects[0]
    for n in range(1, O.arity_max + 1):
        xs = (star,) * n
        hom = O.complex(xs, star)
        if hom is None:
            f2[n] = True  # zero complex is free
            continue
        gens = [Perm.transposition(n, i, i + 1) for i in range(1, n)]
        gen_maps = []
        for idx, g in enumerate(gens):
            i = idx + 1

            def fn(d, label, i=i, xs=xs):
                out = O.act_transposition(i, (xs, star, d, label))
                return [((kk[3]), v) for kk, v in out.items()]

            gen_maps.append(ChainMap.from_label_fn2(hom, hom, 0, fn,
                                                    validate=False))
        if n == 1:
            f2[n] = True
            continue
        mod = GroupRingModule("right", n, gens, hom, gen_maps)
        rep = is_free_module(mod)
        f2[n] = bool(rep)
        if not rep:
            freeness2 = False
    details["freeness2"] = f2
    return FreenessReport(identity, freeness1, freeness2, details)


def _group_gens(elements):
    """A small generating set for an explicitly listed permutation group."""
    elements = sorted(elements, key=lambda p: p.images)
    n = elements[0].n
    gens = []
    have = {Perm.identity(n)}
    for g in elements:
        if g in have:
            continue
        gens.append(g)
        have = set(enumerate_group(gens, n))
        if len(have) == len(elements):
            break
    return gens
