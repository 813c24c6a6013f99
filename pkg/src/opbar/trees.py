"""Pre-stable trees, weighted trees, and leveled trees.

Pre-stable trees are rooted: the output external edge hangs off the root
vertex, input external edges carry the labels 1..n, and every vertex has at
least one incoming slot (valency >= 2).  Trees are stored in a canonical
nested form (children sorted by minimal input label), so structural equality
is plain equality.

Weighted trees carry a positive rational weight per edge, subject to the two
constraints: the outgoing weight at each vertex is the sum of the incoming
weights, and each incoming weight w satisfies w / w_out >= 1/(2^k - 1) where
k is the number of incoming edges at that vertex.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import BadIndex, BadLevel, ExternalEdge

# A node is ("v", (slot, ...)); a slot is ("in", label) or a node.


def corolla_node(labels):
    return ("v", tuple(("in", i) for i in sorted(labels)))


def _slot_min_label(slot):
    if slot[0] == "in":
        return slot[1]
    return min(_slot_min_label(s) for s in slot[1])


def _canon_node(node):
    slots = tuple(
        s if s[0] == "in" else _canon_node(s) for s in node[1]
    )
    return ("v", tuple(sorted(slots, key=_slot_min_label)))


def _node_labels(node):
    out = []
    for s in node[1]:
        if s[0] == "in":
            out.append(s[1])
        else:
            out.extend(_node_labels(s))
    return out


class PreStableTree:
    """A rooted tree with labeled inputs {1..n} and one output."""

    __slots__ = ("root", "n_inputs")

    def __init__(self, root):
        root = _canon_node(root)
        labels = sorted(_node_labels(root))
        if labels != list(range(1, len(labels) + 1)):
            raise BadIndex(f"input labels must be 1..n, got {labels}")
        self._check_valency(root)
        self.root = root
        self.n_inputs = len(labels)

    @staticmethod
    def _check_valency(node):
        if len(node[1]) < 1:
            raise BadIndex("every vertex needs at least one incoming edge")
        for s in node[1]:
            if s[0] == "v":
                PreStableTree._check_valency(s)

    @staticmethod
    def corolla(n: int) -> "PreStableTree":
        if n < 1:
            raise BadIndex("a corolla needs at least one input")
        return PreStableTree(corolla_node(range(1, n + 1)))

    # -- structure queries ------------------------------------------------

    def vertices(self):
        """Addresses of all vertices (tuples of child-slot indices from the root)."""
        out = []

        def walk(node, addr):
            out.append(addr)
            for k, s in enumerate(node[1]):
                if s[0] == "v":
                    walk(s, addr + (k,))

        walk(self.root, ())
        return out

    def node_at(self, addr):
        node = self.root
        for k in addr:
            node = node[1][k]
        return node

    def valency(self, addr) -> int:
        return len(self.node_at(addr)[1]) + 1

    def internal_edges(self):
        """Internal edges, addressed by their upper vertex (never the root)."""
        return [a for a in self.vertices() if a]

    def __eq__(self, other):
        return isinstance(other, PreStableTree) and self.root == other.root

    def __hash__(self):
        return hash(self.root)

    def __repr__(self):
        return f"PreStableTree({self.root!r})"

    # -- surgeries ----------------------------------------------------------

    def collapse_edge(self, addr) -> "PreStableTree":
        """Contract the internal edge above the vertex at `addr`."""
        if not addr:
            raise ExternalEdge("the output edge cannot be collapsed")

        def walk(node, path):
            if not path:
                return node
            k = path[0]
            slots = list(node[1])
            child = slots[k]
            if child[0] != "v":
                raise ExternalEdge("input edges cannot be collapsed")
            if len(path) == 1:
                slots[k:k + 1] = list(child[1])  # splice child's slots in place
            else:
                slots[k] = walk(child, path[1:])
            return ("v", tuple(slots))

        return PreStableTree(walk(self.root, list(addr)))

    def collapse_all(self) -> "PreStableTree":
        t = self
        while t.internal_edges():
            t = t.collapse_edge(t.internal_edges()[0])
        return t

    def compose(self, i: int, other: "PreStableTree") -> "PreStableTree":
        """Graft self's output into input slot i of other."""
        if not (1 <= i <= other.n_inputs):
            raise BadIndex(f"slot {i} out of range 1..{other.n_inputs}")
        shift = self.n_inputs - 1

        def relabel(node, fn):
            slots = []
            for s in node[1]:
                if s[0] == "in":
                    slots.append(("in", fn(s[1])))
                else:
                    slots.append(relabel(s, fn))
            return ("v", tuple(slots))

        sub = relabel(self.root, lambda l: l + (i - 1))

        def graft(node):
            slots = []
            for s in node[1]:
                if s == ("in", i):
                    slots.append(sub)
                elif s[0] == "in":
                    slots.append(("in", s[1] if s[1] < i else s[1] + shift))
                else:
                    slots.append(graft(s))
            return ("v", tuple(slots))

        return PreStableTree(graft(other.root))


class WeightedTree:
    """A pre-stable tree with positive rational edge weights.

    Weights are keyed by edge: ("out",) for the output edge, ("in", label)
    for input edges, and ("e", addr) for the internal edge above the vertex
    at address addr.
    """

    __slots__ = ("tree", "weights")

    def __init__(self, tree: PreStableTree, weights: dict):
        self.tree = tree
        self.weights = {k: Fraction(v) for k, v in weights.items()}
        self._validate()

    def _edge_above(self, addr):
        return ("out",) if not addr else ("e", addr)

    def in_edges(self, addr):
        node = self.tree.node_at(addr)
        out = []
        for k, s in enumerate(node[1]):
            if s[0] == "in":
                out.append(("in", s[1]))
            else:
                out.append(("e", addr + (k,)))
        return out

    def _validate(self):
        for w in self.weights.values():
            if w <= 0:
                raise BadIndex("weights must be positive")
        for addr in self.tree.vertices():
            ins = self.in_edges(addr)
            out_edge = self._edge_above(addr)
            missing = [e for e in ins + [out_edge] if e not in self.weights]
            if missing:
                raise BadIndex(f"missing weights: {missing}")
            w_out = self.weights[out_edge]
            total = sum(self.weights[e] for e in ins)
            if total != w_out:
                raise BadIndex(
                    f"weight sum violated at {addr}: {total} != {w_out}")
            bound = Fraction(1, 2 ** len(ins) - 1)
            for e in ins:
                if Fraction(self.weights[e], w_out) < bound:
                    raise BadIndex(
                        f"weight bound violated at {addr}, edge {e}: "
                        f"{self.weights[e]}/{w_out} < {bound}")

    def rescale(self, factor) -> "WeightedTree":
        factor = Fraction(factor)
        return WeightedTree(self.tree,
                            {k: v * factor for k, v in self.weights.items()})

    @staticmethod
    def corolla(input_weights) -> "WeightedTree":
        ws = [Fraction(w) for w in input_weights]
        t = PreStableTree.corolla(len(ws))
        weights = {("in", i + 1): w for i, w in enumerate(ws)}
        weights[("out",)] = sum(ws)
        return WeightedTree(t, weights)

    def compose(self, i: int, other: "WeightedTree") -> "WeightedTree":
        """Graft with the global rescaling that matches the attachment weights.

        Edge addresses change under canonical re-sorting, so weights on the
        composed tree are recomputed from the leaf weights (closedness forces
        every internal weight to be the sum of the leaf weights above it).
        """
        target = other.weights[("in", i)]
        scaled = self.rescale(Fraction(target, self.weights[("out",)]))
        tree = scaled.tree.compose(i, other.tree)
        shift = scaled.tree.n_inputs - 1
        return WeightedTree._reweight(tree, scaled, other, i, shift)

    @staticmethod
    def _reweight(tree, inner: "WeightedTree", outer: "WeightedTree", i, shift):
        """Assign weights on the composed tree from leaf weights upward."""
        leaf_weight = {}
        for l in range(1, tree.n_inputs + 1):
            if l < i:
                leaf_weight[l] = outer.weights[("in", l)]
            elif l < i + inner.tree.n_inputs:
                leaf_weight[l] = inner.weights[("in", l - i + 1)]
            else:
                leaf_weight[l] = outer.weights[("in", l - shift)]
        weights = {("in", l): w for l, w in leaf_weight.items()}

        def total(node):
            acc = Fraction(0)
            for s in node[1]:
                if s[0] == "in":
                    acc += leaf_weight[s[1]]
                else:
                    acc += total(s)
            return acc

        def walk(node, addr):
            for k, s in enumerate(node[1]):
                if s[0] == "v":
                    weights[("e", addr + (k,))] = total(s)
                    walk(s, addr + (k,))

        weights[("out",)] = total(tree.root)
        walk(tree.root, ())
        return WeightedTree(tree, weights)

    def __eq__(self, other):
        return isinstance(other, WeightedTree) and self.tree == other.tree \
            and self.weights == other.weights

    def __repr__(self):
        return f"WeightedTree({self.tree!r})"


class LeveledTree:
    """Level sets V_0 (a singleton root), ..., V_{n+1} (leaves) and surjections.

    `maps[i][v]` is the image in V_i of vertex v in V_{i+1}; heights count the
    levels strictly between root and leaves, so a height-n tree has n+2 level
    sets and n+1 connecting surjections.
    """

    __slots__ = ("sizes", "maps")

    def __init__(self, sizes, maps):
        sizes = list(sizes)
        maps = [tuple(m) for m in maps]
        if not sizes or sizes[0] != 1:
            raise BadLevel("V_0 must be a singleton root")
        if len(maps) != len(sizes) - 1:
            raise BadLevel("need one surjection per adjacent pair of levels")
        for i, m in enumerate(maps):
            if len(m) != sizes[i + 1]:
                raise BadLevel(f"map {i} has wrong source size")
            if set(m) != set(range(sizes[i])):
                raise BadLevel(f"map from V_{i+1} to V_{i} is not surjective")
        self.sizes = sizes
        self.maps = maps

    @property
    def height(self) -> int:
        return len(self.sizes) - 2

    @property
    def n_leaves(self) -> int:
        return self.sizes[-1]

    def collapse_level(self, i: int) -> "LeveledTree":
        """Face map: collapse the edges between level i and level i+1."""
        n = self.height
        if not (0 <= i <= n):
            raise BadLevel(f"face index {i} out of range 0..{n}")
        sizes = self.sizes[:i + 1] + self.sizes[i + 2:]
        maps = list(self.maps[:i])
        if i + 1 < len(self.maps):
            lower = self.maps[i]
            upper = self.maps[i + 1]
            maps.append(tuple(lower[v] for v in upper))
            maps.extend(self.maps[i + 2:])
        return LeveledTree(sizes, maps)

    def insert_level(self, i: int) -> "LeveledTree":
        """Degeneracy: duplicate level i+1, joined by the identity."""
        n = self.height
        if not (0 <= i <= n):
            raise BadLevel(f"degeneracy index {i} out of range 0..{n}")
        sizes = self.sizes[:i + 2] + self.sizes[i + 1:]
        ident = tuple(range(self.sizes[i + 1]))
        maps = list(self.maps[:i + 1]) + [ident] + list(self.maps[i + 1:])
        return LeveledTree(sizes, maps)

    def __eq__(self, other):
        return isinstance(other, LeveledTree) and self.sizes == other.sizes \
            and self.maps == other.maps

    def __hash__(self):
        return hash((tuple(self.sizes), tuple(self.maps)))

    def __repr__(self):
        return f"LeveledTree(sizes={self.sizes})"
