"""Finite trees with vertex labels and the median (center) structure.

A finite tree here always stands for the convex hull of finitely many points
of a dendrite.  Vertices carry the order of the point in the ambient space:
an integer >= 3 or "inf" for branch points, "reg" for regular points (order
2) and "end" for end points (order 1).  The center map c(x, y, z) picks the
unique common vertex of the three pairwise paths; a set is c-closed when it
is stable under the center map.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .errors import LimitExceeded, NotPositiveType, UnknownVertex

INF = "inf"
REGULAR = "reg"
END = "end"

Label = object  # int >= 3, or one of INF / REGULAR / END


def degree_cap(label) -> Optional[int]:
    """Maximum degree a vertex with this label may have, None for unbounded."""
    if label == INF:
        return None
    if label == REGULAR:
        return 2
    if label == END:
        return 1
    return int(label)


def is_branch_label(label) -> bool:
    return label == INF or (isinstance(label, int) and label >= 3)


def label_to_json(label):
    return label


def label_from_json(value):
    if value in (INF, REGULAR, END):
        return value
    return int(value)


@dataclass
class FiniteTree:
    """A finite labelled tree: `labels` maps vertex id to its label, `adj`
    maps vertex id to the list of neighbours."""

    labels: Dict[int, Label]
    adj: Dict[int, List[int]]

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def from_edges(labels: Mapping[int, Label], edges: Iterable[Tuple[int, int]]) -> "FiniteTree":
        adj: Dict[int, List[int]] = {v: [] for v in labels}
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
        return FiniteTree(dict(labels), adj)

    def copy(self) -> "FiniteTree":
        return FiniteTree(dict(self.labels), {v: list(ns) for v, ns in self.adj.items()})

    # -- basic structure -------------------------------------------------------

    @property
    def vertices(self) -> List[int]:
        return list(self.labels)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def check_vertex(self, v: int) -> None:
        if v not in self.labels:
            raise UnknownVertex(f"vertex {v!r} not in tree")

    def validate(self) -> None:
        """Check connectivity, acyclicity and the label/degree discipline."""
        if not self.labels:
            return
        seen = set()
        start = next(iter(self.labels))
        stack = [(start, None)]
        edges = 0
        while stack:
            v, parent = stack.pop()
            if v in seen:
                raise ValueError("tree contains a cycle")
            seen.add(v)
            for w in self.adj[v]:
                if w != parent:
                    stack.append((w, v))
                edges += 1
        if seen != set(self.labels):
            raise ValueError("tree is not connected")
        for v, label in self.labels.items():
            cap = degree_cap(label)
            if cap is not None and self.degree(v) > cap:
                raise ValueError(f"vertex {v} has degree {self.degree(v)} above its order cap {cap}")
            if self.degree(v) >= 3 and not is_branch_label(label):
                raise ValueError(f"vertex {v} has degree >= 3 but label {label!r}")

    # -- paths and the center map ---------------------------------------------

    def path(self, x: int, y: int) -> List[int]:
        """Vertices of the unique path from x to y, inclusive."""
        self.check_vertex(x)
        self.check_vertex(y)
        if x == y:
            return [x]
        parent: Dict[int, Optional[int]] = {x: None}
        queue = deque([x])
        while queue:
            v = queue.popleft()
            if v == y:
                break
            for w in self.adj[v]:
                if w not in parent:
                    parent[w] = v
                    queue.append(w)
        out = [y]
        while out[-1] != x:
            out.append(parent[out[-1]])
        out.reverse()
        return out

    def between(self, z: int, x: int, y: int) -> bool:
        """Whether z lies on the path from x to y (endpoints included)."""
        return z in self.path(x, y)

    def center(self, x: int, y: int, z: int) -> int:
        """The median of x, y, z: the unique common vertex of the three paths."""
        pxy = self.path(x, y)
        pyz = set(self.path(y, z))
        pzx = set(self.path(z, x))
        for v in pxy:
            if v in pyz and v in pzx:
                return v
        raise ValueError("no median found; structure is not a tree")

    def c_closure(self, ys: Iterable[int]) -> Set[int]:
        """Smallest superset of ys closed under the center map.

        One pass suffices: the set of centers of triples from ys is already
        c-closed.
        """
        pts = list(ys)
        for v in pts:
            self.check_vertex(v)
        out = set(pts)
        for a, b, c in combinations(pts, 3):
            out.add(self.center(a, b, c))
        return out

    def is_c_closed(self, ys: Iterable[int]) -> bool:
        pts = set(ys)
        return self.c_closure(pts) == pts

    def hull(self, pts: Iterable[int]) -> Set[int]:
        """All vertices lying on a path between two of the given points."""
        pts = list(pts)
        out = set(pts)
        for a, b in combinations(pts, 2):
            out.update(self.path(a, b))
        return out

    # -- serialization ----------------------------------------------------------

    def edges(self) -> List[Tuple[int, int]]:
        out = []
        for v in sorted(self.adj):
            for w in self.adj[v]:
                if v < w:
                    out.append((v, w))
        return out

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": v, "label": label_to_json(self.labels[v])} for v in sorted(self.labels)],
            "edges": [[a, b] for a, b in self.edges()],
        }

    @staticmethod
    def from_json(data: dict) -> "FiniteTree":
        labels = {entry["id"]: label_from_json(entry["label"]) for entry in data["vertices"]}
        return FiniteTree.from_edges(labels, [(a, b) for a, b in data["edges"]])

    def to_dot(self, colors: Optional[Mapping[int, str]] = None) -> str:
        lines = ["graph tree {"]
        for v in sorted(self.labels):
            attrs = [f'label="{v}:{self.labels[v]}"']
            if colors and v in colors:
                attrs.append(f'style=filled fillcolor="{colors[v]}"')
            lines.append(f"  {v} [{' '.join(attrs)}];")
        for a, b in self.edges():
            lines.append(f"  {a} -- {b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Betweenness relations
# ---------------------------------------------------------------------------


@dataclass
class BetweennessRel:
    """A ternary relation B(z; x, y) ("z lies between x and y") on a finite
    carrier, candidate for realization by a tree."""

    carrier: frozenset
    holds: Callable[[int, int, int], bool]

    @staticmethod
    def from_tree(tree: FiniteTree, carrier: Optional[Iterable[int]] = None) -> "BetweennessRel":
        pts = frozenset(carrier if carrier is not None else tree.labels)
        member: Dict[Tuple[int, int], Set[int]] = {}
        for a, b in combinations(sorted(pts), 2):
            member[(a, b)] = set(tree.path(a, b))

        def holds(z, x, y):
            if x == y:
                return z == x
            key = (x, y) if x < y else (y, x)
            return z in member[key]

        return BetweennessRel(pts, holds)

    @staticmethod
    def from_triples(carrier: Iterable[int], triples: Iterable[Tuple[int, int, int]]) -> "BetweennessRel":
        """Build from explicit (z, x, y) triples; symmetry in x,y and the
        reflexive atoms B(x;x,y) are filled in automatically."""
        pts = frozenset(carrier)
        table = set()
        for z, x, y in triples:
            table.add((z, x, y))
            table.add((z, y, x))
        for x in pts:
            for y in pts:
                table.add((x, x, y))
                table.add((y, x, y))

        def holds(z, x, y):
            return (z, x, y) in table

        return BetweennessRel(pts, holds)


@dataclass
class PositiveTypeReport:
    ok: bool
    reason: str = ""
    witness: Optional[Tuple[int, int, int]] = None

    def __bool__(self) -> bool:
        return self.ok


def _betweenness_axiom_check(b: BetweennessRel) -> PositiveTypeReport:
    pts = sorted(b.carrier)
    B = b.holds
    for x in pts:
        for y in pts:
            if not B(x, x, y):
                return PositiveTypeReport(False, "B(x;x,y) must hold", (x, x, y))
            for z in pts:
                if B(z, x, y) != B(z, y, x):
                    return PositiveTypeReport(False, "outer symmetry violated", (z, x, y))
                if x == y and B(z, x, y) and z != x:
                    return PositiveTypeReport(False, "a point between x and x must equal x", (z, x, y))
    for x in pts:
        for y in pts:
            for z in pts:
                if B(y, x, z) and B(z, x, y) and y != z:
                    return PositiveTypeReport(False, "antisymmetry violated", (x, y, z))
                for w in pts:
                    if B(y, x, z) and B(w, x, y) and not B(w, x, z):
                        return PositiveTypeReport(False, "transitivity violated", (x, y, z))
                    if B(y, x, z) and B(w, x, z) and not (B(y, x, w) or B(y, w, z)):
                        # two points on one arc must be comparable along it
                        return PositiveTypeReport(False, "two witnesses between a pair", (x, y, z))
    return PositiveTypeReport(True)


def _consistent_with(tree: FiniteTree, placed: Sequence[int], p: int, b: BetweennessRel) -> bool:
    """Check every betweenness atom involving p against the relation."""
    B = b.holds
    for x in placed:
        for y in placed:
            if tree.between(p, x, y) != B(p, x, y):
                return False
            if tree.between(x, p, y) != B(x, p, y):
                return False
    return True


def _try_realize(b: BetweennessRel, id_alloc: Optional[Callable[[], int]] = None):
    """Attempt to build a tree whose path betweenness matches b exactly.

    Returns (tree, None) on success or (None, witness_triple) on failure.
    New hub vertices receive ids from id_alloc (default: counter above the
    carrier's maximum id) and the label "inf".
    """
    pts = sorted(b.carrier)
    if id_alloc is None:
        counter = [max(pts, default=0) + 1]

        def id_alloc():
            counter[0] += 1
            return counter[0] - 1

    if not pts:
        return FiniteTree({}, {}), None
    tree = FiniteTree({pts[0]: INF}, {pts[0]: []})
    placed: List[int] = [pts[0]]
    for p in pts[1:]:
        candidates = []
        # replace an existing hub
        for v in sorted(tree.labels):
            if v not in placed:
                candidates.append(("at_hub", v))
        # split an existing edge
        for a, bb in tree.edges():
            candidates.append(("split", (a, bb)))
        # hang off an existing vertex
        for v in sorted(tree.labels):
            candidates.append(("leaf", v))
        # hang off the middle of an edge (new hub)
        for a, bb in tree.edges():
            candidates.append(("leaf_mid", (a, bb)))

        chosen = None
        for kind, where in candidates:
            trial = tree.copy()
            if kind == "at_hub":
                v = where
                trial.labels[p] = INF
                trial.adj[p] = trial.adj.pop(v)
                for w in trial.adj[p]:
                    trial.adj[w] = [p if u == v else u for u in trial.adj[w]]
                del trial.labels[v]
            elif kind == "split":
                a, bb = where
                trial.labels[p] = INF
                trial.adj[p] = [a, bb]
                trial.adj[a] = [p if u == bb else u for u in trial.adj[a]]
                trial.adj[bb] = [p if u == a else u for u in trial.adj[bb]]
            elif kind == "leaf":
                v = where
                trial.labels[p] = INF
                trial.adj[p] = [v]
                trial.adj[v] = trial.adj[v] + [p]
            else:  # leaf_mid
                a, bb = where
                h = id_alloc()
                trial.labels[h] = INF
                trial.adj[h] = [a, bb, p]
                trial.adj[a] = [h if u == bb else u for u in trial.adj[a]]
                trial.adj[bb] = [h if u == a else u for u in trial.adj[bb]]
                trial.labels[p] = INF
                trial.adj[p] = [h]
            if _consistent_with(trial, placed, p, b):
                chosen = trial
                break
        if chosen is None:
            return None, (placed[0], placed[-1], p)
        tree = chosen
        placed.append(p)
    # final exact check over all carrier triples
    B = b.holds
    for x in pts:
        for y in pts:
            for z in pts:
                if tree.between(z, x, y) != B(z, x, y):
                    return None, (x, y, z)
    return tree, None


def verify_positive_type(b: BetweennessRel) -> PositiveTypeReport:
    """True iff b satisfies the betweenness axioms and is realizable by a
    finite tree in which every triple has a unique median."""
    axioms = _betweenness_axiom_check(b)
    if not axioms:
        return axioms
    tree, witness = _try_realize(b)
    if tree is None:
        return PositiveTypeReport(False, "no tree realization", witness)
    return PositiveTypeReport(True)


def realize_tree(b: BetweennessRel, id_alloc: Optional[Callable[[], int]] = None) -> FiniteTree:
    """Build a tree realizing b; added vertices are medians of carrier points.

    Raises NotPositiveType when b is not a tree betweenness.
    """
    axioms = _betweenness_axiom_check(b)
    if not axioms:
        raise NotPositiveType(f"{axioms.reason}; witness {axioms.witness}")
    tree, witness = _try_realize(b, id_alloc)
    if tree is None:
        raise NotPositiveType(f"no tree realization; witness {witness}")
    return tree


# ---------------------------------------------------------------------------
# Labelled-tree canonical form and isomorphism
# ---------------------------------------------------------------------------


def _tree_centroids(tree: FiniteTree) -> List[int]:
    n = len(tree.labels)
    if n == 0:
        return []
    if n == 1:
        return list(tree.labels)
    deg = {v: tree.degree(v) for v in tree.labels}
    leaves = [v for v, d in deg.items() if d <= 1]
    removed = len(leaves)
    while removed < n:
        nxt = []
        for u in leaves:
            deg[u] = 0
            for w in tree.adj[u]:
                if deg[w] > 0:
                    deg[w] -= 1
                    if deg[w] == 1:
                        nxt.append(w)
        removed += len(nxt)
        leaves = nxt
    return sorted(leaves)


def _label_key(label) -> Tuple[int, str]:
    return (0, str(label)) if isinstance(label, int) else (1, str(label))


def _rooted_code(tree: FiniteTree, root: int, parent: Optional[int],
                 marks: Optional[Mapping[int, int]] = None) -> tuple:
    children = [w for w in tree.adj[root] if w != parent]
    subcodes = sorted(_rooted_code(tree, w, root, marks) for w in children)
    mark = marks.get(root, -1) if marks else -1
    return (_label_key(tree.labels[root]), mark, tuple(subcodes))


def canonical_code(tree: FiniteTree, marks: Optional[Mapping[int, int]] = None) -> tuple:
    """Rooted-at-centroid encoding, stable under relabelling of vertex ids.

    `marks` optionally assigns distinguishing integers to some vertices (used
    for counting orbits of ordered tuples).
    """
    if not tree.labels:
        return ()
    best = None
    for c in _tree_centroids(tree):
        code = _rooted_code(tree, c, None, marks)
        if best is None or code < best:
            best = code
    return best


def _match_rooted(t1: FiniteTree, r1: int, p1: Optional[int],
                  t2: FiniteTree, r2: int, p2: Optional[int],
                  out: Dict[int, int]) -> None:
    out[r1] = r2
    ch1 = sorted((w for w in t1.adj[r1] if w != p1), key=lambda w: (_rooted_code(t1, w, r1), w))
    ch2 = sorted((w for w in t2.adj[r2] if w != p2), key=lambda w: (_rooted_code(t2, w, r2), w))
    for a, b in zip(ch1, ch2):
        _match_rooted(t1, a, r1, t2, b, r2, out)


def iso_labeled(t1: FiniteTree, t2: FiniteTree) -> Optional[Dict[int, int]]:
    """A label- and adjacency-preserving vertex bijection, or None.

    Deterministic: the bijection is read off the canonical forms.
    """
    if len(t1.labels) != len(t2.labels):
        return None
    if canonical_code(t1) != canonical_code(t2):
        return None
    if not t1.labels:
        return {}
    cents1 = _tree_centroids(t1)
    cents2 = _tree_centroids(t2)
    root1 = min(cents1, key=lambda c: (_rooted_code(t1, c, None), c))
    code1 = _rooted_code(t1, root1, None)
    for c2 in cents2:
        if _rooted_code(t2, c2, None) == code1:
            mapping: Dict[int, int] = {}
            _match_rooted(t1, root1, None, t2, c2, None, mapping)
            return mapping
    return None


# ---------------------------------------------------------------------------
# The labelled hull tree of a finite point set
# ---------------------------------------------------------------------------


def labeled_tree_of(universe, f: Iterable[int]) -> FiniteTree:
    """The labelled tree spanned by a finite set of materialized points.

    Vertices are the members of f plus every branch vertex of their convex
    hull; hull vertices of degree two that are not members of f are smoothed
    away.  Labels record the order of each point in the ambient space.
    """
    pts = sorted(set(f))
    tree = universe.tree
    for v in pts:
        tree.check_vertex(v)
    if not pts:
        return FiniteTree({}, {})
    if len(pts) == 1:
        return FiniteTree({pts[0]: tree.labels[pts[0]]}, {pts[0]: []})
    hull = tree.hull(pts)
    deg = {v: 0 for v in hull}
    for v in hull:
        deg[v] = sum(1 for w in tree.adj[v] if w in hull)
    keep = {v for v in hull if v in pts or deg[v] >= 3}
    # walk hull edges, contracting suppressed degree-2 vertices
    adj: Dict[int, List[int]] = {v: [] for v in keep}
    seen_edges = set()
    for v in keep:
        for w in tree.adj[v]:
            if w not in hull:
                continue
            prev, cur = v, w
            while cur not in keep:
                nxt = [u for u in tree.adj[cur] if u in hull and u != prev]
                prev, cur = cur, nxt[0]
            key = (min(v, cur), max(v, cur))
            if key not in seen_edges:
                seen_edges.add(key)
                adj[v].append(cur)
                adj[cur].append(v)
    labels = {v: tree.labels[v] for v in keep}
    return FiniteTree(labels, adj)


# ---------------------------------------------------------------------------
# Orbit-type counting for ordered tuples of branch points
# ---------------------------------------------------------------------------


def _all_tree_shapes_upto(n: int) -> Dict[int, List[FiniteTree]]:
    """Unlabelled tree shapes on 1..n vertices, one per isomorphism class,
    generated by leaf additions and deduplicated by canonical code."""
    out: Dict[int, List[FiniteTree]] = {}
    shapes = [FiniteTree({0: INF}, {0: []})]
    out[1] = shapes
    for size in range(2, n + 1):
        seen = {}
        for base in out[size - 1]:
            for v in base.labels:
                t = base.copy()
                new = size - 1
                t.labels[new] = INF
                t.adj[new] = [v]
                t.adj[v] = t.adj[v] + [new]
                code = canonical_code(t)
                if code not in seen:
                    seen[code] = t
        out[size] = list(seen.values())
    return out


def count_orbit_types(k: int, order_set: Iterable, limit: int = 6) -> int:
    """Number of isomorphism classes of (labelled hull tree, ordered k-tuple)
    over distinct branch points whose orders lie in order_set.

    Equivalently: the number of orbits of the homeomorphism group on ordered
    k-tuples of distinct branch points.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if k > limit:
        raise LimitExceeded(f"k={k} above enumeration limit {limit}")
    orders = sorted(set(order_set), key=_label_key)
    for lab in orders:
        if not is_branch_label(lab):
            raise ValueError(f"{lab!r} is not a branch order")
    max_extra = max(0, k - 2)
    shapes_by_size = _all_tree_shapes_upto(k + max_extra)
    classes = set()
    from itertools import permutations, product as iproduct

    for size in range(k, k + max_extra + 1):
        for shape in shapes_by_size[size]:
            verts = sorted(shape.labels)
            for marked in permutations(verts, k):
                marked_set = set(marked)
                if any(shape.degree(v) < 3 for v in verts if v not in marked_set):
                    continue
                marks = {v: i for i, v in enumerate(marked)}
                for assignment in iproduct(orders, repeat=size):
                    labels = dict(zip(verts, assignment))
                    ok = True
                    for v in verts:
                        cap = degree_cap(labels[v])
                        if cap is not None and shape.degree(v) > cap:
                            ok = False
                            break
                    if not ok:
                        continue
                    t = FiniteTree(labels, {v: list(ws) for v, ws in shape.adj.items()})
                    classes.add(canonical_code(t, marks))
    return len(classes)
