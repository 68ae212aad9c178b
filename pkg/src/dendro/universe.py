"""A lazily growing finite model of the branch points of a dendrite.

The universe is an explicit finite tree that only ever grows.  Growth happens
through two primitives: splitting an edge (arcwise density of each order) and
opening a new component at a vertex.  Components of a vertex are tracked as
"ports": the ordered slots of its adjacency list.  When an edge is split the
new midpoint inherits the slot, so a port is a stable name for one component
of the complement of the vertex, no matter how much is materialized later.

Ideal end points are registered intensionally: an end is a chain of vertices
marching into components that contain no other materialized point, extended
on demand.  The last chain vertex is always a valid proxy for the end in any
center computation against materialized points.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .errors import (
    LabelNotInS,
    NotCClosed,
    OrderExhausted,
    SamePoint,
    UnknownVertex,
)
from .median import END, INF, REGULAR, FiniteTree, degree_cap, is_branch_label, label_from_json

PointId = int
EndId = int


@dataclass(frozen=True)
class ComponentRef:
    """A component of (universe minus base): the port with index `port` at
    vertex `base`.  Stable under all later growth."""

    base: PointId
    port: int


class Universe:
    def __init__(self, order_set: Iterable = (INF,)):
        orders = frozenset(order_set)
        for lab in orders:
            if not is_branch_label(lab):
                raise ValueError(f"order set may only contain branch orders, got {lab!r}")
        self.order_set = orders
        self._labels: Dict[PointId, object] = {}
        self._ports: Dict[PointId, List[PointId]] = {}
        self._ends: Dict[EndId, List[PointId]] = {}
        self._next_point = 0
        self._next_end = 0
        self._log: List[tuple] = []

    # -- bookkeeping -----------------------------------------------------------

    def _fresh_point(self) -> PointId:
        v = self._next_point
        self._next_point += 1
        return v

    @property
    def tree(self) -> FiniteTree:
        return FiniteTree(self._labels, self._ports)

    def points(self) -> List[PointId]:
        return sorted(self._labels)

    def branch_points(self) -> List[PointId]:
        return [v for v in sorted(self._labels) if is_branch_label(self._labels[v])]

    def label(self, v: PointId) -> object:
        self.check_point(v)
        return self._labels[v]

    def check_point(self, v: PointId) -> None:
        if v not in self._labels:
            raise UnknownVertex(f"point {v!r} not materialized")

    def ends(self) -> List[EndId]:
        return sorted(self._ends)

    def degree(self, v: PointId) -> int:
        return len(self._ports[v])

    def _reserved(self, v: PointId) -> int:
        """Ports an end still needs to open at v (one per end parked there)."""
        return sum(1 for chain in self._ends.values() if chain[-1] == v)

    def clone(self) -> "Universe":
        out = Universe(self.order_set)
        out._labels = dict(self._labels)
        out._ports = {v: list(ps) for v, ps in self._ports.items()}
        out._ends = {e: list(c) for e, c in self._ends.items()}
        out._next_point = self._next_point
        out._next_end = self._next_end
        out._log = list(self._log)
        return out

    # -- growth primitives -------------------------------------------------------

    def _check_label(self, label, allow_non_branch: bool = True) -> None:
        if label in (REGULAR, END):
            if not allow_non_branch:
                raise LabelNotInS(f"label {label!r} not allowed here")
            return
        if label not in self.order_set:
            raise LabelNotInS(f"label {label!r} not in order set {sorted(map(str, self.order_set))}")

    def default_branch_label(self):
        if INF in self.order_set:
            return INF
        return max(self.order_set)

    def add_root(self, label=None) -> PointId:
        """Materialize the first point of an empty universe."""
        if self._labels:
            raise ValueError("universe already has points; use add_between/add_branch")
        if label is None:
            label = self.default_branch_label()
        self._check_label(label)
        v = self._fresh_point()
        self._labels[v] = label
        self._ports[v] = []
        self._log.append(("root", label))
        return v

    def add_between(self, x: PointId, y: PointId, label=None) -> PointId:
        """A new point strictly between x and y, splitting the edge nearest x.

        All previously answered betweenness queries keep their answers.
        """
        self.check_point(x)
        self.check_point(y)
        if x == y:
            raise SamePoint("need two distinct points")
        if label is None:
            label = self.default_branch_label()
        self._check_label(label)
        if label == END:
            raise LabelNotInS("an end point cannot lie between two points")
        path = self.tree.path(x, y)
        a, b = path[0], path[1]
        m = self._fresh_point()
        self._labels[m] = label
        self._ports[m] = [a, b]
        self._ports[a][self._ports[a].index(b)] = m
        self._ports[b][self._ports[b].index(a)] = m
        self._log.append(("between", x, y, label))
        return m

    def add_branch(self, x: PointId, label=None) -> PointId:
        """A new point adjacent to x in a fresh component of x."""
        return self._add_branch(x, label, reserved_discount=0)

    def _add_branch(self, x: PointId, label=None, reserved_discount: int = 0) -> PointId:
        self.check_point(x)
        if label is None:
            label = self.default_branch_label()
        self._check_label(label)
        cap = degree_cap(self._labels[x])
        reserved = max(0, self._reserved(x) - reserved_discount)
        if cap is not None and self.degree(x) + reserved + 1 > cap:
            raise OrderExhausted(
                f"point {x} of order {self._labels[x]!r} cannot open another component")
        v = self._fresh_point()
        self._labels[v] = label
        self._ports[v] = [x]
        self._ports[x].append(v)
        self._log.append(("branch", x, label))
        return v

    # -- ends ----------------------------------------------------------------------

    def new_end(self, anchor: PointId, port: Optional[int] = None) -> EndId:
        """Register an ideal end beyond `anchor`.

        With `port` given the end lies in that existing component; otherwise
        it reserves a fresh component of the anchor.
        """
        self.check_point(anchor)
        e = self._next_end
        self._next_end += 1
        if port is None:
            cap = degree_cap(self._labels[anchor])
            if cap is not None and self.degree(anchor) + self._reserved(anchor) + 1 > cap:
                raise OrderExhausted(f"no free component at {anchor} for a new end")
            self._ends[e] = [anchor]
            self._log.append(("end", anchor, None))
        else:
            if port >= self.degree(anchor):
                raise UnknownVertex(f"anchor {anchor} has no port {port}")
            nxt = self._ports[anchor][port]
            self._ends[e] = [anchor, nxt]
            self._log.append(("end", anchor, port))
        return e

    def check_end(self, e: EndId) -> None:
        if e not in self._ends:
            raise UnknownVertex(f"end {e!r} not registered")

    def end_chain(self, e: EndId) -> List[PointId]:
        self.check_end(e)
        return list(self._ends[e])

    def end_proxy(self, e: EndId) -> PointId:
        """A materialized vertex such that the end lies strictly beyond it,
        in a direction containing no other materialized point."""
        self.check_end(e)
        return self._ends[e][-1]

    def deepen_end(self, e: EndId) -> PointId:
        """Materialize one more vertex of the end's chain and return it."""
        self.check_end(e)
        chain = self._ends[e]
        last = chain[-1]
        v = self._add_branch(last, self.default_branch_label(), reserved_discount=1)
        self._log[-1] = ("deepen", e)
        chain.append(v)
        return v

    def end_anchor(self, e: EndId) -> PointId:
        self.check_end(e)
        return self._ends[e][0]

    # -- queries ----------------------------------------------------------------------

    def path(self, x: PointId, y: PointId) -> List[PointId]:
        return self.tree.path(x, y)

    def between(self, z: PointId, x: PointId, y: PointId) -> bool:
        return self.tree.between(z, x, y)

    def center(self, x: PointId, y: PointId, z: PointId) -> PointId:
        return self.tree.center(x, y, z)

    def c_closure(self, pts: Iterable[PointId]) -> Set[PointId]:
        return self.tree.c_closure(pts)

    def is_c_closed(self, pts: Iterable[PointId]) -> bool:
        return self.tree.is_c_closed(pts)

    def meet(self, a: PointId, b: PointId, xi: EndId) -> PointId:
        """The meet of a and b in the order "toward the end xi": the center
        of a, b and any sufficiently deep proxy for xi.

        The proxy of the chain works unconditionally because every path from
        the ideal end to a materialized point passes through it.
        """
        self.check_point(a)
        self.check_point(b)
        proxy = self.end_proxy(xi)
        return self.center(a, b, proxy)

    def first_point(self, sub: Iterable[PointId], x: PointId) -> PointId:
        """The first-point retraction of x onto the convex hull of sub."""
        pts = set(sub)
        if not pts:
            raise NotCClosed("empty set has no hull")
        for v in pts:
            self.check_point(v)
        if not self.is_c_closed(pts):
            raise NotCClosed(f"{sorted(pts)} is not c-closed")
        self.check_point(x)
        hull = self.tree.hull(pts)
        if x in hull:
            return x
        # walk from x until the hull is hit
        path = self.path(x, next(iter(pts)))
        for v in path:
            if v in hull:
                return v
        raise AssertionError("unreachable: hull intersects any path into it")

    def first_point_hull(self, hull_pts: Iterable[PointId], x: PointId) -> PointId:
        """First-point retraction onto the hull of an arbitrary finite set."""
        pts = list(hull_pts)
        hull = self.tree.hull(pts)
        if x in hull:
            return x
        for v in self.path(x, pts[0]):
            if v in hull:
                return v
        raise AssertionError("unreachable")

    def port_toward(self, b: PointId, x: PointId) -> int:
        """Index of the port of b whose component contains x."""
        self.check_point(b)
        self.check_point(x)
        if b == x:
            raise SamePoint("a point does not lie in a component of itself")
        nxt = self.path(b, x)[1]
        return self._ports[b].index(nxt)

    def component_of(self, b: PointId, x: Union[PointId, Tuple[str, EndId]]) -> ComponentRef:
        """Stable reference to the component of b containing x (a point id or
        ("end", e))."""
        self.check_point(b)
        if isinstance(x, tuple) and x[0] == "end":
            e = x[1]
            self.check_end(e)
            chain = self._ends[e]
            if chain[-1] == b:
                self.deepen_end(e)
                chain = self._ends[e]
            # the end lies beyond the last chain vertex
            target = chain[chain.index(b) + 1] if b in chain else chain[-1]
            return ComponentRef(b, self.port_toward(b, target))
        return ComponentRef(b, self.port_toward(b, x))

    def same_component(self, b: PointId, x: PointId, y: PointId) -> bool:
        """Whether x and y lie in the same component of the complement of b."""
        return self.port_toward(b, x) == self.port_toward(b, y)

    def component_members(self, ref: ComponentRef) -> Set[PointId]:
        """Currently materialized points inside the component."""
        self.check_point(ref.base)
        if ref.port >= self.degree(ref.base):
            return set()
        start = self._ports[ref.base][ref.port]
        out = set()
        stack = [(start, ref.base)]
        while stack:
            v, parent = stack.pop()
            out.add(v)
            for w in self._ports[v]:
                if w != parent:
                    stack.append((w, v))
        return out

    def components_at(self, b: PointId) -> List[ComponentRef]:
        self.check_point(b)
        return [ComponentRef(b, i) for i in range(self.degree(b))]

    def components_at_excluding_end(self, b: PointId, xi: EndId) -> List[ComponentRef]:
        """Components of b other than the one containing the end xi."""
        away = self.component_of(b, ("end", xi))
        return [r for r in self.components_at(b) if r.port != away.port]

    # -- serialization -----------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "order_set": sorted((str(x) if x == INF else x) for x in self.order_set),
            "tree": self.tree.to_json(),
            "ends": [{"id": e, "chain": chain} for e, chain in sorted(self._ends.items())],
            "next_point": self._next_point,
            "next_end": self._next_end,
        }

    @staticmethod
    def from_json(data: dict) -> "Universe":
        orders = [label_from_json(x) for x in data["order_set"]]
        u = Universe(orders)
        tree = FiniteTree.from_json(data["tree"])
        u._labels = dict(tree.labels)
        u._ports = {v: list(ns) for v, ns in tree.adj.items()}
        u._ends = {entry["id"]: list(entry["chain"]) for entry in data["ends"]}
        u._next_point = data["next_point"]
        u._next_end = data["next_end"]
        return u

    def replay_script(self) -> List[tuple]:
        return list(self._log)

    @staticmethod
    def replay(order_set: Iterable, script: Iterable[Sequence]) -> "Universe":
        """Re-run a growth script; deterministic given the script."""
        u = Universe(order_set)
        for entry in script:
            op, args = entry[0], entry[1:]
            if op == "root":
                u.add_root(args[0])
            elif op == "between":
                u.add_between(args[0], args[1], args[2])
            elif op == "branch":
                u.add_branch(args[0], args[1])
            elif op == "end":
                u.new_end(args[0], args[1])
            elif op == "deepen":
                u.deepen_end(args[0])
            else:
                raise ValueError(f"unknown op {op!r}")
        return u
