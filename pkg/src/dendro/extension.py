"""Betweenness-preserving partial bijections of a universe and their
one-point extensions.

The extension step mirrors the "address" of a point relative to the current
domain: a point is either a known landmark, a median of landmarks, a point in
the gap between two hull-adjacent landmarks, or hangs off the hull beyond a
gate.  Each address shape has a canonical image built from fresh material, so
a partial isomorphism between finite substructures extends one point at a
time without ever contradicting an earlier answer.
"""
from __future__ import annotations

from itertools import combinations
from typing import Dict, Optional, Set, Tuple

from .errors import ConstructionFailed, InvalidSystem
from .universe import Universe


class PartialIso:
    """A label- and betweenness-preserving partial bijection on the points of
    one universe.  Mutating operations keep the validity invariant."""

    def __init__(self, u: Universe, pairs: Optional[Dict[int, int]] = None):
        self.u = u
        self.fwd: Dict[int, int] = {}
        self.bwd: Dict[int, int] = {}
        if pairs:
            for x, y in sorted(pairs.items()):
                self.define(x, y)

    # -- validity ----------------------------------------------------------------

    def pair_violation(self, x: int, y: int) -> Optional[tuple]:
        """Why x -> y cannot be added, or None if it can."""
        u = self.u
        if x in self.fwd and self.fwd[x] != y:
            return ("domain-collision", x)
        if y in self.bwd and self.bwd[y] != x:
            return ("image-collision", y)
        if x in self.fwd and self.fwd[x] == y:
            return None
        if u.label(x) != u.label(y):
            return ("label", x, y)
        dom = sorted(self.fwd)
        for a in dom:
            for b in dom:
                fa, fb = self.fwd[a], self.fwd[b]
                if u.between(x, a, b) != u.between(y, fa, fb):
                    return ("betweenness", x, a, b)
                if u.between(a, x, b) != u.between(fa, y, fb):
                    return ("betweenness", a, x, b)
        return None

    def valid_pair(self, x: int, y: int) -> bool:
        return self.pair_violation(x, y) is None

    def define(self, x: int, y: int) -> None:
        """Add x -> y, refusing anything that breaks the invariant."""
        if x in self.fwd and self.fwd[x] == y:
            return
        reason = self.pair_violation(x, y)
        if reason is not None:
            raise InvalidSystem(f"cannot map {x} to {y}: {reason}")
        self.fwd[x] = y
        self.bwd[y] = x

    def check_all(self) -> Optional[tuple]:
        """Full validity audit (labels and all betweenness triples)."""
        u = self.u
        dom = sorted(self.fwd)
        if len(set(self.fwd.values())) != len(dom):
            return ("not-injective",)
        for x in dom:
            if u.label(x) != u.label(self.fwd[x]):
                return ("label", x)
        for x, a, b in combinations(dom, 3):
            for z, p, q in ((x, a, b), (a, x, b), (b, a, x)):
                if u.between(z, p, q) != u.between(self.fwd[z], self.fwd[p], self.fwd[q]):
                    return ("betweenness", z, p, q)
        return None

    # -- canonical images for c-closure points --------------------------------------

    def _median_transport(self, h: int, src: Dict[int, int]) -> int:
        """Transport a median of src-landmarks across the map."""
        if h in src:
            return src[h]
        u = self.u
        for a, b, c in combinations(sorted(src), 3):
            if u.center(a, b, c) == h:
                return u.center(src[a], src[b], src[c])
        raise ConstructionFailed(f"{h} is not in the c-closure of the landmarks")

    def closure_image(self, p: int) -> int:
        """Image of a point of the c-closure of the domain."""
        return self._median_transport(p, self.fwd)

    def closure_preimage(self, q: int) -> int:
        return self._median_transport(q, self.bwd)

    # -- one-point extensions ----------------------------------------------------------

    def _gap_endpoints(self, closure: Set[int], gate: int) -> Tuple[int, int]:
        """The two closure points hull-adjacent around a gate strictly inside
        the hull, ordered by id."""
        u = self.u
        for a, b in combinations(sorted(closure), 2):
            if gate not in (a, b) and u.between(gate, a, b):
                if not any(c not in (a, b) and u.between(c, a, b) for c in closure):
                    return (a, b)
        raise ConstructionFailed(f"gate {gate} not inside any closure gap")

    def _mirror(self, p: int, src: Dict[int, int]) -> int:
        """Materialize the point mirroring p's address across src."""
        u = self.u
        landmarks = sorted(src)
        if not landmarks:
            return p  # no constraints yet: the identity is the canonical choice
        if p in src:
            return src[p]
        closure = u.c_closure(landmarks)
        gate = u.first_point_hull(landmarks, p)
        if gate in closure:
            if gate == p:
                return self._median_transport(p, src)
            anchor = self._median_transport(gate, src)
            return u.add_branch(anchor, u.label(p))
        a, b = self._gap_endpoints(closure, gate)
        ia, ib = self._median_transport(a, src), self._median_transport(b, src)
        mirrored_gate = u.add_between(ia, ib, u.label(gate))
        if gate == p:
            return mirrored_gate
        return u.add_branch(mirrored_gate, u.label(p))

    def extend_forward(self, p: int) -> int:
        """Image of p, materializing a canonical one if p is new."""
        if p in self.fwd:
            return self.fwd[p]
        q = self._mirror(p, self.fwd)
        self.define(p, q)
        return q

    def extend_backward(self, q: int) -> int:
        """Preimage of q, materializing a canonical one if q is new."""
        if q in self.bwd:
            return self.bwd[q]
        p = self._mirror(q, self.bwd)
        self.define(p, q)
        return p

    # -- helpers ------------------------------------------------------------------------

    def copy_onto(self, u: Universe) -> "PartialIso":
        out = PartialIso(u)
        out.fwd = dict(self.fwd)
        out.bwd = dict(self.bwd)
        return out

    def domain(self) -> Set[int]:
        return set(self.fwd)

    def image(self) -> Set[int]:
        return set(self.bwd)
